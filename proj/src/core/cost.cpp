#include "cesa/cost.hpp"

namespace cesa {

namespace {

using namespace unit_gate;

unsigned levels(const AdderConfig& config)
{
    const unsigned n = config.width();
    const unsigned k = config.block_size();
    // A single block has no estimated carry on its path: plain ripple.
    if (config.variant() == Variant::Exact || config.block_count() == 1) {
        return kFullAdderCarryLevels * n;
    }
    const unsigned estimate = config.variant() == Variant::Cesa ? kCeuLevels : kCeuLevels + kSelectLevels;
    return estimate + kFullAdderCarryLevels * k;
}

std::uint64_t gates(const AdderConfig& config)
{
    const std::uint64_t adders = std::uint64_t{kFullAdderGates} * config.width();
    const std::uint64_t estimators = config.block_count() - 1;
    switch (config.variant()) {
    case Variant::Exact:
        return adders;
    case Variant::Cesa:
        return adders + estimators * kCeuGates;
    case Variant::CesaPerl:
        return adders + estimators * (kCeuGates + kPerlGates + kSuGates + kMuxGates);
    }
    return adders;
}

} // namespace

CostEstimate delay_estimate(const AdderConfig& config) { return {config, levels(config), gates(config)}; }

CostEstimate area_estimate(const AdderConfig& config) { return {config, levels(config), gates(config)}; }

double delay_reduction_vs_ripple(const AdderConfig& config)
{
    const auto ripple = static_cast<double>(kFullAdderCarryLevels * config.width());
    return 1.0 - static_cast<double>(levels(config)) / ripple;
}

} // namespace cesa
