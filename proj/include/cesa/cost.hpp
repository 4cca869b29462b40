#pragma once

#include <cstdint>

#include "cesa/adder.hpp"

namespace cesa {

/// Unit-gate cost: every 2-input gate (XOR included) is one delay level and one area unit.
struct CostEstimate {
    AdderConfig config;
    unsigned critical_path_levels = 0;
    std::uint64_t gate_count = 0;
};

namespace unit_gate {
inline constexpr unsigned kFullAdderCarryLevels = 2;
inline constexpr unsigned kFullAdderGates = 5;
inline constexpr unsigned kCeuLevels = 2;
inline constexpr unsigned kSelectLevels = 2;
inline constexpr unsigned kCeuGates = 4;
inline constexpr unsigned kPerlGates = 4;
inline constexpr unsigned kSuGates = 3;
inline constexpr unsigned kMuxGates = 3;
} // namespace unit_gate

/// Critical path in unit-gate levels. gate_count is filled in as well.
CostEstimate delay_estimate(const AdderConfig& config);

/// Gate count. critical_path_levels is filled in as well.
CostEstimate area_estimate(const AdderConfig& config);

/// 1 - delay(config) / delay(ripple-carry of the same width)
double delay_reduction_vs_ripple(const AdderConfig& config);

} // namespace cesa
