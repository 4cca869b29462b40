#include "cesa/metrics.hpp"

#include <random>
#include <string>

#include "cesa/error.hpp"
#include "parallel.hpp"

namespace cesa {

namespace {

struct Tally {
    std::uint64_t samples = 0;
    std::uint64_t errors = 0;
    Wide distance_sum = 0;
    double relative_sum = 0.0;

    void add(const AddResult& approx, const AddResult& exact)
    {
        ++samples;
        const Wide d = error_distance(approx, exact);
        if (d != 0) {
            ++errors;
            distance_sum += d;
            relative_sum += relative_error_distance(approx, exact);
        }
    }

    void merge(const Tally& other)
    {
        samples += other.samples;
        errors += other.errors;
        distance_sum += other.distance_sum;
        relative_sum += other.relative_sum;
    }
};

struct BoundaryTally {
    std::vector<std::uint64_t> mismatches;
    std::uint64_t sel_active = 0;
    std::uint64_t samples = 0;

    explicit BoundaryTally(unsigned inner) : mismatches(inner, 0) {}

    void add(std::uint64_t a, std::uint64_t b, const AdderConfig& config)
    {
        ++samples;
        const auto approx = add_approx(Word{a, config.width()}, Word{b, config.width()}, config);
        const auto exact = add_exact(Word{a, config.width()}, Word{b, config.width()}, config);
        const unsigned k = config.block_size();
        for (unsigned i = 0; i < mismatches.size(); ++i) {
            if (approx.boundary_carry(i) != exact.boundary_carry(i)) {
                ++mismatches[i];
            }
            const unsigned top = (i + 1) * k - 1;
            if (su(bit_at(a, top), bit_at(b, top), bit_at(a, top - 1), bit_at(b, top - 1))) {
                ++sel_active;
            }
        }
    }

    void merge(const BoundaryTally& other)
    {
        samples += other.samples;
        sel_active += other.sel_active;
        for (std::size_t i = 0; i < mismatches.size(); ++i) {
            mismatches[i] += other.mismatches[i];
        }
    }
};

void check_exhaustive_width(const AdderConfig& config, unsigned width_cap)
{
    const unsigned cap = std::min(width_cap, kMaxExhaustiveWidth);
    if (config.width() > cap) {
        throw RangeError("exhaustive evaluation of width " + std::to_string(config.width()) +
                         " exceeds the cap of " + std::to_string(cap) + " bits");
    }
}

unsigned inner_boundaries(const AdderConfig& config) { return config.block_count() - 1; }

BoundaryStats finish(const AdderConfig& config, const BoundaryTally& tally, std::uint64_t seed, EvalMode mode)
{
    BoundaryStats out{config, {}, 0.0, 0.0, tally.samples, seed, mode};
    const auto inner = tally.mismatches.size();
    if (inner == 0 || tally.samples == 0) {
        return out;
    }
    std::uint64_t total = 0;
    for (auto m : tally.mismatches) {
        out.per_boundary_mismatch.push_back(static_cast<double>(m) / static_cast<double>(tally.samples));
        total += m;
    }
    const auto slots = static_cast<double>(tally.samples) * static_cast<double>(inner);
    out.overall_mismatch = static_cast<double>(total) / slots;
    out.sel_active_fraction = static_cast<double>(tally.sel_active) / slots;
    return out;
}

} // namespace

std::string_view to_string(EvalMode mode) noexcept
{
    return mode == EvalMode::Exhaustive ? "Exhaustive" : "MonteCarlo";
}

EvalMode parse_eval_mode(std::string_view text)
{
    if (text == "exhaustive" || text == "Exhaustive") {
        return EvalMode::Exhaustive;
    }
    if (text == "monte-carlo" || text == "montecarlo" || text == "MonteCarlo" || text == "mc") {
        return EvalMode::MonteCarlo;
    }
    throw ConfigError("unknown evaluation mode '" + std::string(text) + "' (expected exhaustive or monte-carlo)");
}

Wide error_distance(const AddResult& approx, const AddResult& exact)
{
    const Wide x = approx.extended_value();
    const Wide y = exact.extended_value();
    return x > y ? x - y : y - x;
}

double relative_error_distance(const AddResult& approx, const AddResult& exact)
{
    const Wide denominator = exact.extended_value();
    if (denominator == 0) {
        return 0.0;
    }
    return static_cast<double>(error_distance(approx, exact)) / static_cast<double>(denominator);
}

std::uint64_t derive_run_seed(std::uint64_t seed, std::uint32_t run) noexcept
{
    // splitmix64 finalizer over (seed, run)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(run) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ErrorReport evaluate_exhaustive(const AdderConfig& config, unsigned width_cap)
{
    check_exhaustive_width(config, width_cap);
    const std::uint64_t span = std::uint64_t{1} << config.width();
    std::vector<Tally> rows(span);
    detail::parallel_for(span, [&](std::size_t a) {
        Tally t;
        const Word wa{a, config.width()};
        for (std::uint64_t b = 0; b < span; ++b) {
            const Word wb{b, config.width()};
            t.add(add(wa, wb, config), add_exact(wa, wb));
        }
        rows[a] = t;
    });
    Tally total;
    for (const auto& r : rows) {
        total.merge(r);
    }
    const auto n = static_cast<double>(total.samples);
    return ErrorReport{config,
                       static_cast<double>(total.errors) / n,
                       static_cast<double>(total.distance_sum) / n,
                       total.relative_sum / n,
                       total.samples,
                       1,
                       0,
                       EvalMode::Exhaustive};
}

ErrorReport evaluate_monte_carlo(const AdderConfig& config, std::uint64_t samples, std::uint32_t runs,
                                 std::uint64_t seed)
{
    if (samples == 0 || runs == 0) {
        throw RangeError("monte carlo evaluation needs samples >= 1 and runs >= 1");
    }
    std::vector<Tally> per_run(runs);
    detail::parallel_for(runs, [&](std::size_t r) {
        std::mt19937_64 rng(derive_run_seed(seed, static_cast<std::uint32_t>(r)));
        Tally t;
        for (std::uint64_t s = 0; s < samples; ++s) {
            const Word a{rng() & config.mask(), config.width()};
            const Word b{rng() & config.mask(), config.width()};
            t.add(add(a, b, config), add_exact(a, b));
        }
        per_run[r] = t;
    });
    double er = 0.0;
    double med = 0.0;
    double mred = 0.0;
    for (const auto& t : per_run) {
        const auto n = static_cast<double>(t.samples);
        er += static_cast<double>(t.errors) / n;
        med += static_cast<double>(t.distance_sum) / n;
        mred += t.relative_sum / n;
    }
    const auto r = static_cast<double>(runs);
    return ErrorReport{config, er / r, med / r, mred / r, samples, runs, seed, EvalMode::MonteCarlo};
}

BoundaryStats boundary_mismatch_exhaustive(const AdderConfig& config, unsigned width_cap)
{
    if (config.variant() == Variant::Exact) {
        throw ConfigError("boundary statistics need an approximate variant");
    }
    check_exhaustive_width(config, width_cap);
    const unsigned inner = inner_boundaries(config);
    const std::uint64_t span = std::uint64_t{1} << config.width();
    std::vector<BoundaryTally> rows(span, BoundaryTally(inner));
    detail::parallel_for(span, [&](std::size_t a) {
        for (std::uint64_t b = 0; b < span; ++b) {
            rows[a].add(a, b, config);
        }
    });
    BoundaryTally total(inner);
    for (const auto& r : rows) {
        total.merge(r);
    }
    return finish(config, total, 0, EvalMode::Exhaustive);
}

BoundaryStats boundary_mismatch_stats(const AdderConfig& config, std::uint64_t samples, std::uint64_t seed)
{
    if (config.variant() == Variant::Exact) {
        throw ConfigError("boundary statistics need an approximate variant");
    }
    if (samples == 0) {
        throw RangeError("boundary statistics need samples >= 1");
    }
    std::mt19937_64 rng(derive_run_seed(seed, 0));
    BoundaryTally tally(inner_boundaries(config));
    for (std::uint64_t s = 0; s < samples; ++s) {
        const auto a = rng() & config.mask();
        const auto b = rng() & config.mask();
        tally.add(a, b, config);
    }
    return finish(config, tally, seed, EvalMode::MonteCarlo);
}

} // namespace cesa
