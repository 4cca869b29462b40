#pragma once

#include <cstdint>
#include <vector>

#include "cesa/adder.hpp"

namespace cesa {

enum class EvalMode { Exhaustive, MonteCarlo };

std::string_view to_string(EvalMode mode) noexcept;
EvalMode parse_eval_mode(std::string_view text);

/// Widest operand size evaluated exhaustively without an explicit override.
inline constexpr unsigned kDefaultExhaustiveCap = 12;
/// 2^32 operand pairs; anything above is impractical.
inline constexpr unsigned kMaxExhaustiveWidth = 16;
inline constexpr std::uint32_t kDefaultRuns = 12;
inline constexpr std::uint64_t kDefaultSamples = 1'000'000;

struct ErrorReport {
    AdderConfig config;
    double er = 0.0;   ///< fraction of operand pairs with a non-zero error distance
    double med = 0.0;  ///< mean |approx - exact| in units of the sum
    double mred = 0.0; ///< mean |approx - exact| / exact
    std::uint64_t sample_count = 0; ///< pairs per run
    std::uint32_t run_count = 1;
    std::uint64_t seed = 0;
    EvalMode mode = EvalMode::Exhaustive;
};

/// Estimated-vs-true carry comparison at the inner block boundaries.
struct BoundaryStats {
    AdderConfig config;
    std::vector<double> per_boundary_mismatch; ///< one entry per inner boundary
    double overall_mismatch = 0.0;
    double sel_active_fraction = 0.0;
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
    EvalMode mode = EvalMode::Exhaustive;
};

/// |extended(approx) - extended(exact)|
Wide error_distance(const AddResult& approx, const AddResult& exact);

/// error_distance / extended(exact); 0 when the exact sum is 0.
double relative_error_distance(const AddResult& approx, const AddResult& exact);

/// Sub-seed of run `run`; independent of how runs are scheduled.
std::uint64_t derive_run_seed(std::uint64_t seed, std::uint32_t run) noexcept;

/// All 2^(2n) operand pairs. Throws RangeError above `width_cap`.
ErrorReport evaluate_exhaustive(const AdderConfig& config, unsigned width_cap = kDefaultExhaustiveCap);

/// Uniform operands, `samples` pairs per run, metrics averaged over `runs`.
ErrorReport evaluate_monte_carlo(const AdderConfig& config, std::uint64_t samples, std::uint32_t runs,
                                 std::uint64_t seed);

BoundaryStats boundary_mismatch_exhaustive(const AdderConfig& config, unsigned width_cap = kDefaultExhaustiveCap);

BoundaryStats boundary_mismatch_stats(const AdderConfig& config, std::uint64_t samples, std::uint64_t seed);

} // namespace cesa
