#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cesa {

inline constexpr unsigned kMaxVerifyWidth = 12;

struct InvariantOutcome {
    std::string name;
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
    std::optional<std::string> counterexample; ///< first violation found, with operands and config

    bool passed() const noexcept { return violations == 0; }
};

struct VerifyReport {
    unsigned width = 0;
    std::vector<InvariantOutcome> invariants;
    std::optional<double> sel_active_fraction_k4; ///< set when (width, 4) has an inner boundary

    bool passed() const noexcept;
};

/// Exhaustively checks every adder and error-metric invariant at `width`
/// for all valid block sizes of both approximate variants.
/// Throws RangeError when width is outside 2..12.
VerifyReport run_verify(unsigned width);

/// One line per invariant plus a summary line.
std::string render_verify(const VerifyReport& report);

} // namespace cesa
