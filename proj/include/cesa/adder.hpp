#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cesa {

/// Unsigned integer wide enough for an (n+1)-bit extended sum at n = 64.
__extension__ typedef unsigned __int128 Wide;

inline constexpr unsigned kMaxWidth = 64;
inline constexpr unsigned kMinCesaBlock = 2;
inline constexpr unsigned kMinCesaPerlBlock = 4;

enum class Variant { Exact, Cesa, CesaPerl };

std::string_view to_string(Variant v) noexcept;

/// Accepts "exact", "cesa", "cesa-perl" (also "cesa_perl", "cesaperl").
Variant parse_variant(std::string_view text);

/// Width, block size and variant of an adder. Always valid once constructed.
///
/// The operands are cut into width/block_size little-endian blocks; block 0
/// holds bits 0..k-1. The Exact variant does not use the block size for
/// arithmetic, only to lay out the diagnostic boundary carries; a block size
/// of 0 means "one block spanning the full width".
class AdderConfig {
public:
    AdderConfig(unsigned width, unsigned block_size, Variant variant);

    /// Reason the triple is invalid, or nullopt if it is valid.
    static std::optional<std::string> validate(unsigned width, unsigned block_size, Variant variant);

    /// Parses "width:block:variant", e.g. "32:8:cesa-perl".
    static AdderConfig parse(std::string_view text);

    unsigned width() const noexcept { return width_; }
    unsigned block_size() const noexcept { return block_size_; }
    Variant variant() const noexcept { return variant_; }
    unsigned block_count() const noexcept { return width_ / block_size_; }
    std::uint64_t mask() const noexcept;

    /// "width:block:variant"
    std::string to_string() const;

    friend bool operator==(const AdderConfig&, const AdderConfig&) = default;

private:
    unsigned width_;
    unsigned block_size_;
    Variant variant_;
};

/// An n-bit unsigned operand.
class Word {
public:
    Word(std::uint64_t value, unsigned width);

    std::uint64_t value() const noexcept { return value_; }
    unsigned width() const noexcept { return width_; }

    friend bool operator==(const Word&, const Word&) = default;

private:
    std::uint64_t value_;
    unsigned width_;
};

struct BlockOperands {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    unsigned block_index = 0;
};

struct CarrySignals {
    bool c_ceu = false;
    std::optional<bool> c_perl; ///< only evaluated for CesaPerl
    bool sel = false;           ///< CEU/PERL selector; informational for Cesa
    bool c_out = false;
};

struct BlockSum {
    std::uint64_t sum = 0;
    bool carry_out = false;
};

/// Result of one addition.
///
/// Boundary i sits at bit position (i+1)*k; the last boundary is the
/// carry-out. For approximate variants the inner boundaries hold the
/// estimated carries fed to the next block.
class AddResult {
public:
    AddResult(Word sum, bool carry_out, unsigned boundary_count, std::uint64_t boundary_bits);

    const Word& sum() const noexcept { return sum_; }
    bool carry_out() const noexcept { return carry_out_; }
    unsigned boundary_count() const noexcept { return boundary_count_; }
    bool boundary_carry(unsigned i) const noexcept { return (boundary_bits_ >> i) & 1U; }
    std::uint64_t boundary_bits() const noexcept { return boundary_bits_; }
    std::vector<bool> boundary_carries() const;

    /// sum + carry_out * 2^n
    Wide extended_value() const noexcept
    {
        return static_cast<Wide>(sum_.value()) + (static_cast<Wide>(carry_out_) << sum_.width());
    }

    friend bool operator==(const AddResult&, const AddResult&) = default;

private:
    Word sum_;
    bool carry_out_;
    unsigned boundary_count_;
    std::uint64_t boundary_bits_;
};

// Carry estimation logic on the two bit pairs (hi, lo) at adjacent positions.
constexpr bool ceu(bool a_hi, bool b_hi, bool a_lo, bool b_lo) noexcept
{
    return (a_hi && b_hi) || (a_lo && b_lo && (a_hi || b_hi));
}

/// Same gate structure as ceu(), fed with the pairs at k-3 and k-4.
constexpr bool perl(bool a_hi, bool b_hi, bool a_lo, bool b_lo) noexcept
{
    return ceu(a_hi, b_hi, a_lo, b_lo);
}

/// 1 when both pairs propagate, i.e. ceu() cannot decide locally.
constexpr bool su(bool a_hi, bool b_hi, bool a_lo, bool b_lo) noexcept
{
    return (a_hi != b_hi) && (a_lo != b_lo);
}

constexpr bool bit_at(std::uint64_t x, unsigned i) noexcept { return (x >> i) & 1U; }

/// Carry-out estimate of one block from its own input bits only.
CarrySignals estimate_block_carry(const BlockOperands& block, const AdderConfig& config);

/// Exact k-bit ripple addition of one block.
BlockSum block_sum(std::uint64_t a, std::uint64_t b, bool carry_in, unsigned k);

AddResult add_approx(const Word& a, const Word& b, const AdderConfig& config);

/// Ripple-carry reference; one boundary (the carry-out).
AddResult add_exact(const Word& a, const Word& b);

/// Ripple-carry reference with true carries recorded at the config's block boundaries.
AddResult add_exact(const Word& a, const Word& b, const AdderConfig& config);

/// Dispatches on config.variant().
AddResult add(const Word& a, const Word& b, const AdderConfig& config);

/// Convenience for hot loops where operands are already known to be in range.
inline AddResult add(std::uint64_t a, std::uint64_t b, const AdderConfig& config)
{
    return add(Word{a, config.width()}, Word{b, config.width()}, config);
}

} // namespace cesa
