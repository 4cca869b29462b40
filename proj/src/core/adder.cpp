#include "cesa/adder.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "cesa/error.hpp"

namespace cesa {

namespace {

std::uint64_t low_mask(unsigned bits) noexcept
{
    return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

unsigned parse_unsigned(std::string_view field, std::string_view what, std::string_view whole)
{
    unsigned value = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        throw ConfigError("config '" + std::string(whole) + "': " + std::string(what) + " '" +
                          std::string(field) + "' is not an unsigned integer");
    }
    return value;
}

} // namespace

std::string_view to_string(Variant v) noexcept
{
    switch (v) {
    case Variant::Exact: return "exact";
    case Variant::Cesa: return "cesa";
    case Variant::CesaPerl: return "cesa-perl";
    }
    return "unknown";
}

Variant parse_variant(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "exact" || lower == "rca") {
        return Variant::Exact;
    }
    if (lower == "cesa") {
        return Variant::Cesa;
    }
    if (lower == "cesa-perl" || lower == "cesa_perl" || lower == "cesaperl") {
        return Variant::CesaPerl;
    }
    throw ConfigError("unknown variant '" + std::string(text) + "' (expected exact, cesa or cesa-perl)");
}

std::optional<std::string> AdderConfig::validate(unsigned width, unsigned block_size, Variant variant)
{
    if (width < 2 || width > kMaxWidth) {
        return "width " + std::to_string(width) + " outside 2..64";
    }
    if (variant == Variant::Exact && block_size == 0) {
        return std::nullopt;
    }
    if (block_size == 0 || block_size > width) {
        return "block size " + std::to_string(block_size) + " outside 1.." + std::to_string(width);
    }
    if (width % block_size != 0) {
        return "block size " + std::to_string(block_size) + " does not divide width " + std::to_string(width);
    }
    if (variant == Variant::Cesa && block_size < kMinCesaBlock) {
        return "block size below minimum " + std::to_string(kMinCesaBlock);
    }
    if (variant == Variant::CesaPerl && block_size < kMinCesaPerlBlock) {
        return "block size below minimum " + std::to_string(kMinCesaPerlBlock);
    }
    return std::nullopt;
}

AdderConfig::AdderConfig(unsigned width, unsigned block_size, Variant variant)
    : width_(width), block_size_(block_size == 0 && variant == Variant::Exact ? width : block_size),
      variant_(variant)
{
    if (auto reason = validate(width, block_size, variant)) {
        throw ConfigError(std::string(cesa::to_string(variant)) + " config (" + std::to_string(width) + ", " +
                          std::to_string(block_size) + "): " + *reason);
    }
}

AdderConfig AdderConfig::parse(std::string_view text)
{
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        throw ConfigError("config '" + std::string(text) + "' must look like width:block:variant");
    }
    const auto width = parse_unsigned(text.substr(0, first), "width", text);
    const auto block = parse_unsigned(text.substr(first + 1, second - first - 1), "block", text);
    return AdderConfig(width, block, parse_variant(text.substr(second + 1)));
}

std::uint64_t AdderConfig::mask() const noexcept { return low_mask(width_); }

std::string AdderConfig::to_string() const
{
    return std::to_string(width_) + ":" + std::to_string(block_size_) + ":" + std::string(cesa::to_string(variant_));
}

Word::Word(std::uint64_t value, unsigned width) : value_(value), width_(width)
{
    if (width == 0 || width > kMaxWidth) {
        throw RangeError("word width " + std::to_string(width) + " outside 1..64");
    }
    if ((value & ~low_mask(width)) != 0) {
        throw RangeError("operand " + std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
    }
}

AddResult::AddResult(Word sum, bool carry_out, unsigned boundary_count, std::uint64_t boundary_bits)
    : sum_(sum), carry_out_(carry_out), boundary_count_(boundary_count), boundary_bits_(boundary_bits)
{
}

std::vector<bool> AddResult::boundary_carries() const
{
    std::vector<bool> out(boundary_count_);
    for (unsigned i = 0; i < boundary_count_; ++i) {
        out[i] = boundary_carry(i);
    }
    return out;
}

CarrySignals estimate_block_carry(const BlockOperands& block, const AdderConfig& config)
{
    const unsigned k = config.block_size();
    switch (config.variant()) {
    case Variant::Exact:
        throw ConfigError("carry estimation is undefined for the exact variant");
    case Variant::Cesa:
        if (k < kMinCesaBlock) {
            throw ConfigError("cesa needs block size >= 2");
        }
        break;
    case Variant::CesaPerl:
        if (k < kMinCesaPerlBlock) {
            throw ConfigError("cesa-perl needs block size >= 4");
        }
        break;
    }

    const auto a = block.a;
    const auto b = block.b;
    CarrySignals s;
    s.c_ceu = ceu(bit_at(a, k - 1), bit_at(b, k - 1), bit_at(a, k - 2), bit_at(b, k - 2));
    s.sel = su(bit_at(a, k - 1), bit_at(b, k - 1), bit_at(a, k - 2), bit_at(b, k - 2));
    if (config.variant() == Variant::CesaPerl) {
        s.c_perl = perl(bit_at(a, k - 3), bit_at(b, k - 3), bit_at(a, k - 4), bit_at(b, k - 4));
        s.c_out = s.sel ? *s.c_perl : s.c_ceu;
    } else {
        s.c_out = s.c_ceu;
    }
    return s;
}

BlockSum block_sum(std::uint64_t a, std::uint64_t b, bool carry_in, unsigned k)
{
    const Wide total = static_cast<Wide>(a) + b + (carry_in ? 1 : 0);
    return {static_cast<std::uint64_t>(total) & low_mask(k), static_cast<bool>((total >> k) & 1U)};
}

AddResult add_approx(const Word& a, const Word& b, const AdderConfig& config)
{
    if (config.variant() == Variant::Exact) {
        return add_exact(a, b, config);
    }
    if (a.width() != config.width() || b.width() != config.width()) {
        throw RangeError("operand width does not match adder width " + std::to_string(config.width()));
    }

    const unsigned k = config.block_size();
    const unsigned blocks = config.block_count();
    const auto block_mask = low_mask(k);

    std::uint64_t sum = 0;
    std::uint64_t boundaries = 0;
    bool carry = false;
    for (unsigned i = 0; i < blocks; ++i) {
        const unsigned shift = i * k;
        const BlockOperands ops{(a.value() >> shift) & block_mask, (b.value() >> shift) & block_mask, i};
        const auto partial = block_sum(ops.a, ops.b, carry, k);
        sum |= partial.sum << shift;
        // Only the inner boundaries feed a successor block; the last block keeps its ripple carry.
        carry = i + 1 < blocks ? estimate_block_carry(ops, config).c_out : partial.carry_out;
        boundaries |= static_cast<std::uint64_t>(carry) << i;
    }
    return AddResult(Word{sum, config.width()}, carry, blocks, boundaries);
}

AddResult add_exact(const Word& a, const Word& b)
{
    return add_exact(a, b, AdderConfig(a.width(), 0, Variant::Exact));
}

AddResult add_exact(const Word& a, const Word& b, const AdderConfig& config)
{
    const unsigned n = config.width();
    if (a.width() != n || b.width() != n) {
        throw RangeError("operand width does not match adder width " + std::to_string(n));
    }
    const Wide total = static_cast<Wide>(a.value()) + b.value();
    // Carry into bit p of a ripple adder is bit p of (a + b) ^ a ^ b.
    const Wide carries = total ^ a.value() ^ b.value();
    const unsigned k = config.block_size();
    const unsigned blocks = config.block_count();
    std::uint64_t boundaries = 0;
    for (unsigned i = 0; i < blocks; ++i) {
        boundaries |= static_cast<std::uint64_t>((carries >> ((i + 1) * k)) & 1U) << i;
    }
    const bool carry_out = (total >> n) & 1U;
    return AddResult(Word{static_cast<std::uint64_t>(total) & config.mask(), n}, carry_out, blocks, boundaries);
}

AddResult add(const Word& a, const Word& b, const AdderConfig& config)
{
    return config.variant() == Variant::Exact ? add_exact(a, b, config) : add_approx(a, b, config);
}

} // namespace cesa
