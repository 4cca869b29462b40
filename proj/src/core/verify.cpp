#include "cesa/verify.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>

#include "cesa/adder.hpp"
#include "cesa/error.hpp"
#include "cesa/metrics.hpp"
#include "parallel.hpp"

namespace cesa {

bool VerifyReport::passed() const noexcept
{
    return std::all_of(invariants.begin(), invariants.end(), [](const auto& i) { return i.passed(); });
}

namespace {

enum Check : std::size_t {
    Commutativity,
    AdditiveIdentity,
    SingleBlockExactness,
    LocalDetermination,
    UnderEstimation,
    PerlMismatchPrecondition,
    SingleBoundaryErrorShape,
    kCheckCount
};

constexpr const char* kCheckNames[kCheckCount] = {
    "commutativity",
    "additive-identity",
    "single-block-exactness",
    "local-determination",
    "under-estimation",
    "perl-mismatch-precondition",
    "single-boundary-error-shape",
};

struct Counter {
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> first;

    void record(bool ok, std::uint64_t a, std::uint64_t b)
    {
        ++checked;
        if (!ok) {
            ++violations;
            if (!first) {
                first = {a, b};
            }
        }
    }

    void merge(const Counter& other)
    {
        checked += other.checked;
        violations += other.violations;
        if (!first && other.first) {
            first = other.first;
        }
    }
};

using Counters = std::array<Counter, kCheckCount>;

bool propagates(std::uint64_t a, std::uint64_t b, unsigned pos) { return bit_at(a, pos) != bit_at(b, pos); }

void check_pair(const AdderConfig& config, std::uint64_t a, std::uint64_t b, Counters& c)
{
    const unsigned n = config.width();
    const unsigned k = config.block_size();
    const Word wa{a, n};
    const Word wb{b, n};
    const auto approx = add_approx(wa, wb, config);
    const auto exact = add_exact(wa, wb, config);

    c[Commutativity].record(approx == add_approx(wb, wa, config), a, b);

    if (b == 0) {
        const bool ok = approx.extended_value() == a && add_approx(wb, wa, config).extended_value() == a;
        c[AdditiveIdentity].record(ok, a, b);
    }

    if (k == n) {
        c[SingleBlockExactness].record(approx == exact, a, b);
    }

    bool under = approx.extended_value() <= exact.extended_value();
    for (unsigned i = 0; i + 1 < config.block_count(); ++i) {
        const unsigned top = (i + 1) * k - 1;
        const bool est = approx.boundary_carry(i);
        const bool truth = exact.boundary_carry(i);
        under = under && (!est || truth);
        if (!su(bit_at(a, top), bit_at(b, top), bit_at(a, top - 1), bit_at(b, top - 1))) {
            c[LocalDetermination].record(est == truth, a, b);
        }
        if (config.variant() == Variant::CesaPerl) {
            const bool all_propagate = propagates(a, b, top) && propagates(a, b, top - 1) &&
                                       propagates(a, b, top - 2) && propagates(a, b, top - 3);
            c[PerlMismatchPrecondition].record(est == truth || all_propagate, a, b);
        }
    }
    c[UnderEstimation].record(under, a, b);

    if (n == 2 * k) {
        const Wide diff = exact.extended_value() - std::min(exact.extended_value(), approx.extended_value());
        c[SingleBoundaryErrorShape].record(diff == 0 || diff == (Wide{1} << k), a, b);
    }
}

std::string describe_pair(const AdderConfig& config, std::uint64_t a, std::uint64_t b)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), "a=%llu b=%llu at %s", static_cast<unsigned long long>(a),
                  static_cast<unsigned long long>(b), config.to_string().c_str());
    return buf;
}

std::vector<AdderConfig> approximate_configs(unsigned width)
{
    std::vector<AdderConfig> out;
    for (auto variant : {Variant::Cesa, Variant::CesaPerl}) {
        for (unsigned k = 1; k <= width; ++k) {
            if (!AdderConfig::validate(width, k, variant)) {
                out.emplace_back(width, k, variant);
            }
        }
    }
    return out;
}

InvariantOutcome check_truth_tables()
{
    InvariantOutcome out{"perl-equals-ceu", 0, 0, std::nullopt};
    for (unsigned x = 0; x < 16; ++x) {
        const bool a_hi = x & 8, b_hi = x & 4, a_lo = x & 2, b_lo = x & 1;
        ++out.checked;
        if (perl(a_hi, b_hi, a_lo, b_lo) != ceu(a_hi, b_hi, a_lo, b_lo)) {
            ++out.violations;
            out.counterexample = "bits=" + std::to_string(x);
        }
    }
    return out;
}

/// Of the 16 top-pair combinations, exactly 12 fix the carry regardless of the carry arriving below them.
InvariantOutcome check_local_determination_count()
{
    unsigned determined = 0;
    for (unsigned x = 0; x < 16; ++x) {
        const bool a_hi = x & 8, b_hi = x & 4, a_lo = x & 2, b_lo = x & 1;
        const std::uint64_t a = (a_hi ? 2 : 0) | (a_lo ? 1 : 0);
        const std::uint64_t b = (b_hi ? 2 : 0) | (b_lo ? 1 : 0);
        bool always = true;
        for (bool carry_in : {false, true}) {
            always = always && block_sum(a, b, carry_in, 2).carry_out == ceu(a_hi, b_hi, a_lo, b_lo);
        }
        determined += always ? 1 : 0;
    }
    InvariantOutcome out{"local-determination-count-12-of-16", 16, determined == 12 ? 0U : 1U, std::nullopt};
    if (determined != 12) {
        out.counterexample = "found " + std::to_string(determined) + " locally determined combinations";
    }
    return out;
}

} // namespace

VerifyReport run_verify(unsigned width)
{
    if (width < 2 || width > kMaxVerifyWidth) {
        throw RangeError("verify width " + std::to_string(width) + " outside 2.." + std::to_string(kMaxVerifyWidth));
    }
    VerifyReport report;
    report.width = width;

    std::vector<InvariantOutcome> per_check(kCheckCount);
    for (std::size_t i = 0; i < kCheckCount; ++i) {
        per_check[i].name = kCheckNames[i];
    }

    const std::uint64_t span = std::uint64_t{1} << width;
    std::map<std::pair<Variant, unsigned>, double> error_rates;
    for (const auto& config : approximate_configs(width)) {
        std::vector<Counters> rows(span);
        detail::parallel_for(span, [&](std::size_t a) {
            for (std::uint64_t b = 0; b < span; ++b) {
                check_pair(config, a, b, rows[a]);
            }
        });
        Counters total;
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < kCheckCount; ++i) {
                total[i].merge(r[i]);
            }
        }
        for (std::size_t i = 0; i < kCheckCount; ++i) {
            per_check[i].checked += total[i].checked;
            per_check[i].violations += total[i].violations;
            if (!per_check[i].counterexample && total[i].first) {
                per_check[i].counterexample = describe_pair(config, total[i].first->first, total[i].first->second);
            }
        }
        error_rates[{config.variant(), config.block_size()}] = evaluate_exhaustive(config, kMaxVerifyWidth).er;
        if (config.block_size() == 4 && config.block_count() > 1 && config.variant() == Variant::Cesa) {
            report.sel_active_fraction_k4 = boundary_mismatch_exhaustive(config, kMaxVerifyWidth).sel_active_fraction;
        }
    }
    report.invariants = std::move(per_check);
    report.invariants.push_back(check_truth_tables());
    report.invariants.push_back(check_local_determination_count());

    InvariantOutcome perl_better{"er-perl-le-cesa", 0, 0, std::nullopt};
    InvariantOutcome monotone{"er-monotone-in-k", 0, 0, std::nullopt};
    for (auto variant : {Variant::Cesa, Variant::CesaPerl}) {
        std::optional<std::pair<unsigned, double>> previous;
        for (const auto& [key, er] : error_rates) {
            if (key.first != variant) {
                continue;
            }
            if (previous) {
                ++monotone.checked;
                if (er > previous->second) {
                    ++monotone.violations;
                    monotone.counterexample = std::string(to_string(variant)) + " k=" + std::to_string(key.second) +
                                              " er exceeds k=" + std::to_string(previous->first);
                }
            }
            previous = {key.second, er};
            if (variant == Variant::CesaPerl) {
                ++perl_better.checked;
                const auto cesa = error_rates.find({Variant::Cesa, key.second});
                if (cesa != error_rates.end() && er > cesa->second) {
                    ++perl_better.violations;
                    perl_better.counterexample = "k=" + std::to_string(key.second);
                }
            }
        }
    }
    report.invariants.push_back(perl_better);
    report.invariants.push_back(monotone);

    const auto exact = evaluate_exhaustive(AdderConfig(width, 0, Variant::Exact), kMaxVerifyWidth);
    InvariantOutcome exact_zero{"med-exact-zero", exact.sample_count, exact.med == 0.0 && exact.er == 0.0 ? 0U : 1U,
                                std::nullopt};
    report.invariants.push_back(exact_zero);
    return report;
}

std::string render_verify(const VerifyReport& report)
{
    std::string out;
    char line[256];
    for (const auto& inv : report.invariants) {
        std::snprintf(line, sizeof(line), "%-36s %s  checked=%llu violations=%llu", inv.name.c_str(),
                      inv.passed() ? "PASS" : "FAIL", static_cast<unsigned long long>(inv.checked),
                      static_cast<unsigned long long>(inv.violations));
        out += line;
        if (inv.counterexample) {
            out += "  counterexample: " + *inv.counterexample;
        }
        out += "\n";
    }
    if (report.sel_active_fraction_k4) {
        std::snprintf(line, sizeof(line), "sel_active_fraction (k=4): %.6f\n", *report.sel_active_fraction_k4);
        out += line;
    }
    out += report.passed() ? "verify: all invariants pass at width " : "verify: FAILED at width ";
    out += std::to_string(report.width) + "\n";
    return out;
}

} // namespace cesa
