#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cesa/cost.hpp"
#include "cesa/metrics.hpp"

namespace cesa {

enum class ReportFormat { Json, Csv };

ReportFormat parse_report_format(std::string_view text);

struct SweepSpec {
    std::vector<unsigned> widths;
    std::vector<unsigned> block_sizes;
    std::vector<Variant> variants;
    EvalMode mode = EvalMode::Exhaustive;
    std::uint64_t samples = kDefaultSamples;
    std::uint32_t runs = kDefaultRuns;
    std::uint64_t seed = 0;
    unsigned exhaustive_cap = kDefaultExhaustiveCap;
};

struct SweepRow {
    ErrorReport report;
    CostEstimate cost;
};

/// A requested combination that was not evaluated, and why.
struct SkippedConfig {
    unsigned width = 0;
    unsigned block_size = 0;
    Variant variant = Variant::Exact;
    std::string reason;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SkippedConfig> skipped;
};

/// Evaluates every (width, block, variant) combination in spec order.
/// Throws ConfigError when no combination is valid.
SweepResult run_sweep(const SweepSpec& spec);

/// JSON object {"rows": [...], "skipped": [...]} or CSV with a header row.
std::string render_sweep(const SweepResult& result, ReportFormat format);

} // namespace cesa
