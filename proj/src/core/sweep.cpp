#include "cesa/sweep.hpp"

#include "cesa/error.hpp"
#include "cesa/report.hpp"

namespace cesa {

ReportFormat parse_report_format(std::string_view text)
{
    if (text == "json") {
        return ReportFormat::Json;
    }
    if (text == "csv") {
        return ReportFormat::Csv;
    }
    throw ConfigError("unknown report format '" + std::string(text) + "' (expected json or csv)");
}

SweepResult run_sweep(const SweepSpec& spec)
{
    // validate everything before evaluating anything
    SweepResult result;
    std::vector<AdderConfig> valid;
    for (auto width : spec.widths) {
        for (auto block : spec.block_sizes) {
            for (auto variant : spec.variants) {
                if (auto reason = AdderConfig::validate(width, block, variant)) {
                    result.skipped.push_back({width, block, variant, *reason});
                } else if (spec.mode == EvalMode::Exhaustive &&
                           width > std::min(spec.exhaustive_cap, kMaxExhaustiveWidth)) {
                    result.skipped.push_back({width, block, variant,
                                              "width above exhaustive cap " + std::to_string(spec.exhaustive_cap)});
                } else {
                    valid.emplace_back(width, block, variant);
                }
            }
        }
    }
    if (valid.empty()) {
        std::string why = "sweep has no valid configuration";
        if (!result.skipped.empty()) {
            why += " (first: " + result.skipped.front().reason + ")";
        }
        throw ConfigError(why);
    }
    for (const auto& config : valid) {
        auto report = spec.mode == EvalMode::Exhaustive
                          ? evaluate_exhaustive(config, spec.exhaustive_cap)
                          : evaluate_monte_carlo(config, spec.samples, spec.runs, spec.seed);
        result.rows.push_back({report, delay_estimate(config)});
    }
    return result;
}

std::string render_sweep(const SweepResult& result, ReportFormat format)
{
    if (format == ReportFormat::Csv) {
        std::string out = error_report_csv_header() + "\n";
        for (const auto& row : result.rows) {
            out += error_report_csv_row(row.report, row.cost) + "\n";
        }
        return out;
    }
    Json rows = Json::array();
    for (const auto& row : result.rows) {
        auto j = to_json(row.report);
        j["cost"] = Json{{"critical_path_levels", row.cost.critical_path_levels}, {"gate_count", row.cost.gate_count}};
        rows.push_back(std::move(j));
    }
    Json skipped = Json::array();
    for (const auto& s : result.skipped) {
        skipped.push_back(Json{{"width", s.width},
                               {"block_size", s.block_size},
                               {"variant", std::string(to_string(s.variant))},
                               {"reason", s.reason}});
    }
    return Json{{"rows", rows}, {"skipped", skipped}}.dump(2) + "\n";
}

} // namespace cesa
