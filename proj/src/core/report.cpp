#include "cesa/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "cesa/error.hpp"

namespace cesa {

namespace {

std::string shortest(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string wide_to_string(Wide v)
{
    if (v == 0) {
        return "0";
    }
    std::string out;
    while (v != 0) {
        out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return out;
}

template <typename T>
T field(const Json& j, const char* name)
{
    if (!j.contains(name)) {
        throw ParseError(std::string("report is missing field '") + name + "'");
    }
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report field '") + name + "': " + e.what());
    }
}

} // namespace

Json to_json(const AdderConfig& config)
{
    return Json{{"width", config.width()},
                {"block_size", config.block_size()},
                {"variant", std::string(to_string(config.variant()))}};
}

AdderConfig config_from_json(const Json& j)
{
    return AdderConfig(field<unsigned>(j, "width"), field<unsigned>(j, "block_size"),
                       parse_variant(field<std::string>(j, "variant")));
}

Json to_json(const ErrorReport& report)
{
    return Json{{"config", to_json(report.config)},
                {"er", report.er},
                {"med", report.med},
                {"mred", report.mred},
                {"sample_count", report.sample_count},
                {"run_count", report.run_count},
                {"seed", report.seed},
                {"mode", std::string(to_string(report.mode))}};
}

ErrorReport error_report_from_json(const Json& j)
{
    if (!j.is_object()) {
        throw ParseError("error report must be a JSON object");
    }
    return ErrorReport{config_from_json(field<Json>(j, "config")),
                       field<double>(j, "er"),
                       field<double>(j, "med"),
                       field<double>(j, "mred"),
                       field<std::uint64_t>(j, "sample_count"),
                       field<std::uint32_t>(j, "run_count"),
                       field<std::uint64_t>(j, "seed"),
                       parse_eval_mode(field<std::string>(j, "mode"))};
}

Json to_json(const BoundaryStats& stats)
{
    return Json{{"config", to_json(stats.config)},
                {"per_boundary_mismatch", stats.per_boundary_mismatch},
                {"overall_mismatch", stats.overall_mismatch},
                {"sel_active_fraction", stats.sel_active_fraction},
                {"sample_count", stats.sample_count},
                {"seed", stats.seed},
                {"mode", std::string(to_string(stats.mode))}};
}

Json to_json(const CostEstimate& cost)
{
    return Json{{"config", to_json(cost.config)},
                {"critical_path_levels", cost.critical_path_levels},
                {"gate_count", cost.gate_count}};
}

Json to_json(const QualityReport& report)
{
    Json psnr_value = std::isinf(report.psnr) ? Json("inf") : Json(report.psnr);
    return Json{{"psnr", psnr_value}, {"ssim", report.ssim}, {"config", to_json(report.config)}, {"seed", report.seed}};
}

QualityReport quality_report_from_json(const Json& j)
{
    const auto& p = field<Json>(j, "psnr");
    double psnr_value = 0.0;
    if (p.is_string() && p.get<std::string>() == "inf") {
        psnr_value = std::numeric_limits<double>::infinity();
    } else if (p.is_number()) {
        psnr_value = p.get<double>();
    } else {
        throw ParseError("report field 'psnr' must be a number or \"inf\"");
    }
    return QualityReport{config_from_json(field<Json>(j, "config")), psnr_value, field<double>(j, "ssim"),
                         field<std::uint64_t>(j, "seed")};
}

Json to_json(const ClusteringResult& result)
{
    return Json{{"config", to_json(result.config)},
                {"seed", result.seed},
                {"iterations", result.iterations},
                {"agreement", result.agreement},
                {"centroid_distance", result.centroid_distance},
                {"centroids", result.centroids},
                {"assignments", result.assignments}};
}

Json to_json(const AddResult& result)
{
    Json carries = Json::array();
    for (bool c : result.boundary_carries()) {
        carries.push_back(c ? 1 : 0);
    }
    return Json{{"sum", result.sum().value()},
                {"carry_out", result.carry_out() ? 1 : 0},
                {"extended_value", wide_to_string(result.extended_value())},
                {"boundary_carries", carries}};
}

std::string error_report_csv_header()
{
    return "width,block_size,variant,mode,er,med,mred,sample_count,run_count,seed,critical_path_levels,gate_count";
}

std::string error_report_csv_row(const ErrorReport& report, const CostEstimate& cost)
{
    const auto& c = report.config;
    std::string row;
    row += std::to_string(c.width()) + "," + std::to_string(c.block_size()) + "," + std::string(to_string(c.variant()));
    row += "," + std::string(to_string(report.mode));
    row += "," + shortest(report.er) + "," + shortest(report.med) + "," + shortest(report.mred);
    row += "," + std::to_string(report.sample_count) + "," + std::to_string(report.run_count);
    row += "," + std::to_string(report.seed);
    row += "," + std::to_string(cost.critical_path_levels) + "," + std::to_string(cost.gate_count);
    return row;
}

} // namespace cesa
