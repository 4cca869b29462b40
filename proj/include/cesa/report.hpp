#pragma once

#include <string>

#include "json.hpp"

#include "cesa/adder.hpp"
#include "cesa/cost.hpp"
#include "cesa/image.hpp"
#include "cesa/kmeans.hpp"
#include "cesa/metrics.hpp"

namespace cesa {

using Json = nlohmann::ordered_json;

Json to_json(const AdderConfig& config);
AdderConfig config_from_json(const Json& j);

/// Fields: config, er, med, mred, sample_count, run_count, seed, mode.
Json to_json(const ErrorReport& report);
ErrorReport error_report_from_json(const Json& j);

Json to_json(const BoundaryStats& stats);
Json to_json(const CostEstimate& cost);

/// psnr is the string "inf" for identical images.
Json to_json(const QualityReport& report);
QualityReport quality_report_from_json(const Json& j);

Json to_json(const ClusteringResult& result);

Json to_json(const AddResult& result);

/// One CSV line per ErrorReport, cost columns appended.
std::string error_report_csv_header();
std::string error_report_csv_row(const ErrorReport& report, const CostEstimate& cost);

} // namespace cesa
