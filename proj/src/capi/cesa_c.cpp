#include "cesa/cesa.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "cesa/adder.hpp"
#include "cesa/cost.hpp"
#include "cesa/error.hpp"
#include "cesa/image.hpp"
#include "cesa/kmeans.hpp"
#include "cesa/metrics.hpp"
#include "cesa/report.hpp"
#include "cesa/sweep.hpp"
#include "cesa/verify.hpp"

struct cesa_adder {
    cesa::AdderConfig config;
};

struct cesa_image {
    cesa::GrayImage image;
};

struct cesa_dataset {
    cesa::Dataset data;
};

struct cesa_clustering {
    cesa::ClusteringResult result;
};

namespace {

thread_local std::string last_error;

cesa_status fail(cesa_status status, std::string message)
{
    last_error = std::move(message);
    return status;
}

/// Runs fn and maps exceptions onto status codes.
template <typename Fn>
cesa_status guarded(Fn&& fn) noexcept
{
    try {
        fn();
        return CESA_OK;
    } catch (const cesa::ConfigError& e) {
        return fail(CESA_ERR_CONFIG, e.what());
    } catch (const cesa::RangeError& e) {
        return fail(CESA_ERR_RANGE, e.what());
    } catch (const cesa::IoError& e) {
        return fail(CESA_ERR_IO, e.what());
    } catch (const cesa::ParseError& e) {
        return fail(CESA_ERR_PARSE, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(CESA_ERR_PARSE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CESA_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CESA_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(CESA_ERR_INTERNAL, "unknown error");
    }
}

char* duplicate(const std::string& s)
{
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

cesa::Variant to_cpp(cesa_variant v)
{
    switch (v) {
    case CESA_VARIANT_EXACT: return cesa::Variant::Exact;
    case CESA_VARIANT_CESA: return cesa::Variant::Cesa;
    case CESA_VARIANT_CESA_PERL: return cesa::Variant::CesaPerl;
    }
    throw cesa::ConfigError("unknown variant code " + std::to_string(static_cast<int>(v)));
}

cesa_variant to_c(cesa::Variant v)
{
    switch (v) {
    case cesa::Variant::Exact: return CESA_VARIANT_EXACT;
    case cesa::Variant::Cesa: return CESA_VARIANT_CESA;
    case cesa::Variant::CesaPerl: return CESA_VARIANT_CESA_PERL;
    }
    return CESA_VARIANT_EXACT;
}

cesa_sum to_c(const cesa::AddResult& r)
{
    return cesa_sum{r.sum().value(), r.carry_out() ? 1 : 0, r.boundary_count(), r.boundary_bits()};
}

cesa_error_report to_c(const cesa::ErrorReport& r)
{
    return cesa_error_report{r.er,
                             r.med,
                             r.mred,
                             r.sample_count,
                             r.run_count,
                             r.seed,
                             r.mode == cesa::EvalMode::Exhaustive ? CESA_MODE_EXHAUSTIVE : CESA_MODE_MONTE_CARLO};
}

cesa_quality to_c(const cesa::QualityReport& q)
{
    const bool infinite = std::isinf(q.psnr);
    return cesa_quality{infinite ? 0.0 : q.psnr, infinite ? 1 : 0, q.ssim};
}

#define CESA_REQUIRE(cond)                                                                                             \
    do {                                                                                                               \
        if (!(cond)) {                                                                                                 \
            return fail(CESA_ERR_INVALID_ARGUMENT, "invalid argument: " #cond);                                        \
        }                                                                                                              \
    } while (0)

} // namespace

extern "C" {

const char* cesa_version(void) { return "1.0.0"; }

const char* cesa_status_name(cesa_status status)
{
    switch (status) {
    case CESA_OK: return "ok";
    case CESA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CESA_ERR_CONFIG: return "invalid configuration";
    case CESA_ERR_RANGE: return "out of range";
    case CESA_ERR_IO: return "i/o error";
    case CESA_ERR_PARSE: return "parse error";
    case CESA_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* cesa_last_error(void) { return last_error.c_str(); }

void cesa_string_free(char* s) { std::free(s); }

// --------------------------------------------------------------------- adder

cesa_status cesa_adder_create(unsigned width, unsigned block_size, cesa_variant variant, cesa_adder** out)
{
    CESA_REQUIRE(out != nullptr);
    *out = nullptr;
    return guarded([&] { *out = new cesa_adder{cesa::AdderConfig(width, block_size, to_cpp(variant))}; });
}

cesa_status cesa_adder_parse(const char* spec, cesa_adder** out)
{
    CESA_REQUIRE(spec != nullptr && out != nullptr);
    *out = nullptr;
    return guarded([&] { *out = new cesa_adder{cesa::AdderConfig::parse(spec)}; });
}

void cesa_adder_destroy(cesa_adder* adder) { delete adder; }

unsigned cesa_adder_width(const cesa_adder* adder) { return adder ? adder->config.width() : 0; }

unsigned cesa_adder_block_size(const cesa_adder* adder) { return adder ? adder->config.block_size() : 0; }

cesa_variant cesa_adder_variant(const cesa_adder* adder)
{
    return adder ? to_c(adder->config.variant()) : CESA_VARIANT_EXACT;
}

cesa_status cesa_adder_describe(const cesa_adder* adder, char* buffer, size_t capacity)
{
    CESA_REQUIRE(adder != nullptr && buffer != nullptr);
    const auto text = adder->config.to_string();
    if (text.size() + 1 > capacity) {
        return fail(CESA_ERR_INVALID_ARGUMENT, "buffer too small for '" + text + "'");
    }
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    return CESA_OK;
}

cesa_status cesa_variant_parse(const char* text, cesa_variant* out)
{
    CESA_REQUIRE(text != nullptr && out != nullptr);
    return guarded([&] { *out = to_c(cesa::parse_variant(text)); });
}

cesa_status cesa_config_validate(unsigned width, unsigned block_size, cesa_variant variant)
{
    return guarded([&] {
        if (auto reason = cesa::AdderConfig::validate(width, block_size, to_cpp(variant))) {
            throw cesa::ConfigError(*reason);
        }
    });
}

cesa_status cesa_add(const cesa_adder* adder, uint64_t a, uint64_t b, cesa_sum* out)
{
    CESA_REQUIRE(adder != nullptr && out != nullptr);
    return guarded([&] { *out = to_c(cesa::add(a, b, adder->config)); });
}

cesa_status cesa_add_exact(const cesa_adder* adder, uint64_t a, uint64_t b, cesa_sum* out)
{
    CESA_REQUIRE(adder != nullptr && out != nullptr);
    return guarded([&] {
        const auto& c = adder->config;
        *out = to_c(cesa::add_exact(cesa::Word{a, c.width()}, cesa::Word{b, c.width()}, c));
    });
}

cesa_status cesa_add_json(const cesa_adder* adder, uint64_t a, uint64_t b, char** out_json)
{
    CESA_REQUIRE(adder != nullptr && out_json != nullptr);
    *out_json = nullptr;
    return guarded([&] {
        const auto& c = adder->config;
        const cesa::Word wa{a, c.width()};
        const cesa::Word wb{b, c.width()};
        const auto approx = cesa::add(wa, wb, c);
        const auto exact = cesa::add_exact(wa, wb, c);
        const auto ed = cesa::error_distance(approx, exact);
        cesa::Json j{{"config", cesa::to_json(c)},
                     {"a", a},
                     {"b", b},
                     {"approx", cesa::to_json(approx)},
                     {"exact", cesa::to_json(exact)},
                     {"error_distance", static_cast<std::uint64_t>(ed)},
                     {"relative_error_distance", cesa::relative_error_distance(approx, exact)}};
        *out_json = duplicate(j.dump());
    });
}

// ------------------------------------------------------------------- metrics

cesa_status cesa_evaluate_exhaustive(const cesa_adder* adder, unsigned width_cap, cesa_error_report* out)
{
    CESA_REQUIRE(adder != nullptr && out != nullptr);
    return guarded([&] {
        *out = to_c(cesa::evaluate_exhaustive(adder->config, width_cap == 0 ? cesa::kDefaultExhaustiveCap : width_cap));
    });
}

cesa_status cesa_evaluate_monte_carlo(const cesa_adder* adder, uint64_t samples, uint32_t runs, uint64_t seed,
                                      cesa_error_report* out)
{
    CESA_REQUIRE(adder != nullptr && out != nullptr);
    return guarded([&] { *out = to_c(cesa::evaluate_monte_carlo(adder->config, samples, runs, seed)); });
}

cesa_status cesa_error_report_json(const cesa_adder* adder, const cesa_error_report* report, char** out_json)
{
    CESA_REQUIRE(adder != nullptr && report != nullptr && out_json != nullptr);
    *out_json = nullptr;
    return guarded([&] {
        const cesa::ErrorReport r{adder->config,
                                  report->er,
                                  report->med,
                                  report->mred,
                                  report->sample_count,
                                  report->run_count,
                                  report->seed,
                                  report->mode == CESA_MODE_EXHAUSTIVE ? cesa::EvalMode::Exhaustive
                                                                       : cesa::EvalMode::MonteCarlo};
        *out_json = duplicate(cesa::to_json(r).dump());
    });
}

namespace {

cesa::BoundaryStats boundary_stats(const cesa_adder* adder, uint64_t samples, uint64_t seed)
{
    return samples == 0 ? cesa::boundary_mismatch_exhaustive(adder->config)
                        : cesa::boundary_mismatch_stats(adder->config, samples, seed);
}

} // namespace

cesa_status cesa_boundary_stats(const cesa_adder* adder, uint64_t samples, uint64_t seed, double* per_boundary,
                                size_t capacity, cesa_boundary_summary* out)
{
    CESA_REQUIRE(adder != nullptr && out != nullptr);
    const auto inner = adder->config.block_count() - 1;
    if (per_boundary != nullptr && capacity < inner) {
        return fail(CESA_ERR_INVALID_ARGUMENT, "per_boundary buffer holds " + std::to_string(capacity) +
                                                   " entries, need " + std::to_string(inner));
    }
    return guarded([&] {
        const auto stats = boundary_stats(adder, samples, seed);
        *out = cesa_boundary_summary{stats.overall_mismatch, stats.sel_active_fraction, stats.sample_count, inner};
        if (per_boundary != nullptr) {
            std::copy(stats.per_boundary_mismatch.begin(), stats.per_boundary_mismatch.end(), per_boundary);
        }
    });
}

cesa_status cesa_boundary_stats_json(const cesa_adder* adder, uint64_t samples, uint64_t seed, char** out_json)
{
    CESA_REQUIRE(adder != nullptr && out_json != nullptr);
    *out_json = nullptr;
    return guarded([&] { *out_json = duplicate(cesa::to_json(boundary_stats(adder, samples, seed)).dump()); });
}

// ---------------------------------------------------------------------- cost

cesa_status cesa_cost_estimate(const cesa_adder* adder, cesa_cost* out)
{
    CESA_REQUIRE(adder != nullptr && out != nullptr);
    return guarded([&] {
        const auto cost = cesa::delay_estimate(adder->config);
        *out = cesa_cost{cost.critical_path_levels, cost.gate_count, cesa::delay_reduction_vs_ripple(adder->config)};
    });
}

cesa_status cesa_cost_json(const cesa_adder* adder, char** out_json)
{
    CESA_REQUIRE(adder != nullptr && out_json != nullptr);
    *out_json = nullptr;
    return guarded([&] {
        auto j = cesa::to_json(cesa::delay_estimate(adder->config));
        j["delay_reduction_vs_ripple"] = cesa::delay_reduction_vs_ripple(adder->config);
        *out_json = duplicate(j.dump());
    });
}

// --------------------------------------------------------------------- sweep

cesa_status cesa_sweep_run(const cesa_sweep_spec* spec, cesa_format format, char** out_text, char** out_skipped,
                           size_t* row_count)
{
    CESA_REQUIRE(spec != nullptr && out_text != nullptr);
    CESA_REQUIRE(spec->widths != nullptr && spec->width_count > 0);
    CESA_REQUIRE(spec->block_sizes != nullptr && spec->block_size_count > 0);
    CESA_REQUIRE(spec->variants != nullptr && spec->variant_count > 0);
    *out_text = nullptr;
    if (out_skipped != nullptr) {
        *out_skipped = nullptr;
    }
    return guarded([&] {
        cesa::SweepSpec s;
        s.widths.assign(spec->widths, spec->widths + spec->width_count);
        s.block_sizes.assign(spec->block_sizes, spec->block_sizes + spec->block_size_count);
        for (size_t i = 0; i < spec->variant_count; ++i) {
            s.variants.push_back(to_cpp(spec->variants[i]));
        }
        s.mode = spec->mode == CESA_MODE_EXHAUSTIVE ? cesa::EvalMode::Exhaustive : cesa::EvalMode::MonteCarlo;
        s.samples = spec->samples;
        s.runs = spec->runs;
        s.seed = spec->seed;
        s.exhaustive_cap = spec->exhaustive_cap == 0 ? cesa::kDefaultExhaustiveCap : spec->exhaustive_cap;
        const auto result = cesa::run_sweep(s);
        const auto text = cesa::render_sweep(result, format == CESA_FORMAT_CSV ? cesa::ReportFormat::Csv
                                                                               : cesa::ReportFormat::Json);
        std::string skipped;
        for (const auto& k : result.skipped) {
            skipped += std::to_string(k.width) + ":" + std::to_string(k.block_size) + ":" +
                       std::string(cesa::to_string(k.variant)) + ": " + k.reason + "\n";
        }
        char* text_copy = duplicate(text);
        if (out_skipped != nullptr) {
            try {
                *out_skipped = duplicate(skipped);
            } catch (...) {
                std::free(text_copy);
                throw;
            }
        }
        *out_text = text_copy;
        if (row_count != nullptr) {
            *row_count = result.rows.size();
        }
    });
}

// -------------------------------------------------------------------- verify

cesa_status cesa_verify(unsigned width, char** out_text, int* all_passed)
{
    CESA_REQUIRE(out_text != nullptr && all_passed != nullptr);
    *out_text = nullptr;
    return guarded([&] {
        const auto report = cesa::run_verify(width);
        *out_text = duplicate(cesa::render_verify(report));
        *all_passed = report.passed() ? 1 : 0;
    });
}

// -------------------------------------------------------------------- images

cesa_status cesa_image_create(size_t width, size_t height, const uint8_t* pixels, cesa_image** out)
{
    CESA_REQUIRE(out != nullptr && pixels != nullptr && width > 0 && height > 0);
    *out = nullptr;
    return guarded([&] {
        *out = new cesa_image{cesa::GrayImage(width, height, std::vector<std::uint8_t>(pixels, pixels + width * height))};
    });
}

cesa_status cesa_image_read_pgm(const char* path, cesa_image** out)
{
    CESA_REQUIRE(path != nullptr && out != nullptr);
    *out = nullptr;
    return guarded([&] { *out = new cesa_image{cesa::read_pgm(path)}; });
}

cesa_status cesa_image_write_pgm(const cesa_image* image, const char* path)
{
    CESA_REQUIRE(image != nullptr && path != nullptr);
    return guarded([&] { cesa::write_pgm(image->image, path); });
}

cesa_status cesa_image_synthetic(size_t width, size_t height, cesa_image** out)
{
    CESA_REQUIRE(out != nullptr && width > 0 && height > 0);
    *out = nullptr;
    return guarded([&] { *out = new cesa_image{cesa::synthetic_test_image(width, height)}; });
}

cesa_status cesa_image_add_noise(const cesa_image* image, double sigma, uint64_t seed, cesa_image** out)
{
    CESA_REQUIRE(image != nullptr && out != nullptr);
    *out = nullptr;
    return guarded([&] { *out = new cesa_image{cesa::add_noise(image->image, sigma, seed)}; });
}

void cesa_image_destroy(cesa_image* image) { delete image; }

size_t cesa_image_width(const cesa_image* image) { return image ? image->image.width() : 0; }

size_t cesa_image_height(const cesa_image* image) { return image ? image->image.height() : 0; }

const uint8_t* cesa_image_pixels(const cesa_image* image) { return image ? image->image.pixels().data() : nullptr; }

cesa_status cesa_image_quality(const cesa_image* reference, const cesa_image* test, cesa_quality* out)
{
    CESA_REQUIRE(reference != nullptr && test != nullptr && out != nullptr);
    return guarded([&] {
        const auto p = cesa::psnr(reference->image, test->image);
        const auto s = cesa::ssim(reference->image, test->image);
        *out = cesa_quality{std::isinf(p) ? 0.0 : p, std::isinf(p) ? 1 : 0, s};
    });
}

cesa_status cesa_smooth(const cesa_image* noisy, const cesa_adder* adder, double kernel_sigma, unsigned scale_bits,
                        uint64_t seed, cesa_image** exact_out, cesa_image** approx_out, cesa_quality* quality,
                        char** report_json)
{
    CESA_REQUIRE(noisy != nullptr && adder != nullptr);
    if (exact_out != nullptr) {
        *exact_out = nullptr;
    }
    if (approx_out != nullptr) {
        *approx_out = nullptr;
    }
    if (report_json != nullptr) {
        *report_json = nullptr;
    }
    return guarded([&] {
        const auto kernel = cesa::gaussian_kernel_int(cesa::kGaussianSize, kernel_sigma, scale_bits);
        auto run = cesa::run_smoothing(noisy->image, kernel, adder->config, seed);
        std::unique_ptr<cesa_image> exact(exact_out ? new cesa_image{std::move(run.exact)} : nullptr);
        std::unique_ptr<cesa_image> approx(approx_out ? new cesa_image{std::move(run.approx)} : nullptr);
        char* json = report_json ? duplicate(cesa::to_json(run.quality).dump()) : nullptr;
        if (quality != nullptr) {
            *quality = to_c(run.quality);
        }
        if (exact_out != nullptr) {
            *exact_out = exact.release();
        }
        if (approx_out != nullptr) {
            *approx_out = approx.release();
        }
        if (report_json != nullptr) {
            *report_json = json;
        }
    });
}

// ---------------------------------------------------------------- clustering

cesa_status cesa_dataset_read_csv(const char* path, cesa_dataset** out)
{
    CESA_REQUIRE(path != nullptr && out != nullptr);
    *out = nullptr;
    return guarded([&] { *out = new cesa_dataset{cesa::read_dataset_csv(path)}; });
}

cesa_status cesa_dataset_synthetic(uint64_t seed, cesa_dataset** out)
{
    CESA_REQUIRE(out != nullptr);
    *out = nullptr;
    return guarded([&] { *out = new cesa_dataset{cesa::synthetic_iris_like(seed)}; });
}

void cesa_dataset_destroy(cesa_dataset* dataset) { delete dataset; }

size_t cesa_dataset_size(const cesa_dataset* dataset) { return dataset ? dataset->data.size() : 0; }

size_t cesa_dataset_dims(const cesa_dataset* dataset) { return dataset ? dataset->data.dims() : 0; }

cesa_status cesa_kmeans(const cesa_dataset* dataset, unsigned clusters, const cesa_adder* adder, unsigned max_iter,
                        uint64_t seed, cesa_clustering** out)
{
    CESA_REQUIRE(dataset != nullptr && adder != nullptr && out != nullptr);
    *out = nullptr;
    return guarded([&] {
        *out = new cesa_clustering{
            cesa::kmeans(dataset->data, clusters, adder->config, max_iter == 0 ? cesa::kDefaultMaxIter : max_iter, seed)};
    });
}

void cesa_clustering_destroy(cesa_clustering* result) { delete result; }

double cesa_clustering_agreement(const cesa_clustering* result) { return result ? result->result.agreement : 0.0; }

double cesa_clustering_centroid_distance(const cesa_clustering* result)
{
    return result ? result->result.centroid_distance : 0.0;
}

unsigned cesa_clustering_iterations(const cesa_clustering* result) { return result ? result->result.iterations : 0; }

size_t cesa_clustering_assignments(const cesa_clustering* result, uint32_t* buffer, size_t capacity)
{
    if (result == nullptr) {
        return 0;
    }
    const auto& labels = result->result.assignments;
    if (buffer != nullptr) {
        std::copy_n(labels.begin(), std::min(capacity, labels.size()), buffer);
    }
    return labels.size();
}

cesa_status cesa_clustering_json(const cesa_clustering* result, char** out_json)
{
    CESA_REQUIRE(result != nullptr && out_json != nullptr);
    *out_json = nullptr;
    return guarded([&] { *out_json = duplicate(cesa::to_json(result->result).dump()); });
}

} // extern "C"
