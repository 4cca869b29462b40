// Exercises libcesa through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cesa/cesa.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

std::string take(char* s)
{
    std::string out = s ? s : "";
    cesa_string_free(s);
    return out;
}

std::filesystem::path scratch()
{
    const char* env = std::getenv("CESA_TEST_TMP");
    std::filesystem::path dir = env ? env : std::filesystem::temp_directory_path() / "cesa_capi_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("version and status names")
{
    CHECK(std::strlen(cesa_version()) > 0);
    CHECK(std::string(cesa_status_name(CESA_OK)) == "ok");
    CHECK(std::string(cesa_status_name(CESA_ERR_CONFIG)) == "invalid configuration");
    CHECK(std::string(cesa_status_name(static_cast<cesa_status>(42))) == "unknown status");
    cesa_string_free(nullptr);
}

TEST_CASE("adder lifecycle")
{
    cesa_adder* adder = nullptr;
    REQUIRE(cesa_adder_create(8, 4, CESA_VARIANT_CESA_PERL, &adder) == CESA_OK);
    CHECK(cesa_adder_width(adder) == 8);
    CHECK(cesa_adder_block_size(adder) == 4);
    CHECK(cesa_adder_variant(adder) == CESA_VARIANT_CESA_PERL);
    char buf[32];
    REQUIRE(cesa_adder_describe(adder, buf, sizeof(buf)) == CESA_OK);
    CHECK(std::string(buf) == "8:4:cesa-perl");
    char tiny[4];
    CHECK(cesa_adder_describe(adder, tiny, sizeof(tiny)) == CESA_ERR_INVALID_ARGUMENT);
    cesa_adder_destroy(adder);
    cesa_adder_destroy(nullptr);

    REQUIRE(cesa_adder_parse("32:8:cesa", &adder) == CESA_OK);
    CHECK(cesa_adder_block_size(adder) == 8);
    cesa_adder_destroy(adder);

    REQUIRE(cesa_adder_create(16, 0, CESA_VARIANT_EXACT, &adder) == CESA_OK);
    CHECK(cesa_adder_block_size(adder) == 16);
    cesa_adder_destroy(adder);
}

TEST_CASE("configuration errors carry a message")
{
    cesa_adder* adder = reinterpret_cast<cesa_adder*>(0x1);
    CHECK(cesa_adder_create(8, 2, CESA_VARIANT_CESA_PERL, &adder) == CESA_ERR_CONFIG);
    CHECK(adder == nullptr);
    CHECK(std::string(cesa_last_error()).find("block size below minimum 4") != std::string::npos);
    CHECK(cesa_adder_parse("8:3:cesa", &adder) == CESA_ERR_CONFIG);
    CHECK(cesa_adder_parse(nullptr, &adder) == CESA_ERR_INVALID_ARGUMENT);
    CHECK(cesa_adder_create(8, 4, CESA_VARIANT_CESA, nullptr) == CESA_ERR_INVALID_ARGUMENT);
    CHECK(cesa_config_validate(8, 4, CESA_VARIANT_CESA) == CESA_OK);
    CHECK(cesa_config_validate(8, 3, CESA_VARIANT_CESA) == CESA_ERR_CONFIG);

    cesa_variant v{};
    CHECK(cesa_variant_parse("cesa-perl", &v) == CESA_OK);
    CHECK(v == CESA_VARIANT_CESA_PERL);
    CHECK(cesa_variant_parse("sara", &v) == CESA_ERR_CONFIG);
}

TEST_CASE("addition")
{
    cesa_adder* cesa = nullptr;
    cesa_adder* perl = nullptr;
    REQUIRE(cesa_adder_create(8, 4, CESA_VARIANT_CESA, &cesa) == CESA_OK);
    REQUIRE(cesa_adder_create(8, 4, CESA_VARIANT_CESA_PERL, &perl) == CESA_OK);

    cesa_sum s{};
    REQUIRE(cesa_add(cesa, 15, 1, &s) == CESA_OK);
    CHECK(s.sum == 0);
    CHECK(s.carry_out == 0);
    CHECK(s.boundary_count == 2);
    CHECK(s.boundary_carries == 0);

    REQUIRE(cesa_add(perl, 15, 1, &s) == CESA_OK);
    CHECK(s.sum == 16);
    CHECK(s.boundary_carries == 1);

    REQUIRE(cesa_add_exact(cesa, 255, 255, &s) == CESA_OK);
    CHECK(s.sum == 254);
    CHECK(s.carry_out == 1);
    CHECK(s.boundary_carries == 3);

    CHECK(cesa_add(cesa, 256, 1, &s) == CESA_ERR_RANGE);
    CHECK(std::string(cesa_last_error()).find("does not fit") != std::string::npos);
    CHECK(cesa_add(nullptr, 1, 1, &s) == CESA_ERR_INVALID_ARGUMENT);

    char* json = nullptr;
    REQUIRE(cesa_add_json(cesa, 15, 1, &json) == CESA_OK);
    const auto text = take(json);
    CHECK(text.find("\"error_distance\":16") != std::string::npos);
    CHECK(text.find("\"relative_error_distance\":1.0") != std::string::npos);

    cesa_adder_destroy(cesa);
    cesa_adder_destroy(perl);
}

TEST_CASE("metrics")
{
    cesa_adder* adder = nullptr;
    REQUIRE(cesa_adder_create(8, 4, CESA_VARIANT_CESA, &adder) == CESA_OK);
    cesa_error_report r{};
    REQUIRE(cesa_evaluate_exhaustive(adder, 0, &r) == CESA_OK);
    CHECK(r.er == doctest::Approx(0.09375));
    CHECK(r.sample_count == 65536);
    CHECK(r.run_count == 1);
    CHECK(r.mode == CESA_MODE_EXHAUSTIVE);

    cesa_error_report mc{};
    REQUIRE(cesa_evaluate_monte_carlo(adder, 100000, 4, 9, &mc) == CESA_OK);
    CHECK(mc.mode == CESA_MODE_MONTE_CARLO);
    CHECK(mc.run_count == 4);
    CHECK(mc.er == doctest::Approx(0.09375).epsilon(0.05));
    CHECK(cesa_evaluate_monte_carlo(adder, 0, 4, 9, &mc) == CESA_ERR_RANGE);

    char* json = nullptr;
    REQUIRE(cesa_error_report_json(adder, &r, &json) == CESA_OK);
    CHECK(take(json).find("\"mode\":\"Exhaustive\"") != std::string::npos);

    double per[4] = {0, 0, 0, 0};
    cesa_boundary_summary summary{};
    REQUIRE(cesa_boundary_stats(adder, 0, 0, per, 4, &summary) == CESA_OK);
    CHECK(summary.boundary_count == 1);
    CHECK(summary.sel_active_fraction == doctest::Approx(0.25));
    CHECK(per[0] == summary.overall_mismatch);
    CHECK(summary.overall_mismatch <= 0.25);
    CHECK(cesa_boundary_stats(adder, 0, 0, per, 0, &summary) == CESA_ERR_INVALID_ARGUMENT);
    cesa_adder_destroy(adder);

    cesa_adder* wide = nullptr;
    REQUIRE(cesa_adder_create(32, 8, CESA_VARIANT_CESA, &wide) == CESA_OK);
    CHECK(cesa_evaluate_exhaustive(wide, 0, &r) == CESA_ERR_RANGE);
    REQUIRE(cesa_boundary_stats_json(wide, 10000, 1, &json) == CESA_OK);
    CHECK(take(json).find("per_boundary_mismatch") != std::string::npos);
    cesa_adder_destroy(wide);
}

TEST_CASE("cost")
{
    cesa_adder* adder = nullptr;
    REQUIRE(cesa_adder_create(32, 2, CESA_VARIANT_CESA, &adder) == CESA_OK);
    cesa_cost c{};
    REQUIRE(cesa_cost_estimate(adder, &c) == CESA_OK);
    CHECK(c.critical_path_levels == 6);
    CHECK(c.delay_reduction_vs_ripple == doctest::Approx(0.90625));
    char* json = nullptr;
    REQUIRE(cesa_cost_json(adder, &json) == CESA_OK);
    CHECK(take(json).find("\"gate_count\"") != std::string::npos);
    cesa_adder_destroy(adder);
}

TEST_CASE("sweep and verify")
{
    const unsigned widths[] = {8};
    const unsigned blocks[] = {2, 4, 8};
    const cesa_variant variants[] = {CESA_VARIANT_CESA, CESA_VARIANT_CESA_PERL};
    cesa_sweep_spec spec{widths, 1, blocks, 3, variants, 2, CESA_MODE_EXHAUSTIVE, 0, 1, 0, 0};
    char* text = nullptr;
    char* skipped = nullptr;
    std::size_t rows = 0;
    REQUIRE(cesa_sweep_run(&spec, CESA_FORMAT_CSV, &text, &skipped, &rows) == CESA_OK);
    CHECK(rows == 5);
    CHECK(take(text).rfind("width,block_size,variant", 0) == 0);
    CHECK(take(skipped) == "8:2:cesa-perl: block size below minimum 4\n");

    const unsigned bad_blocks[] = {3};
    spec.block_sizes = bad_blocks;
    spec.block_size_count = 1;
    CHECK(cesa_sweep_run(&spec, CESA_FORMAT_JSON, &text, nullptr, &rows) == CESA_ERR_CONFIG);
    CHECK(text == nullptr);

    int passed = 0;
    REQUIRE(cesa_verify(6, &text, &passed) == CESA_OK);
    CHECK(passed == 1);
    CHECK(take(text).find("all invariants pass") != std::string::npos);
    CHECK(cesa_verify(13, &text, &passed) == CESA_ERR_RANGE);
}

TEST_CASE("images")
{
    cesa_image* clean = nullptr;
    REQUIRE(cesa_image_synthetic(64, 48, &clean) == CESA_OK);
    CHECK(cesa_image_width(clean) == 64);
    CHECK(cesa_image_height(clean) == 48);

    cesa_image* noisy = nullptr;
    REQUIRE(cesa_image_add_noise(clean, 10.0, 3, &noisy) == CESA_OK);

    const auto path = (scratch() / "noisy.pgm").string();
    REQUIRE(cesa_image_write_pgm(noisy, path.c_str()) == CESA_OK);
    cesa_image* loaded = nullptr;
    REQUIRE(cesa_image_read_pgm(path.c_str(), &loaded) == CESA_OK);
    CHECK(std::memcmp(cesa_image_pixels(loaded), cesa_image_pixels(noisy), 64 * 48) == 0);

    cesa_quality q{};
    REQUIRE(cesa_image_quality(noisy, loaded, &q) == CESA_OK);
    CHECK(q.psnr_infinite == 1);
    CHECK(q.ssim == doctest::Approx(1.0));

    cesa_adder* exact = nullptr;
    cesa_adder* approx = nullptr;
    REQUIRE(cesa_adder_parse("32:8:exact", &exact) == CESA_OK);
    REQUIRE(cesa_adder_parse("32:4:cesa", &approx) == CESA_OK);
    cesa_image* out_exact = nullptr;
    cesa_image* out_approx = nullptr;
    char* json = nullptr;
    REQUIRE(cesa_smooth(noisy, exact, 1.0, 8, 3, &out_exact, &out_approx, &q, &json) == CESA_OK);
    CHECK(q.psnr_infinite == 1);
    CHECK(take(json).find("\"psnr\":\"inf\"") != std::string::npos);
    CHECK(std::memcmp(cesa_image_pixels(out_exact), cesa_image_pixels(out_approx), 64 * 48) == 0);
    cesa_image_destroy(out_exact);
    cesa_image_destroy(out_approx);

    REQUIRE(cesa_smooth(noisy, approx, 1.0, 8, 3, nullptr, nullptr, &q, nullptr) == CESA_OK);
    CHECK(q.psnr_infinite == 0);
    CHECK(std::isfinite(q.psnr));

    cesa_adder* narrow = nullptr;
    REQUIRE(cesa_adder_parse("8:4:cesa", &narrow) == CESA_OK);
    CHECK(cesa_smooth(noisy, narrow, 1.0, 8, 3, nullptr, nullptr, &q, nullptr) == CESA_ERR_CONFIG);

    const std::uint8_t px[4] = {1, 2, 3, 4};
    cesa_image* small = nullptr;
    REQUIRE(cesa_image_create(2, 2, px, &small) == CESA_OK);
    CHECK(cesa_image_quality(small, noisy, &q) == CESA_ERR_RANGE);

    cesa_image* missing = nullptr;
    CHECK(cesa_image_read_pgm("/nonexistent/x.pgm", &missing) == CESA_ERR_IO);
    const auto bad = (scratch() / "bad.pgm").string();
    REQUIRE(cesa_image_write_pgm(small, bad.c_str()) == CESA_OK);
    std::filesystem::resize_file(bad, std::filesystem::file_size(bad) - 1);
    CHECK(cesa_image_read_pgm(bad.c_str(), &missing) == CESA_ERR_PARSE);
    CHECK(std::string(cesa_last_error()).find("byte offset") != std::string::npos);

    for (auto* img : {clean, noisy, loaded, small}) {
        cesa_image_destroy(img);
    }
    for (auto* a : {exact, approx, narrow}) {
        cesa_adder_destroy(a);
    }
}

TEST_CASE("clustering")
{
    cesa_dataset* data = nullptr;
    REQUIRE(cesa_dataset_synthetic(2020, &data) == CESA_OK);
    CHECK(cesa_dataset_size(data) == 150);
    CHECK(cesa_dataset_dims(data) == 4);

    cesa_adder* adder = nullptr;
    REQUIRE(cesa_adder_parse("32:16:cesa-perl", &adder) == CESA_OK);
    cesa_clustering* result = nullptr;
    REQUIRE(cesa_kmeans(data, 3, adder, 0, 7, &result) == CESA_OK);
    CHECK(cesa_clustering_agreement(result) == 1.0);
    CHECK(cesa_clustering_iterations(result) >= 1);
    std::vector<std::uint32_t> labels(200, 99);
    CHECK(cesa_clustering_assignments(result, labels.data(), labels.size()) == 150);
    for (std::size_t i = 0; i < 150; ++i) {
        CHECK(labels[i] < 3);
    }
    CHECK(labels[150] == 99);
    char* json = nullptr;
    REQUIRE(cesa_clustering_json(result, &json) == CESA_OK);
    const auto text = take(json);
    CHECK(text.find("\"agreement\":1.0") != std::string::npos);
    CHECK(text.find("\"assignments\"") != std::string::npos);
    cesa_clustering_destroy(result);

    cesa_clustering* none = nullptr;
    CHECK(cesa_kmeans(data, 151, adder, 0, 7, &none) == CESA_ERR_RANGE);
    CHECK(none == nullptr);

    const auto path = (scratch() / "bad.csv").string();
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("1,2\n3,four\n", f);
    std::fclose(f);
    cesa_dataset* bad = nullptr;
    CHECK(cesa_dataset_read_csv(path.c_str(), &bad) == CESA_ERR_PARSE);
    CHECK(std::string(cesa_last_error()).find("CSV row 2") != std::string::npos);

    cesa_adder_destroy(adder);
    cesa_dataset_destroy(data);
}
