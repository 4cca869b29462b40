// Command-line front end. Talks to the library only through cesa.h.
#include <cesa/cesa.h>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Carries a library status out to main so the exit code can follow it.
struct Failure : std::runtime_error {
    cesa_status status;
    Failure(cesa_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(cesa_status status, const std::string& context)
{
    if (status != CESA_OK) {
        throw Failure(status, context + ": " + cesa_last_error());
    }
}

struct AdderDeleter {
    void operator()(cesa_adder* a) const { cesa_adder_destroy(a); }
};
struct ImageDeleter {
    void operator()(cesa_image* i) const { cesa_image_destroy(i); }
};
struct DatasetDeleter {
    void operator()(cesa_dataset* d) const { cesa_dataset_destroy(d); }
};
struct ClusteringDeleter {
    void operator()(cesa_clustering* c) const { cesa_clustering_destroy(c); }
};
using Adder = std::unique_ptr<cesa_adder, AdderDeleter>;
using Image = std::unique_ptr<cesa_image, ImageDeleter>;
using Dataset = std::unique_ptr<cesa_dataset, DatasetDeleter>;
using Clustering = std::unique_ptr<cesa_clustering, ClusteringDeleter>;

/// Takes ownership of a library-allocated string.
std::string take(char* s)
{
    std::string out = s ? s : "";
    cesa_string_free(s);
    return out;
}

Adder parse_adder(const std::string& spec)
{
    cesa_adder* raw = nullptr;
    check(cesa_adder_parse(spec.c_str(), &raw), "config '" + spec + "'");
    return Adder(raw);
}

Adder make_adder(unsigned width, unsigned block, const std::string& variant_text)
{
    cesa_variant variant{};
    check(cesa_variant_parse(variant_text.c_str(), &variant), "variant");
    cesa_adder* raw = nullptr;
    check(cesa_adder_create(width, block, variant, &raw), "config");
    return Adder(raw);
}

std::string describe(const cesa_adder* adder)
{
    char buf[64];
    check(cesa_adder_describe(adder, buf, sizeof(buf)), "describe");
    return buf;
}

std::uint64_t parse_operand(const std::string& text)
{
    if (text.empty() || text.front() == '-') {
        throw Failure(CESA_ERR_RANGE, "operand '" + text + "' is not an unsigned integer");
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 0);
    if (errno == ERANGE || end == text.c_str() || *end != '\0') {
        throw Failure(CESA_ERR_RANGE, "operand '" + text + "' is not an unsigned 64-bit integer");
    }
    return v;
}

std::string filename_for(std::string config)
{
    for (char& c : config) {
        if (c == ':') {
            c = '_';
        }
    }
    return config;
}

fs::path output_dir(const std::string& flag)
{
    fs::path dir = flag;
    if (dir.empty()) {
        const char* env = std::getenv("CESA_OUTPUT_DIR");
        dir = env && *env ? env : "cesa_out";
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Failure(CESA_ERR_IO, "cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    return dir;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Failure(CESA_ERR_IO, "cannot write '" + path.string() + "'");
    }
}

// ------------------------------------------------------------------ add

struct AddOptions {
    unsigned width = 8;
    unsigned block = 4;
    std::string variant = "cesa";
    std::string a, b;
    bool json = false;
};

int run_add(const AddOptions& o)
{
    auto adder = make_adder(o.width, o.block, o.variant);
    const auto a = parse_operand(o.a);
    const auto b = parse_operand(o.b);
    char* raw = nullptr;
    check(cesa_add_json(adder.get(), a, b, &raw), "add");
    const auto j = Json::parse(take(raw));
    if (o.json) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    const auto& approx = j["approx"];
    const auto& exact = j["exact"];
    std::cout << "config  " << describe(adder.get()) << "\n";
    std::cout << "a       " << a << "\n";
    std::cout << "b       " << b << "\n";
    std::cout << "approx  " << approx["extended_value"].get<std::string>() << "  (sum " << approx["sum"]
              << ", carry_out " << approx["carry_out"] << ")\n";
    std::cout << "exact   " << exact["extended_value"].get<std::string>() << "  (sum " << exact["sum"]
              << ", carry_out " << exact["carry_out"] << ")\n";
    std::cout << "ed      " << j["error_distance"] << "\n";
    std::cout << "red     " << j["relative_error_distance"] << "\n";
    const auto& est = approx["boundary_carries"];
    const auto& truth = exact["boundary_carries"];
    const unsigned k = cesa_adder_block_size(adder.get());
    for (std::size_t i = 0; i < est.size(); ++i) {
        std::cout << "carry@" << (i + 1) * k << "  estimated " << est[i] << " exact " << truth[i]
                  << (est[i] == truth[i] ? "" : "  MISMATCH") << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    std::vector<unsigned> widths{8};
    std::vector<unsigned> blocks{2, 4, 8};
    std::vector<std::string> variants{"cesa", "cesa-perl"};
    std::string mode = "exhaustive";
    std::uint64_t samples = 1000000;
    std::uint32_t runs = 12;
    std::uint64_t seed = 1;
    std::string out;
    std::string format;
    unsigned exhaustive_cap = 12;
};

cesa_mode parse_mode(const std::string& text)
{
    if (text == "exhaustive" || text == "Exhaustive") {
        return CESA_MODE_EXHAUSTIVE;
    }
    if (text == "monte-carlo" || text == "montecarlo" || text == "MonteCarlo" || text == "mc") {
        return CESA_MODE_MONTE_CARLO;
    }
    throw Failure(CESA_ERR_INVALID_ARGUMENT, "unknown mode '" + text + "' (expected exhaustive or monte-carlo)");
}

cesa_format resolve_format(const SweepOptions& o)
{
    std::string f = o.format;
    if (f.empty()) {
        f = fs::path(o.out).extension() == ".csv" ? "csv" : "json";
    }
    if (f == "json") {
        return CESA_FORMAT_JSON;
    }
    if (f == "csv") {
        return CESA_FORMAT_CSV;
    }
    throw Failure(CESA_ERR_INVALID_ARGUMENT, "unknown format '" + f + "' (expected json or csv)");
}

int run_sweep(const SweepOptions& o)
{
    std::vector<cesa_variant> variants;
    for (const auto& v : o.variants) {
        cesa_variant parsed{};
        check(cesa_variant_parse(v.c_str(), &parsed), "variant");
        variants.push_back(parsed);
    }
    cesa_sweep_spec spec{};
    spec.widths = o.widths.data();
    spec.width_count = o.widths.size();
    spec.block_sizes = o.blocks.data();
    spec.block_size_count = o.blocks.size();
    spec.variants = variants.data();
    spec.variant_count = variants.size();
    spec.mode = parse_mode(o.mode);
    spec.samples = o.samples;
    spec.runs = o.runs;
    spec.seed = o.seed;
    spec.exhaustive_cap = o.exhaustive_cap;
    const auto format = resolve_format(o);

    char* text = nullptr;
    char* skipped = nullptr;
    std::size_t rows = 0;
    check(cesa_sweep_run(&spec, format, &text, &skipped, &rows), "sweep");
    const auto report = take(text);
    const auto skipped_lines = take(skipped);
    std::istringstream lines(skipped_lines);
    for (std::string line; std::getline(lines, line);) {
        std::cerr << "skipped " << line << "\n";
    }
    if (o.out.empty()) {
        std::cout << report;
    } else {
        const fs::path path = o.out;
        if (path.has_parent_path()) {
            std::error_code ec;
            fs::create_directories(path.parent_path(), ec);
        }
        write_text(path, report);
        std::cerr << rows << " rows written to " << path.string() << "\n";
    }
    return 0;
}

// --------------------------------------------------------------- verify

int run_verify(unsigned width)
{
    char* text = nullptr;
    int passed = 0;
    check(cesa_verify(width, &text, &passed), "verify");
    std::cout << take(text);
    return passed ? 0 : kExitFailure;
}

// ----------------------------------------------------------------- cost

struct CostOptions {
    std::vector<std::string> configs;
    unsigned width = 32;
    unsigned block = 2;
    std::string variant = "cesa";
};

int run_cost(const CostOptions& o)
{
    std::vector<Adder> adders;
    if (o.configs.empty()) {
        adders.push_back(make_adder(o.width, o.block, o.variant));
    }
    for (const auto& c : o.configs) {
        adders.push_back(parse_adder(c));
    }
    Json out = Json::array();
    for (const auto& adder : adders) {
        char* raw = nullptr;
        check(cesa_cost_json(adder.get(), &raw), "cost");
        out.push_back(Json::parse(take(raw)));
    }
    std::cout << (out.size() == 1 ? out.front() : out).dump(2) << "\n";
    return 0;
}

// --------------------------------------------------------------- smooth

struct SmoothOptions {
    std::vector<std::string> configs{"32:4:cesa",  "32:4:cesa-perl",  "32:8:cesa",
                                     "32:8:cesa-perl", "32:16:cesa", "32:16:cesa-perl"};
    std::string input;
    std::optional<double> noise_sigma;
    double kernel_sigma = 1.0;
    unsigned scale_bits = 8;
    std::uint64_t seed = 1;
    std::string out_dir;
};

int run_smooth(const SmoothOptions& o)
{
    // validate every config before touching images
    std::vector<Adder> adders;
    for (const auto& c : o.configs) {
        adders.push_back(parse_adder(c));
    }
    cesa_image* raw = nullptr;
    double sigma = o.noise_sigma.value_or(0.0);
    if (o.input.empty()) {
        check(cesa_image_synthetic(256, 256, &raw), "synthetic image");
        sigma = o.noise_sigma.value_or(10.0);
    } else {
        check(cesa_image_read_pgm(o.input.c_str(), &raw), o.input);
    }
    Image source(raw);
    Image noisy;
    if (sigma > 0.0) {
        check(cesa_image_add_noise(source.get(), sigma, o.seed, &raw), "noise");
        noisy.reset(raw);
    } else {
        noisy = std::move(source);
    }

    const auto dir = output_dir(o.out_dir);
    check(cesa_image_write_pgm(noisy.get(), (dir / "noisy.pgm").c_str()), "write noisy.pgm");
    Json reports = Json::array();
    bool reference_written = false;
    for (const auto& adder : adders) {
        cesa_image* exact_raw = nullptr;
        cesa_image* approx_raw = nullptr;
        char* json = nullptr;
        cesa_quality q{};
        check(cesa_smooth(noisy.get(), adder.get(), o.kernel_sigma, o.scale_bits, o.seed, &exact_raw, &approx_raw, &q,
                          &json),
              "smooth " + describe(adder.get()));
        Image exact(exact_raw);
        Image approx(approx_raw);
        auto report = Json::parse(take(json));
        report["noise_sigma"] = sigma;
        report["kernel_sigma"] = o.kernel_sigma;
        report["scale_bits"] = o.scale_bits;
        if (!reference_written) {
            check(cesa_image_write_pgm(exact.get(), (dir / "reference.pgm").c_str()), "write reference.pgm");
            reference_written = true;
        }
        const auto name = "smoothed_" + filename_for(describe(adder.get())) + ".pgm";
        check(cesa_image_write_pgm(approx.get(), (dir / name).c_str()), "write " + name);
        report["image"] = name;

        char line[160];
        if (q.psnr_infinite) {
            std::snprintf(line, sizeof(line), "%-18s psnr inf     ssim %.6f", describe(adder.get()).c_str(), q.ssim);
        } else {
            std::snprintf(line, sizeof(line), "%-18s psnr %.4f  ssim %.6f", describe(adder.get()).c_str(), q.psnr,
                          q.ssim);
        }
        std::cout << line << "\n";
        reports.push_back(std::move(report));
    }
    write_text(dir / "smooth_report.json", reports.dump(2) + "\n");
    std::cout << "wrote " << (dir / "smooth_report.json").string() << "\n";
    return 0;
}

// --------------------------------------------------------------- kmeans

struct KmeansOptions {
    std::vector<std::string> configs{"32:4:cesa-perl", "32:8:cesa-perl", "32:16:cesa-perl"};
    std::uint64_t seed = 1;
    std::string data;
    std::uint64_t dataset_seed = 2020;
    unsigned clusters = 3;
    unsigned max_iter = 100;
    std::string out_dir;
};

int run_kmeans(const KmeansOptions& o)
{
    std::vector<Adder> adders;
    for (const auto& c : o.configs) {
        adders.push_back(parse_adder(c));
    }
    cesa_dataset* raw = nullptr;
    if (o.data.empty()) {
        check(cesa_dataset_synthetic(o.dataset_seed, &raw), "synthetic dataset");
    } else {
        check(cesa_dataset_read_csv(o.data.c_str(), &raw), o.data);
    }
    Dataset data(raw);
    const auto dir = output_dir(o.out_dir);
    Json reports = Json::array();
    for (const auto& adder : adders) {
        cesa_clustering* result_raw = nullptr;
        check(cesa_kmeans(data.get(), o.clusters, adder.get(), o.max_iter, o.seed, &result_raw),
              "kmeans " + describe(adder.get()));
        Clustering result(result_raw);
        char* json = nullptr;
        check(cesa_clustering_json(result.get(), &json), "kmeans report");
        auto report = Json::parse(take(json));
        report["dataset"] = o.data.empty() ? Json("synthetic:" + std::to_string(o.dataset_seed)) : Json(o.data);
        char line[160];
        std::snprintf(line, sizeof(line), "%-18s agreement %.6f  centroid_distance %.6f  iterations %u",
                      describe(adder.get()).c_str(), cesa_clustering_agreement(result.get()),
                      cesa_clustering_centroid_distance(result.get()), cesa_clustering_iterations(result.get()));
        std::cout << line << "\n";
        reports.push_back(std::move(report));
    }
    write_text(dir / "kmeans_report.json", reports.dump(2) + "\n");
    std::cout << "wrote " << (dir / "kmeans_report.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{std::string("CESA / CESA-PERL approximate adder toolkit (libcesa ") + cesa_version() + ")"};
    app.require_subcommand(1);

    AddOptions add;
    auto* add_cmd = app.add_subcommand("add", "Add two operands and compare against exact addition");
    add_cmd->add_option("--width", add.width, "Operand width in bits")->capture_default_str();
    add_cmd->add_option("--block", add.block, "Block size in bits")->capture_default_str();
    add_cmd->add_option("--variant", add.variant, "exact | cesa | cesa-perl")->capture_default_str();
    add_cmd->add_flag("--json", add.json, "Print the JSON record");
    add_cmd->add_option("a", add.a, "First operand (decimal or 0x hex)")->required();
    add_cmd->add_option("b", add.b, "Second operand")->required();

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Error metrics and cost over a grid of configurations");
    sweep_cmd->add_option("--widths", sweep.widths)->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--blocks", sweep.blocks)->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--variants", sweep.variants)->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--mode", sweep.mode, "exhaustive | monte-carlo")->capture_default_str();
    sweep_cmd->add_option("--samples", sweep.samples, "Samples per Monte Carlo run")->capture_default_str();
    sweep_cmd->add_option("--runs", sweep.runs, "Monte Carlo runs")->capture_default_str();
    sweep_cmd->add_option("--seed", sweep.seed)->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out, "Report path (stdout when omitted)");
    sweep_cmd->add_option("--format", sweep.format, "json | csv (default from --out extension)");
    sweep_cmd->add_option("--exhaustive-cap", sweep.exhaustive_cap, "Largest width enumerated exhaustively")
        ->check(CLI::Range(2, 16))
        ->capture_default_str();

    unsigned verify_width = 8;
    auto* verify_cmd = app.add_subcommand("verify", "Check every adder invariant exhaustively");
    verify_cmd->add_option("--width", verify_width, "Width to enumerate (2..12)")
        ->check(CLI::Range(2, 12))
        ->capture_default_str();

    CostOptions cost;
    auto* cost_cmd = app.add_subcommand("cost", "Unit-gate delay and area");
    cost_cmd->add_option("--config", cost.configs, "width:block:variant (repeatable)");
    cost_cmd->add_option("--width", cost.width)->capture_default_str();
    cost_cmd->add_option("--block", cost.block)->capture_default_str();
    cost_cmd->add_option("--variant", cost.variant)->capture_default_str();

    SmoothOptions smooth;
    auto* smooth_cmd = app.add_subcommand("smooth", "Gaussian smoothing with approximate accumulation");
    smooth_cmd->add_option("--config", smooth.configs, "width:block:variant (repeatable)");
    smooth_cmd->add_option("--input", smooth.input, "Binary PGM (P5); default is the built-in test image");
    smooth_cmd->add_option("--noise-sigma", smooth.noise_sigma,
                           "Gaussian noise added before smoothing (default 10 for the built-in image, 0 for --input)");
    smooth_cmd->add_option("--kernel-sigma", smooth.kernel_sigma)->capture_default_str();
    smooth_cmd->add_option("--scale-bits", smooth.scale_bits, "Fixed-point bits of the kernel weights")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();
    smooth_cmd->add_option("--seed", smooth.seed, "Noise seed")->capture_default_str();
    smooth_cmd->add_option("--out-dir", smooth.out_dir, "Output directory (default $CESA_OUTPUT_DIR or ./cesa_out)");

    KmeansOptions km;
    auto* km_cmd = app.add_subcommand("kmeans", "Fixed-point k-means with approximate accumulation");
    km_cmd->add_option("--config", km.configs, "width:block:variant (repeatable)");
    km_cmd->add_option("--seed", km.seed, "Seeding RNG seed")->capture_default_str();
    km_cmd->add_option("--data", km.data, "Headerless CSV, one point per row; default is the built-in dataset");
    km_cmd->add_option("--dataset-seed", km.dataset_seed, "Seed of the built-in dataset")->capture_default_str();
    km_cmd->add_option("--clusters", km.clusters)->check(CLI::Range(1, 1000))->capture_default_str();
    km_cmd->add_option("--max-iter", km.max_iter)->check(CLI::Range(1, 100000))->capture_default_str();
    km_cmd->add_option("--out-dir", km.out_dir, "Output directory (default $CESA_OUTPUT_DIR or ./cesa_out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*add_cmd) {
            return run_add(add);
        }
        if (*sweep_cmd) {
            return run_sweep(sweep);
        }
        if (*verify_cmd) {
            return run_verify(verify_width);
        }
        if (*cost_cmd) {
            return run_cost(cost);
        }
        if (*smooth_cmd) {
            return run_smooth(smooth);
        }
        if (*km_cmd) {
            return run_kmeans(km);
        }
    } catch (const Failure& f) {
        std::cerr << "cesa: " << f.what() << "\n";
        const bool usage = f.status == CESA_ERR_CONFIG || f.status == CESA_ERR_RANGE ||
                           f.status == CESA_ERR_INVALID_ARGUMENT;
        return usage ? kExitUsage : kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "cesa: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
