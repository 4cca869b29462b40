#include "cesa/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "cesa/error.hpp"
#include "parallel.hpp"

namespace cesa {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(width * height, fill)
{
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels))
{
    if (pixels_.size() != width * height) {
        throw RangeError("image buffer holds " + std::to_string(pixels_.size()) + " pixels, expected " +
                         std::to_string(width * height));
    }
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmReader {
public:
    explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void expect_magic()
    {
        if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '5') {
            fail(0, "expected magic 'P5'");
        }
        pos_ = 2;
    }

    std::size_t header_number(const char* what)
    {
        skip_space_and_comments();
        const auto start = pos_;
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (std::size_t{1} << 24)) {
                fail(start, std::string(what) + " is implausibly large");
            }
            ++pos_;
        }
        if (pos_ == start) {
            fail(pos_, std::string("expected ") + what);
        }
        return value;
    }

    void single_whitespace()
    {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            fail(pos_, "expected whitespace after maxval");
        }
        ++pos_;
    }

    std::span<const std::uint8_t> take(std::size_t count)
    {
        if (bytes_.size() - pos_ < count) {
            fail(bytes_.size(), "pixel data truncated: need " + std::to_string(count) + " bytes, have " +
                                    std::to_string(bytes_.size() - pos_));
        }
        auto out = bytes_.subspan(pos_, count);
        pos_ += count;
        return out;
    }

    [[noreturn]] static void fail(std::size_t offset, const std::string& what)
    {
        throw ParseError("PGM byte offset " + std::to_string(offset) + ": " + what);
    }

private:
    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

GrayImage parse_pgm(std::span<const std::uint8_t> bytes)
{
    PgmReader reader(bytes);
    reader.expect_magic();
    const auto width = reader.header_number("width");
    const auto height = reader.header_number("height");
    const auto maxval = reader.header_number("maxval");
    if (width == 0 || height == 0) {
        PgmReader::fail(2, "zero image dimension");
    }
    if (maxval == 0 || maxval > 255) {
        PgmReader::fail(2, "maxval " + std::to_string(maxval) + " unsupported (8-bit only)");
    }
    reader.single_whitespace();
    auto data = reader.take(width * height);
    return GrayImage(width, height, std::vector<std::uint8_t>(data.begin(), data.end()));
}

GrayImage read_pgm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_pgm(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image)
{
    const auto header = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels().begin(), image.pixels().end());
    return out;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path)
{
    const auto bytes = encode_pgm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

// ---------------------------------------------------------------------------
// Test data

GrayImage synthetic_test_image(std::size_t width, std::size_t height)
{
    GrayImage img(width, height);
    const double cx = (static_cast<double>(width) - 1) / 2;
    const double cy = (static_cast<double>(height) - 1) / 2;
    const double rmax = std::hypot(cx, cy);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const double dx = static_cast<double>(x) - cx;
            const double dy = static_cast<double>(y) - cy;
            const double r = std::hypot(dx, dy) / rmax;
            double v = 40.0 + 170.0 * (1.0 - r);
            v += 25.0 * std::sin(static_cast<double>(x) / 3.5) * std::cos(static_cast<double>(y) / 5.0);
            // two flat patches with hard edges
            if (x >= width / 8 && x < width / 3 && y >= height / 8 && y < height / 3) {
                v = 225.0;
            }
            if (x >= 2 * width / 3 && x < 7 * width / 8 && y >= 5 * height / 8 && y < 7 * height / 8) {
                v = 30.0;
            }
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return img;
}

GrayImage add_noise(const GrayImage& image, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0)) {
        throw RangeError("noise sigma must be >= 0");
    }
    GrayImage out = image;
    if (sigma == 0.0) {
        return out;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& p : out.pixels()) {
        p = static_cast<std::uint8_t>(std::clamp(std::lround(p + noise(rng)), 0L, 255L));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Convolution

std::uint64_t IntKernel::sum() const noexcept
{
    std::uint64_t s = 0;
    for (auto w : weights) {
        s += w;
    }
    return s;
}

IntKernel gaussian_kernel_int(std::size_t size, double sigma, unsigned scale_bits)
{
    if (size == 0 || size % 2 == 0) {
        throw RangeError("kernel size must be odd and positive");
    }
    if (!(sigma > 0.0)) {
        throw RangeError("kernel sigma must be > 0");
    }
    if (scale_bits < 1 || scale_bits > 24) {
        throw RangeError("kernel scale bits must be in 1..24");
    }
    IntKernel k{size, std::vector<std::uint32_t>(size * size), scale_bits};
    const auto half = static_cast<double>(size / 2);
    const double scale = std::ldexp(1.0, static_cast<int>(scale_bits));
    const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
    for (std::size_t row = 0; row < size; ++row) {
        for (std::size_t col = 0; col < size; ++col) {
            const double dx = static_cast<double>(col) - half;
            const double dy = static_cast<double>(row) - half;
            const double g = norm * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k.weights[row * size + col] = static_cast<std::uint32_t>(std::llround(g * scale));
        }
    }
    if (k.sum() == 0) {
        throw RangeError("kernel quantizes to all zeros; raise scale bits");
    }
    return k;
}

void check_accumulator_width(const IntKernel& kernel, const AdderConfig& config)
{
    const Wide peak = static_cast<Wide>(255) * kernel.sum();
    if (config.width() < 64 && peak > config.mask()) {
        throw ConfigError("adder width " + std::to_string(config.width()) +
                          " cannot hold the accumulator peak 255 * " + std::to_string(kernel.sum()));
    }
}

namespace {

template <typename Accumulate>
GrayImage convolve(const GrayImage& image, const IntKernel& kernel, Accumulate&& accumulate)
{
    const auto w = static_cast<std::ptrdiff_t>(image.width());
    const auto h = static_cast<std::ptrdiff_t>(image.height());
    const auto half = static_cast<std::ptrdiff_t>(kernel.size / 2);
    const std::uint64_t divisor = kernel.sum();
    GrayImage out(image.width(), image.height());
    detail::parallel_for(image.height(), [&](std::size_t row) {
        const auto y = static_cast<std::ptrdiff_t>(row);
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            Wide acc = 0;
            for (std::size_t ky = 0; ky < kernel.size; ++ky) {
                const auto sy = std::clamp<std::ptrdiff_t>(y + static_cast<std::ptrdiff_t>(ky) - half, 0, h - 1);
                for (std::size_t kx = 0; kx < kernel.size; ++kx) {
                    const auto sx = std::clamp<std::ptrdiff_t>(x + static_cast<std::ptrdiff_t>(kx) - half, 0, w - 1);
                    const std::uint64_t product =
                        std::uint64_t{kernel.at(kx, ky)} * image.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(sy));
                    acc = accumulate(acc, product);
                }
            }
            const Wide value = (acc + divisor / 2) / divisor;
            out.at(static_cast<std::size_t>(x), row) = static_cast<std::uint8_t>(value > 255 ? 255 : value);
        }
    });
    return out;
}

} // namespace

GrayImage convolve_approx(const GrayImage& image, const IntKernel& kernel, const AdderConfig& config)
{
    check_accumulator_width(kernel, config);
    return convolve(image, kernel, [&](Wide acc, std::uint64_t product) -> Wide {
        const auto r = add(Word{static_cast<std::uint64_t>(acc), config.width()}, Word{product, config.width()}, config);
        return r.extended_value();
    });
}

GrayImage convolve_reference(const GrayImage& image, const IntKernel& kernel)
{
    return convolve(image, kernel, [](Wide acc, std::uint64_t product) -> Wide { return acc + product; });
}

// ---------------------------------------------------------------------------
// Quality metrics

namespace {

void require_same_shape(const GrayImage& a, const GrayImage& b)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        throw RangeError("image dimensions differ: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                         " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
    }
}

} // namespace

double psnr(const GrayImage& reference, const GrayImage& test)
{
    require_same_shape(reference, test);
    std::uint64_t squared = 0;
    const auto ref = reference.pixels();
    const auto tst = test.pixels();
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const auto d = static_cast<std::int64_t>(ref[i]) - tst[i];
        squared += static_cast<std::uint64_t>(d * d);
    }
    if (squared == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const double mse = static_cast<double>(squared) / static_cast<double>(ref.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const GrayImage& reference, const GrayImage& test)
{
    require_same_shape(reference, test);
    if (reference.width() < kSsimWindow || reference.height() < kSsimWindow) {
        throw RangeError("ssim needs images of at least 8x8");
    }
    constexpr double L = 255.0;
    constexpr double c1 = (0.01 * L) * (0.01 * L);
    constexpr double c2 = (0.03 * L) * (0.03 * L);
    constexpr double n = kSsimWindow * kSsimWindow;

    const std::size_t rows = reference.height() - kSsimWindow + 1;
    const std::size_t cols = reference.width() - kSsimWindow + 1;
    std::vector<double> row_sums(rows, 0.0);
    detail::parallel_for(rows, [&](std::size_t y0) {
        double acc = 0.0;
        for (std::size_t x0 = 0; x0 < cols; ++x0) {
            // integer moments are exact for 8x8 windows of 8-bit samples
            std::int64_t sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (std::size_t y = y0; y < y0 + kSsimWindow; ++y) {
                for (std::size_t x = x0; x < x0 + kSsimWindow; ++x) {
                    const std::int64_t a = reference.at(x, y);
                    const std::int64_t b = test.at(x, y);
                    sx += a;
                    sy += b;
                    sxx += a * a;
                    syy += b * b;
                    sxy += a * b;
                }
            }
            const double mx = static_cast<double>(sx) / n;
            const double my = static_cast<double>(sy) / n;
            const double vx = static_cast<double>(sxx) / n - mx * mx;
            const double vy = static_cast<double>(syy) / n - my * my;
            const double cxy = static_cast<double>(sxy) / n - mx * my;
            acc += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
        row_sums[y0] = acc;
    });
    double total = 0.0;
    for (double s : row_sums) {
        total += s;
    }
    return total / static_cast<double>(rows * cols);
}

SmoothingRun run_smoothing(const GrayImage& noisy, const IntKernel& kernel, const AdderConfig& config,
                           std::uint64_t seed)
{
    check_accumulator_width(kernel, config);
    SmoothingRun run{convolve_reference(noisy, kernel), convolve_approx(noisy, kernel, config), {config, 0, 1, seed}};
    run.quality.psnr = psnr(run.exact, run.approx);
    run.quality.ssim = ssim(run.exact, run.approx);
    return run;
}

} // namespace cesa
