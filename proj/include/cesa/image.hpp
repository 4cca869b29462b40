#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cesa/adder.hpp"

namespace cesa {

/// 8-bit grayscale image, row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0);
    GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    std::uint8_t at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }
    std::uint8_t& at(std::size_t x, std::size_t y) noexcept { return pixels_[y * width_ + x]; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Binary PGM (P5), maxval <= 255.
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(std::span<const std::uint8_t> bytes);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

/// Built-in 256x256 test picture: radial gradient with a sinusoidal texture and a few hard edges.
GrayImage synthetic_test_image(std::size_t width = 256, std::size_t height = 256);

/// Additive zero-mean Gaussian noise, clamped to 0..255.
GrayImage add_noise(const GrayImage& image, double sigma, std::uint64_t seed);

/// Square integer convolution kernel. `shift` is the scale exponent used when quantizing.
struct IntKernel {
    std::size_t size = 0;
    std::vector<std::uint32_t> weights; ///< row-major, size*size entries
    unsigned shift = 0;

    std::uint64_t sum() const noexcept;
    std::uint32_t at(std::size_t col, std::size_t row) const noexcept { return weights[row * size + col]; }
};

inline constexpr std::size_t kGaussianSize = 5;
inline constexpr double kDefaultKernelSigma = 1.0;
inline constexpr unsigned kDefaultKernelScaleBits = 8;
inline constexpr double kDefaultNoiseSigma = 10.0;

/// Normalized 2-D Gaussian sampled on a size x size grid, scaled by 2^scale_bits and rounded.
IntKernel gaussian_kernel_int(std::size_t size, double sigma, unsigned scale_bits);

/// Throws ConfigError if 255 * kernel.sum() does not fit in the adder width.
void check_accumulator_width(const IntKernel& kernel, const AdderConfig& config);

/// Convolution with exact products, partial products accumulated in ascending
/// kernel index with the configured adder, rounded division by the kernel sum.
/// Borders replicate the edge pixels.
GrayImage convolve_approx(const GrayImage& image, const IntKernel& kernel, const AdderConfig& config);

/// Same pipeline with native integer addition.
GrayImage convolve_reference(const GrayImage& image, const IntKernel& kernel);

/// Peak 255. Returns +infinity for identical images.
double psnr(const GrayImage& reference, const GrayImage& test);

inline constexpr std::size_t kSsimWindow = 8;

/// Mean SSIM over all 8x8 windows (stride 1), K1 = 0.01, K2 = 0.03, L = 255.
double ssim(const GrayImage& reference, const GrayImage& test);

struct QualityReport {
    AdderConfig config;
    double psnr = 0.0; ///< +infinity when identical
    double ssim = 1.0;
    std::uint64_t seed = 0;
};

/// Smooths `noisy` with both exact and approximate addition and scores the approximate output
/// against the exact one.
struct SmoothingRun {
    GrayImage exact;
    GrayImage approx;
    QualityReport quality;
};

SmoothingRun run_smoothing(const GrayImage& noisy, const IntKernel& kernel, const AdderConfig& config,
                           std::uint64_t seed);

} // namespace cesa
