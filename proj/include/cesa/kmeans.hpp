#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cesa/adder.hpp"

namespace cesa {

inline constexpr double kFixedPointScale = 1000.0;
inline constexpr std::uint64_t kDefaultDatasetSeed = 2020;

/// Points stored as non-negative fixed-point integers (real value * 1000).
class Dataset {
public:
    Dataset(std::size_t dims, std::vector<std::uint64_t> coords);

    /// Shifts each dimension by its minimum, then scales by 1000 and rounds.
    /// Translation does not change the clustering and keeps the integers small.
    static Dataset from_real(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return dims_ == 0 ? 0 : coords_.size() / dims_; }
    std::size_t dims() const noexcept { return dims_; }
    std::span<const std::uint64_t> point(std::size_t i) const noexcept
    {
        return std::span<const std::uint64_t>(coords_).subspan(i * dims_, dims_);
    }
    std::uint64_t max_coordinate() const noexcept;

private:
    std::size_t dims_;
    std::vector<std::uint64_t> coords_;
};

/// CSV of real coordinates, one point per row. A leading all-text header line is skipped.
Dataset read_dataset_csv(const std::filesystem::path& path);
Dataset parse_dataset_csv(const std::string& text);

/// 150 points in 4 dimensions drawn from three seeded Gaussian clusters of 50
/// shaped like the classic iris measurements.
Dataset synthetic_iris_like(std::uint64_t seed = kDefaultDatasetSeed);

struct ClusteringResult {
    AdderConfig config;
    std::vector<std::uint32_t> assignments;
    std::vector<std::vector<std::uint64_t>> centroids;
    unsigned iterations = 0;
    double agreement = 1.0;         ///< vs the exact-addition run, after best label matching
    double centroid_distance = 0.0; ///< mean L2 distance to the matched exact centroids, real units
    std::uint64_t seed = 0;
};

/// Raw Lloyd iterations without the baseline comparison.
struct LloydRun {
    std::vector<std::uint32_t> assignments;
    std::vector<std::vector<std::uint64_t>> centroids;
    unsigned iterations = 0;
};

/// Greedy k-means++ seeding with exact arithmetic, so every adder starts from the same centroids.
std::vector<std::vector<std::uint64_t>> kmeans_plus_plus(const Dataset& data, std::size_t clusters,
                                                         std::uint64_t seed);

/// Lloyd's algorithm; distance and centroid sums accumulate through the configured adder.
LloydRun lloyd(const Dataset& data, std::size_t clusters, const AdderConfig& config, unsigned max_iter,
               std::uint64_t seed);

/// Throws ConfigError when the adder cannot hold squared distances or coordinate sums.
void check_clustering_width(const Dataset& data, const AdderConfig& config);

/// Fraction of points whose label agrees under the best one-to-one relabeling.
double label_agreement(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::size_t clusters);

inline constexpr unsigned kDefaultMaxIter = 100;

ClusteringResult kmeans(const Dataset& data, std::size_t clusters, const AdderConfig& config,
                        unsigned max_iter, std::uint64_t seed);

} // namespace cesa
