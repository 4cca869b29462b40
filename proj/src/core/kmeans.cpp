#include "cesa/kmeans.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "cesa/error.hpp"

namespace cesa {

Dataset::Dataset(std::size_t dims, std::vector<std::uint64_t> coords) : dims_(dims), coords_(std::move(coords))
{
    if (dims_ == 0 || coords_.empty() || coords_.size() % dims_ != 0) {
        throw RangeError("dataset needs at least one point and a whole number of coordinates per point");
    }
}

Dataset Dataset::from_real(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty() || rows.front().empty()) {
        throw RangeError("dataset is empty");
    }
    const auto dims = rows.front().size();
    std::vector<double> low(rows.front());
    for (const auto& r : rows) {
        if (r.size() != dims) {
            throw RangeError("dataset rows have differing dimension");
        }
        for (std::size_t d = 0; d < dims; ++d) {
            if (!std::isfinite(r[d])) {
                throw RangeError("dataset coordinate is not finite");
            }
            low[d] = std::min(low[d], r[d]);
        }
    }
    std::vector<std::uint64_t> coords;
    coords.reserve(rows.size() * dims);
    for (const auto& r : rows) {
        for (std::size_t d = 0; d < dims; ++d) {
            coords.push_back(static_cast<std::uint64_t>(std::llround((r[d] - low[d]) * kFixedPointScale)));
        }
    }
    return Dataset(dims, std::move(coords));
}

std::uint64_t Dataset::max_coordinate() const noexcept { return *std::max_element(coords_.begin(), coords_.end()); }

Dataset parse_dataset_csv(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto end = line.find(',', start);
            auto field = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
            const auto first = field.find_first_not_of(" \t");
            const auto last = field.find_last_not_of(" \t");
            fields.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
            if (end == std::string::npos) {
                break;
            }
            start = end + 1;
        }
        std::vector<double> values;
        std::optional<std::string> bad;
        for (const auto& field : fields) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
                bad = bad.value_or(field);
            } else {
                values.push_back(v);
            }
        }
        if (bad) {
            // a leading line with no numeric field at all is a header
            if (rows.empty() && !header_skipped && values.empty()) {
                header_skipped = true;
                continue;
            }
            throw ParseError("CSV row " + std::to_string(row) + ": field '" + *bad + "' is not a number");
        }
        if (!rows.empty() && values.size() != rows.front().size()) {
            throw ParseError("CSV row " + std::to_string(row) + ": expected " + std::to_string(rows.front().size()) +
                             " columns, found " + std::to_string(values.size()));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw ParseError("CSV holds no data rows");
    }
    return Dataset::from_real(rows);
}

Dataset read_dataset_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_dataset_csv(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Dataset synthetic_iris_like(std::uint64_t seed)
{
    struct Species {
        double mean[4];
        double sd[4];
    };
    // sepal length, sepal width, petal length, petal width in cm; stored in dm so fixed-point sums stay small
    static constexpr Species species[3] = {
        {{5.01, 3.43, 1.46, 0.25}, {0.25, 0.25, 0.12, 0.08}},
        {{5.94, 2.77, 4.26, 1.33}, {0.30, 0.20, 0.25, 0.12}},
        {{6.59, 2.97, 5.55, 2.03}, {0.32, 0.20, 0.25, 0.14}},
    };
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    for (const auto& s : species) {
        for (int i = 0; i < 50; ++i) {
            std::vector<double> p(4);
            for (int d = 0; d < 4; ++d) {
                p[d] = std::max(0.1, s.mean[d] + s.sd[d] * unit(rng)) / 10.0;
            }
            rows.push_back(std::move(p));
        }
    }
    return Dataset::from_real(rows);
}

// ---------------------------------------------------------------------------

namespace {

using Centroids = std::vector<std::vector<std::uint64_t>>;

std::uint64_t abs_diff(std::uint64_t x, std::uint64_t y) noexcept { return x > y ? x - y : y - x; }

Wide exact_sq_distance(std::span<const std::uint64_t> p, std::span<const std::uint64_t> c)
{
    Wide acc = 0;
    for (std::size_t d = 0; d < p.size(); ++d) {
        const Wide diff = abs_diff(p[d], c[d]);
        acc += diff * diff;
    }
    return acc;
}

class Accumulator {
public:
    explicit Accumulator(const AdderConfig& config) : config_(config) {}

    std::uint64_t operator()(std::uint64_t acc, std::uint64_t term) const
    {
        const auto r = add(Word{acc, config_.width()}, Word{term, config_.width()}, config_);
        // check_clustering_width guarantees no carry-out
        return r.sum().value();
    }

private:
    const AdderConfig& config_;
};

std::uint32_t nearest(std::span<const std::uint64_t> p, const Centroids& centroids, const Accumulator& accumulate)
{
    std::uint32_t best = 0;
    std::uint64_t best_distance = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        std::uint64_t acc = 0;
        for (std::size_t d = 0; d < p.size(); ++d) {
            const auto diff = abs_diff(p[d], centroids[c][d]);
            acc = accumulate(acc, diff * diff);
        }
        if (acc < best_distance) {
            best_distance = acc;
            best = static_cast<std::uint32_t>(c);
        }
    }
    return best;
}

} // namespace

void check_clustering_width(const Dataset& data, const AdderConfig& config)
{
    const Wide peak = data.max_coordinate();
    const Wide distance_peak = peak * peak * data.dims();
    const Wide sum_peak = peak * data.size();
    const Wide limit = config.mask();
    if (distance_peak > limit || sum_peak > limit) {
        throw ConfigError("adder width " + std::to_string(config.width()) +
                          " too narrow for this dataset's squared distances or coordinate sums");
    }
}

Centroids kmeans_plus_plus(const Dataset& data, std::size_t clusters, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const auto n = data.size();
    // greedy variant: draw several candidates per step and keep the one with the lowest potential
    const auto trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(clusters)));
    Centroids centroids;
    const auto first = rng() % n;
    centroids.emplace_back(data.point(first).begin(), data.point(first).end());
    std::vector<Wide> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        d2[i] = exact_sq_distance(data.point(i), centroids.front());
    }
    while (centroids.size() < clusters) {
        Wide total = 0;
        for (auto v : d2) {
            total += v;
        }
        std::size_t best_pick = centroids.size() % n;
        std::vector<Wide> best_d2 = d2;
        std::optional<Wide> best_potential;
        for (std::size_t t = 0; t < trials; ++t) {
            std::size_t pick = best_pick;
            if (total > 0) {
                // 53-bit uniform fraction of the total mass
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                const auto target = static_cast<Wide>(u * static_cast<double>(total));
                Wide running = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    running += d2[i];
                    if (running > target) {
                        pick = i;
                        break;
                    }
                }
            }
            std::vector<Wide> candidate(n);
            Wide potential = 0;
            for (std::size_t i = 0; i < n; ++i) {
                candidate[i] = std::min(d2[i], exact_sq_distance(data.point(i), data.point(pick)));
                potential += candidate[i];
            }
            if (!best_potential || potential < *best_potential) {
                best_potential = potential;
                best_pick = pick;
                best_d2 = std::move(candidate);
            }
        }
        d2 = std::move(best_d2);
        centroids.emplace_back(data.point(best_pick).begin(), data.point(best_pick).end());
    }
    return centroids;
}

LloydRun lloyd(const Dataset& data, std::size_t clusters, const AdderConfig& config, unsigned max_iter,
               std::uint64_t seed)
{
    if (clusters == 0) {
        throw RangeError("need at least one cluster");
    }
    if (clusters > data.size()) {
        throw RangeError("cluster count " + std::to_string(clusters) + " exceeds point count " +
                         std::to_string(data.size()));
    }
    check_clustering_width(data, config);

    const Accumulator accumulate(config);
    LloydRun run{std::vector<std::uint32_t>(data.size(), 0), kmeans_plus_plus(data, clusters, seed), 0};
    bool first = true;
    while (run.iterations < max_iter) {
        ++run.iterations;
        bool changed = false;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto c = nearest(data.point(i), run.centroids, accumulate);
            if (first || c != run.assignments[i]) {
                changed = true;
                run.assignments[i] = c;
            }
        }
        first = false;
        if (!changed) {
            break;
        }
        // centroid sums in ascending point index
        Centroids sums(clusters, std::vector<std::uint64_t>(data.dims(), 0));
        std::vector<std::uint64_t> counts(clusters, 0);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto c = run.assignments[i];
            ++counts[c];
            const auto p = data.point(i);
            for (std::size_t d = 0; d < data.dims(); ++d) {
                sums[c][d] = accumulate(sums[c][d], p[d]);
            }
        }
        for (std::size_t c = 0; c < clusters; ++c) {
            if (counts[c] == 0) {
                continue; // empty cluster keeps its previous centroid
            }
            for (std::size_t d = 0; d < data.dims(); ++d) {
                run.centroids[c][d] = (sums[c][d] + counts[c] / 2) / counts[c];
            }
        }
    }
    return run;
}

namespace {

/// Best one-to-one mapping from labels of `a` onto labels of `b`.
std::vector<std::uint32_t> best_relabeling(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                                           std::size_t clusters)
{
    std::vector<std::vector<std::size_t>> overlap(clusters, std::vector<std::size_t>(clusters, 0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++overlap[a[i]][b[i]];
    }
    std::vector<std::uint32_t> perm(clusters);
    std::iota(perm.begin(), perm.end(), 0U);
    if (clusters <= 8) {
        auto best = perm;
        std::size_t best_score = 0;
        do {
            std::size_t score = 0;
            for (std::size_t c = 0; c < clusters; ++c) {
                score += overlap[c][perm[c]];
            }
            if (score > best_score) {
                best_score = score;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    // greedy on the largest remaining overlap
    std::vector<bool> used_a(clusters, false), used_b(clusters, false);
    for (std::size_t step = 0; step < clusters; ++step) {
        std::size_t ba = 0, bb = 0, score = 0;
        bool found = false;
        for (std::size_t x = 0; x < clusters; ++x) {
            for (std::size_t y = 0; y < clusters; ++y) {
                if (!used_a[x] && !used_b[y] && (!found || overlap[x][y] > score)) {
                    ba = x, bb = y, score = overlap[x][y], found = true;
                }
            }
        }
        used_a[ba] = used_b[bb] = true;
        perm[ba] = static_cast<std::uint32_t>(bb);
    }
    return perm;
}

} // namespace

double label_agreement(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::size_t clusters)
{
    if (a.size() != b.size()) {
        throw RangeError("label vectors differ in length");
    }
    if (a.empty()) {
        return 1.0;
    }
    const auto perm = best_relabeling(a, b, clusters);
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same += perm[a[i]] == b[i] ? 1 : 0;
    }
    return static_cast<double>(same) / static_cast<double>(a.size());
}

ClusteringResult kmeans(const Dataset& data, std::size_t clusters, const AdderConfig& config, unsigned max_iter,
                        std::uint64_t seed)
{
    const auto run = lloyd(data, clusters, config, max_iter, seed);
    ClusteringResult out{config, run.assignments, run.centroids, run.iterations, 1.0, 0.0, seed};
    if (config.variant() == Variant::Exact) {
        return out;
    }
    const auto baseline = lloyd(data, clusters, AdderConfig(config.width(), 0, Variant::Exact), max_iter, seed);
    out.agreement = label_agreement(run.assignments, baseline.assignments, clusters);
    const auto perm = best_relabeling(run.assignments, baseline.assignments, clusters);
    double distance = 0.0;
    for (std::size_t c = 0; c < clusters; ++c) {
        distance += std::sqrt(static_cast<double>(exact_sq_distance(run.centroids[c], baseline.centroids[perm[c]])));
    }
    out.centroid_distance = distance / static_cast<double>(clusters) / kFixedPointScale;
    return out;
}

} // namespace cesa
