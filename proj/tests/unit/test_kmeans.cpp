#include <random>

#include "cesa/error.hpp"
#include "cesa/kmeans.hpp"
#include "doctest.h"

using namespace cesa;

namespace {

// Three tight blobs whose centres are 100 spreads apart.
Dataset well_separated(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    const double centres[3][2] = {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}};
    const double spread = 0.005;
    std::vector<std::vector<double>> rows;
    for (const auto& c : centres) {
        for (int i = 0; i < 50; ++i) {
            rows.push_back({c[0] + spread * unit(rng), c[1] + spread * unit(rng)});
        }
    }
    return Dataset::from_real(rows);
}

} // namespace

TEST_CASE("dataset construction")
{
    const auto d = Dataset::from_real({{1.5, -2.0}, {2.0, 0.0}});
    CHECK(d.size() == 2);
    CHECK(d.dims() == 2);
    // shifted per dimension by the minimum, then scaled by 1000
    CHECK(d.point(0)[0] == 0);
    CHECK(d.point(1)[0] == 500);
    CHECK(d.point(0)[1] == 0);
    CHECK(d.point(1)[1] == 2000);
    CHECK(d.max_coordinate() == 2000);
    CHECK_THROWS_AS(Dataset::from_real({{1.0}, {1.0, 2.0}}), RangeError);
    CHECK_THROWS_AS(Dataset::from_real({}), RangeError);
    CHECK_THROWS_AS(Dataset(3, {1, 2}), RangeError);
}

TEST_CASE("csv parsing")
{
    const auto d = parse_dataset_csv("1.0,2.0\n 3.5 , 4\n\n5,6\r\n");
    CHECK(d.size() == 3);
    CHECK(d.dims() == 2);
    CHECK(parse_dataset_csv("sepal_length,sepal_width\n1,2\n3,4\n").size() == 2);

    auto expect_row = [](const std::string& text, const std::string& needle) {
        try {
            parse_dataset_csv(text);
            FAIL("no error for " << text);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_row("1,2\n3,4\n5,x\n", "CSV row 3");
    expect_row("1,2\n3,4,5\n", "CSV row 2");
    expect_row("1,abc\n2,3\n", "CSV row 1");
    expect_row("1,2\n\n,4\n", "CSV row 3");
    expect_row("", "no data rows");
    CHECK_THROWS_AS(read_dataset_csv("/nonexistent/points.csv"), IoError);
}

TEST_CASE("built-in dataset")
{
    const auto d = synthetic_iris_like();
    CHECK(d.size() == 150);
    CHECK(d.dims() == 4);
    CHECK(d.max_coordinate() < 1000);
    const auto again = synthetic_iris_like();
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(std::equal(d.point(i).begin(), d.point(i).end(), again.point(i).begin()));
    }
}

TEST_CASE("label agreement")
{
    const std::vector<std::uint32_t> a{0, 0, 1, 1, 2, 2};
    const std::vector<std::uint32_t> renamed{2, 2, 0, 0, 1, 1};
    const std::vector<std::uint32_t> one_off{2, 2, 0, 1, 1, 1};
    CHECK(label_agreement(a, renamed, 3) == 1.0);
    CHECK(label_agreement(a, one_off, 3) == doctest::Approx(5.0 / 6));
    CHECK_THROWS_AS(label_agreement(a, std::vector<std::uint32_t>{0}, 3), RangeError);
}

TEST_CASE("seeding is exact and deterministic")
{
    const auto d = synthetic_iris_like();
    const auto c1 = kmeans_plus_plus(d, 3, 7);
    const auto c2 = kmeans_plus_plus(d, 3, 7);
    CHECK(c1 == c2);
    REQUIRE(c1.size() == 3);
    CHECK(c1[0] != c1[1]);
    CHECK(c1[1] != c1[2]);
}

TEST_CASE("kmeans result shape")
{
    const auto d = synthetic_iris_like();
    const auto r = kmeans(d, 3, AdderConfig(32, 8, Variant::CesaPerl), kDefaultMaxIter, 1);
    CHECK(r.assignments.size() == d.size());
    for (auto label : r.assignments) {
        CHECK(label < 3);
    }
    CHECK(r.centroids.size() == 3);
    CHECK(r.iterations >= 1);
    CHECK(r.iterations <= kDefaultMaxIter);
    CHECK(r.seed == 1);
    CHECK(r.agreement >= 0.0);
    CHECK(r.agreement <= 1.0);

    const auto capped = kmeans(d, 3, AdderConfig(32, 4, Variant::Cesa), 1, 1);
    CHECK(capped.iterations == 1);
}

TEST_CASE("exact variant agrees with itself")
{
    const auto d = synthetic_iris_like();
    for (std::uint64_t seed : {1, 7, 42}) {
        const auto r = kmeans(d, 3, AdderConfig(32, 0, Variant::Exact), kDefaultMaxIter, seed);
        CHECK(r.agreement == 1.0);
        CHECK(r.centroid_distance == 0.0);
    }
}

TEST_CASE("cesa-perl at blocks 8 and 16 clusters the built-in dataset exactly")
{
    const auto d = synthetic_iris_like();
    for (std::uint64_t seed : {1, 7, 42, 2020}) {
        for (unsigned k : {8U, 16U}) {
            const auto r = kmeans(d, 3, AdderConfig(32, k, Variant::CesaPerl), kDefaultMaxIter, seed);
            CHECK_MESSAGE(r.agreement == 1.0, "seed " << seed << " k " << k);
        }
    }
}

TEST_CASE("well separated clusters survive every variant at 32:16")
{
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto d = well_separated(seed);
        for (auto v : {Variant::Exact, Variant::Cesa, Variant::CesaPerl}) {
            const auto r = kmeans(d, 3, AdderConfig(32, 16, v), kDefaultMaxIter, seed);
            CHECK(r.agreement == 1.0);
            // and the clusters are the generated blobs
            for (std::size_t i = 0; i < d.size(); ++i) {
                CHECK(r.assignments[i] == r.assignments[(i / 50) * 50]);
            }
        }
    }
}

TEST_CASE("kmeans argument checks")
{
    const auto d = Dataset::from_real({{0.0}, {1.0}});
    CHECK_THROWS_AS(kmeans(d, 3, AdderConfig(32, 8, Variant::Cesa), 10, 1), RangeError);
    CHECK_THROWS_AS(kmeans(d, 0, AdderConfig(32, 8, Variant::Cesa), 10, 1), RangeError);
    CHECK_THROWS_AS(kmeans(synthetic_iris_like(), 3, AdderConfig(8, 4, Variant::Cesa), 10, 1), ConfigError);
}
