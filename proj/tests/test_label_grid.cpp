#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dense_grid_oracle.hpp"
#include "labelgrid/label_grid.hpp"
#include "labelgrid/log_odds.hpp"

using namespace labelgrid;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LabelOccupancyGrid make_grid(double clamp = 3.5, std::uint32_t labels = 4, double res = 1.0)
{
    GridConfig cfg;
    cfg.resolution = res;
    cfg.num_labels = labels;
    cfg.clamp = clamp;
    return LabelOccupancyGrid(cfg);
}

} // namespace

TEST_CASE("construction validates its configuration")
{
    GridConfig cfg;
    cfg.resolution = 0.0;
    CHECK_THROWS_AS(LabelOccupancyGrid{cfg}, std::invalid_argument);
    cfg.resolution = 0.01;
    cfg.num_labels = 1;
    CHECK_THROWS_AS(LabelOccupancyGrid{cfg}, std::invalid_argument);
    cfg.num_labels = 40;
    cfg.clamp = 0.0;
    CHECK_THROWS_AS(LabelOccupancyGrid{cfg}, std::invalid_argument);
}

TEST_CASE("voxel key conversion")
{
    const double res = 0.005;
    const VoxelKey k{-3, 7, 120};
    const Vec3 inside = voxel_min_corner(k, res) + Vec3(0.3, 0.5, 0.9) * res;
    CHECK(key_from_point(inside, res) == k);
    CHECK(key_from_point(voxel_center(k, res), res) == k);
    // Half-open cells: the min corner belongs to the cell, the max corner does not.
    CHECK(key_from_point(Vec3(1.0, 0.0, -1.0), 1.0) == VoxelKey{1, 0, -1});
    CHECK(key_from_point(Vec3(-0.25, 0.0, 0.0), 1.0) == VoxelKey{-1, 0, 0});
}

TEST_CASE("update_voxel examples")
{
    auto grid = make_grid();
    const VoxelKey k{1, 2, 3};

    SUBCASE("fresh voxel takes the measurement")
    {
        grid.update(k, LabelId{1}, 0.9);
        CHECK(grid.log_odds(k, LabelId{1}) == doctest::Approx(2.1972245773362194).epsilon(1e-14));
        CHECK(grid.voxel_probability(k, LabelId{1}) == doctest::Approx(0.9).epsilon(1e-14));
        CHECK(grid.log_odds(k, LabelId{0}) == 0.0);
    }
    SUBCASE("two p=0.7 updates")
    {
        grid.update(k, LabelId{2}, 0.7);
        grid.update(k, LabelId{2}, 0.7);
        // 2 ln(7/3) and 49/58
        CHECK(grid.log_odds(k, LabelId{2}) == doctest::Approx(1.6945957207744072).epsilon(1e-14));
        CHECK(grid.voxel_probability(k, LabelId{2}) == doctest::Approx(49.0 / 58.0).epsilon(1e-14));
    }
    SUBCASE("0.7 then 0.3 cancels exactly")
    {
        grid.update(k, LabelId{3}, 0.7);
        grid.update(k, LabelId{3}, 0.3);
        CHECK(grid.log_odds(k, LabelId{3}) == 0.0);
        CHECK(grid.voxel_probability(k, LabelId{3}) == 0.5);
        CHECK(grid.segment(LabelId{3}).empty());
    }
}

TEST_CASE("absent voxels read as the unknown state")
{
    const auto grid = make_grid();
    CHECK(grid.voxel_probability(VoxelKey{9, 9, 9}, LabelId{0}) == 0.5);
    CHECK(grid.cell(VoxelKey{9, 9, 9}).empty());
    auto explicit_zero = make_grid();
    const std::vector<double> zeros(4, 0.0);
    explicit_zero.set_cell(VoxelKey{9, 9, 9}, zeros);
    CHECK(explicit_zero == grid);
}

TEST_CASE("label out of range is rejected")
{
    auto grid = make_grid();
    CHECK_THROWS_AS(grid.update(VoxelKey{}, LabelId{4}, 0.6), std::out_of_range);
    CHECK_THROWS_AS(grid.log_odds(VoxelKey{}, LabelId{7}), std::out_of_range);
}

TEST_CASE("roi clipping discards and counts")
{
    GridConfig cfg;
    cfg.resolution = 1.0;
    cfg.num_labels = 3;
    cfg.roi = Box3(Vec3(0, 0, 0), Vec3(2, 2, 2));
    LabelOccupancyGrid grid(cfg);
    CHECK(grid.update(VoxelKey{1, 1, 1}, LabelId{1}, 0.9));
    CHECK_FALSE(grid.update(VoxelKey{2, 0, 0}, LabelId{1}, 0.9));  // center 2.5 outside
    CHECK_FALSE(grid.update(VoxelKey{-1, 0, 0}, LabelId{1}, 0.9));
    CHECK(grid.discarded_updates() == 2);
    CHECK(grid.size() == 1);
}

TEST_CASE("closed form after K equal updates")
{
    for (double p : {0.55, 0.7, 0.95}) {
        for (int K : {1, 3, 10, 40}) {
            auto grid = make_grid();
            for (int i = 0; i < K; ++i) grid.update(VoxelKey{}, LabelId{1}, p);
            const double expected = probability(std::min(K * logit(p), 3.5));
            CHECK(grid.voxel_probability(VoxelKey{}, LabelId{1}) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: unclamped log-odds is the sum of logits")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pdist(0.05, 0.95);
    std::uniform_int_distribution<int> kdist(1, 100);
    for (int trial = 0; trial < 200; ++trial) {
        auto grid = make_grid(kInf);
        const int K = kdist(rng);
        double fold = 0.0;
        for (int i = 0; i < K; ++i) {
            const double p = pdist(rng);
            grid.update(VoxelKey{0, 0, 0}, LabelId{2}, p);
            fold += std::log(p / (1.0 - p));
        }
        CHECK(std::abs(grid.log_odds(VoxelKey{0, 0, 0}, LabelId{2}) - fold) <= 1e-12);
    }
}

TEST_CASE("property: update order does not matter without clamping")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> pdist(0.05, 0.95);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> ps(30);
        for (auto& p : ps) p = pdist(rng);
        auto a = make_grid(kInf);
        for (double p : ps) a.update(VoxelKey{}, LabelId{1}, p);
        std::shuffle(ps.begin(), ps.end(), rng);
        auto b = make_grid(kInf);
        for (double p : ps) b.update(VoxelKey{}, LabelId{1}, p);
        CHECK(std::abs(a.log_odds(VoxelKey{}, LabelId{1}) - b.log_odds(VoxelKey{}, LabelId{1})) <= 1e-12);
    }
}

TEST_CASE("property: confident updates rise monotonically and saturate")
{
    auto grid = make_grid(3.5);
    double prev = 0.0;
    for (int i = 0; i < 20; ++i) {
        grid.update(VoxelKey{}, LabelId{1}, 0.8);
        const double now = grid.log_odds(VoxelKey{}, LabelId{1});
        CHECK(now >= prev);
        CHECK(now <= 3.5);
        prev = now;
    }
    CHECK(prev == 3.5);
    grid.update(VoxelKey{}, LabelId{1}, 0.001);
    CHECK(grid.log_odds(VoxelKey{}, LabelId{1}) == doctest::Approx(3.5 + logit(0.001)).epsilon(1e-14));
    grid.update(VoxelKey{}, LabelId{1}, 0.001);
    CHECK(grid.log_odds(VoxelKey{}, LabelId{1}) == -3.5);
}

TEST_CASE("property: sparse grid matches the dense oracle")
{
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> coord(0, 7), label(0, 3);
    std::uniform_real_distribution<double> pdist(0.01, 0.99);
    for (double clamp : {3.5, kInf}) {
        auto grid = make_grid(clamp, 4);
        DenseGridOracle oracle(8, 4, clamp);
        for (int i = 0; i < 3000; ++i) {
            const int x = coord(rng), y = coord(rng), z = coord(rng), l = label(rng);
            const double p = pdist(rng);
            grid.update(VoxelKey{x, y, z}, LabelId{static_cast<std::uint32_t>(l)}, p);
            oracle.update(x, y, z, l, p);
        }
        double worst = 0.0;
        for (int x = 0; x < 8; ++x)
            for (int y = 0; y < 8; ++y)
                for (int z = 0; z < 8; ++z)
                    for (std::uint32_t l = 0; l < 4; ++l)
                        worst = std::max(worst, std::abs(grid.voxel_probability(VoxelKey{x, y, z}, LabelId{l}) -
                                                         oracle.probability(x, y, z, static_cast<int>(l))));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("segment uses strict log-odds > 0")
{
    auto grid = make_grid();
    CHECK(grid.segment(LabelId{1}).empty());
    grid.update(VoxelKey{0, 0, 1}, LabelId{3}, 0.9);
    grid.update(VoxelKey{0, 0, 2}, LabelId{3}, 0.5);  // stays at exactly 0
    grid.update(VoxelKey{0, 0, 3}, LabelId{3}, 0.2);
    CHECK(grid.segment(LabelId{3}) == std::vector<VoxelKey>{VoxelKey{0, 0, 1}});
    CHECK(grid.segment(LabelId{2}).empty());

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coord(-5, 5);
    std::uniform_real_distribution<double> pdist(0.1, 0.9);
    for (int i = 0; i < 500; ++i)
        grid.update(VoxelKey{coord(rng), coord(rng), coord(rng)}, LabelId{1}, pdist(rng));
    std::vector<VoxelKey> expected;
    for (const auto& k : grid.sorted_keys())
        if (grid.log_odds(k, LabelId{1}) > 0.0) expected.push_back(k);
    CHECK(grid.segment(LabelId{1}) == expected);
}

TEST_CASE("centroid examples")
{
    auto grid = make_grid();
    CHECK_FALSE(grid.centroid(LabelId{1}).has_value());

    grid.update(VoxelKey{0, 0, 0}, LabelId{1}, 0.9);
    CHECK(grid.centroid(LabelId{1})->isApprox(Vec3(0.5, 0.5, 0.5)));

    grid.update(VoxelKey{1, 0, 0}, LabelId{1}, 0.9);
    CHECK(grid.centroid(LabelId{1})->isApprox(Vec3(1.0, 0.5, 0.5)));

    auto block = make_grid();
    Vec3 sum = Vec3::Zero();
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z) {
                block.update(VoxelKey{x, y, z}, LabelId{2}, 0.8);
                sum += Vec3(x + 0.5, y + 0.5, z + 0.5);
            }
    CHECK((*block.centroid(LabelId{2}) - sum / 8.0).norm() < 1e-15);
    CHECK((*block.centroid(LabelId{2}) - Vec3(1, 1, 1)).norm() < 1e-15);
}
