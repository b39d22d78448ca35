#include <cmath>
#include <utility>
#include <vector>

#include "atlas/model.hpp"
#include "doctest.h"

using namespace atlas;

TEST_CASE("rank_positions sorts and reports the permutation") {
    std::vector<std::pair<std::uint32_t, double>> raw{{0, 2.0}, {1, 1.0}};
    const auto config = rank_positions(std::span<const std::pair<std::uint32_t, double>>(raw));
    CHECK(config.positions == std::vector<double>{1.0, 2.0});
    CHECK(config.perm[0] == 1);
    CHECK(config.perm[1] == 0);
}

TEST_CASE("rank_positions breaks ties by lower label") {
    std::vector<std::pair<std::uint32_t, double>> raw{{0, 1.0}, {1, 1.0}};
    const auto config = rank_positions(std::span<const std::pair<std::uint32_t, double>>(raw));
    CHECK(config.perm[0] == 0);
    CHECK(config.perm[1] == 1);
}

TEST_CASE("rank_positions three-point sort") {
    std::vector<double> raw{0.0, -3.0, 5.0};
    const auto config = rank_positions(std::span<const double>(raw));
    CHECK(config.positions == std::vector<double>{-3.0, 0.0, 5.0});
}

TEST_CASE("rank_positions rejects non-finite input") {
    std::vector<double> raw{0.0, std::nan("")};
    CHECK_THROWS_AS(rank_positions(std::span<const double>(raw)), std::invalid_argument);
}

TEST_CASE("rank_positions is idempotent") {
    std::vector<double> raw{3.0, -1.0, 2.0, 2.0};
    const auto once = rank_positions(std::span<const double>(raw));
    std::vector<std::pair<std::uint32_t, double>> again_in(once.positions.size());
    for (std::size_t i = 0; i < once.positions.size(); ++i)
        again_in[i] = {once.perm[i], once.positions[i]};
    const auto twice =
        rank_positions(std::span<const std::pair<std::uint32_t, double>>(again_in), once.time);
    CHECK(twice.positions == once.positions);
    CHECK(twice.perm == once.perm);
}

TEST_CASE("tilde_center shifts by a t / 2") {
    std::vector<double> raw{0.0, 1.0};
    auto config = rank_positions(std::span<const double>(raw), 0.0);
    CHECK(tilde_center(config, 1.0).positions == std::vector<double>{0.0, 1.0});

    std::vector<double> single{0.0};
    auto at_two = rank_positions(std::span<const double>(single), 2.0);
    CHECK(tilde_center(at_two, 1.0).positions[0] == doctest::Approx(1.0));

    std::vector<double> pair_raw{-1.0, 3.0};
    auto at_four = rank_positions(std::span<const double>(pair_raw), 4.0);
    const auto shifted = tilde_center(at_four, 0.5);
    CHECK(shifted.positions[0] == doctest::Approx(0.0));
    CHECK(shifted.positions[1] == doctest::Approx(4.0));
}

TEST_CASE("eps_center applies the negative log shift") {
    std::vector<double> single{0.0};
    auto config = rank_positions(std::span<const double>(single), 0.0);
    CHECK(eps_center(config, 0.5, std::exp(-1.0)).positions[0] == doctest::Approx(-1.0));

    std::vector<double> two{2.0};
    auto at_two = rank_positions(std::span<const double>(two), 2.0);
    CHECK(eps_center(at_two, 1.0, std::exp(-2.0)).positions[0] == doctest::Approx(2.0));

    CHECK_THROWS_AS(eps_center(config, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eps_center(config, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("y_view evaluates the geometric transform") {
    std::vector<double> raw{0.0, std::log(2.0)};
    auto config = rank_positions(std::span<const double>(raw), 0.0);
    const auto y = y_view(config, 1.0);
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(2.0));

    std::vector<double> single{0.0};
    auto at_two = rank_positions(std::span<const double>(single), 2.0);
    const auto scaled = y_view(at_two, 1.0, 0.25);
    CHECK(scaled[0] == doctest::Approx(0.5 * std::exp(1.0)));
}

TEST_CASE("y_view round-trips through log to the tilde centering") {
    std::vector<double> raw{-0.3, 0.1, 0.7, 2.0};
    auto config = rank_positions(std::span<const double>(raw), 1.5);
    const auto y = y_view(config, 0.8);
    const auto tilde = tilde_center(config, 0.8);
    for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(std::log(y[i]) / 0.8 == doctest::Approx(tilde.positions[i]).epsilon(1e-12));
        if (i > 0) CHECK(y[i] > y[i - 1]);
    }
}

TEST_CASE("y_view flags overflow") {
    std::vector<double> raw{800.0};
    auto config = rank_positions(std::span<const double>(raw), 0.0);
    CHECK_THROWS_AS(y_view(config, 1.0), std::range_error);
}

TEST_CASE("ModelParams validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.a = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.a = 1.0;
    p.dt = 2.0;
    p.horizon = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
