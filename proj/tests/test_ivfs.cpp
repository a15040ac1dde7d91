#include <doctest.h>

#include <cmath>
#include <random>

#include "leukoseg/error.hpp"
#include "leukoseg/ivfs.hpp"
#include "oracles.hpp"

using namespace leukoseg;

namespace {

Histogram spikes(std::initializer_list<std::pair<int, int>> spec) {
  Histogram h;
  for (auto [value, count] : spec) h.counts[static_cast<std::size_t>(value)] = static_cast<std::uint64_t>(count);
  return h;
}

ChannelImage random_image(int w, int h, std::mt19937& rng, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> d(lo, hi);
  ChannelImage img(w, h);
  for (auto& v : img.values()) v = static_cast<std::uint8_t>(d(rng));
  return img;
}

MembershipMap random_map(int w, int h, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(w * h));
  for (double& x : v) x = d(rng);
  return MembershipMap(w, h, std::move(v));
}

}  // namespace

TEST_CASE("region_means") {
  const std::vector<int> t50{50};
  const auto a = region_means(spikes({{100, 7}}), t50);
  REQUIRE(a.size() == 2);
  CHECK(a[0] == 25.0);
  CHECK(a[1] == 100.0);

  const std::vector<int> t120{120};
  CHECK(region_means(spikes({{40, 10}, {200, 10}}), t120) == std::vector<double>{40.0, 200.0});

  const std::vector<int> t2{60, 180};
  CHECK(region_means(spikes({{20, 3}, {100, 5}, {240, 2}}), t2) == std::vector<double>{20.0, 100.0, 240.0});

  // A value equal to a threshold belongs to the upper class.
  const std::vector<int> t100{100};
  CHECK(region_means(spikes({{100, 4}, {20, 4}}), t100) == std::vector<double>{20.0, 100.0});

  const std::vector<int> bad{120, 120};
  CHECK_THROWS_AS(region_means(spikes({{1, 1}}), bad), std::invalid_argument);
}

TEST_CASE("membership and interval membership") {
  CHECK(membership(150, 150, 0, 255) == 1.0);
  CHECK(membership(255, 0, 0, 255) == 0.5);
  CHECK(membership(100, 150, 0, 255) == doctest::Approx(0.8361).epsilon(1e-4));
  CHECK(membership(200, 150, 0, 255) == membership(100, 150, 0, 255));
  CHECK_THROWS_AS(membership(3, 3, 9, 9), DegenerateImageError);

  CHECK(interval_membership(1.0, 0.5) == 1.0);
  CHECK(interval_membership(0.0, 0.5) == 0.0);
  CHECK(interval_membership(0.5, 0.5) == doctest::Approx(0.7803).epsilon(1e-4));

  SUBCASE("recombined value never falls below the upper bound") {
    for (double delta : {0.1, 0.3, 0.5, 0.9}) {
      for (int i = 0; i <= 100; ++i) {
        const double mu = i / 100.0;
        const double v = interval_membership(mu, delta);
        CHECK(v >= std::pow(mu, delta) - 1e-15);
        CHECK(v >= mu - 1e-15);
        CHECK(v <= 1.0);
      }
    }
  }
  SUBCASE("membership peaks at the class mean") {
    double best = -1.0;
    int arg = -1;
    for (int f = 0; f <= 255; ++f) {
      const double m = membership(f, 87, 0, 255);
      if (m > best) {
        best = m;
        arg = f;
      }
    }
    CHECK(arg == 87);
  }
}

TEST_CASE("fuzzy divergence") {
  const double single = 2.0 - 2.0 / std::exp(1.0);
  CHECK(fuzzy_divergence(MembershipMap(1, 1, 0.0), MembershipMap(1, 1, 1.0)) ==
        doctest::Approx(single));
  CHECK(single == doctest::Approx(1.2642).epsilon(1e-4));
  CHECK(divergence_to_ideal(MembershipMap(1, 1, 0.0)) == doctest::Approx(single));
  CHECK(divergence_to_ideal(MembershipMap(5, 5, 1.0)) == 0.0);
  CHECK_THROWS_AS(fuzzy_divergence(MembershipMap(2, 2, 0.5), MembershipMap(2, 3, 0.5)),
                  DimensionMismatchError);

  std::mt19937 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const MembershipMap a = random_map(6, 5, rng);
    const MembershipMap b = random_map(6, 5, rng);
    CHECK(fuzzy_divergence(a, a) == 0.0);
    CHECK(std::abs(fuzzy_divergence(a, b) - fuzzy_divergence(b, a)) <= 1e-12);
    CHECK(std::abs(divergence_to_ideal(a) - fuzzy_divergence(a, MembershipMap(6, 5, 1.0))) <= 1e-12);
    CHECK(divergence_to_ideal(a) > 0.0);
  }
  SUBCASE("per-pixel term is zero only at one") {
    CHECK(ideal_divergence_term(1.0) == 0.0);
    for (int i = 0; i < 1000; ++i) CHECK(ideal_divergence_term(i / 1000.0) > 0.0);
  }
}

TEST_CASE("search_thresholds matches the exhaustive oracle") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    const ChannelImage img = random_image(16, 16, rng);
    const auto r2 = search_thresholds(img, {0.5, 2, {}});
    CHECK(r2.thresholds == oracle::best_thresholds(img, 2, 0.5));
    CHECK(r2.divergence == doctest::Approx(oracle::divergence(img, r2.thresholds, 0.5)));
    const auto r3 = search_thresholds(img, {0.5, 3, {}});
    CHECK(r3.thresholds == oracle::best_thresholds(img, 3, 0.5));
  }

  SUBCASE("bimodal image with a restricted range that covers the optimum") {
    ChannelImage img(20, 10, std::uint8_t{60});
    for (int y = 0; y < 10; ++y) {
      for (int x = 10; x < 20; ++x) img.at(x, y) = 180;
    }
    for (int i = 0; i < 30; ++i) img.values()[static_cast<std::size_t>(i * 6)] += static_cast<std::uint8_t>(i % 5);
    const auto full = search_thresholds(img, {0.5, 2, {}});
    CHECK(full.thresholds == oracle::best_thresholds(img, 2, 0.5));
    const auto narrow = search_thresholds(img, {0.5, 2, {{full.thresholds[0] - 10, full.thresholds[0] + 10}}});
    CHECK(narrow.thresholds == full.thresholds);
  }
  SUBCASE("two spikes give a plateau and the smallest threshold wins") {
    ChannelImage img(10, 2, std::uint8_t{40});
    for (int x = 0; x < 10; ++x) img.at(x, 1) = 200;
    const auto r = search_thresholds(img, {0.5, 2, {}});
    CHECK(r.thresholds == std::vector<int>{41});
    CHECK(oracle::best_thresholds(img, 2, 0.5) == r.thresholds);
    CHECK(oracle::divergence(img, {41}, 0.5) == doctest::Approx(oracle::divergence(img, {199}, 0.5)));
    CHECK(r.region_means == std::vector<double>{40.0, 200.0});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(search_thresholds(ChannelImage(4, 4, std::uint8_t{9}), {}), DegenerateImageError);
    const ChannelImage img = random_image(8, 8, rng);
    CHECK_THROWS_AS(search_thresholds(img, {0.5, 2, {{50, 40}}}), std::invalid_argument);
    CHECK_THROWS_AS(search_thresholds(img, {0.5, 3, {{50, 50}, {50, 50}}}), std::invalid_argument);
    CHECK_THROWS_AS(search_thresholds(img, {1.5, 2, {}}), std::invalid_argument);
  }
}

TEST_CASE("final_threshold") {
  CHECK(final_threshold({{60, 120, 200}, 0.0, {}}, Channel::kG) == 136);
  CHECK(final_threshold({{80, 160}, 0.0, {}}, Channel::kH) == 96);
  CHECK(final_threshold({{140}, 0.0, {}}, Channel::kS) == 140);
  CHECK_THROWS_AS(final_threshold({{140}, 0.0, {}}, Channel::kG), std::invalid_argument);
}

TEST_CASE("ranges_from_levels") {
  const SwamLevels up{30, 90, 150, 210, LevelOrder::kAscending};
  // Midpoints 60, 120, 180.
  CHECK(ranges_from_levels(up, 4) == std::vector<ThresholdRange>{{35, 85}, {95, 145}, {155, 205}});
  CHECK(ranges_from_levels(up, 3) == std::vector<ThresholdRange>{{95, 145}, {155, 205}});
  CHECK(ranges_from_levels(up, 2) == std::vector<ThresholdRange>{{95, 145}});
  CHECK(ranges_from_levels(up, 2, 200) == std::vector<ThresholdRange>{{1, 254}});

  const SwamLevels down{210, 150, 90, 30, LevelOrder::kDescending};
  CHECK(ranges_from_levels(down, 3) == std::vector<ThresholdRange>{{35, 85}, {95, 145}});
  CHECK_THROWS_AS(ranges_from_levels(up, 5), std::invalid_argument);
}
