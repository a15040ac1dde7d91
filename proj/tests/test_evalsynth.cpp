#include <doctest.h>

#include <cmath>
#include <random>

#include "leukoseg/color.hpp"
#include "leukoseg/error.hpp"
#include "leukoseg/locator.hpp"
#include "leukoseg/metrics.hpp"
#include "leukoseg/phantom.hpp"
#include "oracles.hpp"

using namespace leukoseg;

namespace {

double mean_over(const ChannelImage& img, const BinaryMask& where) {
  double s = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (where.test(x, y)) {
        s += img.at(x, y);
        ++n;
      }
    }
  }
  return s / static_cast<double>(n);
}

BinaryMask complement(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) out.set(x, y, !m.test(x, y));
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate") {
  const BinaryMask gt = oracle::rect(20, 20, 5, 5, 14, 14);
  REQUIRE(gt.count() == 100);

  SUBCASE("identity") {
    const EvalReport r = evaluate(gt, gt);
    CHECK(r.sa == 100.0);
    CHECK(r.or_rate == 0.0);
    CHECK(r.ur_rate == 0.0);
    CHECK(r.er_rate == 0.0);
  }
  SUBCASE("ten interior pixels missing") {
    BinaryMask pred = gt;
    for (int x = 6; x < 11; ++x) {
      pred.set(x, 8, false);
      pred.set(x, 9, false);
    }
    const EvalReport r = evaluate(gt, pred);
    CHECK(r.os == 0);
    CHECK(r.us == 10);
    CHECK(r.sa == doctest::Approx(90.0));
    CHECK(r.ur_rate == doctest::Approx(0.1));
    CHECK(r.er_rate == doctest::Approx(0.1));
  }
  SUBCASE("twenty-five extra pixels") {
    const BinaryMask pred = mask_or(gt, oracle::rect(20, 20, 15, 0, 19, 4));
    const EvalReport r = evaluate(gt, pred);
    CHECK(r.os == 25);
    CHECK(r.ts == 125);
    CHECK(r.or_rate == doctest::Approx(0.2));
    CHECK(r.sa == doctest::Approx(75.0));
    CHECK(r.er_rate == doctest::Approx(0.25));
  }
  SUBCASE("a shifted mask of equal area is not perfect") {
    const EvalReport r = evaluate(gt, oracle::rect(20, 20, 6, 5, 15, 14));
    CHECK(r.sa == doctest::Approx(80.0));
  }
  CHECK_THROWS_AS(evaluate(BinaryMask(4, 4), gt), DimensionMismatchError);
  CHECK_THROWS_AS(evaluate(BinaryMask(20, 20), gt), std::invalid_argument);
}

TEST_CASE("metric properties on random masks") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const BinaryMask gt = oracle::random_blobs(24, 18, 0.4, rng);
    const BinaryMask pred = oracle::random_blobs(24, 18, 0.4, rng);
    if (gt.none() || pred.none()) continue;
    const EvalReport r = evaluate(gt, pred);
    CHECK(r.sa == 100.0 * (1.0 - r.er_rate));
    CHECK(r.or_rate + r.ur_rate <= 1.0);
    CHECK(r.os == mask_and_not(pred, gt).count());
    CHECK(r.us == mask_and_not(gt, pred).count());
    const EvalReport s = evaluate(pred, gt);
    CHECK(s.os == r.us);
    CHECK(s.us == r.os);
    CHECK(s.rs == r.ts);
    CHECK(s.or_rate == doctest::Approx(static_cast<double>(r.us) / static_cast<double>(r.ts + r.us)));
  }
}

TEST_CASE("summarize") {
  const std::vector<double> v{1, 2, 3, 4};
  const MetricSummary m = summarize(v);
  CHECK(m.mean == 2.5);
  CHECK(m.sd == doctest::Approx(std::sqrt(1.25)));
  CHECK(summarize(std::vector<double>{7}).sd == 0.0);

  const BinaryMask gt = oracle::rect(10, 10, 0, 0, 4, 9);
  const std::vector<EvalReport> reports{evaluate(gt, gt), evaluate(gt, oracle::rect(10, 10, 0, 0, 4, 4))};
  const EvalSummary s = summarize(reports);
  CHECK(s.sa.mean == doctest::Approx(75.0));
  CHECK(s.sa.sd == doctest::Approx(25.0));
  CHECK(s.er_rate.mean == doctest::Approx(0.25));
}

TEST_CASE("generate_phantom") {
  PhantomParams p;
  SUBCASE("deterministic per seed") {
    const Phantom a = generate_phantom(p, 5);
    const Phantom b = generate_phantom(p, 5);
    CHECK(a.image == b.image);
    CHECK(a.gt_cell == b.gt_cell);
    CHECK(a.gt_nucleus == b.gt_nucleus);
    CHECK(a.gt_rbc == b.gt_rbc);
    CHECK_FALSE(generate_phantom(p, 6).image == a.image);
    p.noise_sigma = 8.0;
    CHECK(generate_phantom(p, 5).image == generate_phantom(p, 5).image);
  }
  SUBCASE("ground truth nesting") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Phantom ph = generate_phantom(p, seed);
      CHECK(ph.gt_nucleus.count() > 0);
      CHECK(mask_and_not(ph.gt_nucleus, ph.gt_cell).none());
      CHECK(overlap_count(ph.gt_cell, ph.gt_rbc) == 0);
    }
  }
  SUBCASE("channel ordering") {
    p.noise_sigma = 8.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Phantom ph = generate_phantom(p, seed);
      const HsiChannels hsi = rgb_to_hsi(ph.image);
      ChannelImage g(ph.image.width(), ph.image.height());
      for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) g.at(x, y) = ph.image.at(x, y).g;
      }
      const BinaryMask cytoplasm = mask_and_not(ph.gt_cell, ph.gt_nucleus);
      const BinaryMask background = complement(mask_or(ph.gt_cell, ph.gt_rbc));
      CHECK(mean_over(g, ph.gt_nucleus) < mean_over(g, cytoplasm));
      CHECK(mean_over(g, cytoplasm) < mean_over(g, background));
      for (const ChannelImage* c : {&hsi.hue, &hsi.saturation}) {
        CHECK(mean_over(*c, ph.gt_nucleus) > mean_over(*c, cytoplasm));
        CHECK(mean_over(*c, cytoplasm) > mean_over(*c, background));
      }
    }
  }
  SUBCASE("lobed nuclei form one region") {
    for (int lobes = 2; lobes <= 4; ++lobes) {
      p.lobes_min = p.lobes_max = lobes;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Phantom ph = generate_phantom(p, seed);
        CHECK(connected_components(ph.gt_nucleus).size() == static_cast<std::size_t>(lobes));
        CHECK(locate_nuclei(ph.gt_nucleus).size() == 1);
      }
    }
  }
  SUBCASE("adhesion") {
    std::size_t prev = 0;
    for (double a : {0.1, 0.2, 0.3, 0.4}) {
      p.adhesion = a;
      const Phantom ph = generate_phantom(p, 4);
      const std::size_t shared = overlap_count(ph.gt_cell, ph.gt_rbc);
      CHECK(shared > prev);
      prev = shared;
    }
  }
  SUBCASE("invalid parameters") {
    p.lobes_max = 5;
    CHECK_THROWS_AS(generate_phantom(p, 1), std::invalid_argument);
    p = {};
    p.adhesion = 0.6;
    CHECK_THROWS_AS(generate_phantom(p, 1), std::invalid_argument);
    p = {};
    p.leukocytes = 6;
    CHECK_THROWS_AS(generate_phantom(p, 1), std::runtime_error);
  }
}
