#include <doctest.h>

#include <random>

#include "leukoseg/color.hpp"
#include "leukoseg/error.hpp"
#include "leukoseg/phantom.hpp"
#include "leukoseg/pipeline.hpp"
#include "oracles.hpp"

using namespace leukoseg;

namespace {

double iou(const BinaryMask& a, const BinaryMask& b) {
  const auto both = static_cast<double>(overlap_count(a, b));
  return both / (static_cast<double>(a.count() + b.count()) - both);
}

CandidateMask scored(Channel c, DecisionScore s) {
  CandidateMask m;
  m.channel = c;
  s.dec = decision_value(s);
  m.scores = s;
  return m;
}

BinaryMask union_of(const std::vector<SegmentationResult>& results) {
  BinaryMask out = results.at(0).cell_mask;
  for (const auto& r : results) out = mask_or(out, r.cell_mask);
  return out;
}

// RBCs that touch a leukocyte, without the part drawn under the leukocyte.
BinaryMask adhered_rbc(const Phantom& p) {
  BinaryMask out(p.gt_rbc.width(), p.gt_rbc.height());
  for (const Component& c : connected_components(p.gt_rbc)) {
    bool touches = false;
    for (const Point& q : c.pixels) touches = touches || p.gt_cell.test(q);
    if (!touches) continue;
    for (const Point& q : c.pixels) {
      if (!p.gt_cell.test(q)) out.set(q);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("decision value reference rows") {
  const DecisionScore g{0.4986, 0.0677, 0.3567, 0.7121, 0.0};
  const DecisionScore h{0.8020, 0.0, 0.4814, 0.4607, 0.0};
  const DecisionScore s{0.8561, 0.0, 0.5363, 0.6994, 0.0};
  CHECK(std::abs(decision_value(g) - 0.6665) <= 5e-4);
  CHECK(std::abs(decision_value(h) - 0.7963) <= 5e-4);
  CHECK(std::abs(decision_value(s) - 1.1011) <= 5e-4);
  const std::vector<CandidateMask> table{scored(Channel::kG, g), scored(Channel::kH, h), scored(Channel::kS, s)};
  CHECK(table[decide(table)].channel == Channel::kS);
}

TEST_CASE("decide") {
  const DecisionScore same{0.8, 0.1, 0.4, 0.6, 0.0};
  SUBCASE("ties go to G, then H, then S") {
    const std::vector<CandidateMask> c{scored(Channel::kS, same), scored(Channel::kH, same), scored(Channel::kG, same)};
    CHECK(c[decide(c)].channel == Channel::kG);
    const std::vector<CandidateMask> d{scored(Channel::kS, same), scored(Channel::kH, same)};
    CHECK(d[decide(d)].channel == Channel::kH);
  }
  SUBCASE("a common border adhesion shift keeps the winner") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<CandidateMask> c;
      for (Channel ch : kAllChannels) c.push_back(scored(ch, {u(rng), 0.5 * u(rng), u(rng), u(rng), 0.0}));
      const std::size_t winner = decide(c);
      const double shift = u(rng);
      for (auto& m : c) {
        m.scores.b_adh += shift;
        m.scores.dec = decision_value(m.scores);
      }
      CHECK(decide(c) == winner);
    }
  }
  CHECK_THROWS_AS(decide(std::span<const CandidateMask>{}), std::invalid_argument);
}

TEST_CASE("decision features") {
  SUBCASE("border adhesion") {
    CHECK(border_adhesion(oracle::disc(40, 40, 20, 20, 10)) == 0.0);
    CHECK(border_adhesion(oracle::rect(10, 8, 0, 0, 9, 7)) == doctest::Approx(1.0));
    CHECK(border_adhesion(oracle::rect(10, 8, 3, 0, 6, 4)) == doctest::Approx(0.4));
    // Top and left edges: (3 / 10 + 2 / 8) / 2.
    CHECK(border_adhesion(oracle::rect(10, 8, 0, 0, 2, 1)) == doctest::Approx((0.3 + 0.25) / 2));
  }
  SUBCASE("saturation mean skips the nucleus") {
    ChannelImage s(4, 1, std::vector<std::uint8_t>{255, 51, 102, 0});
    BinaryMask mask = oracle::rect(4, 1, 0, 0, 2, 0);
    BinaryMask nucleus(4, 1);
    nucleus.set(0, 0);
    CHECK(saturation_mean(mask, s, nucleus) == doctest::Approx(0.3));
    CHECK(saturation_mean(nucleus, s, nucleus) == 0.0);
  }
  SUBCASE("ellipse similarity") {
    const BinaryMask e = reference_ellipse(oracle::disc(80, 80, 40, 40, 25));
    CHECK(iou(e, oracle::disc(80, 80, 40, 40, 25)) >= 0.95);
    CHECK(circle_similarity(e, e) == 1.0);
    CHECK(circle_similarity(BinaryMask(80, 80), e) == 0.0);
    const BinaryMask line = oracle::rect(30, 30, 5, 10, 20, 10);
    CHECK(!reference_ellipse(line).none());
  }
  SUBCASE("every score stays in [0, 1]") {
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> grey(0, 255);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<CandidateMask> c(3);
      for (std::size_t i = 0; i < 3; ++i) {
        c[i].channel = kAllChannels[i];
        c[i].mask = oracle::random_blobs(30, 24, 0.2 + 0.2 * static_cast<double>(i), rng);
      }
      ChannelImage s(30, 24);
      for (auto& v : s.values()) v = static_cast<std::uint8_t>(grey(rng));
      score_candidates(c, s, oracle::disc(30, 24, 15, 12, 4));
      for (const auto& m : c) {
        for (double v : {m.scores.cir_rato, m.scores.b_adh, m.scores.sgmv, m.scores.cir_sim}) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
        CHECK(m.scores.dec == decision_value(m.scores));
      }
    }
  }
}

TEST_CASE("config validation") {
  PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  c.alpha = 0.4;
  c.beta = 0.6;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.beta = 0.2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.hsg.green = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.ivfs_delta = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("segment_nucleus") {
  CHECK_THROWS_AS(segment_nucleus(RasterImage(64, 48, Rgb{235, 232, 220})), DegenerateImageError);

  PhantomParams p;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Phantom ph = generate_phantom(p, seed);
    const NucleusSegmentation n = segment_nucleus(ph.image);
    CHECK(n.sites.size() == 1);
    CHECK(iou(n.cleaned, ph.gt_nucleus) >= 0.85);
  }
  p.leukocytes = 2;
  p.width = 400;
  CHECK(segment_nucleus(generate_phantom(p, 3).image).sites.size() == 2);
}

TEST_CASE("channel_candidate") {
  const RasterImage flat(40, 40, Rgb{120, 120, 120});
  for (Channel c : kAllChannels) CHECK_FALSE(channel_candidate(flat, c, BinaryMask(40, 40)).has_value());

  PhantomParams p;
  p.rbc_count = 0;
  const Phantom ph = generate_phantom(p, 2);
  const NucleusSegmentation n = segment_nucleus(ph.image);
  REQUIRE(n.sites.size() == 1);
  const Roi roi = n.sites[0].combined_roi;
  const RasterImage sub = crop(ph.image, roi);
  const BinaryMask nucleus_sub = crop(ph.gt_nucleus, roi);
  for (Channel c : kAllChannels) {
    const auto cand = channel_candidate(sub, c, nucleus_sub);
    REQUIRE(cand.has_value());
    CHECK(cand->channel == c);
    CHECK(cand->mask.width() == sub.width());
    CHECK(iou(cand->mask, crop(ph.gt_cell, roi)) >= 0.9);
  }
}

TEST_CASE("segment") {
  CHECK(segment(RasterImage(64, 48, Rgb{235, 232, 220})).empty());

  SUBCASE("clean phantoms") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const Phantom ph = generate_phantom(PhantomParams{}, seed);
      const auto results = segment(ph.image);
      REQUIRE(results.size() == 1);
      CHECK(results[0].ok());
      CHECK(results[0].winning_channel.has_value());
      CHECK(results[0].all_candidates.size() == 3);
      CHECK(iou(results[0].cell_mask, ph.gt_cell) >= 0.9);
    }
  }
  SUBCASE("adhered erythrocyte is left out") {
    PhantomParams p;
    p.adhesion = 0.3;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const Phantom ph = generate_phantom(p, seed);
      const auto results = segment(ph.image);
      REQUIRE(results.size() == 1);
      const BinaryMask rbc = adhered_rbc(ph);
      REQUIRE(!rbc.none());
      CHECK(static_cast<double>(overlap_count(results[0].cell_mask, rbc)) <= 0.05 * static_cast<double>(rbc.count()));
    }
  }
  SUBCASE("two leukocytes") {
    PhantomParams p;
    p.leukocytes = 2;
    p.width = 400;
    const Phantom ph = generate_phantom(p, 3);
    const auto results = segment(ph.image);
    REQUIRE(results.size() == 2);
    CHECK(iou(union_of(results), ph.gt_cell) >= 0.9);
  }
  SUBCASE("deterministic and observable") {
    PhantomParams p;
    p.noise_sigma = 8.0;
    p.adhesion = 0.2;
    const Phantom ph = generate_phantom(p, 9);
    int stages = 0;
    int ccir_steps = 0;
    DebugSink sink;
    sink.channel = [&](int, std::string_view, const ChannelImage&) { ++stages; };
    sink.mask = [&](int, std::string_view, const BinaryMask&) { ++stages; };
    sink.ccir = [&](int, Channel, Provenance, const CcirIteration&) { ++ccir_steps; };
    const auto a = segment(ph.image, {}, &sink);
    const auto b = segment(ph.image);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].cell_mask == b[i].cell_mask);
      CHECK(a[i].nucleus_mask == b[i].nucleus_mask);
      CHECK(a[i].winning_channel == b[i].winning_channel);
    }
    CHECK(stages > 0);
    CHECK(ccir_steps > 0);
  }
}
