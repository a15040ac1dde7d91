#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leukoseg/ccir.hpp"
#include "leukoseg/channel.hpp"
#include "leukoseg/color.hpp"
#include "leukoseg/locator.hpp"
#include "leukoseg/swam.hpp"

namespace leukoseg {

struct PipelineConfig {
  HsgWeights hsg;
  double alpha = 0.7;  // background weight in T_u
  double beta = 0.3;   // erythrocyte weight in T_u
  double ivfs_delta = 0.5;
  int search_half_width = 25;
  // Threshold search over the histogram of the background-removed crop only.
  bool search_on_foreground = true;
  bool fill_candidate_holes = true;
  CleanConfig clean;
  RadiusRule radius;
  CcirConfig ccir;

  // Throws std::invalid_argument unless alpha + beta = 1, alpha > beta and
  // all weights lie in [0, 1].
  void validate() const;
};

struct DecisionScore {
  double cir_rato = 0.0;
  double b_adh = 0.0;
  double sgmv = 0.0;
  double cir_sim = 0.0;
  double dec = 0.0;
};

// Which threshold produced the candidate: T_u (background removal) or T_s
// (fuzzy threshold search).
enum class Provenance { kBackgroundRemoval, kFuzzyThreshold };

constexpr std::string_view provenance_name(Provenance p) {
  return p == Provenance::kBackgroundRemoval ? "Tu" : "Ts";
}

struct CandidateMask {
  Channel channel = Channel::kG;
  BinaryMask mask;  // site crop coordinates
  DecisionScore scores;
  Provenance provenance = Provenance::kBackgroundRemoval;
  int threshold = 0;
  double circularity = 0.0;
};

struct NucleusSegmentation {
  ChannelImage hsg;
  SwamLevels levels;
  BinaryMask raw;
  BinaryMask cleaned;
  std::vector<LeukocyteSite> sites;
};

struct SegmentationResult {
  LeukocyteSite site;
  BinaryMask nucleus_mask;  // full image
  BinaryMask cell_mask;     // full image, empty on failure
  std::optional<Channel> winning_channel;
  std::vector<CandidateMask> all_candidates;
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

// Optional observer for intermediate stages. site is -1 for whole-image
// stages.
struct DebugSink {
  std::function<void(int site, std::string_view stage, const ChannelImage&)> channel;
  std::function<void(int site, std::string_view stage, const BinaryMask&)> mask;
  std::function<void(int site, Channel channel, Provenance source, const CcirIteration&)> ccir;
};

NucleusSegmentation segment_nucleus(const RasterImage& img, const PipelineConfig& config = {},
                                    const DebugSink* debug = nullptr);

// Candidate for one channel of a site crop; nullopt when neither threshold
// leaves a foreground region.
std::optional<CandidateMask> channel_candidate(const RasterImage& sub, Channel channel,
                                               const BinaryMask& nucleus_sub,
                                               const PipelineConfig& config = {},
                                               const DebugSink* debug = nullptr, int site = 0);

// BAdh over the four borders of the mask; 0 when no border is touched.
double border_adhesion(const BinaryMask& mask);
// Mean saturation over mask minus nucleus, scaled to [0, 1]; 0 when empty.
double saturation_mean(const BinaryMask& mask, const ChannelImage& saturation,
                       const BinaryMask& nucleus);
// Filled ellipse fitted to the boundary of reference; the bounding-box
// ellipse when the fit degenerates.
BinaryMask reference_ellipse(const BinaryMask& reference);
double circle_similarity(const BinaryMask& mask, const BinaryMask& ellipse);

double decision_value(const DecisionScore& s);

// Fills scores (including dec) of every candidate. Throws
// std::invalid_argument for an empty candidate list.
void score_candidates(std::span<CandidateMask> candidates, const ChannelImage& saturation,
                      const BinaryMask& nucleus_sub);

// Index of the candidate with the largest dec; ties go to the earlier
// channel in G, H, S order.
std::size_t decide(std::span<const CandidateMask> candidates);

// Full pipeline. A constant image yields no results; per-site failures are
// reported in the result without aborting other sites.
std::vector<SegmentationResult> segment(const RasterImage& img, const PipelineConfig& config = {},
                                        const DebugSink* debug = nullptr);

}  // namespace leukoseg
