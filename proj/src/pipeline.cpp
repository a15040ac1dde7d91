#include "leukoseg/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "leukoseg/error.hpp"
#include "leukoseg/ivfs.hpp"

namespace leukoseg {

namespace {

bool unit(double v) { return v >= 0.0 && v <= 1.0; }

ChannelImage channel_view(const RasterImage& sub, Channel channel) {
  if (channel == Channel::kG) return green_channel(sub);
  HsiChannels hsi = rgb_to_hsi(sub);
  return channel == Channel::kH ? std::move(hsi.hue) : std::move(hsi.saturation);
}

std::string stage_name(Channel c, std::string_view stage) {
  return std::string(channel_name(c)) + "_" + std::string(stage);
}

void emit(const DebugSink* debug, int site, std::string_view stage, const BinaryMask& m) {
  if (debug && debug->mask) debug->mask(site, stage, m);
}

void emit(const DebugSink* debug, int site, std::string_view stage, const ChannelImage& c) {
  if (debug && debug->channel) debug->channel(site, stage, c);
}

double mask_circularity(const BinaryMask& mask) {
  const auto comps = connected_components(mask);
  if (comps.empty()) return 0.0;
  return combined_stats(comps).circularity;
}

std::optional<int> fuzzy_threshold(const ChannelImage& ch, const BinaryMask& region,
                                   const SwamLevels& levels, Channel channel,
                                   const PipelineConfig& config) {
  const Histogram hist = config.search_on_foreground ? histogram(ch, region) : histogram(ch);
  IvfsConfig ivfs;
  ivfs.delta = config.ivfs_delta;
  ivfs.classes = classes_for(channel);
  ivfs.ranges = ranges_from_levels(levels, ivfs.classes, config.search_half_width);
  try {
    return final_threshold(search_thresholds(hist, ivfs), channel);
  } catch (const DegenerateImageError&) {
    return std::nullopt;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!unit(alpha) || !unit(beta)) throw std::invalid_argument("alpha and beta must lie in [0, 1]");
  if (std::abs(alpha + beta - 1.0) > 1e-9) throw std::invalid_argument("alpha + beta must equal 1");
  if (!(alpha > beta)) throw std::invalid_argument("alpha must exceed beta");
  if (!unit(hsg.hue) || !unit(hsg.saturation) || !unit(hsg.green)) {
    throw std::invalid_argument("HSG weights must lie in [0, 1]");
  }
  if (hsg.green == 0.0) throw std::invalid_argument("HSG green weight must be nonzero");
  if (!(ivfs_delta > 0.0 && ivfs_delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (search_half_width < 0) throw std::invalid_argument("search half-width must be >= 0");
  if (!(clean.relative_area >= 0.0 && clean.relative_area <= 1.0)) {
    throw std::invalid_argument("nucleus relative area must lie in [0, 1]");
  }
  if (!(radius.low_circularity <= radius.high_circularity)) {
    throw std::invalid_argument("locator thresholds must satisfy t1 <= t2");
  }
  if (!(radius.low_factor > 0.0 && radius.mid_factor > 0.0 && radius.high_factor > 0.0)) {
    throw std::invalid_argument("radius factors must be positive");
  }
  if (ccir.chord < 1 || ccir.smoothing_window < 1 || ccir.persistence < 1 || ccir.max_iterations < 0) {
    throw std::invalid_argument("CCIR window settings must be positive");
  }
  if (!(ccir.circularity_gain > 0.0) || !(ccir.centroid_epsilon >= 0.0) || !(ccir.min_reversal_deg >= 0.0)) {
    throw std::invalid_argument("CCIR thresholds out of range");
  }
}

NucleusSegmentation segment_nucleus(const RasterImage& img, const PipelineConfig& config,
                                    const DebugSink* debug) {
  NucleusSegmentation out;
  const HsiChannels hsi = rgb_to_hsi(img);
  out.hsg = hsg_transform(hsi.hue, hsi.saturation, green_channel(img), config.hsg);
  emit(debug, -1, "hsg", out.hsg);
  out.levels = swam_levels(out.hsg, LevelOrder::kAscending);
  out.raw = nucleus_mask(out.hsg, out.levels);
  emit(debug, -1, "nucleus_raw", out.raw);
  out.cleaned = clean_nucleus_mask(out.raw, config.clean);
  emit(debug, -1, "nucleus", out.cleaned);
  for (const NucleusRegion& region : locate_nuclei(out.cleaned)) {
    out.sites.push_back(locate_site(region, img.width(), img.height(), config.radius));
  }
  return out;
}

std::optional<CandidateMask> channel_candidate(const RasterImage& sub, Channel channel,
                                               const BinaryMask& nucleus_sub,
                                               const PipelineConfig& config,
                                               const DebugSink* debug, int site) {
  require_same_shape(sub, nucleus_sub, "channel_candidate");
  const ChannelImage ch = channel_view(sub, channel);
  emit(debug, site, stage_name(channel, "channel"), ch);

  SwamLevels levels;
  try {
    levels = swam_levels(ch, level_order(channel));
  } catch (const DegenerateImageError&) {
    return std::nullopt;
  }
  const Polarity polarity = cell_polarity(channel);
  const int t_u = round_grey(config.alpha * levels.background + config.beta * levels.erythrocyte);
  const BinaryMask i1 = apply_threshold(ch, t_u, polarity);
  emit(debug, site, stage_name(channel, "I1"), i1);

  const auto t_s = fuzzy_threshold(ch, i1, levels, channel, config);
  const BinaryMask i2 = t_s ? apply_threshold(ch, *t_s, polarity) : BinaryMask(ch.width(), ch.height());
  emit(debug, site, stage_name(channel, "I2"), i2);

  const auto nuclei = connected_components(nucleus_sub);
  const PointF origin = nuclei.empty()
                            ? PointF{(ch.width() - 1) / 2.0, (ch.height() - 1) / 2.0}
                            : combined_stats(nuclei).centroid;

  std::optional<CandidateMask> best;
  const std::pair<const BinaryMask*, Provenance> sources[] = {
      {&i1, Provenance::kBackgroundRemoval}, {&i2, Provenance::kFuzzyThreshold}};
  for (const auto& [image, source] : sources) {
    if (image->none()) continue;
    BinaryMask region = largest_component(*image);
    if (config.fill_candidate_holes) region = fill_holes(region);
    emit(debug, site, stage_name(channel, source == Provenance::kBackgroundRemoval ? "M1" : "M2"), region);

    CcirTrace trace;
    if (debug && debug->ccir) {
      trace = [debug, site, channel, src = source](const CcirIteration& it) {
        debug->ccir(site, channel, src, it);
      };
    }
    CcirResult repaired = ccir(region, origin, config.ccir, trace);
    if (repaired.mask.none()) continue;
    const double c = mask_circularity(repaired.mask);
    if (!best || c > best->circularity) {
      CandidateMask cand;
      cand.channel = channel;
      cand.mask = std::move(repaired.mask);
      cand.provenance = source;
      cand.threshold = source == Provenance::kBackgroundRemoval ? t_u : *t_s;
      cand.circularity = c;
      best = std::move(cand);
    }
  }
  if (best) emit(debug, site, stage_name(channel, "candidate"), best->mask);
  return best;
}

std::vector<SegmentationResult> segment(const RasterImage& img, const PipelineConfig& config,
                                        const DebugSink* debug) {
  config.validate();
  NucleusSegmentation nuclei;
  try {
    nuclei = segment_nucleus(img, config, debug);
  } catch (const DegenerateImageError&) {
    return {};
  }

  std::vector<SegmentationResult> results;
  for (std::size_t s = 0; s < nuclei.sites.size(); ++s) {
    const int site_id = static_cast<int>(s);
    SegmentationResult r;
    r.site = nuclei.sites[s];
    for (const Component& c : r.site.nucleus_components) {
      r.nucleus_mask = r.nucleus_mask.empty()
                           ? component_mask(c.pixels, img.width(), img.height())
                           : mask_or(r.nucleus_mask, component_mask(c.pixels, img.width(), img.height()));
    }
    if (r.nucleus_mask.empty()) r.nucleus_mask = BinaryMask(img.width(), img.height());

    const Roi& roi = r.site.combined_roi;
    const RasterImage sub = crop(img, roi);
    const BinaryMask nucleus_sub = crop(r.nucleus_mask, roi);
    for (Channel channel : kAllChannels) {
      if (auto cand = channel_candidate(sub, channel, nucleus_sub, config, debug, site_id)) {
        r.all_candidates.push_back(std::move(*cand));
      }
    }
    if (r.all_candidates.empty()) {
      r.error = "no candidate mask in any channel";
      r.cell_mask = BinaryMask(img.width(), img.height());
      results.push_back(std::move(r));
      continue;
    }
    score_candidates(r.all_candidates, rgb_to_hsi(sub).saturation, nucleus_sub);
    const std::size_t winner = decide(r.all_candidates);
    r.winning_channel = r.all_candidates[winner].channel;
    emit(debug, site_id, "winner", r.all_candidates[winner].mask);
    r.cell_mask = paste(r.all_candidates[winner].mask, roi, img.width(), img.height());
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace leukoseg
