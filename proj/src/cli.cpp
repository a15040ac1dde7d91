#include "leukoseg/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "leukoseg/config.hpp"
#include "leukoseg/image_io.hpp"
#include "leukoseg/metrics.hpp"
#include "leukoseg/phantom.hpp"
#include "leukoseg/pipeline.hpp"

namespace leukoseg::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_input_image(const fs::path& p) {
  const std::string ext = lower(p.extension().string());
  return ext == ".png" || ext == ".ppm";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---- segment ---------------------------------------------------------------

struct DebugItem {
  std::string name;
  std::variant<ChannelImage, BinaryMask, std::string> payload;
};

struct ImageOutcome {
  fs::path input;
  std::string stem;
  std::string error;
  double milliseconds = 0.0;
  RasterImage image;
  std::vector<SegmentationResult> results;
  std::vector<DebugItem> debug;
};

std::string site_label(int site) { return site < 0 ? "img" : std::to_string(site); }

class DebugCollector {
 public:
  explicit DebugCollector(std::string stem) : stem_(std::move(stem)) {
    sink_.channel = [this](int site, std::string_view stage, const ChannelImage& img) {
      items_.push_back({name(site, stage) + ".png", img});
    };
    sink_.mask = [this](int site, std::string_view stage, const BinaryMask& m) {
      items_.push_back({name(site, stage) + ".png", m});
    };
    sink_.ccir = [this](int site, Channel c, Provenance src, const CcirIteration& it) {
      const std::string key = name(site, std::string(channel_name(c)) + "_" +
                                             std::string(provenance_name(src)) + "_ccir") + ".csv";
      std::string& csv = traces_[key];
      if (csv.empty()) csv = "iteration,samples,poles,pairs\n";
      csv += std::to_string(it.iteration) + "," + std::to_string(it.polar->size()) + ",";
      for (std::size_t i = 0; i < it.poles.size(); ++i) csv += (i ? " " : "") + std::to_string(it.poles[i]);
      csv += ",";
      for (std::size_t i = 0; i < it.pairs.size(); ++i) {
        csv += (i ? " " : "") + std::to_string(it.pairs[i].m) + "-" + std::to_string(it.pairs[i].n);
      }
      csv += "\n";
    };
  }

  const DebugSink* sink() const { return &sink_; }

  std::vector<DebugItem> take() {
    for (auto& [key, csv] : traces_) items_.push_back({key, std::move(csv)});
    traces_.clear();
    return std::move(items_);
  }

 private:
  std::string name(int site, std::string_view stage) const {
    return stem_ + "_" + site_label(site) + "_" + std::string(stage);
  }

  std::string stem_;
  DebugSink sink_;
  std::vector<DebugItem> items_;
  std::map<std::string, std::string> traces_;
};

ImageOutcome process(const fs::path& input, const PipelineConfig& config, bool debug) {
  ImageOutcome o;
  o.input = input;
  o.stem = input.stem().string();
  const auto start = std::chrono::steady_clock::now();
  try {
    o.image = read_rgb(input);
    if (debug) {
      DebugCollector collector(o.stem);
      o.results = segment(o.image, config, collector.sink());
      o.debug = collector.take();
    } else {
      o.results = segment(o.image, config);
    }
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  o.milliseconds =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return o;
}

RasterImage overlay(const RasterImage& img, const std::vector<SegmentationResult>& results) {
  RasterImage out = img;
  for (const SegmentationResult& r : results) {
    if (!r.ok()) continue;
    const BinaryMask& m = r.cell_mask;
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        if (!m.test(x, y)) continue;
        const bool edge = x == 0 || y == 0 || x == m.width() - 1 || y == m.height() - 1 ||
                          !m.test(x - 1, y) || !m.test(x + 1, y) || !m.test(x, y - 1) || !m.test(x, y + 1);
        if (edge) out.at(x, y) = Rgb{255, 0, 0};
      }
    }
  }
  return out;
}

Json roi_json(const Roi& r) {
  return Json::array({r.top_left.x, r.top_left.y, r.bottom_right.x, r.bottom_right.y});
}

Json site_json(std::size_t k, const SegmentationResult& r) {
  Json s;
  s["site"] = k;
  s["status"] = r.ok() ? "ok" : "error";
  if (!r.ok()) s["error"] = r.error;
  s["roi"] = roi_json(r.site.combined_roi);
  s["nucleus_roi"] = roi_json(r.site.nucleus_roi);
  if (r.winning_channel) {
    s["channel"] = std::string(channel_name(*r.winning_channel));
    for (const CandidateMask& c : r.all_candidates) {
      if (c.channel == *r.winning_channel) s["dec"] = c.scores.dec;
    }
  }
  Json cands = Json::array();
  for (const CandidateMask& c : r.all_candidates) {
    cands.push_back({{"channel", std::string(channel_name(c.channel))},
                     {"source", std::string(provenance_name(c.provenance))},
                     {"threshold", c.threshold},
                     {"cir_rato", c.scores.cir_rato},
                     {"b_adh", c.scores.b_adh},
                     {"sgmv", c.scores.sgmv},
                     {"cir_sim", c.scores.cir_sim},
                     {"dec", c.scores.dec}});
  }
  s["candidates"] = std::move(cands);
  return s;
}

void write_outcome(const fs::path& out, const ImageOutcome& o) {
  if (!o.error.empty()) return;
  for (std::size_t k = 0; k < o.results.size(); ++k) {
    const SegmentationResult& r = o.results[k];
    write_image(out / (o.stem + "_nucleus_" + std::to_string(k) + ".png"), r.nucleus_mask);
    if (r.ok()) write_image(out / (o.stem + "_cell_" + std::to_string(k) + ".png"), r.cell_mask);
  }
  write_image(out / (o.stem + "_overlay.png"), overlay(o.image, o.results));
  if (o.debug.empty()) return;
  const fs::path dir = out / "debug";
  fs::create_directories(dir);
  for (const DebugItem& item : o.debug) {
    std::visit(
        [&](const auto& payload) {
          using T = std::decay_t<decltype(payload)>;
          if constexpr (std::is_same_v<T, std::string>) {
            write_text(dir / item.name, payload);
          } else {
            write_image(dir / item.name, payload);
          }
        },
        item.payload);
  }
}

// ---- eval ------------------------------------------------------------------

bool has_role(const fs::path& file, const std::string& role) {
  const std::string stem = file.stem().string();
  const auto first = stem.find('_');
  if (first == std::string::npos) return false;
  const std::string rest = stem.substr(first + 1);
  return rest == role || rest.rfind(role + "_", 0) == 0;
}

struct SiteInfo {
  std::vector<std::string> dec;
  std::vector<std::string> channel;
};

std::map<std::string, SiteInfo> read_site_info(const fs::path& pred) {
  std::map<std::string, SiteInfo> info;
  const fs::path manifest = pred / "manifest.json";
  if (!fs::exists(manifest)) return info;
  try {
    std::ifstream in(manifest);
    const Json j = Json::parse(in);
    for (const Json& img : j.at("images")) {
      SiteInfo& s = info[pairing_stem(img.at("stem").get<std::string>())];
      for (const Json& site : img.value("sites", Json::array())) {
        if (!site.contains("channel")) continue;
        s.channel.push_back(site.at("channel").get<std::string>());
        s.dec.push_back(fixed(site.at("dec").get<double>(), 4));
      }
    }
  } catch (const std::exception&) {
    info.clear();
  }
  return info;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + v[i];
  return out;
}

}  // namespace

std::optional<std::pair<std::uint64_t, std::uint64_t>> parse_seed_range(const std::string& text) {
  auto parse = [](const std::string& s) -> std::optional<std::uint64_t> {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
      return std::nullopt;
    }
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  const auto dots = text.find("..");
  const auto a = parse(text.substr(0, dots));
  const auto b = dots == std::string::npos ? a : parse(text.substr(dots + 2));
  if (!a || !b || *a > *b) return std::nullopt;
  return std::pair{*a, *b};
}

std::string pairing_stem(const fs::path& file) {
  const std::string stem = file.stem().string();
  return stem.substr(0, stem.find('_'));
}

int run_segment(const SegmentOptions& options, std::ostream& log) {
  if (options.threads < 1) {
    log << "error: --threads must be >= 1\n";
    return kInvalidInvocation;
  }
  PipelineConfig config;
  try {
    if (options.config) config = load_pipeline_config(*options.config);
    config.validate();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInvalidInvocation;
  }

  std::vector<fs::path> inputs;
  for (const fs::path& p : options.inputs) {
    if (fs::is_directory(p)) {
      for (const fs::path& f : sorted_files(p)) {
        if (is_input_image(f)) inputs.push_back(f);
      }
    } else {
      inputs.push_back(p);
    }
  }
  if (inputs.empty()) {
    log << "error: no input images\n";
    return kInvalidInvocation;
  }
  try {
    fs::create_directories(options.out);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInvalidInvocation;
  }

  const std::size_t n = inputs.size();
  std::vector<std::optional<ImageOutcome>> done(n);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      ImageOutcome o = process(inputs[i], config, options.debug);
      {
        std::lock_guard lock(mutex);
        done[i] = std::move(o);
      }
      ready.notify_all();
    }
  };
  std::vector<std::jthread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(options.threads), n);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);

  Json manifest;
  manifest["command"] = "segment";
  manifest["output"] = options.out.string();
  manifest["config"] = options.config ? Json(options.config->string()) : Json(nullptr);
  manifest["flags"] = {{"debug", options.debug}, {"threads", options.threads}};
  manifest["images"] = Json::array();
  bool failed = false;
  double total_ms = 0.0;
  // Outputs are written in input order regardless of completion order.
  for (std::size_t i = 0; i < n; ++i) {
    ImageOutcome o;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return done[i].has_value(); });
      o = std::move(*done[i]);
      done[i].reset();
    }
    Json rec;
    rec["input"] = o.input.string();
    rec["stem"] = o.stem;
    try {
      write_outcome(options.out, o);
    } catch (const std::exception& e) {
      if (o.error.empty()) o.error = e.what();
    }
    rec["status"] = o.error.empty() ? "ok" : "error";
    if (!o.error.empty()) {
      rec["error"] = o.error;
      failed = true;
      log << "error: " << o.input.string() << ": " << o.error << "\n";
    }
    rec["milliseconds"] = o.milliseconds;
    total_ms += o.milliseconds;
    Json sites = Json::array();
    for (std::size_t k = 0; k < o.results.size(); ++k) sites.push_back(site_json(k, o.results[k]));
    rec["sites"] = std::move(sites);
    manifest["images"].push_back(std::move(rec));
  }
  pool.clear();
  manifest["atpis_ms"] = total_ms / static_cast<double>(n);
  write_text(options.out / "manifest.json", manifest.dump(2) + "\n");
  log << "segmented " << n << " image(s), mean " << fixed(total_ms / static_cast<double>(n), 1)
      << " ms per image\n";
  return failed ? kPartialFailure : kSuccess;
}

int run_eval(const EvalOptions& options, std::ostream& log) {
  if (!fs::is_directory(options.pred) || !fs::is_directory(options.gt)) {
    log << "error: prediction and ground-truth directories must exist\n";
    return kInvalidInvocation;
  }
  std::map<std::string, fs::path> gt;
  for (const fs::path& f : sorted_files(options.gt)) {
    const std::string ext = lower(f.extension().string());
    if ((ext == ".pgm" || ext == ".png") && f.stem().string() == pairing_stem(f) + "_cell") {
      gt.emplace(pairing_stem(f), f);
    }
  }
  if (gt.empty()) {
    log << "error: no <stem>_cell ground-truth masks in " << options.gt.string() << "\n";
    return kInvalidInvocation;
  }
  std::map<std::string, std::vector<fs::path>> pred;
  std::set<std::string> pred_stems;
  for (const fs::path& f : sorted_files(options.pred)) {
    if (lower(f.extension().string()) != ".png") continue;
    pred_stems.insert(pairing_stem(f));
    if (has_role(f, "cell")) pred[pairing_stem(f)].push_back(f);
  }
  const auto info = read_site_info(options.pred);

  bool partial = false;
  std::vector<EvalReport> reports;
  std::string csv = "image,site,SA,OR,UR,ER,Dec,channel\n";
  Json rows = Json::array();
  for (const auto& [stem, gt_path] : gt) {
    if (!pred_stems.contains(stem)) {
      log << "unpaired ground truth: " << stem << "\n";
      partial = true;
      continue;
    }
    try {
      const BinaryMask truth = read_mask(gt_path);
      BinaryMask union_mask(truth.width(), truth.height());
      for (const fs::path& p : pred[stem]) union_mask = mask_or(union_mask, read_mask(p));
      const EvalReport r = evaluate(truth, union_mask);
      reports.push_back(r);
      const auto it = info.find(stem);
      const std::string dec = it == info.end() ? "" : join(it->second.dec);
      const std::string channel = it == info.end() ? "" : join(it->second.channel);
      csv += stem + ",all," + fixed(r.sa, 4) + "," + fixed(r.or_rate) + "," + fixed(r.ur_rate) + "," +
             fixed(r.er_rate) + "," + dec + "," + channel + "\n";
      rows.push_back({{"image", stem}, {"sites", pred[stem].size()}, {"SA", r.sa}, {"OR", r.or_rate},
                      {"UR", r.ur_rate}, {"ER", r.er_rate}, {"Rs", r.rs}, {"Ts", r.ts}, {"Os", r.os},
                      {"Us", r.us}, {"Dec", dec}, {"channel", channel}});
    } catch (const std::exception& e) {
      log << "error: " << stem << ": " << e.what() << "\n";
      partial = true;
    }
  }
  for (const std::string& stem : pred_stems) {
    if (!gt.contains(stem) && stem != "manifest") log << "unpaired prediction: " << stem << "\n";
  }
  if (reports.empty()) {
    log << "error: no evaluable pairs\n";
    return kPartialFailure;
  }
  const EvalSummary s = summarize(reports);
  csv += "mean,," + fixed(s.sa.mean, 4) + "," + fixed(s.or_rate.mean) + "," + fixed(s.ur_rate.mean) + "," +
         fixed(s.er_rate.mean) + ",,\n";
  csv += "sd,," + fixed(s.sa.sd, 4) + "," + fixed(s.or_rate.sd) + "," + fixed(s.ur_rate.sd) + "," +
         fixed(s.er_rate.sd) + ",,\n";
  Json summary;
  for (const auto& [name, m] : {std::pair{"SA", s.sa}, std::pair{"OR", s.or_rate},
                                std::pair{"UR", s.ur_rate}, std::pair{"ER", s.er_rate}}) {
    summary[name] = {{"mean", m.mean}, {"sd", m.sd}};
  }
  try {
    fs::create_directories(options.out);
    write_text(options.out / "eval.csv", csv);
    write_text(options.out / "eval.json", Json{{"rows", rows}, {"summary", summary}}.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kPartialFailure;
  }
  log << "evaluated " << reports.size() << " pair(s), mean SA " << fixed(s.sa.mean, 2) << "%\n";
  return partial ? kPartialFailure : kSuccess;
}

int run_phantoms(const PhantomOptions& options, std::ostream& log) {
  PhantomParams params;
  try {
    if (options.config) params = load_phantom_params(*options.config);
    params.validate();
    fs::create_directories(options.out);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInvalidInvocation;
  }
  bool partial = false;
  Json records = Json::array();
  for (std::uint64_t seed = options.seed_first;; ++seed) {
    const std::string stem = "ph" + std::to_string(seed);
    try {
      const Phantom ph = generate_phantom(params, seed);
      write_image(options.out / (stem + ".png"), ph.image);
      write_image(options.out / (stem + "_cell.pgm"), ph.gt_cell);
      write_image(options.out / (stem + "_nucleus.pgm"), ph.gt_nucleus);
      write_image(options.out / (stem + "_rbc.pgm"), ph.gt_rbc);
      records.push_back({{"seed", seed}, {"image", stem + ".png"}, {"cell_pixels", ph.gt_cell.count()},
                         {"nucleus_pixels", ph.gt_nucleus.count()},
                         {"adhesion_pixels", overlap_count(ph.gt_cell, ph.gt_rbc)}});
    } catch (const std::exception& e) {
      log << "error: seed " << seed << ": " << e.what() << "\n";
      records.push_back({{"seed", seed}, {"error", e.what()}});
      partial = true;
    }
    if (seed == options.seed_last) break;
  }
  try {
    write_text(options.out / "params.ini", to_ini(params));
    write_text(options.out / "phantoms.json",
               Json{{"params", to_ini(params)}, {"phantoms", records}}.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kPartialFailure;
  }
  log << "wrote " << records.size() << " phantom(s) to " << options.out.string() << "\n";
  return partial ? kPartialFailure : kSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Leukocyte segmentation for blood smear images"};
  app.require_subcommand(1);

  SegmentOptions seg;
  std::string seg_config;
  auto* segment_cmd = app.add_subcommand("segment", "Segment leukocytes in PNG/PPM images");
  segment_cmd->add_option("inputs", seg.inputs, "Image files or directories")->required();
  segment_cmd->add_option("--out", seg.out, "Output directory")->required();
  segment_cmd->add_option("--config", seg_config, "Pipeline configuration file");
  segment_cmd->add_flag("--debug", seg.debug, "Write per-stage dumps");
  segment_cmd->add_option("--threads", seg.threads, "Images processed in parallel")->check(CLI::PositiveNumber);

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score predicted masks against ground truth");
  eval_cmd->add_option("pred", ev.pred, "Directory of segment outputs")->required();
  eval_cmd->add_option("--gt", ev.gt, "Ground-truth directory")->required();
  eval_cmd->add_option("--out", ev.out, "Report directory")->required();

  PhantomOptions ph;
  std::string ph_config;
  std::string seeds;
  auto* phantom_cmd = app.add_subcommand("phantom", "Generate synthetic smears with ground truth");
  phantom_cmd->add_option("--seed", seeds, "Seed range N..M")->required();
  phantom_cmd->add_option("--out", ph.out, "Output directory")->required();
  phantom_cmd->add_option("--config", ph_config, "Phantom parameter file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInvocation;
  }

  if (segment_cmd->parsed()) {
    if (!seg_config.empty()) seg.config = seg_config;
    return run_segment(seg, err);
  }
  if (eval_cmd->parsed()) return run_eval(ev, err);
  const auto range = parse_seed_range(seeds);
  if (!range) {
    err << "error: --seed expects N..M with N <= M\n";
    return kInvalidInvocation;
  }
  ph.seed_first = range->first;
  ph.seed_last = range->second;
  if (!ph_config.empty()) ph.config = ph_config;
  return run_phantoms(ph, err);
}

}  // namespace leukoseg::cli
