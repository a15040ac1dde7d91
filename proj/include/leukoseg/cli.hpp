#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace leukoseg::cli {

enum ExitCode : int { kSuccess = 0, kPartialFailure = 1, kInvalidInvocation = 2 };

struct SegmentOptions {
  std::vector<std::filesystem::path> inputs;  // files or directories
  std::filesystem::path out;
  std::optional<std::filesystem::path> config;
  bool debug = false;
  int threads = 1;
};

struct EvalOptions {
  std::filesystem::path pred;
  std::filesystem::path gt;
  std::filesystem::path out;
};

struct PhantomOptions {
  std::filesystem::path out;
  std::optional<std::filesystem::path> config;
  std::uint64_t seed_first = 1;
  std::uint64_t seed_last = 1;
};

// Per image: <stem>_cell_<k>.png, <stem>_nucleus_<k>.png, <stem>_overlay.png
// and a manifest.json with per-image wall time. Debug dumps go to
// <out>/debug/<stem>_<site>_<stage>.png.
int run_segment(const SegmentOptions& options, std::ostream& log);

// Pairs <stem>_cell.pgm ground truth with the union of <stem>_cell_<k>.png
// predictions; writes eval.csv and eval.json.
int run_eval(const EvalOptions& options, std::ostream& log);

// ph<seed>.png with ph<seed>_cell.pgm, ph<seed>_nucleus.pgm, ph<seed>_rbc.pgm
// and phantoms.json.
int run_phantoms(const PhantomOptions& options, std::ostream& log);

// "N..M" or "N".
std::optional<std::pair<std::uint64_t, std::uint64_t>> parse_seed_range(const std::string& text);

// Text before the first underscore of the file name without extension.
std::string pairing_stem(const std::filesystem::path& file);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace leukoseg::cli
