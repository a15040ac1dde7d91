#include "leukoseg/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/algorithm/string/trim.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace leukoseg {

namespace {

namespace pt = boost::property_tree;

struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

template <typename T>
T parse_value(const std::string& text, const std::string& name) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw boost::bad_lexical_cast();
    } else {
      return boost::lexical_cast<T>(text);
    }
  } catch (const boost::bad_lexical_cast&) {
    throw std::invalid_argument("config: bad value for " + name + ": '" + text + "'");
  }
}

template <typename T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }
}

template <typename T>
Field bind(std::string section, std::string key, T& target) {
  const std::string name = section + "." + key;
  return {std::move(section), std::move(key),
          [&target, name](const std::string& s) { target = parse_value<T>(s, name); },
          [&target]() { return format_value(target); }};
}

Field bind_rgb(std::string section, std::string key, Rgb& target) {
  const std::string name = section + "." + key;
  return {std::move(section), std::move(key),
          [&target, name](const std::string& s) {
            std::vector<int> v;
            std::stringstream ss(s);
            std::string part;
            while (std::getline(ss, part, ',')) {
              boost::algorithm::trim(part);
              v.push_back(parse_value<int>(part, name));
            }
            if (v.size() != 3) throw std::invalid_argument("config: " + name + " needs r,g,b");
            for (int c : v) {
              if (c < 0 || c > 255) throw std::invalid_argument("config: " + name + " outside 0..255");
            }
            target = {static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]),
                      static_cast<std::uint8_t>(v[2])};
          },
          [&target]() {
            return std::to_string(target.r) + "," + std::to_string(target.g) + "," + std::to_string(target.b);
          }};
}

std::vector<Field> fields(PipelineConfig& c) {
  return {
      bind("hsg", "w1", c.hsg.hue),
      bind("hsg", "w2", c.hsg.saturation),
      bind("hsg", "w3", c.hsg.green),
      bind("background", "alpha", c.alpha),
      bind("background", "beta", c.beta),
      bind("ivfs", "delta", c.ivfs_delta),
      bind("ivfs", "search_half_width", c.search_half_width),
      bind("ivfs", "search_on_foreground", c.search_on_foreground),
      bind("nucleus", "min_area", c.clean.min_area),
      bind("nucleus", "relative_area", c.clean.relative_area),
      bind("locator", "t1", c.radius.low_circularity),
      bind("locator", "t2", c.radius.high_circularity),
      bind("locator", "low_factor", c.radius.low_factor),
      bind("locator", "mid_factor", c.radius.mid_factor),
      bind("locator", "high_factor", c.radius.high_factor),
      bind("candidate", "fill_holes", c.fill_candidate_holes),
      bind("ccir", "chord", c.ccir.chord),
      bind("ccir", "smoothing_window", c.ccir.smoothing_window),
      bind("ccir", "persistence", c.ccir.persistence),
      bind("ccir", "min_reversal_deg", c.ccir.min_reversal_deg),
      bind("ccir", "max_poles", c.ccir.max_poles),
      bind("ccir", "circularity_gain", c.ccir.circularity_gain),
      bind("ccir", "centroid_epsilon", c.ccir.centroid_epsilon),
      bind("ccir", "pair_threshold", c.ccir.pair_threshold),
      bind("ccir", "max_iterations", c.ccir.max_iterations),
  };
}

std::vector<Field> fields(PhantomParams& p) {
  return {
      bind("image", "width", p.width),
      bind("image", "height", p.height),
      bind("image", "noise_sigma", p.noise_sigma),
      bind("leukocyte", "count", p.leukocytes),
      bind("leukocyte", "lobes_min", p.lobes_min),
      bind("leukocyte", "lobes_max", p.lobes_max),
      bind("leukocyte", "nucleus_radius", p.nucleus_radius),
      bind("leukocyte", "cytoplasm_ratio", p.cytoplasm_ratio),
      bind("rbc", "count", p.rbc_count),
      bind("rbc", "radius", p.rbc_radius),
      bind("rbc", "radius_jitter", p.rbc_radius_jitter),
      bind("rbc", "pallor_ratio", p.pallor_ratio),
      bind("rbc", "adhesion", p.adhesion),
      bind("generator", "max_attempts", p.max_attempts),
      bind_rgb("palette", "background", p.palette.background),
      bind_rgb("palette", "rbc_rim", p.palette.rbc_rim),
      bind_rgb("palette", "rbc_pallor", p.palette.rbc_pallor),
      bind_rgb("palette", "cytoplasm", p.palette.cytoplasm),
      bind_rgb("palette", "nucleus", p.palette.nucleus),
  };
}

void apply(const std::string& text, std::vector<Field> table) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw std::invalid_argument("config: key outside a section: " + section);
    }
    for (const auto& [key, value] : keys) {
      auto it = std::find_if(table.begin(), table.end(),
                             [&](const Field& f) { return f.section == section && f.key == key; });
      if (it == table.end()) throw std::invalid_argument("config: unknown key " + section + "." + key);
      it->set(value.data());
    }
  }
}

std::string render(const std::vector<Field>& table) {
  std::string out;
  std::string current;
  for (const Field& f : table) {
    if (f.section != current) {
      if (!out.empty()) out += "\n";
      out += "[" + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + f.get() + "\n";
  }
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& text) {
  PipelineConfig c;
  apply(text, fields(c));
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(slurp(path));
}

PhantomParams parse_phantom_params(const std::string& text) {
  PhantomParams p;
  apply(text, fields(p));
  p.validate();
  return p;
}

PhantomParams load_phantom_params(const std::filesystem::path& path) {
  return parse_phantom_params(slurp(path));
}

std::string to_ini(const PipelineConfig& config) {
  PipelineConfig copy = config;
  return render(fields(copy));
}

std::string to_ini(const PhantomParams& params) {
  PhantomParams copy = params;
  return render(fields(copy));
}

}  // namespace leukoseg
