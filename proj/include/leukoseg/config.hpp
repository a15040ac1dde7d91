#pragma once

#include <filesystem>
#include <string>

#include "leukoseg/phantom.hpp"
#include "leukoseg/pipeline.hpp"

namespace leukoseg {

// INI-style text: [section] headers and key = value lines. Missing keys keep
// their defaults; unknown sections or keys and malformed values throw
// std::invalid_argument. The result is validated.
PipelineConfig parse_pipeline_config(const std::string& text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

PhantomParams parse_phantom_params(const std::string& text);
PhantomParams load_phantom_params(const std::filesystem::path& path);

std::string to_ini(const PipelineConfig& config);
std::string to_ini(const PhantomParams& params);

}  // namespace leukoseg
