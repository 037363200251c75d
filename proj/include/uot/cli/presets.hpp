#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uot/cli/config.hpp"
#include "uot/image_io.hpp"

namespace uot::cli {

std::vector<std::string> preset_names();

/// Built-in configuration for one of the experiments. `base_dir` becomes
/// the config's base directory; outputs go to base_dir/results.
RunConfig preset(const std::string& name, const std::filesystem::path& base_dir = ".");

/// Writes any input files the preset refers to (the two cat images of the
/// image experiments) under its base directory.
void materialize_inputs(const RunConfig& cfg);

/// Procedural grayscale cat silhouette: 0 is a sitting cat, 1 a larger one
/// stretching to the right.
GrayImage synthetic_cat(int size, int which);

}  // namespace uot::cli
