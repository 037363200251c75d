#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "json.hpp"

namespace uot::cli {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Header "# nx=..,ny=..,dx=..,dy=.." then one line per x index holding the
/// ny values of that column (row-major, y fastest).
void write_field_csv(const std::filesystem::path& path, std::span<const double> values, int nx, int ny, double dx,
                     double dy);

/// 8-bit graymap of values / scale (clamped to [0,1]). The grid's y axis
/// points up, so image row 0 is j = ny-1.
void write_heatmap(const std::filesystem::path& path, std::span<const double> values, int nx, int ny, double scale);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace uot::cli
