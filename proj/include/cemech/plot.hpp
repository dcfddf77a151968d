#pragma once

// Minimal line plots for the CLI. SVG carries labels and ticks; PNG is a
// bare raster of the same axes and curves (no text).

#include <filesystem>
#include <string>
#include <vector>

namespace cemech::plot {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    bool markers = false; // points instead of a polyline
};

struct Figure {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    bool log_x = false;
    bool log_y = false;
    int width = 720;
    int height = 480;
};

std::string render_svg(const Figure& fig);
void write_svg(const std::filesystem::path& path, const Figure& fig);
void write_png(const std::filesystem::path& path, const Figure& fig);

} // namespace cemech::plot
