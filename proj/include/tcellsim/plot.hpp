#pragma once

// Minimal static SVG chart writer for trajectories and validation overlays.

#include <filesystem>
#include <string>
#include <vector>

namespace tcellsim {

enum class MarkerStyle { Line, Circle, Square, Diamond };

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    MarkerStyle style = MarkerStyle::Line;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "age (years)";
    std::string y_label;
    int width = 800;
    int height = 500;
};

/// Standalone SVG document. Throws InvalidArgument on an empty series list
/// or on a series whose x and y lengths differ or are empty.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options = {});

/// render_svg written to `path`; throws IoError on write failure.
void render_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path,
                 const PlotOptions& options = {});

} // namespace tcellsim
