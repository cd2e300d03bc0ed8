#pragma once

#include <vector>

namespace subpix {

/// Heatmap resolution and the input-to-heatmap scale factor s
/// (input pixels per heatmap pixel; 256x256 inputs at 64x64 maps give s = 4).
struct GridSpec {
    int width_hm = 64;
    int height_hm = 64;
    double scale_s = 4.0;
};

/// Throws ValidationError unless both dims are >= 4 and scale_s > 0.
void validate_grid(const GridSpec& grid);

/// Dense non-negative activation grid, row-major (y * width + x).
struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Heatmap() = default;
    Heatmap(int w, int h)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// One heatmap per landmark.
using HeatmapStack = std::vector<Heatmap>;

} // namespace subpix
