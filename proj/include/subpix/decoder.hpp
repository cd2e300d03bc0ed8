#pragma once

#include "subpix/geometry.hpp"
#include "subpix/heatmap.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace subpix {

enum class Strategy { Argmax, Heuristic, LocalSoftargmax, GlobalSoftargmax };
enum class BoundaryPolicy { ShiftWindow };

struct DecoderConfig {
    int window_d = 5;          // odd, >= 3
    double temperature_tau = 10.0;
    BoundaryPolicy boundary_policy = BoundaryPolicy::ShiftWindow;
    Strategy strategy = Strategy::LocalSoftargmax;
};

void validate_decoder(const DecoderConfig& cfg);

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct PeakLocation {
    int x = 0;
    int y = 0;
    double value = 0.0;
};

/// Location of the highest pixel; first occurrence in row-major order on
/// exact ties. Empty result for an all-zero map (landmark decoded invisible).
std::optional<PeakLocation> argmax2d(const Heatmap& h);

/// Argmax plus a 0.25 px shift toward the highest 4-connected neighbor.
/// Neighbor order on ties: left, right, up, down; out-of-bounds neighbors
/// never win. Throws ValidationError on an all-zero map.
Point2 heuristic_decode(const Heatmap& h);

/// d x d patch, row-major; origin is its top-left pixel in map coordinates.
struct Window {
    int size = 0;
    int x0 = 0;
    int y0 = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * size + x]; }
};

/// Window centered on `center` (origin = center - (d-1)/2), shifted to stay
/// fully inside the map near borders. Throws if d is even, < 3, or exceeds
/// either map dimension.
Window extract_window(const Heatmap& h, int cx, int cy, int d);

/// softmax(tau * w): probabilities over the window, computed with
/// max-subtraction. Sums to 1 within 1e-12 for any finite input.
std::vector<double> softmax2d(const Window& w, double tau);

/// Expectation of window coordinates under softmax(tau * window), added to
/// the window origin; for interior windows this is argmax + offset - (d-1)/2.
/// Throws ValidationError on an all-zero map.
Point2 local_softargmax_decode(const Heatmap& h, const DecoderConfig& cfg);

/// Same expectation taken over the entire map. A uniform (or all-zero) map
/// yields the grid centroid.
Point2 global_softargmax_decode(const Heatmap& h, double tau);

/// Sensitivities (d(offset_x)/dh, d(offset_y)/dh) per window entry, row-major:
/// d(offset_x)/dh[m] = tau * p[m] * (m_x - offset_x), and likewise for y.
std::vector<std::array<double, 2>> local_softargmax_jacobian(const Window& w, double tau);

struct DecodeResult {
    LandmarkSet coords;                 // heatmap coordinates
    std::vector<double> peak_values;    // map maximum per landmark
    std::vector<Point2> window_origins; // origin of the window_d patch at the argmax
};

/// Per-landmark decode with the configured strategy. All-zero maps decode
/// invisible (coords (0,0), peak 0, origin (0,0)).
DecodeResult decode_stack(const HeatmapStack& stack, const DecoderConfig& cfg);

} // namespace subpix
