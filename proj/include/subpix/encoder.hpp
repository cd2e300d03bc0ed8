#pragma once

#include "subpix/geometry.hpp"
#include "subpix/heatmap.hpp"

#include <optional>
#include <string>

namespace subpix {

/// How landmark coordinates are mapped onto the heatmap grid:
/// Round / Floor quantize to integer pixels, None keeps the continuous
/// sub-pixel position (no quantization at all).
enum class QuantizeMode { Round, Floor, None };

/// Pdf keeps the 1/(2*pi*sigma^2) Gaussian prefactor; AmplitudeOne rescales
/// so an integer-centered peak is exactly 1. AmplitudeOne is the default:
/// the fixed decode temperature only yields a sharp softmax for O(1) peaks.
enum class Normalization { Pdf, AmplitudeOne };

struct EncoderConfig {
    double sigma = 1.0; // std deviation, heatmap px
    QuantizeMode quantize_mode = QuantizeMode::None;
    Normalization normalization = Normalization::AmplitudeOne;
    std::optional<int> truncation_radius; // px; unset = exact full-grid evaluation
};

/// Throws ValidationError on sigma <= 0 or a truncation radius < ceil(3*sigma).
void validate_encoder(const EncoderConfig& cfg);

const char* quantize_mode_name(QuantizeMode mode);
QuantizeMode quantize_mode_from_name(const std::string& name);
const char* normalization_name(Normalization n);
Normalization normalization_from_name(const std::string& name);

/// Divides coordinates by grid.scale_s, then quantizes per `mode`
/// (Round = half away from zero). Points whose resulting grid position falls
/// outside the map are marked invisible rather than clamped.
LandmarkSet scale_coords(const LandmarkSet& l, const GridSpec& grid, QuantizeMode mode);

/// Samples H[x,y] = A * exp(-((x-cx)^2 + (y-cy)^2) / (2*sigma^2)) over the
/// grid; A = 1/(2*pi*sigma^2) for Pdf, 1 for AmplitudeOne. Pixels beyond the
/// truncation radius (when set) are exactly 0.
Heatmap render_gaussian(const Point2& center, const GridSpec& grid, const EncoderConfig& cfg);

/// One heatmap per landmark (landmarks already in heatmap coordinates,
/// see scale_coords); invisible landmarks yield all-zero maps.
HeatmapStack encode_landmarks(const LandmarkSet& l, const GridSpec& grid,
                              const EncoderConfig& cfg);

} // namespace subpix
