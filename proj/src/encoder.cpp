#include "subpix/encoder.hpp"

#include "subpix/errors.hpp"

#include <cmath>

namespace subpix {

namespace {
constexpr double kTwoPi = 6.28318530717958647693;
} // namespace

void validate_grid(const GridSpec& grid) {
    if (grid.width_hm < 4 || grid.height_hm < 4) {
        throw ValidationError("grid: heatmap dimensions must be >= 4");
    }
    if (!(grid.scale_s > 0.0)) {
        throw ValidationError("grid: scale must be positive");
    }
}

void validate_encoder(const EncoderConfig& cfg) {
    if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) {
        throw ValidationError("encoder: sigma must be positive and finite");
    }
    if (cfg.truncation_radius &&
        *cfg.truncation_radius < static_cast<int>(std::ceil(3.0 * cfg.sigma))) {
        throw ValidationError("encoder: truncation radius must be >= ceil(3*sigma)");
    }
}

const char* quantize_mode_name(QuantizeMode mode) {
    switch (mode) {
    case QuantizeMode::Round: return "round";
    case QuantizeMode::Floor: return "floor";
    case QuantizeMode::None: return "none";
    }
    return "?";
}

QuantizeMode quantize_mode_from_name(const std::string& name) {
    if (name == "round") return QuantizeMode::Round;
    if (name == "floor") return QuantizeMode::Floor;
    if (name == "none") return QuantizeMode::None;
    throw ValidationError("unknown quantize mode '" + name + "'");
}

const char* normalization_name(Normalization n) {
    return n == Normalization::Pdf ? "pdf" : "amplitude-one";
}

Normalization normalization_from_name(const std::string& name) {
    if (name == "pdf") return Normalization::Pdf;
    if (name == "amplitude-one" || name == "amplitude_one") return Normalization::AmplitudeOne;
    throw ValidationError("unknown normalization '" + name + "'");
}

LandmarkSet scale_coords(const LandmarkSet& l, const GridSpec& grid, QuantizeMode mode) {
    validate_landmarks(l);
    validate_grid(grid);
    LandmarkSet out = l;
    for (std::size_t k = 0; k < out.size(); ++k) {
        double x = l.points[k].x / grid.scale_s;
        double y = l.points[k].y / grid.scale_s;
        switch (mode) {
        case QuantizeMode::Round:
            x = std::round(x);
            y = std::round(y);
            break;
        case QuantizeMode::Floor:
            x = std::floor(x);
            y = std::floor(y);
            break;
        case QuantizeMode::None:
            break;
        }
        out.points[k] = {x, y};
        // In-grid means the nearest pixel of the final position exists.
        const double nx = (mode == QuantizeMode::None) ? std::round(x) : x;
        const double ny = (mode == QuantizeMode::None) ? std::round(y) : y;
        const bool in_grid = nx >= 0.0 && nx <= grid.width_hm - 1 && ny >= 0.0 &&
                             ny <= grid.height_hm - 1;
        if (!in_grid) {
            out.visibility[k] = 0;
        }
    }
    return out;
}

Heatmap render_gaussian(const Point2& center, const GridSpec& grid, const EncoderConfig& cfg) {
    validate_grid(grid);
    validate_encoder(cfg);

    const int w = grid.width_hm;
    const int h = grid.height_hm;
    const double inv2s2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    const double amp = cfg.normalization == Normalization::Pdf
                           ? 1.0 / (kTwoPi * cfg.sigma * cfg.sigma)
                           : 1.0;

    // Separable evaluation: exp(-(dx^2+dy^2)/(2s^2)) = fx[x] * fy[y].
    // dx^2 is identical for +-dx, so integer-centered maps are exactly
    // symmetric bit for bit.
    std::vector<double> fx(w), fy(h), dx2(w), dy2(h);
    for (int x = 0; x < w; ++x) {
        const double dx = x - center.x;
        dx2[x] = dx * dx;
        fx[x] = std::exp(-dx2[x] * inv2s2);
    }
    for (int y = 0; y < h; ++y) {
        const double dy = y - center.y;
        dy2[y] = dy * dy;
        fy[y] = amp * std::exp(-dy2[y] * inv2s2);
    }

    Heatmap out(w, h);
    if (cfg.truncation_radius) {
        const double r2 = static_cast<double>(*cfg.truncation_radius) *
                          static_cast<double>(*cfg.truncation_radius);
        for (int y = 0; y < h; ++y) {
            double* row = &out.values[static_cast<std::size_t>(y) * w];
            for (int x = 0; x < w; ++x) {
                row[x] = (dx2[x] + dy2[y] > r2) ? 0.0 : fy[y] * fx[x];
            }
        }
    } else {
        for (int y = 0; y < h; ++y) {
            double* row = &out.values[static_cast<std::size_t>(y) * w];
            for (int x = 0; x < w; ++x) {
                row[x] = fy[y] * fx[x];
            }
        }
    }
    return out;
}

HeatmapStack encode_landmarks(const LandmarkSet& l, const GridSpec& grid,
                              const EncoderConfig& cfg) {
    validate_landmarks(l);
    validate_grid(grid);
    validate_encoder(cfg);
    HeatmapStack stack;
    stack.reserve(l.size());
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (l.visible(k)) {
            stack.push_back(render_gaussian(l.points[k], grid, cfg));
        } else {
            stack.emplace_back(grid.width_hm, grid.height_hm);
        }
    }
    return stack;
}

} // namespace subpix
