#include "subpix/decoder.hpp"

#include "subpix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subpix {

void validate_decoder(const DecoderConfig& cfg) {
    if (cfg.window_d < 3 || cfg.window_d % 2 == 0) {
        throw ValidationError("decoder: window size must be odd and >= 3");
    }
    if (!(cfg.temperature_tau > 0.0) || !std::isfinite(cfg.temperature_tau)) {
        throw ValidationError("decoder: temperature must be positive and finite");
    }
}

const char* strategy_name(Strategy s) {
    switch (s) {
    case Strategy::Argmax: return "argmax";
    case Strategy::Heuristic: return "heuristic";
    case Strategy::LocalSoftargmax: return "local_softargmax";
    case Strategy::GlobalSoftargmax: return "global_softargmax";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "argmax") return Strategy::Argmax;
    if (name == "heuristic") return Strategy::Heuristic;
    if (name == "local_softargmax" || name == "local-softargmax") return Strategy::LocalSoftargmax;
    if (name == "global_softargmax" || name == "global-softargmax") return Strategy::GlobalSoftargmax;
    throw ValidationError("unknown decode strategy '" + name + "'");
}

std::optional<PeakLocation> argmax2d(const Heatmap& h) {
    if (h.width <= 0 || h.height <= 0) {
        throw ValidationError("argmax: empty heatmap");
    }
    PeakLocation best{0, 0, h.values[0]};
    for (int y = 0; y < h.height; ++y) {
        const double* row = &h.values[static_cast<std::size_t>(y) * h.width];
        for (int x = 0; x < h.width; ++x) {
            if (row[x] > best.value) {
                best = {x, y, row[x]};
            }
        }
    }
    if (best.value == 0.0) {
        return std::nullopt;
    }
    return best;
}

Point2 heuristic_decode(const Heatmap& h) {
    const auto peak = argmax2d(h);
    if (!peak) {
        throw ValidationError("heuristic: all-zero heatmap");
    }
    const int x = peak->x;
    const int y = peak->y;
    struct Neighbor {
        int nx, ny;
        double sx, sy;
    };
    const Neighbor order[4] = {
        {x - 1, y, -0.25, 0.0},
        {x + 1, y, 0.25, 0.0},
        {x, y - 1, 0.0, -0.25},
        {x, y + 1, 0.0, 0.25},
    };
    double best = -std::numeric_limits<double>::infinity();
    double sx = 0.0, sy = 0.0;
    for (const auto& n : order) {
        if (n.nx < 0 || n.nx >= h.width || n.ny < 0 || n.ny >= h.height) continue;
        const double v = h.at(n.nx, n.ny);
        if (v > best) {
            best = v;
            sx = n.sx;
            sy = n.sy;
        }
    }
    return {x + sx, y + sy};
}

Window extract_window(const Heatmap& h, int cx, int cy, int d) {
    if (d < 3 || d % 2 == 0) {
        throw ValidationError("window: size must be odd and >= 3");
    }
    if (d > h.width || d > h.height) {
        throw ValidationError("window: size exceeds heatmap dimensions");
    }
    const int l = (d - 1) / 2;
    Window w;
    w.size = d;
    w.x0 = std::clamp(cx - l, 0, h.width - d);
    w.y0 = std::clamp(cy - l, 0, h.height - d);
    w.values.resize(static_cast<std::size_t>(d) * d);
    for (int y = 0; y < d; ++y) {
        const double* src = &h.values[static_cast<std::size_t>(w.y0 + y) * h.width + w.x0];
        std::copy(src, src + d, &w.values[static_cast<std::size_t>(y) * d]);
    }
    return w;
}

namespace {

// softmax(tau * v) with max-subtraction; mathematically unchanged, immune to
// overflow for large tau.
std::vector<double> softmax_values(const std::vector<double>& v, double tau) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        m = std::max(m, tau * x);
    }
    std::vector<double> p(v.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        p[i] = std::exp(tau * v[i] - m);
        sum += p[i];
    }
    for (double& x : p) {
        x /= sum;
    }
    return p;
}

} // namespace

std::vector<double> softmax2d(const Window& w, double tau) {
    return softmax_values(w.values, tau);
}

namespace {

Point2 window_expectation(const Window& w, const std::vector<double>& p) {
    double ex = 0.0, ey = 0.0;
    for (int y = 0; y < w.size; ++y) {
        for (int x = 0; x < w.size; ++x) {
            const double q = p[static_cast<std::size_t>(y) * w.size + x];
            ex += q * x;
            ey += q * y;
        }
    }
    return {ex, ey};
}

} // namespace

Point2 local_softargmax_decode(const Heatmap& h, const DecoderConfig& cfg) {
    validate_decoder(cfg);
    const auto peak = argmax2d(h);
    if (!peak) {
        throw ValidationError("local softargmax: all-zero heatmap");
    }
    const Window w = extract_window(h, peak->x, peak->y, cfg.window_d);
    const auto p = softmax2d(w, cfg.temperature_tau);
    const Point2 off = window_expectation(w, p);
    return {w.x0 + off.x, w.y0 + off.y};
}

Point2 global_softargmax_decode(const Heatmap& h, double tau) {
    if (h.width <= 0 || h.height <= 0) {
        throw ValidationError("global softargmax: empty heatmap");
    }
    const auto p = softmax_values(h.values, tau);
    double ex = 0.0, ey = 0.0;
    for (int y = 0; y < h.height; ++y) {
        for (int x = 0; x < h.width; ++x) {
            const double q = p[static_cast<std::size_t>(y) * h.width + x];
            ex += q * x;
            ey += q * y;
        }
    }
    return {ex, ey};
}

std::vector<std::array<double, 2>> local_softargmax_jacobian(const Window& w, double tau) {
    const auto p = softmax2d(w, tau);
    const Point2 off = window_expectation(w, p);
    std::vector<std::array<double, 2>> jac(p.size());
    for (int y = 0; y < w.size; ++y) {
        for (int x = 0; x < w.size; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w.size + x;
            jac[i][0] = tau * p[i] * (x - off.x);
            jac[i][1] = tau * p[i] * (y - off.y);
        }
    }
    return jac;
}

DecodeResult decode_stack(const HeatmapStack& stack, const DecoderConfig& cfg) {
    validate_decoder(cfg);
    DecodeResult out;
    out.coords.points.resize(stack.size());
    out.coords.visibility.assign(stack.size(), 0);
    out.peak_values.assign(stack.size(), 0.0);
    out.window_origins.assign(stack.size(), Point2{0.0, 0.0});

    for (std::size_t k = 0; k < stack.size(); ++k) {
        const Heatmap& h = stack[k];
        const auto peak = argmax2d(h);
        if (!peak) {
            continue; // all-zero map: landmark stays invisible
        }
        const Window w = extract_window(h, peak->x, peak->y, cfg.window_d);
        out.peak_values[k] = peak->value;
        out.window_origins[k] = {static_cast<double>(w.x0), static_cast<double>(w.y0)};
        out.coords.visibility[k] = 1;
        switch (cfg.strategy) {
        case Strategy::Argmax:
            out.coords.points[k] = {static_cast<double>(peak->x), static_cast<double>(peak->y)};
            break;
        case Strategy::Heuristic:
            out.coords.points[k] = heuristic_decode(h);
            break;
        case Strategy::LocalSoftargmax: {
            const auto p = softmax2d(w, cfg.temperature_tau);
            double ex = 0.0, ey = 0.0;
            for (int y = 0; y < w.size; ++y) {
                for (int x = 0; x < w.size; ++x) {
                    const double q = p[static_cast<std::size_t>(y) * w.size + x];
                    ex += q * x;
                    ey += q * y;
                }
            }
            out.coords.points[k] = {w.x0 + ex, w.y0 + ey};
            break;
        }
        case Strategy::GlobalSoftargmax:
            out.coords.points[k] = global_softargmax_decode(h, cfg.temperature_tau);
            break;
        }
    }
    return out;
}

} // namespace subpix
