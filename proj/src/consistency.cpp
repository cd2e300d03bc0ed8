#include "subpix/consistency.hpp"

#include "subpix/errors.hpp"
#include "subpix/rng.hpp"

#include <cmath>

namespace subpix {

HeatmapStack OracleEncoder::predict(const LandmarkSet& input_coords, const GridSpec& grid,
                                    const EncoderConfig& cfg) const {
    return encode_landmarks(scale_coords(input_coords, grid, cfg.quantize_mode), grid, cfg);
}

HeatmapStack NoisyOracle::predict(const LandmarkSet& input_coords, const GridSpec& grid,
                                  const EncoderConfig& cfg) const {
    HeatmapStack stack = OracleEncoder{}.predict(input_coords, grid, cfg);
    const double peak = cfg.normalization == Normalization::Pdf
                            ? 1.0 / (2.0 * 3.14159265358979323846 * cfg.sigma * cfg.sigma)
                            : 1.0;
    const double amp = amplitude_ * peak;
    const std::uint64_t call = calls_++;
    for (std::size_t k = 0; k < stack.size(); ++k) {
        CounterRng rng(mix64(seed_ + call), k);
        for (double& v : stack[k].values) {
            v = std::max(0.0, v + amp * rng.next_gaussian());
        }
    }
    return stack;
}

AffineTransform to_heatmap_coords(const AffineTransform& t, const GridSpec& grid) {
    validate_grid(grid);
    const AffineTransform down = make_scale(1.0 / grid.scale_s, 1.0 / grid.scale_s, {0.0, 0.0});
    const AffineTransform up = make_scale(grid.scale_s, grid.scale_s, {0.0, 0.0});
    return compose(down, compose(t, up));
}

Heatmap warp_heatmap(const Heatmap& h, const AffineTransform& t) {
    const AffineTransform inv = invert(t);
    Heatmap out(h.width, h.height);
    for (int y = 0; y < h.height; ++y) {
        for (int x = 0; x < h.width; ++x) {
            const double sx = inv.a * x + inv.b * y + inv.tx;
            const double sy = inv.c * x + inv.d * y + inv.ty;
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0;
            const double fy = sy - y0;
            double v = 0.0;
            const auto tap = [&](int xx, int yy, double w) {
                if (w != 0.0 && xx >= 0 && xx < h.width && yy >= 0 && yy < h.height) {
                    v += w * h.at(xx, yy);
                }
            };
            tap(x0, y0, (1.0 - fx) * (1.0 - fy));
            tap(x0 + 1, y0, fx * (1.0 - fy));
            tap(x0, y0 + 1, (1.0 - fx) * fy);
            tap(x0 + 1, y0 + 1, fx * fy);
            out.at(x, y) = v;
        }
    }
    return out;
}

HeatmapStack siamese_merge(const LandmarkSet& gt_input, const AffineTransform& t0,
                           const AffineTransform& t1, const Predictor& predictor,
                           const GridSpec& grid, const EncoderConfig& cfg) {
    const HeatmapStack b0 = predictor.predict(apply_landmarks(t0, gt_input), grid, cfg);
    const HeatmapStack b1 = predictor.predict(apply_landmarks(t1, gt_input), grid, cfg);
    if (b0.size() != gt_input.size() || b1.size() != gt_input.size()) {
        throw ValidationError("siamese: predictor returned wrong stack size");
    }
    const AffineTransform r0 = invert(to_heatmap_coords(t0, grid));
    const AffineTransform r1 = invert(to_heatmap_coords(t1, grid));
    HeatmapStack merged;
    merged.reserve(b0.size());
    for (std::size_t k = 0; k < b0.size(); ++k) {
        Heatmap m = warp_heatmap(b0[k], r0);
        const Heatmap w1 = warp_heatmap(b1[k], r1);
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            m.values[i] += w1.values[i];
        }
        merged.push_back(std::move(m));
    }
    return merged;
}

double mean_decode_discrepancy(const DecodeResult& a, const DecodeResult& b) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.coords.size(); ++k) {
        if (a.coords.visible(k) && b.coords.visible(k)) {
            sum += distance(a.coords.points[k], b.coords.points[k]);
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double mean_decode_error(const DecodeResult& a, const LandmarkSet& reference) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.coords.size(); ++k) {
        if (a.coords.visible(k) && reference.visible(k)) {
            sum += distance(a.coords.points[k], reference.points[k]);
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

ConsistencyReport consistency_report(const LandmarkSet& gt_input, const AffineTransform& t0,
                                     const AffineTransform& t1, const Predictor& predictor,
                                     const GridSpec& grid, const EncoderConfig& enc_cfg,
                                     const DecoderConfig& dec_cfg) {
    const HeatmapStack b0 = predictor.predict(apply_landmarks(t0, gt_input), grid, enc_cfg);
    const HeatmapStack b1 = predictor.predict(apply_landmarks(t1, gt_input), grid, enc_cfg);
    const AffineTransform r0 = invert(to_heatmap_coords(t0, grid));
    const AffineTransform r1 = invert(to_heatmap_coords(t1, grid));

    HeatmapStack rev0, rev1, merged;
    rev0.reserve(b0.size());
    rev1.reserve(b1.size());
    merged.reserve(b0.size());
    for (std::size_t k = 0; k < b0.size(); ++k) {
        rev0.push_back(warp_heatmap(b0[k], r0));
        rev1.push_back(warp_heatmap(b1[k], r1));
        Heatmap m = rev0.back();
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            m.values[i] += rev1.back().values[i];
        }
        merged.push_back(std::move(m));
    }

    ConsistencyReport rep;
    rep.branch0 = decode_stack(rev0, dec_cfg);
    rep.branch1 = decode_stack(rev1, dec_cfg);
    rep.merged = decode_stack(merged, dec_cfg);
    const LandmarkSet gt_hm = scale_coords(gt_input, grid, QuantizeMode::None);
    rep.discrepancy_01 = mean_decode_discrepancy(rep.branch0, rep.branch1);
    rep.discrepancy_merged_vs_gt = mean_decode_error(rep.merged, gt_hm);
    return rep;
}

} // namespace subpix
