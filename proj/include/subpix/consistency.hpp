#pragma once

#include "subpix/decoder.hpp"
#include "subpix/encoder.hpp"
#include "subpix/geometry.hpp"
#include "subpix/heatmap.hpp"

#include <cstdint>

namespace subpix {

/// Heatmap-regression stand-in: maps landmarks in input-image coordinates to
/// a heatmap stack. The extension point for plugging a trained model into
/// the transform-consistency harness.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual HeatmapStack predict(const LandmarkSet& input_coords, const GridSpec& grid,
                                 const EncoderConfig& cfg) const = 0;
};

/// Exact predictor: scales and encodes the ground truth it is given.
class OracleEncoder final : public Predictor {
public:
    HeatmapStack predict(const LandmarkSet& input_coords, const GridSpec& grid,
                         const EncoderConfig& cfg) const override;
};

/// Oracle plus seeded additive Gaussian pixel noise, clamped at zero.
/// Amplitude is relative to the encoded peak value. Each predict call draws
/// from a fresh substream, so the two branches of a merge get independent
/// noise; results are deterministic given the seed and the (fixed) call order.
class NoisyOracle final : public Predictor {
public:
    NoisyOracle(double amplitude, std::uint64_t seed) : amplitude_(amplitude), seed_(seed) {}
    HeatmapStack predict(const LandmarkSet& input_coords, const GridSpec& grid,
                         const EncoderConfig& cfg) const override;

private:
    double amplitude_;
    std::uint64_t seed_;
    mutable std::uint64_t calls_ = 0;
};

/// Conjugates an input-image-coordinate transform into heatmap coordinates:
/// T_hm = S * T * S^-1 with S the uniform 1/s scaling about the origin.
AffineTransform to_heatmap_coords(const AffineTransform& t, const GridSpec& grid);

/// Moves heatmap content forward by `t` (heatmap coordinates): each output
/// pixel takes the bilinearly interpolated value of `h` at t^-1(p); samples
/// outside the source are 0. Throws ValidationError on singular transforms.
Heatmap warp_heatmap(const Heatmap& h, const AffineTransform& t);

/// Two-branch transform-consistency merge: predict under t0 and t1 (given in
/// input-image coordinates), reverse each branch by the inverse warp in
/// heatmap coordinates, and sum element-wise (no renormalization).
HeatmapStack siamese_merge(const LandmarkSet& gt_input, const AffineTransform& t0,
                           const AffineTransform& t1, const Predictor& predictor,
                           const GridSpec& grid, const EncoderConfig& cfg);

struct ConsistencyReport {
    DecodeResult branch0;  // decode of the reversed t0 branch
    DecodeResult branch1;  // decode of the reversed t1 branch
    DecodeResult merged;   // decode of the summed stack
    double discrepancy_01 = 0.0;            // mean px between branch decodes
    double discrepancy_merged_vs_gt = 0.0;  // mean px, merged vs scaled gt
};

/// Runs both branches and the merge, decodes everything, and reports the
/// pairwise and vs-ground-truth distances in heatmap pixels.
ConsistencyReport consistency_report(const LandmarkSet& gt_input, const AffineTransform& t0,
                                     const AffineTransform& t1, const Predictor& predictor,
                                     const GridSpec& grid, const EncoderConfig& enc_cfg,
                                     const DecoderConfig& dec_cfg);

/// Mean distance between two decodes over landmarks visible in both.
double mean_decode_discrepancy(const DecodeResult& a, const DecodeResult& b);

/// Mean distance between a decode and reference coordinates (same space).
double mean_decode_error(const DecodeResult& a, const LandmarkSet& reference);

} // namespace subpix
