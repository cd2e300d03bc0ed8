#pragma once

#include "subpix/geometry.hpp"

#include <utility>
#include <vector>

namespace subpix {

/// Per-sample localization error. nme is the mean of error/normalizer over
/// the visible points, times 100 (percent).
struct SampleError {
    std::vector<double> point_errors; // Euclidean, px, one per point
    double normalizer = 0.0;          // px
    double nme = 0.0;                 // percent
};

/// Visibility mask comes from `gt`. Throws on K mismatch, non-positive
/// normalizer, or zero visible points.
SampleError nme(const LandmarkSet& pred, const LandmarkSet& gt, double normalizer);

/// Fraction of samples with nme <= t, at `steps` evenly spaced thresholds
/// on [0, max_threshold].
std::vector<std::pair<double, double>> cumulative_curve(const std::vector<double>& nmes,
                                                        double max_threshold, int steps);

/// Exact step-function integral of the cumulative error curve over
/// [0, cutoff], divided by cutoff (perfect predictions give 1).
double auc(const std::vector<double>& nmes, double cutoff);

/// 100 * count(nme > threshold) / N. Strict inequality, so together with the
/// curve's <= rule every sample is counted exactly once.
double failure_rate(const std::vector<double>& nmes, double threshold);

struct EvalReport {
    std::vector<SampleError> samples;
    double nme_mean = 0.0;  // percent
    double auc_value = 0.0; // fraction in [0, 1]
    double fr = 0.0;        // percent
    std::vector<std::pair<double, double>> curve;
};

/// Aggregates per-sample errors into a report (mean accumulated in sample
/// order, so results do not depend on how samples were produced).
EvalReport make_report(std::vector<SampleError> samples, double auc_cutoff,
                       double fr_threshold, double curve_max, int curve_steps);

} // namespace subpix
