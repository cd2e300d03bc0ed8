#include "subpix/metrics.hpp"

#include "subpix/errors.hpp"

#include <algorithm>
#include <cmath>

namespace subpix {

SampleError nme(const LandmarkSet& pred, const LandmarkSet& gt, double normalizer) {
    validate_landmarks(pred);
    validate_landmarks(gt);
    if (pred.size() != gt.size()) {
        throw ValidationError("nme: prediction/ground-truth size mismatch");
    }
    if (!(normalizer > 0.0)) {
        throw ValidationError("nme: normalizer must be positive");
    }
    SampleError s;
    s.normalizer = normalizer;
    s.point_errors.resize(gt.size());
    double sum = 0.0;
    std::size_t visible = 0;
    for (std::size_t k = 0; k < gt.size(); ++k) {
        s.point_errors[k] = distance(pred.points[k], gt.points[k]);
        if (gt.visible(k)) {
            sum += s.point_errors[k] / normalizer;
            ++visible;
        }
    }
    if (visible == 0) {
        throw ValidationError("nme: no visible ground-truth points");
    }
    s.nme = 100.0 * sum / static_cast<double>(visible);
    return s;
}

std::vector<std::pair<double, double>> cumulative_curve(const std::vector<double>& nmes,
                                                        double max_threshold, int steps) {
    if (nmes.empty()) {
        throw ValidationError("curve: empty sample list");
    }
    if (steps < 2) {
        throw ValidationError("curve: need at least two thresholds");
    }
    std::vector<double> sorted = nmes;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> curve(steps);
    const double n = static_cast<double>(sorted.size());
    for (int i = 0; i < steps; ++i) {
        const double t = max_threshold * i / (steps - 1);
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
        curve[i] = {t, static_cast<double>(it - sorted.begin()) / n};
    }
    return curve;
}

double auc(const std::vector<double>& nmes, double cutoff) {
    if (nmes.empty()) {
        throw ValidationError("auc: empty sample list");
    }
    if (!(cutoff > 0.0)) {
        throw ValidationError("auc: cutoff must be positive");
    }
    // Each sample contributes max(0, cutoff - nme) to the integral of the
    // empirical CDF over [0, cutoff].
    double acc = 0.0;
    for (double v : nmes) {
        if (v <= cutoff) {
            acc += cutoff - v;
        }
    }
    return acc / (cutoff * static_cast<double>(nmes.size()));
}

double failure_rate(const std::vector<double>& nmes, double threshold) {
    if (nmes.empty()) {
        throw ValidationError("failure rate: empty sample list");
    }
    if (!(threshold > 0.0)) {
        throw ValidationError("failure rate: threshold must be positive");
    }
    std::size_t failures = 0;
    for (double v : nmes) {
        if (v > threshold) {
            ++failures;
        }
    }
    return 100.0 * static_cast<double>(failures) / static_cast<double>(nmes.size());
}

EvalReport make_report(std::vector<SampleError> samples, double auc_cutoff,
                       double fr_threshold, double curve_max, int curve_steps) {
    if (samples.empty()) {
        throw ValidationError("report: empty sample list");
    }
    EvalReport r;
    std::vector<double> nmes(samples.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        nmes[i] = samples[i].nme;
        sum += samples[i].nme;
    }
    r.nme_mean = sum / static_cast<double>(samples.size());
    r.auc_value = auc(nmes, auc_cutoff);
    r.fr = failure_rate(nmes, fr_threshold);
    r.curve = cumulative_curve(nmes, curve_max, curve_steps);
    r.samples = std::move(samples);
    return r;
}

} // namespace subpix
