#pragma once

#include "subpix/dataset.hpp"
#include "subpix/decoder.hpp"
#include "subpix/encoder.hpp"
#include "subpix/metrics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace subpix {

struct BenchConfig {
    GridSpec grid;
    std::vector<QuantizeMode> encoders{QuantizeMode::Round, QuantizeMode::None};
    std::vector<Strategy> strategies{Strategy::Argmax, Strategy::Heuristic,
                                     Strategy::LocalSoftargmax};
    double sigma = 1.0;
    Normalization normalization = Normalization::AmplitudeOne;
    int window_d = 5;
    double temperature_tau = 10.0;
    NormKind norm_kind = NormKind::Box;
    double auc_cutoff = 7.0;    // percent
    double fr_threshold = 10.0; // percent
    int curve_steps = 101;
    std::uint64_t rng_seed = 0;
    int sample_count = 1000; // synthetic generation size when no manifest is given
    int threads = 1;
};

/// One benchmark configuration with its aggregate metrics. mean_px_err is the
/// mean per-point Euclidean error in heatmap pixels.
struct BenchRow {
    std::string run_id;
    std::string encoder; // quantize mode name
    std::string decoder; // strategy name
    double sigma = 0.0;
    int window = 0; // 0 when the strategy uses no window
    double tau = 0.0;
    std::size_t n = 0;
    double nme_mean = 0.0;
    double auc_value = 0.0;
    double fr = 0.0;
    double mean_px_err = 0.0;
    EvalReport report;
    std::vector<double> sample_px_err; // heatmap px, one per sample
};

/// Ground-truth encode/decode roundtrip: scale, encode, decode, unscale, and
/// score against the original landmarks. One row per encoder x strategy.
/// Per-sample work runs on cfg.threads workers; aggregation is an ordered
/// reduction, so results are identical for any worker count.
std::vector<BenchRow> roundtrip_bench(const DatasetManifest& manifest, const BenchConfig& cfg);

enum class SweepAxis { Window, Temperature, Sigma };

SweepAxis sweep_axis_from_name(const std::string& name);

/// Runs one roundtrip per value along the chosen axis (continuous encoding,
/// local soft-argmax). A window value of 0 means "no window" and reports both
/// the plain-argmax and the 0.25px-heuristic decodes.
std::vector<BenchRow> sweep(SweepAxis axis, const std::vector<double>& values,
                            const DatasetManifest& manifest, const BenchConfig& base_cfg);

/// Fixed header: run_id,encoder,decoder,sigma,window,tau,n,nme_mean,auc,fr,mean_px_err
/// Values at 9 significant digits.
void write_csv(const std::vector<BenchRow>& rows, const std::string& path);

/// Per-sample companion table: run_id,sample_index,nme,mean_px_err.
void write_per_sample_csv(const std::vector<BenchRow>& rows, const std::string& path);

/// %.9g formatting used by every CSV writer.
std::string format_g9(double v);

} // namespace subpix
