#include "subpix/bench.hpp"

#include "subpix/errors.hpp"
#include "subpix/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace subpix {

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

struct PerSample {
    SampleError err;      // input-image px
    double px_err = 0.0;  // mean over scored points, heatmap px
    std::size_t scored = 0;
};

struct ConfigKey {
    QuantizeMode encoder;
    Strategy strategy;
};

EncoderConfig encoder_config(const BenchConfig& cfg, QuantizeMode mode) {
    EncoderConfig e;
    e.sigma = cfg.sigma;
    e.quantize_mode = mode;
    e.normalization = cfg.normalization;
    return e;
}

DecoderConfig decoder_config(const BenchConfig& cfg, Strategy s) {
    DecoderConfig d;
    d.window_d = cfg.window_d;
    d.temperature_tau = cfg.temperature_tau;
    d.strategy = s;
    return d;
}

PerSample score_sample(const ManifestRecord& rec, const DecodeResult& dec, double scale_s,
                       double norm) {
    const LandmarkSet& gt = rec.landmarks;
    LandmarkSet pred;
    pred.points.resize(gt.size());
    pred.visibility = gt.visibility;
    LandmarkSet gt_eff = gt;
    for (std::size_t k = 0; k < gt.size(); ++k) {
        pred.points[k] = {dec.coords.points[k].x * scale_s, dec.coords.points[k].y * scale_s};
        if (!dec.coords.visible(k)) {
            gt_eff.visibility[k] = 0; // undecodable (all-zero map): excluded from scoring
        }
    }
    PerSample out;
    out.err = nme(pred, gt_eff, norm);
    double px_sum = 0.0;
    for (std::size_t k = 0; k < gt.size(); ++k) {
        if (gt_eff.visible(k)) {
            px_sum += out.err.point_errors[k] / scale_s;
            ++out.scored;
        }
    }
    out.px_err = px_sum / static_cast<double>(out.scored);
    return out;
}

void run_samples(const DatasetManifest& manifest, const BenchConfig& cfg,
                 const std::vector<ConfigKey>& keys,
                 std::vector<std::vector<PerSample>>& slots) {
    const std::size_t n = manifest.records.size();
    std::vector<EncoderConfig> enc_cfgs;
    std::vector<DecoderConfig> dec_cfgs;
    enc_cfgs.reserve(keys.size());
    dec_cfgs.reserve(keys.size());
    for (const auto& key : keys) {
        enc_cfgs.push_back(encoder_config(cfg, key.encoder));
        dec_cfgs.push_back(decoder_config(cfg, key.strategy));
    }

    const auto process = [&](std::size_t i) {
        const ManifestRecord& rec = manifest.records[i];
        try {
            const BBox box = rec.bbox ? *rec.bbox : bbox_from_landmarks(rec.landmarks);
            const auto ic = rec.ic_indices ? *rec.ic_indices : std::make_pair(36, 45);
            const double norm = normalization_distance(cfg.norm_kind, rec.landmarks, box, ic);
            for (std::size_t c = 0; c < keys.size(); ++c) {
                // Encode once per distinct quantize mode in key order.
                bool done = false;
                for (std::size_t prev = 0; prev < c; ++prev) {
                    if (keys[prev].encoder == keys[c].encoder) {
                        done = true;
                        break;
                    }
                }
                if (done) continue;
                const LandmarkSet scaled =
                    scale_coords(rec.landmarks, cfg.grid, keys[c].encoder);
                const HeatmapStack stack = encode_landmarks(scaled, cfg.grid, enc_cfgs[c]);
                for (std::size_t c2 = c; c2 < keys.size(); ++c2) {
                    if (keys[c2].encoder != keys[c].encoder) continue;
                    const DecodeResult dec = decode_stack(stack, dec_cfgs[c2]);
                    slots[c2][i] = score_sample(rec, dec, cfg.grid.scale_s, norm);
                }
            }
        } catch (const ValidationError& e) {
            throw ValidationError("sample '" + rec.id + "': " + e.what());
        }
    };

    parallel_for(n, cfg.threads, process);
}

BenchRow aggregate(const BenchConfig& cfg, const ConfigKey& key, const std::string& run_id,
                   std::vector<PerSample>&& per_sample) {
    BenchRow row;
    row.run_id = run_id;
    row.encoder = quantize_mode_name(key.encoder);
    row.decoder = strategy_name(key.strategy);
    row.sigma = cfg.sigma;
    row.window = key.strategy == Strategy::LocalSoftargmax ? cfg.window_d : 0;
    row.tau = (key.strategy == Strategy::LocalSoftargmax ||
               key.strategy == Strategy::GlobalSoftargmax)
                  ? cfg.temperature_tau
                  : 0.0;
    row.n = per_sample.size();

    std::vector<SampleError> errs;
    errs.reserve(per_sample.size());
    row.sample_px_err.reserve(per_sample.size());
    double px_sum = 0.0;
    std::size_t px_count = 0;
    for (auto& ps : per_sample) {
        px_sum += ps.px_err * static_cast<double>(ps.scored);
        px_count += ps.scored;
        row.sample_px_err.push_back(ps.px_err);
        errs.push_back(std::move(ps.err));
    }
    row.mean_px_err = px_sum / static_cast<double>(px_count);
    row.report = make_report(std::move(errs), cfg.auc_cutoff, cfg.fr_threshold,
                             std::max(cfg.auc_cutoff, cfg.fr_threshold), cfg.curve_steps);
    row.nme_mean = row.report.nme_mean;
    row.auc_value = row.report.auc_value;
    row.fr = row.report.fr;
    return row;
}

} // namespace

std::vector<BenchRow> roundtrip_bench(const DatasetManifest& manifest, const BenchConfig& cfg) {
    validate_manifest(manifest);
    validate_grid(cfg.grid);
    if (manifest.records.empty()) {
        throw ValidationError("roundtrip: empty manifest");
    }
    if (cfg.encoders.empty() || cfg.strategies.empty()) {
        throw ValidationError("roundtrip: need at least one encoder and one strategy");
    }

    std::vector<ConfigKey> keys;
    for (QuantizeMode e : cfg.encoders) {
        for (Strategy s : cfg.strategies) {
            keys.push_back({e, s});
        }
    }
    std::vector<std::vector<PerSample>> slots(keys.size(),
                                              std::vector<PerSample>(manifest.records.size()));
    run_samples(manifest, cfg, keys, slots);

    std::vector<BenchRow> rows;
    rows.reserve(keys.size());
    for (std::size_t c = 0; c < keys.size(); ++c) {
        const std::string run_id = std::string("rt-") + quantize_mode_name(keys[c].encoder) +
                                   "-" + strategy_name(keys[c].strategy);
        rows.push_back(aggregate(cfg, keys[c], run_id, std::move(slots[c])));
    }
    return rows;
}

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "window") return SweepAxis::Window;
    if (name == "temperature" || name == "tau") return SweepAxis::Temperature;
    if (name == "sigma") return SweepAxis::Sigma;
    throw ValidationError("unknown sweep axis '" + name + "'");
}

std::vector<BenchRow> sweep(SweepAxis axis, const std::vector<double>& values,
                            const DatasetManifest& manifest, const BenchConfig& base_cfg) {
    if (values.size() < 2) {
        throw ValidationError("sweep: need at least two values");
    }
    std::vector<BenchRow> rows;
    for (double v : values) {
        BenchConfig cfg = base_cfg;
        cfg.encoders = {QuantizeMode::None};
        cfg.strategies = {Strategy::LocalSoftargmax};
        std::string tag;
        switch (axis) {
        case SweepAxis::Window: {
            const int d = static_cast<int>(std::lround(v));
            if (d == 0) {
                // No window: report both window-less decodes.
                cfg.strategies = {Strategy::Argmax, Strategy::Heuristic};
                tag = "none";
            } else {
                if (d < 3 || d % 2 == 0) {
                    throw ValidationError("sweep: window values must be odd >= 3 (or 0 for none)");
                }
                cfg.window_d = d;
                tag = std::to_string(d);
            }
            break;
        }
        case SweepAxis::Temperature:
            if (!(v > 0.0)) {
                throw ValidationError("sweep: temperature values must be positive");
            }
            cfg.temperature_tau = v;
            tag = format_g9(v);
            break;
        case SweepAxis::Sigma:
            if (!(v > 0.0)) {
                throw ValidationError("sweep: sigma values must be positive");
            }
            cfg.sigma = v;
            tag = format_g9(v);
            break;
        }
        auto sub = roundtrip_bench(manifest, cfg);
        const char* axis_name = axis == SweepAxis::Window      ? "window"
                                : axis == SweepAxis::Temperature ? "tau"
                                                                 : "sigma";
        for (auto& row : sub) {
            row.run_id = std::string("sw-") + axis_name + "-" + tag;
            if (axis == SweepAxis::Window && tag == "none") {
                row.run_id += std::string("-") + row.decoder;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_csv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write CSV '" + path + "'");
    }
    out << "run_id,encoder,decoder,sigma,window,tau,n,nme_mean,auc,fr,mean_px_err\n";
    for (const auto& r : rows) {
        out << r.run_id << ',' << r.encoder << ',' << r.decoder << ',' << format_g9(r.sigma)
            << ',' << r.window << ',' << format_g9(r.tau) << ',' << r.n << ','
            << format_g9(r.nme_mean) << ',' << format_g9(r.auc_value) << ',' << format_g9(r.fr)
            << ',' << format_g9(r.mean_px_err) << '\n';
    }
    if (!out) {
        throw IoError("write failed for CSV '" + path + "'");
    }
}

void write_per_sample_csv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write CSV '" + path + "'");
    }
    out << "run_id,sample_index,nme,px_err\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.report.samples.size(); ++i) {
            out << r.run_id << ',' << i << ',' << format_g9(r.report.samples[i].nme) << ','
                << format_g9(r.sample_px_err[i]) << '\n';
        }
    }
    if (!out) {
        throw IoError("write failed for CSV '" + path + "'");
    }
}

} // namespace subpix
