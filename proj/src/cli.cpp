#include "subpix/cli.hpp"

#include "subpix/bench.hpp"
#include "subpix/consistency.hpp"
#include "subpix/dataset.hpp"
#include "subpix/errors.hpp"
#include "subpix/parallel.hpp"
#include "subpix/rng.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace subpix {

namespace {

GridSpec parse_grid(const std::string& spec, double scale_s) {
    const auto sep = spec.find('x');
    if (sep == std::string::npos) {
        throw ValidationError("grid must be WxH, e.g. 64x64");
    }
    GridSpec g;
    try {
        g.width_hm = std::stoi(spec.substr(0, sep));
        g.height_hm = std::stoi(spec.substr(sep + 1));
    } catch (const std::exception&) {
        throw ValidationError("grid must be WxH, e.g. 64x64");
    }
    g.scale_s = scale_s;
    validate_grid(g);
    return g;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<double> parse_value_list(const std::string& s, bool allow_none) {
    std::vector<double> out;
    for (const auto& tok : split_csv(s)) {
        if (allow_none && tok == "none") {
            out.push_back(0.0);
            continue;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ValidationError("invalid numeric value '" + tok + "'");
        }
    }
    if (out.empty()) {
        throw ValidationError("empty value list");
    }
    return out;
}

struct SourceOpts {
    std::string manifest_path;
    std::string pts_dir;
    int samples = 1000;
    int landmarks = 1;
    double sigma_max = 3.0;
};

DatasetManifest resolve_manifest(const SourceOpts& src, std::uint64_t seed,
                                 const GridSpec& grid) {
    if (!src.manifest_path.empty() && !src.pts_dir.empty()) {
        throw ValidationError("give either --manifest or --pts-dir, not both");
    }
    if (!src.manifest_path.empty()) return load_manifest(src.manifest_path);
    if (!src.pts_dir.empty()) return load_pts_dir(src.pts_dir);
    return gen_synthetic(seed, src.samples, src.landmarks, grid, src.sigma_max);
}

Point2 softargmax_expectation(const Window& w, double tau) {
    const auto p = softmax2d(w, tau);
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

struct PredCsv {
    // id -> K predicted points
    std::vector<std::pair<std::string, std::vector<Point2>>> by_id;
};

LandmarkSet lookup_pred(const PredCsv& preds, const std::string& id, std::size_t k_expected) {
    for (const auto& [id_, pts] : preds.by_id) {
        if (id_ == id) {
            if (pts.size() != k_expected) {
                throw ValidationError("predictions for '" + id + "': expected " +
                                      std::to_string(k_expected) + " points, found " +
                                      std::to_string(pts.size()));
            }
            return LandmarkSet::all_visible(pts);
        }
    }
    throw ValidationError("no predictions for id '" + id + "'");
}

PredCsv load_pred_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open predictions '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("predictions: empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,k,x,y") {
        throw ValidationError("predictions: expected header 'id,k,x,y'");
    }
    PredCsv out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw ValidationError("predictions: line " + std::to_string(lineno) +
                                  ": expected 4 fields");
        }
        int k = 0;
        double x = 0.0, y = 0.0;
        try {
            k = std::stoi(fields[1]);
            x = std::stod(fields[2]);
            y = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw ValidationError("predictions: line " + std::to_string(lineno) +
                                  ": non-numeric field");
        }
        auto* slot = [&]() -> std::vector<Point2>* {
            for (auto& [id_, pts] : out.by_id) {
                if (id_ == fields[0]) return &pts;
            }
            out.by_id.emplace_back(fields[0], std::vector<Point2>{});
            return &out.by_id.back().second;
        }();
        if (k != static_cast<int>(slot->size())) {
            throw ValidationError("predictions: line " + std::to_string(lineno) +
                                  ": point indices must be 0..K-1 in order per id");
        }
        slot->push_back({x, y});
    }
    return out;
}

NormKind norm_kind_from_name(const std::string& name) {
    if (name == "ic") return NormKind::Ic;
    if (name == "box") return NormKind::Box;
    if (name == "diag") return NormKind::Diag;
    throw ValidationError("unknown norm kind '" + name + "'");
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Sub-pixel heatmap encode/decode benchmark harness"};
    app.require_subcommand(1);

    // Shared options (registered per subcommand so help stays local).
    std::string grid_spec = "64x64";
    double scale_s = 4.0;
    double sigma = 1.0;
    int window_d = 5;
    double tau = 10.0;
    std::string norm_name = "amplitude-one";
    std::string norm_kind_name = "box";
    double auc_cutoff = 7.0;
    double fr_threshold = 10.0;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_path;
    std::string per_sample_path;
    SourceOpts src;

    const auto add_grid_opts = [&](CLI::App* sub) {
        sub->add_option("--grid", grid_spec, "heatmap resolution WxH")->capture_default_str();
        sub->add_option("--scale", scale_s, "input px per heatmap px")->capture_default_str();
        sub->add_option("--seed", seed, "64-bit RNG seed")->capture_default_str();
        sub->add_option("--out", out_path, "output path")->required();
    };
    const auto add_encdec_opts = [&](CLI::App* sub) {
        sub->add_option("--sigma", sigma, "Gaussian std dev, heatmap px")->capture_default_str();
        sub->add_option("--window", window_d, "soft-argmax window size")->capture_default_str();
        sub->add_option("--tau", tau, "soft-argmax temperature")->capture_default_str();
        sub->add_option("--norm", norm_name, "heatmap normalization: pdf|amplitude-one")
            ->capture_default_str();
    };
    const auto add_source_opts = [&](CLI::App* sub) {
        sub->add_option("--manifest", src.manifest_path, "ground-truth manifest JSON");
        sub->add_option("--pts-dir", src.pts_dir, "directory of .pts annotation files");
        sub->add_option("--samples", src.samples, "synthetic sample count")->capture_default_str();
        sub->add_option("--landmarks", src.landmarks, "synthetic landmarks per sample")
            ->capture_default_str();
        sub->add_option("--sigma-max", src.sigma_max, "synthetic border margin, sigmas")
            ->capture_default_str();
        sub->add_option("--threads", threads, "worker threads")->capture_default_str();
    };
    const auto add_metric_opts = [&](CLI::App* sub) {
        sub->add_option("--norm-kind", norm_kind_name, "NME normalization: ic|box|diag")
            ->capture_default_str();
        sub->add_option("--cutoff", auc_cutoff, "AUC cutoff, percent")->capture_default_str();
        sub->add_option("--fr-threshold", fr_threshold, "failure threshold, percent")
            ->capture_default_str();
        sub->add_option("--per-sample", per_sample_path, "also write per-sample CSV");
    };

    // roundtrip
    auto* rt = app.add_subcommand("roundtrip", "ground-truth encode/decode roundtrip benchmark");
    std::string quantize_list = "round,none";
    std::string strategy_list = "argmax,heuristic,local-softargmax";
    add_grid_opts(rt);
    add_encdec_opts(rt);
    add_source_opts(rt);
    add_metric_opts(rt);
    rt->add_option("--quantize", quantize_list, "encoders to compare (comma list)")
        ->capture_default_str();
    rt->add_option("--strategy", strategy_list, "decoders to compare (comma list)")
        ->capture_default_str();

    // sweep
    auto* sw = app.add_subcommand("sweep", "window/temperature/sigma sweep of the roundtrip");
    std::string axis_name = "window";
    std::string values_list = "none,3,5,7";
    add_grid_opts(sw);
    add_encdec_opts(sw);
    add_source_opts(sw);
    add_metric_opts(sw);
    sw->add_option("--axis", axis_name, "window|temperature|sigma")->capture_default_str();
    sw->add_option("--values", values_list, "axis values (comma list; 'none' for no window)")
        ->capture_default_str();

    // siamese
    auto* si = app.add_subcommand("siamese", "two-branch transform-consistency study");
    double rotation_range = 30.0;
    double scale_jitter = 0.15;
    bool with_flip = false;
    double noise = 0.0;
    add_grid_opts(si);
    add_encdec_opts(si);
    add_source_opts(si);
    si->add_option("--rotation", rotation_range, "max |rotation| per branch, degrees")
        ->capture_default_str();
    si->add_option("--scale-jitter", scale_jitter, "max scale jitter per branch")
        ->capture_default_str();
    si->add_flag("--flip", with_flip, "mirror branches with probability 1/2");
    si->add_option("--noise", noise, "predictor noise amplitude (0 = exact oracle)")
        ->capture_default_str();

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck", "soft-argmax Jacobian vs finite differences");
    int gc_windows = 1000;
    std::string gc_taus = "1,10,50";
    add_grid_opts(gc);
    gc->add_option("--windows", gc_windows, "random windows per temperature")
        ->capture_default_str();
    gc->add_option("--window", window_d, "window size")->capture_default_str();
    gc->add_option("--taus", gc_taus, "temperatures (comma list)")->capture_default_str();
    gc->add_option("--threads", threads, "accepted for interface uniformity")
        ->capture_default_str();

    // metrics
    auto* me = app.add_subcommand("metrics", "score external predictions against ground truth");
    std::string pred_path;
    std::string gt_path;
    add_grid_opts(me);
    add_metric_opts(me);
    me->add_option("--pred", pred_path, "predictions CSV (id,k,x,y)")->required();
    me->add_option("--gt", gt_path, "ground-truth manifest JSON")->required();
    me->add_option("--threads", threads, "accepted for interface uniformity")
        ->capture_default_str();

    // gen
    auto* ge = app.add_subcommand("gen", "generate a synthetic sub-pixel manifest");
    add_grid_opts(ge);
    add_source_opts(ge);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const GridSpec grid = parse_grid(grid_spec, scale_s);

        if (rt->parsed() || sw->parsed()) {
            BenchConfig cfg;
            cfg.grid = grid;
            cfg.sigma = sigma;
            cfg.normalization = normalization_from_name(norm_name);
            cfg.window_d = window_d;
            cfg.temperature_tau = tau;
            cfg.norm_kind = norm_kind_from_name(norm_kind_name);
            cfg.auc_cutoff = auc_cutoff;
            cfg.fr_threshold = fr_threshold;
            cfg.rng_seed = seed;
            cfg.sample_count = src.samples;
            cfg.threads = threads;
            const DatasetManifest manifest = resolve_manifest(src, seed, grid);

            std::vector<BenchRow> rows;
            if (rt->parsed()) {
                cfg.encoders.clear();
                for (const auto& name : split_csv(quantize_list)) {
                    cfg.encoders.push_back(quantize_mode_from_name(name));
                }
                cfg.strategies.clear();
                for (const auto& name : split_csv(strategy_list)) {
                    cfg.strategies.push_back(strategy_from_name(name));
                }
                rows = roundtrip_bench(manifest, cfg);
            } else {
                const SweepAxis axis = sweep_axis_from_name(axis_name);
                const auto values = parse_value_list(values_list, axis == SweepAxis::Window);
                rows = sweep(axis, values, manifest, cfg);
            }
            write_csv(rows, out_path);
            if (!per_sample_path.empty()) {
                write_per_sample_csv(rows, per_sample_path);
            }
            return 0;
        }

        if (si->parsed()) {
            EncoderConfig enc;
            enc.sigma = sigma;
            enc.normalization = normalization_from_name(norm_name);
            DecoderConfig dec;
            dec.window_d = window_d;
            dec.temperature_tau = tau;
            const DatasetManifest manifest = resolve_manifest(src, seed, grid);
            const Point2 center{(grid.width_hm * grid.scale_s - 1.0) / 2.0,
                                (grid.height_hm * grid.scale_s - 1.0) / 2.0};
            const double input_width = grid.width_hm * grid.scale_s;

            struct Row {
                std::string id;
                double disc01, b0, b1, merged;
            };
            std::vector<Row> rows(manifest.records.size());
            parallel_for(manifest.records.size(), threads, [&](std::size_t i) {
                const auto& rec = manifest.records[i];
                AffineTransform t[2];
                CounterRng rng(seed, 0x5141ULL + i);
                for (int b = 0; b < 2; ++b) {
                    const double angle = rng.next_range(-rotation_range, rotation_range);
                    const double factor = rng.next_range(1.0 - scale_jitter, 1.0 + scale_jitter);
                    t[b] = compose(make_rotation(angle, center),
                                   make_scale(factor, factor, center));
                    if (with_flip && rng.next_double() < 0.5) {
                        t[b] = compose(t[b], make_flip(input_width));
                    }
                }
                std::unique_ptr<Predictor> predictor;
                if (noise > 0.0) {
                    predictor = std::make_unique<NoisyOracle>(
                        noise, mix64(seed + 0x9e3779b97f4a7c15ULL * (i + 1)));
                } else {
                    predictor = std::make_unique<OracleEncoder>();
                }
                const ConsistencyReport rep =
                    consistency_report(rec.landmarks, t[0], t[1], *predictor, grid, enc, dec);
                const LandmarkSet gt_hm = scale_coords(rec.landmarks, grid, QuantizeMode::None);
                rows[i] = {rec.id, rep.discrepancy_01, mean_decode_error(rep.branch0, gt_hm),
                           mean_decode_error(rep.branch1, gt_hm), rep.discrepancy_merged_vs_gt};
            });

            std::ofstream out(out_path);
            if (!out) {
                throw IoError("cannot write CSV '" + out_path + "'");
            }
            out << "run_id,sample_id,disc01,branch0_err,branch1_err,merged_err\n";
            for (const auto& r : rows) {
                out << "siamese," << r.id << ',' << format_g9(r.disc01) << ','
                    << format_g9(r.b0) << ',' << format_g9(r.b1) << ',' << format_g9(r.merged)
                    << '\n';
            }
            if (!out) {
                throw IoError("write failed for CSV '" + out_path + "'");
            }
            return 0;
        }

        if (gc->parsed()) {
            if (gc_windows < 1) {
                throw ValidationError("gradcheck: need at least one window");
            }
            DecoderConfig dec;
            dec.window_d = window_d;
            validate_decoder(dec);
            const auto taus = parse_value_list(gc_taus, false);
            const double step = 1e-4;

            std::ofstream out(out_path);
            if (!out) {
                throw IoError("cannot write CSV '" + out_path + "'");
            }
            out << "run_id,tau,windows,max_rel_err,mean_rel_err\n";
            bool all_ok = true;
            for (const double t : taus) {
                if (!(t > 0.0)) {
                    throw ValidationError("gradcheck: temperatures must be positive");
                }
                double max_rel = 0.0;
                double sum_rel = 0.0;
                for (int i = 0; i < gc_windows; ++i) {
                    Window w;
                    w.size = window_d;
                    w.values.resize(static_cast<std::size_t>(window_d) * window_d);
                    CounterRng rng(seed, static_cast<std::uint64_t>(i));
                    for (double& v : w.values) {
                        v = rng.next_double();
                    }
                    const auto jac = local_softargmax_jacobian(w, t);
                    double num = 0.0, den = 1e-30;
                    for (std::size_t j = 0; j < w.values.size(); ++j) {
                        Window wp = w, wm = w;
                        wp.values[j] += step;
                        wm.values[j] -= step;
                        const Point2 ep = softargmax_expectation(wp, t);
                        const Point2 em = softargmax_expectation(wm, t);
                        const double fdx = (ep.x - em.x) / (2.0 * step);
                        const double fdy = (ep.y - em.y) / (2.0 * step);
                        num = std::max({num, std::abs(jac[j][0] - fdx), std::abs(jac[j][1] - fdy)});
                        den = std::max({den, std::abs(jac[j][0]), std::abs(jac[j][1])});
                    }
                    const double rel = num / den;
                    max_rel = std::max(max_rel, rel);
                    sum_rel += rel;
                }
                const double mean_rel = sum_rel / gc_windows;
                out << "gradcheck-tau-" << format_g9(t) << ',' << format_g9(t) << ','
                    << gc_windows << ',' << format_g9(max_rel) << ',' << format_g9(mean_rel)
                    << '\n';
                if (!(max_rel < 1e-5)) {
                    all_ok = false;
                }
            }
            if (!out) {
                throw IoError("write failed for CSV '" + out_path + "'");
            }
            if (!all_ok) {
                std::cerr << "gradcheck: analytic Jacobian deviates from finite differences\n";
                return 1;
            }
            return 0;
        }

        if (me->parsed()) {
            const DatasetManifest manifest = load_manifest(gt_path);
            if (manifest.records.empty()) {
                throw ValidationError("metrics: empty ground-truth manifest");
            }
            const PredCsv preds = load_pred_csv(pred_path);
            const NormKind kind = norm_kind_from_name(norm_kind_name);

            BenchRow row;
            row.run_id = "metrics-0";
            row.encoder = "external";
            row.decoder = "external";
            row.n = manifest.records.size();
            std::vector<SampleError> errs;
            errs.reserve(manifest.records.size());
            double px_sum = 0.0;
            std::size_t px_count = 0;
            for (const auto& rec : manifest.records) {
                const LandmarkSet pred = lookup_pred(preds, rec.id, rec.landmarks.size());
                const BBox box = rec.bbox ? *rec.bbox : bbox_from_landmarks(rec.landmarks);
                const auto ic = rec.ic_indices ? *rec.ic_indices : std::make_pair(36, 45);
                double norm = 0.0;
                try {
                    norm = normalization_distance(kind, rec.landmarks, box, ic);
                } catch (const ValidationError& e) {
                    throw ValidationError("sample '" + rec.id + "': " + e.what());
                }
                SampleError s = nme(pred, rec.landmarks, norm);
                double sample_px = 0.0;
                std::size_t sample_n = 0;
                for (std::size_t k = 0; k < rec.landmarks.size(); ++k) {
                    if (rec.landmarks.visible(k)) {
                        sample_px += s.point_errors[k];
                        ++sample_n;
                    }
                }
                px_sum += sample_px;
                px_count += sample_n;
                row.sample_px_err.push_back(sample_px / static_cast<double>(sample_n));
                errs.push_back(std::move(s));
            }
            row.mean_px_err = px_sum / static_cast<double>(px_count);
            row.report = make_report(std::move(errs), auc_cutoff, fr_threshold,
                                     std::max(auc_cutoff, fr_threshold), 101);
            row.nme_mean = row.report.nme_mean;
            row.auc_value = row.report.auc_value;
            row.fr = row.report.fr;
            write_csv({row}, out_path);
            if (!per_sample_path.empty()) {
                write_per_sample_csv({row}, per_sample_path);
            }
            return 0;
        }

        if (ge->parsed()) {
            const DatasetManifest manifest =
                gen_synthetic(seed, src.samples, src.landmarks, grid, src.sigma_max);
            save_manifest(manifest, out_path);
            return 0;
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace subpix
