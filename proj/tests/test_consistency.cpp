#include "subpix/consistency.hpp"

#include "subpix/errors.hpp"
#include "subpix/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace subpix;

namespace {

const GridSpec kGrid{64, 64, 4.0};

Heatmap gaussian(const Point2& c, double sigma = 1.0) {
    EncoderConfig cfg;
    cfg.sigma = sigma;
    return render_gaussian(c, kGrid, cfg);
}

double max_abs_diff(const Heatmap& a, const Heatmap& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    }
    return m;
}

double mean_abs_diff(const Heatmap& a, const Heatmap& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        s += std::abs(a.values[i] - b.values[i]);
    }
    return s / static_cast<double>(a.values.size());
}

} // namespace

TEST_CASE("warp by identity is bit-identical") {
    const auto h = gaussian({20.3, 25.7});
    const auto w = warp_heatmap(h, AffineTransform::identity());
    CHECK(w.values == h.values);
}

TEST_CASE("warp moves the peak forward") {
    const auto h = gaussian({10.0, 20.0});
    const auto t = make_rotation(90.0, {31.5, 31.5});
    const auto w = warp_heatmap(h, t);
    const auto peak = argmax2d(w);
    REQUIRE(peak.has_value());
    const Point2 want = apply_point(t, {10.0, 20.0});
    CHECK(want.x == doctest::Approx(43.0));
    CHECK(want.y == doctest::Approx(10.0));
    CHECK(std::hypot(peak->x - want.x, peak->y - want.y) <= 0.5);
}

TEST_CASE("integer translations resample exactly") {
    const auto h = gaussian({20.3, 25.7});
    AffineTransform t;
    t.tx = 5.0;
    const auto w = warp_heatmap(h, t);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            if (x >= 5) {
                CHECK(w.at(x, y) == h.at(x - 5, y));
            } else {
                CHECK(w.at(x, y) == 0.0);
            }
        }
    }
}

TEST_CASE("warp then inverse warp stays close") {
    for (double deg : {10.0, 20.0, 30.0, -30.0}) {
        const auto t = make_rotation(deg, {31.5, 31.5});
        const auto h = gaussian({20.3, 25.7});
        const auto back = warp_heatmap(warp_heatmap(h, t), invert(t));
        CHECK(mean_abs_diff(back, h) < 5e-3);
    }
}

TEST_CASE("warp rejects singular transforms") {
    AffineTransform t;
    t.a = 0.0;
    t.d = 0.0;
    CHECK_THROWS_AS(warp_heatmap(gaussian({20.0, 20.0}), t), ValidationError);
}

TEST_CASE("transform conjugation into heatmap coordinates") {
    const auto t_in = make_rotation(30.0, {127.5, 127.5});
    const auto t_hm = to_heatmap_coords(t_in, kGrid);
    CounterRng rng(7);
    for (int i = 0; i < 100; ++i) {
        const Point2 p_hm{rng.next_range(0.0, 63.0), rng.next_range(0.0, 63.0)};
        const Point2 via_input = apply_point(t_in, {p_hm.x * 4.0, p_hm.y * 4.0});
        const Point2 got = apply_point(t_hm, p_hm);
        CHECK(std::abs(got.x - via_input.x / 4.0) <= 1e-12);
        CHECK(std::abs(got.y - via_input.y / 4.0) <= 1e-12);
    }
}

TEST_CASE("identity branches merge to exactly twice the encoding") {
    const LandmarkSet gt = LandmarkSet::all_visible({{81.2, 102.9}});
    EncoderConfig enc;
    const OracleEncoder oracle;
    const auto merged = siamese_merge(gt, AffineTransform::identity(),
                                      AffineTransform::identity(), oracle, kGrid, enc);
    const auto single =
        encode_landmarks(scale_coords(gt, kGrid, QuantizeMode::None), kGrid, enc);
    REQUIRE(merged.size() == 1);
    for (std::size_t i = 0; i < merged[0].values.size(); ++i) {
        CHECK(merged[0].values[i] == 2.0 * single[0].values[i]);
    }
}

TEST_CASE("merge is symmetric in the branch order") {
    const LandmarkSet gt = LandmarkSet::all_visible({{81.2, 102.9}, {140.0, 160.5}});
    EncoderConfig enc;
    const OracleEncoder oracle;
    const auto t0 = make_rotation(17.0, {127.5, 127.5});
    const auto t1 = make_rotation(-23.0, {127.5, 127.5});
    const auto ab = siamese_merge(gt, t0, t1, oracle, kGrid, enc);
    const auto ba = siamese_merge(gt, t1, t0, oracle, kGrid, enc);
    REQUIRE(ab.size() == ba.size());
    for (std::size_t k = 0; k < ab.size(); ++k) {
        CHECK(max_abs_diff(ab[k], ba[k]) <= 1e-12);
    }
}

TEST_CASE("identity plus rotation merges onto the ground truth") {
    // Ground truth on integer heatmap coordinates decodes exactly, so the
    // merge quality is visible without the sub-pixel decode bias.
    const LandmarkSet gt = LandmarkSet::all_visible({{80.0, 100.0}, {160.0, 48.0}});
    EncoderConfig enc;
    DecoderConfig dec;
    const OracleEncoder oracle;
    const auto merged = siamese_merge(gt, AffineTransform::identity(),
                                      make_rotation(30.0, {127.5, 127.5}), oracle, kGrid, enc);
    const auto res = decode_stack(merged, dec);
    const auto gt_hm = scale_coords(gt, kGrid, QuantizeMode::None);
    for (std::size_t k = 0; k < gt.size(); ++k) {
        CHECK(distance(res.coords.points[k], gt_hm.points[k]) < 0.1);
    }
}

TEST_CASE("flip branches merge to twice the reversed branch") {
    const LandmarkSet gt = LandmarkSet::all_visible({{81.2, 102.9}});
    EncoderConfig enc;
    DecoderConfig dec;
    const OracleEncoder oracle;
    const auto flip = make_flip(256.0);
    const auto merged = siamese_merge(gt, flip, flip, oracle, kGrid, enc);

    const auto branch = oracle.predict(apply_landmarks(flip, gt), kGrid, enc);
    const auto reversed =
        warp_heatmap(branch[0], invert(to_heatmap_coords(flip, kGrid)));
    REQUIRE(merged.size() == 1);
    for (std::size_t i = 0; i < merged[0].values.size(); ++i) {
        CHECK(merged[0].values[i] == 2.0 * reversed.values[i]);
    }

    // The input-space mirror line sits between heatmap pixels, so reversing
    // costs one bilinear resample; the decode still lands near the truth.
    const auto res = decode_stack(merged, dec);
    const auto gt_hm = scale_coords(gt, kGrid, QuantizeMode::None);
    CHECK(distance(res.coords.points[0], gt_hm.points[0]) < 0.5);
}

TEST_CASE("consistency report with identity transforms") {
    EncoderConfig enc;
    DecoderConfig dec;
    const OracleEncoder oracle;

    // Integer heatmap coordinates: every decode is exact.
    const LandmarkSet exact_gt = LandmarkSet::all_visible({{80.0, 100.0}});
    auto rep = consistency_report(exact_gt, AffineTransform::identity(),
                                  AffineTransform::identity(), oracle, kGrid, enc, dec);
    CHECK(rep.discrepancy_01 <= 1e-9);
    CHECK(rep.discrepancy_merged_vs_gt <= 1e-9);

    // Sub-pixel ground truth: the branches are identical maps, so their
    // decodes agree exactly even though each carries the decode bias.
    const LandmarkSet frac_gt = LandmarkSet::all_visible({{81.2, 102.9}});
    rep = consistency_report(frac_gt, AffineTransform::identity(), AffineTransform::identity(),
                             oracle, kGrid, enc, dec);
    CHECK(rep.discrepancy_01 == 0.0);
}

TEST_CASE("small rotations keep the branch decodes consistent") {
    EncoderConfig enc;
    DecoderConfig dec;
    const OracleEncoder oracle;
    CounterRng rng(42);
    const auto t0 = make_rotation(15.0, {127.5, 127.5});
    const auto t1 = make_rotation(-15.0, {127.5, 127.5});
    for (int i = 0; i < 5; ++i) {
        const LandmarkSet gt = LandmarkSet::all_visible(
            {{rng.next_range(60.0, 200.0), rng.next_range(60.0, 200.0)}});
        const auto rep = consistency_report(gt, t0, t1, oracle, kGrid, enc, dec);
        CHECK(rep.discrepancy_01 < 0.35);
    }
}

TEST_CASE("doubling the map halves nothing but sharpens the softmax") {
    // decode(2H, tau) == decode(H, 2*tau): scaling the activations is the
    // same as scaling the temperature.
    DecoderConfig d10;
    DecoderConfig d20;
    d20.temperature_tau = 20.0;
    CounterRng rng(321);
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
        const Point2 c{rng.next_range(19.5, 20.5), rng.next_range(24.5, 25.5)};
        const auto h = gaussian(c);
        Heatmap doubled = h;
        for (double& v : doubled.values) v *= 2.0;
        const Point2 a = local_softargmax_decode(doubled, d10);
        const Point2 b = local_softargmax_decode(h, d20);
        CHECK(std::abs(a.x - b.x) <= 1e-12);
        CHECK(std::abs(a.y - b.y) <= 1e-12);
        const Point2 base = local_softargmax_decode(h, d10);
        worst = std::max(worst, std::hypot(a.x - base.x, a.y - base.y));
    }
    // Integer centers are unaffected; sub-pixel centers move by up to ~0.21 px
    // because the doubled amplitude acts as a doubled temperature.
    const auto exact = gaussian({20.0, 25.0});
    Heatmap doubled = exact;
    for (double& v : doubled.values) v *= 2.0;
    const Point2 a = local_softargmax_decode(doubled, d10);
    const Point2 b = local_softargmax_decode(exact, d10);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(worst <= 0.25);
    CHECK(worst > 0.01);
}

TEST_CASE("noisy oracle is deterministic per seed") {
    const LandmarkSet gt = LandmarkSet::all_visible({{81.2, 102.9}});
    EncoderConfig enc;
    const NoisyOracle a(0.05, 99);
    const NoisyOracle b(0.05, 99);
    const auto sa = a.predict(gt, kGrid, enc);
    const auto sb = b.predict(gt, kGrid, enc);
    CHECK(sa[0].values == sb[0].values);
    for (double v : sa[0].values) CHECK(v >= 0.0);

    // A second call on the same instance draws fresh noise.
    const auto sc = a.predict(gt, kGrid, enc);
    CHECK(sa[0].values != sc[0].values);
}

TEST_CASE("noise averaging in the merge, 1000 seeded trials") {
    EncoderConfig enc;
    DecoderConfig dec;
    const auto t0 = make_rotation(12.0, {127.5, 127.5});
    const auto t1 = make_rotation(-9.0, {127.5, 127.5});
    int merged_best = 0;
    double sum_merged = 0.0, sum_maxbranch = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        CounterRng rng(1000 + trial);
        const LandmarkSet gt = LandmarkSet::all_visible(
            {{rng.next_range(60.0, 200.0), rng.next_range(60.0, 200.0)}});
        const NoisyOracle oracle(0.05, 77777 + trial);
        const auto rep = consistency_report(gt, t0, t1, oracle, kGrid, enc, dec);
        const auto gt_hm = scale_coords(gt, kGrid, QuantizeMode::None);
        const double e0 = mean_decode_error(rep.branch0, gt_hm);
        const double e1 = mean_decode_error(rep.branch1, gt_hm);
        const double em = rep.discrepancy_merged_vs_gt;
        sum_merged += em;
        sum_maxbranch += std::max(e0, e1);
        if (em <= std::max(e0, e1)) {
            ++merged_best;
        }
    }
    // The merged map has twice the amplitude, which sharpens the softmax and
    // re-biases sub-pixel decodes; the merge therefore beats the worse branch
    // only on a minority of trials (about 12% here), not the large majority
    // a scale-invariant decoder would show. The run is fully deterministic.
    CHECK(merged_best >= 60);
    CHECK(merged_best <= 200);
    CHECK(sum_merged / 1000.0 < sum_maxbranch / 1000.0 + 0.15);
}
