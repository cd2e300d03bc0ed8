#include "subpix/geometry.hpp"

#include "subpix/errors.hpp"

#include <cmath>
#include <limits>

namespace subpix {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSingularTol = 1e-12;
} // namespace

double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

LandmarkSet LandmarkSet::all_visible(std::vector<Point2> pts) {
    LandmarkSet l;
    l.visibility.assign(pts.size(), 1);
    l.points = std::move(pts);
    return l;
}

void validate_landmarks(const LandmarkSet& l) {
    if (l.points.empty()) {
        throw ValidationError("landmarks: need at least one point");
    }
    if (l.points.size() != l.visibility.size()) {
        throw ValidationError("landmarks: points/visibility length mismatch");
    }
}

AffineTransform make_rotation(double angle_deg, const Point2& center) {
    if (!std::isfinite(angle_deg)) {
        throw ValidationError("rotation: angle must be finite");
    }
    const double t = angle_deg * kPi / 180.0;
    const double c = std::cos(t);
    const double s = std::sin(t);
    AffineTransform r;
    r.a = c;
    r.b = -s;
    r.c = s;
    r.d = c;
    r.tx = center.x - (c * center.x - s * center.y);
    r.ty = center.y - (s * center.x + c * center.y);
    return r;
}

AffineTransform make_scale(double sx, double sy, const Point2& center) {
    if (sx == 0.0 || sy == 0.0 || !std::isfinite(sx) || !std::isfinite(sy)) {
        throw ValidationError("scale: factors must be finite and non-zero");
    }
    AffineTransform r;
    r.a = sx;
    r.d = sy;
    r.tx = center.x - sx * center.x;
    r.ty = center.y - sy * center.y;
    return r;
}

AffineTransform make_flip(double width) {
    if (!(width > 0.0)) {
        throw ValidationError("flip: width must be positive");
    }
    AffineTransform r;
    r.a = -1.0;
    r.tx = width - 1.0;
    return r;
}

AffineTransform compose(const AffineTransform& ta, const AffineTransform& tb) {
    AffineTransform r;
    r.a = ta.a * tb.a + ta.b * tb.c;
    r.b = ta.a * tb.b + ta.b * tb.d;
    r.c = ta.c * tb.a + ta.d * tb.c;
    r.d = ta.c * tb.b + ta.d * tb.d;
    r.tx = ta.a * tb.tx + ta.b * tb.ty + ta.tx;
    r.ty = ta.c * tb.tx + ta.d * tb.ty + ta.ty;
    return r;
}

AffineTransform invert(const AffineTransform& t) {
    const double det = t.a * t.d - t.b * t.c;
    if (!(std::abs(det) > kSingularTol)) {
        throw ValidationError("invert: singular transform");
    }
    AffineTransform r;
    r.a = t.d / det;
    r.b = -t.b / det;
    r.c = -t.c / det;
    r.d = t.a / det;
    r.tx = -(r.a * t.tx + r.b * t.ty);
    r.ty = -(r.c * t.tx + r.d * t.ty);
    return r;
}

Point2 apply_point(const AffineTransform& t, const Point2& p) {
    return {t.a * p.x + t.b * p.y + t.tx, t.c * p.x + t.d * p.y + t.ty};
}

LandmarkSet apply_landmarks(const AffineTransform& t, const LandmarkSet& l) {
    LandmarkSet out = l;
    for (auto& p : out.points) {
        p = apply_point(t, p);
    }
    return out;
}

LandmarkSet permute_landmarks(const LandmarkSet& l, const std::vector<int>& perm) {
    validate_landmarks(l);
    if (perm.size() != l.size()) {
        throw ValidationError("permutation: length mismatch");
    }
    std::vector<std::uint8_t> seen(l.size(), 0);
    LandmarkSet out;
    out.points.resize(l.size());
    out.visibility.resize(l.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        const int src = perm[k];
        if (src < 0 || static_cast<std::size_t>(src) >= l.size() || seen[src]) {
            throw ValidationError("permutation: not a bijection");
        }
        seen[src] = 1;
        out.points[k] = l.points[src];
        out.visibility[k] = l.visibility[src];
    }
    return out;
}

BBox bbox_from_landmarks(const LandmarkSet& l) {
    validate_landmarks(l);
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity();
    double x1 = -std::numeric_limits<double>::infinity();
    double y1 = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (!l.visible(k)) continue;
        any = true;
        x0 = std::min(x0, l.points[k].x);
        y0 = std::min(y0, l.points[k].y);
        x1 = std::max(x1, l.points[k].x);
        y1 = std::max(y1, l.points[k].y);
    }
    if (!any) {
        throw ValidationError("bbox: no visible points");
    }
    return {x0, y0, x1 - x0, y1 - y0};
}

double normalization_distance(NormKind kind, const LandmarkSet& gt, const BBox& bbox,
                              std::pair<int, int> ic_indices) {
    double d = 0.0;
    switch (kind) {
    case NormKind::Box:
        if (!(bbox.width > 0.0) || !(bbox.height > 0.0)) {
            throw ValidationError("normalization: degenerate bbox");
        }
        d = std::sqrt(bbox.width * bbox.height);
        break;
    case NormKind::Diag:
        if (!(bbox.width > 0.0) || !(bbox.height > 0.0)) {
            throw ValidationError("normalization: degenerate bbox");
        }
        d = std::hypot(bbox.width, bbox.height);
        break;
    case NormKind::Ic: {
        validate_landmarks(gt);
        const auto [i, j] = ic_indices;
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= gt.size() ||
            static_cast<std::size_t>(j) >= gt.size()) {
            throw ValidationError("normalization: ic indices out of range");
        }
        if (!gt.visible(i) || !gt.visible(j)) {
            throw ValidationError("normalization: ic landmarks not visible");
        }
        d = distance(gt.points[i], gt.points[j]);
        break;
    }
    }
    if (!(d > 0.0)) {
        throw ValidationError("normalization: distance must be positive");
    }
    return d;
}

} // namespace subpix
