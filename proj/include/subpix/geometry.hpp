#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace subpix {

// Coordinate convention: pixel centers at integer coordinates, origin at the
// top-left, x rightward, y downward.

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point2& a, const Point2& b);

/// K ordered 2D points plus a per-point visibility mask (same length).
struct LandmarkSet {
    std::vector<Point2> points;
    std::vector<std::uint8_t> visibility; // 0 or 1, one per point

    std::size_t size() const { return points.size(); }
    bool visible(std::size_t k) const { return visibility[k] != 0; }

    static LandmarkSet all_visible(std::vector<Point2> pts);
};

/// Throws ValidationError unless points/visibility lengths match and K >= 1.
void validate_landmarks(const LandmarkSet& l);

struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// Row-major 2x3 matrix [a b tx; c d ty]; maps p to (a*x + b*y + tx, c*x + d*y + ty).
struct AffineTransform {
    double a = 1.0, b = 0.0, tx = 0.0;
    double c = 0.0, d = 1.0, ty = 0.0;

    static AffineTransform identity() { return {}; }
};

/// Counter-clockwise rotation (in the y-down convention) about `center`.
AffineTransform make_rotation(double angle_deg, const Point2& center);

/// Scaling about `center`; zero or non-finite factors are rejected.
AffineTransform make_scale(double sx, double sy, const Point2& center);

/// Horizontal mirror of an image `width` pixels wide: x -> width - 1 - x.
/// Any landmark-label left/right remapping is a separate permutation table
/// (see permute_landmarks); it is identity by default.
AffineTransform make_flip(double width);

/// apply_point(compose(ta, tb), p) == apply_point(ta, apply_point(tb, p)).
AffineTransform compose(const AffineTransform& ta, const AffineTransform& tb);

/// Throws ValidationError when the linear part is (near-)singular.
AffineTransform invert(const AffineTransform& t);

Point2 apply_point(const AffineTransform& t, const Point2& p);

/// Transforms every point; visibility is preserved.
LandmarkSet apply_landmarks(const AffineTransform& t, const LandmarkSet& l);

/// Reorders points by `perm` (new index k takes old index perm[k]).
LandmarkSet permute_landmarks(const LandmarkSet& l, const std::vector<int>& perm);

/// Tight axis-aligned box over the visible points. May be zero-area for a
/// single point; normalization_distance rejects that later.
BBox bbox_from_landmarks(const LandmarkSet& l);

enum class NormKind { Ic, Box, Diag };

/// Reference distance for NME normalization:
///   box  -> sqrt(w * h), diag -> sqrt(w^2 + h^2),
///   ic   -> distance between the two indexed landmarks (default outer eye
///           corners (36, 45) of the 68-point layout).
/// Throws ValidationError if the result would not be strictly positive.
double normalization_distance(NormKind kind, const LandmarkSet& gt, const BBox& bbox,
                              std::pair<int, int> ic_indices = {36, 45});

} // namespace subpix
