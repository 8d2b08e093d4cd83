#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ornithopter/so3.hpp"

namespace ornithopter {

// Right wings (fore 0, hind 2) have parity +1, left wings (1, 3) have -1.
// The parity sets the sign of the span direction in the wing frame.
inline int side_parity(std::size_t wing) { return wing % 2 == 0 ? 1 : -1; }

// Flat-plate planform bounded by two polynomials in the normalized span
// coordinate s = r / span_length. Outputs are scaled by chord_scale (m/unit).
struct WingShape {
  std::vector<double> lambda_le;  // leading edge, lowest order first
  std::vector<double> lambda_te;  // trailing edge, lowest order first
  double span_length = 0.0;       // m
  double chord_scale = 0.01;      // m per polynomial unit
  int side_parity = 1;            // +1 right, -1 left
  // Opaque fit-quality figures carried alongside tabulated coefficients.
  double fit_quality_le = 0.0;
  double fit_quality_te = 0.0;

  // Throws std::invalid_argument if the span is not positive, the
  // coefficient lists are empty, or the mean chord over the span is not
  // strictly positive.
  void validate() const;
};

struct ChordGeometry {
  double q_le = 0.0;   // m, leading-edge x coordinate
  double q_te = 0.0;   // m, trailing-edge x coordinate
  double chord = 0.0;  // m, max(q_le - q_te, 0)
  double raw_chord() const { return q_le - q_te; }
};

double evaluate_polynomial(std::span<const double> coefficients, double s);

// Throws OutOfSpan when r is outside [0, span_length].
ChordGeometry chord_geometry(const WingShape& shape, double r);

// Wing-frame coordinates of the point at fraction gamma from leading to
// trailing edge at span station r. The e3 component is always zero.
// Throws OutOfSpan / GammaOutOfRange.
Vec3 chord_point(const WingShape& shape, double r, double gamma);

// Mean of the clamped chord over the span (m), midpoint rule.
double mean_chord(const WingShape& shape, int samples = 2000);
double planform_area(const WingShape& shape, int samples = 2000);

// Sub-intervals of [0, span_length] (in m) where the raw chord is negative
// and the chord is clamped to zero. Located on a uniform grid then refined
// by bisection.
std::vector<std::pair<double, double>> clamped_intervals(const WingShape& shape,
                                                         int samples = 2000);

struct ContourPoint {
  double s;  // normalized span coordinate
  double x;  // edge coordinate, polynomial units
};

struct EdgeFit {
  std::vector<double> coefficients;  // lowest order first
  double r_squared = 0.0;            // 1 - SS_res / SS_tot (1 when SS_tot == 0)
  double residual_sum_squares = 0.0;
};

struct PlanformFit {
  EdgeFit leading;
  EdgeFit trailing;
};

// Least-squares polynomial of the given degree through the points.
// Throws RankDeficient with fewer than degree+1 distinct abscissae.
EdgeFit fit_polynomial(std::span<const ContourPoint> points, int degree);

PlanformFit fit_edge_polynomials(std::span<const ContourPoint> leading,
                                 std::span<const ContourPoint> trailing, int degree);

double residual_sum_squares(std::span<const ContourPoint> points,
                            std::span<const double> coefficients);

// Two whitespace-separated columns (s x) per line; '#' starts a comment.
// Throws std::runtime_error on unreadable files or malformed lines.
std::vector<ContourPoint> read_contour_points(const std::string& path);

}  // namespace ornithopter
