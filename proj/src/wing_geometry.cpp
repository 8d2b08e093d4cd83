#include "ornithopter/wing_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ornithopter/errors.hpp"

namespace ornithopter {

void WingShape::validate() const {
  if (!(span_length > 0.0)) throw std::invalid_argument("wing span_length must be positive");
  if (!(chord_scale > 0.0)) throw std::invalid_argument("wing chord_scale must be positive");
  if (lambda_le.empty() || lambda_te.empty()) {
    throw std::invalid_argument("wing edge polynomials must have at least one coefficient");
  }
  if (side_parity != 1 && side_parity != -1) {
    throw std::invalid_argument("wing side_parity must be +1 or -1");
  }
  if (!(mean_chord(*this) > 0.0)) {
    throw std::invalid_argument("wing mean chord must be strictly positive");
  }
}

double evaluate_polynomial(std::span<const double> coefficients, double s) {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * s + *it;
  return acc;
}

ChordGeometry chord_geometry(const WingShape& shape, double r) {
  if (!(r >= 0.0 && r <= shape.span_length)) {
    throw OutOfSpan("span station r = " + std::to_string(r) + " outside [0, " +
                    std::to_string(shape.span_length) + "]");
  }
  const double s = r / shape.span_length;
  ChordGeometry g;
  g.q_le = shape.chord_scale * evaluate_polynomial(shape.lambda_le, s);
  g.q_te = shape.chord_scale * evaluate_polynomial(shape.lambda_te, s);
  g.chord = std::max(g.q_le - g.q_te, 0.0);
  return g;
}

Vec3 chord_point(const WingShape& shape, double r, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw GammaOutOfRange("chord fraction gamma = " + std::to_string(gamma) +
                          " outside [0, 1]");
  }
  const ChordGeometry g = chord_geometry(shape, r);
  return Vec3(g.q_le - gamma * g.chord, shape.side_parity * r, 0.0);
}

double mean_chord(const WingShape& shape, int samples) {
  return planform_area(shape, samples) / shape.span_length;
}

double planform_area(const WingShape& shape, int samples) {
  const double dr = shape.span_length / samples;
  double area = 0.0;
  for (int k = 0; k < samples; ++k) area += chord_geometry(shape, (k + 0.5) * dr).chord * dr;
  return area;
}

std::vector<std::pair<double, double>> clamped_intervals(const WingShape& shape, int samples) {
  const double l = shape.span_length;
  auto raw = [&](double r) { return chord_geometry(shape, r).raw_chord(); };
  auto crossing = [&](double a, double b) {
    double fa = raw(a);
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = raw(m);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  std::vector<std::pair<double, double>> out;
  bool inside = raw(0.0) < 0.0;
  double start = 0.0;
  double prev = 0.0;
  for (int k = 1; k <= samples; ++k) {
    const double r = l * k / samples;
    const bool neg = raw(r) < 0.0;
    if (neg != inside) {
      const double x = crossing(prev, r);
      if (neg) {
        start = x;
      } else {
        out.emplace_back(start, x);
      }
      inside = neg;
    }
    prev = r;
  }
  if (inside) out.emplace_back(start, l);
  return out;
}

double residual_sum_squares(std::span<const ContourPoint> points,
                            std::span<const double> coefficients) {
  double ss = 0.0;
  for (const auto& p : points) {
    const double e = evaluate_polynomial(coefficients, p.s) - p.x;
    ss += e * e;
  }
  return ss;
}

EdgeFit fit_polynomial(std::span<const ContourPoint> points, int degree) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be non-negative");
  std::vector<double> abscissae;
  abscissae.reserve(points.size());
  for (const auto& p : points) abscissae.push_back(p.s);
  std::sort(abscissae.begin(), abscissae.end());
  const auto distinct =
      std::unique(abscissae.begin(), abscissae.end(),
                  [](double a, double b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a)); }) -
      abscissae.begin();
  if (distinct < degree + 1) {
    throw RankDeficient("fit of degree " + std::to_string(degree) + " needs " +
                        std::to_string(degree + 1) + " distinct abscissae, got " +
                        std::to_string(distinct));
  }

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd v(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double pw = 1.0;
    for (int j = 0; j <= degree; ++j) {
      v(i, j) = pw;
      pw *= points[static_cast<std::size_t>(i)].s;
    }
    b(i) = points[static_cast<std::size_t>(i)].x;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  if (qr.rank() < degree + 1) throw RankDeficient("Vandermonde matrix is rank deficient");
  const Eigen::VectorXd c = qr.solve(b);

  EdgeFit fit;
  fit.coefficients.assign(c.data(), c.data() + c.size());
  fit.residual_sum_squares = residual_sum_squares(points, fit.coefficients);
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - fit.residual_sum_squares / ss_tot : 1.0;
  return fit;
}

PlanformFit fit_edge_polynomials(std::span<const ContourPoint> leading,
                                 std::span<const ContourPoint> trailing, int degree) {
  return PlanformFit{fit_polynomial(leading, degree), fit_polynomial(trailing, degree)};
}

std::vector<ContourPoint> read_contour_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open contour file: " + path);
  std::vector<ContourPoint> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    ContourPoint p{};
    if (!(ss >> p.s)) continue;  // blank line
    std::string extra;
    if (!(ss >> p.x) || (ss >> extra)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected two numeric columns");
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace ornithopter
