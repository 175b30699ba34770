#pragma once

// Test-side reference computations. Nothing here calls into the library's
// closed forms: samples come from an independent generator and optima from
// sampling followed by Riemannian ascent.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double frob(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

inline Eigen::MatrixXd gaussian(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// Haar rotation: Gram-Schmidt on a Gaussian matrix, then fix the determinant.
inline Eigen::MatrixXd haar_rotation(int n, std::mt19937_64& rng) {
  Eigen::MatrixXd a = gaussian(n, n, rng);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) a.col(j) -= a.col(i).dot(a.col(j)) * a.col(i);
    a.col(j).normalize();
  }
  if (a.determinant() < 0) a.col(0) = -a.col(0);
  return a;
}

inline Eigen::MatrixXd orthonormal_frame(int n, int p, std::mt19937_64& rng) {
  Eigen::MatrixXd a = gaussian(n, p, rng);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < j; ++i) a.col(j) -= a.col(i).dot(a.col(j)) * a.col(i);
    a.col(j).normalize();
  }
  return a;
}

inline Eigen::MatrixXd rotation2(double t) {
  Eigen::MatrixXd q(2, 2);
  q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return q;
}

// Cayley transform of a skew matrix: a rotation.
inline Eigen::MatrixXd cayley(const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(w.rows(), w.cols());
  return (i - 0.5 * w).inverse() * (i + 0.5 * w);
}

// Gradient ascent of trace(Q^T C) on SO(n) from q.
inline Eigen::MatrixXd polish_rotation(Eigen::MatrixXd q, const Eigen::MatrixXd& c,
                                       int iters = 4000) {
  const double eta = 0.5 / std::max(1e-12, c.norm());
  for (int it = 0; it < iters; ++it) {
    const Eigen::MatrixXd m = q.transpose() * c;
    const Eigen::MatrixXd w = 0.5 * (m - m.transpose());
    if (w.norm() < 1e-15 * std::max(1.0, c.norm())) break;
    q = q * cayley(eta * w);
  }
  return q;
}

// Gradient ascent of trace(Y^T C Y) over orthonormal frames, QR retraction.
inline Eigen::MatrixXd polish_frame(Eigen::MatrixXd y, const Eigen::MatrixXd& c,
                                    int iters = 4000) {
  const double eta = 0.25 / std::max(1e-12, c.norm());
  const int n = static_cast<int>(y.rows());
  for (int it = 0; it < iters; ++it) {
    const Eigen::MatrixXd g =
        (Eigen::MatrixXd::Identity(n, n) - y * y.transpose()) * (c + c.transpose()) * y;
    if (g.norm() < 1e-15 * std::max(1.0, c.norm())) break;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y + eta * g);
    y = qr.householderQ() * Eigen::MatrixXd::Identity(n, y.cols());
  }
  return y;
}

struct RotationSamples {
  int n;
  std::vector<Eigen::MatrixXd> q;
};

inline RotationSamples rotation_samples(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RotationSamples s{n, {}};
  s.q.reserve(count);
  for (int i = 0; i < count; ++i) s.q.push_back(haar_rotation(n, rng));
  return s;
}

// max over SO(n) of trace(Q^T C): best sample, then polish.
inline double brute_max_rotation(const RotationSamples& s, const Eigen::MatrixXd& c) {
  std::size_t best = 0;
  double best_val = -1e300;
  for (std::size_t i = 0; i < s.q.size(); ++i) {
    const double v = frob(s.q[i], c);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const Eigen::MatrixXd q = polish_rotation(s.q[best], c);
  return std::max(best_val, frob(q, c));
}

// Dense angle grid for SO(2).
inline double grid_max_so2(const Eigen::MatrixXd& c, int points = 200000) {
  double best = -1e300, best_t = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = 2.0 * std::numbers::pi * i / points;
    const double v = frob(rotation2(t), c);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  // Golden-section refinement around the best grid cell.
  double a = best_t - 2.0 * std::numbers::pi / points, b = best_t + 2.0 * std::numbers::pi / points;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    if (frob(rotation2(x1), c) > frob(rotation2(x2), c)) b = x2; else a = x1;
  }
  return std::max(best, frob(rotation2(0.5 * (a + b)), c));
}

struct FrameSamples {
  int n, p;
  std::vector<Eigen::MatrixXd> y;
};

inline FrameSamples frame_samples(int p, int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FrameSamples s{n, p, {}};
  s.y.reserve(count);
  for (int i = 0; i < count; ++i) s.y.push_back(orthonormal_frame(n, p, rng));
  return s;
}

// max over Grass(p, n) of <Y Y^T, C> = trace(Y^T C Y).
inline double brute_max_grassmann(const FrameSamples& s, const Eigen::MatrixXd& c) {
  std::size_t best = 0;
  double best_val = -1e300;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double v = (s.y[i].transpose() * c * s.y[i]).trace();
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const Eigen::MatrixXd y = polish_frame(s.y[best], c);
  return std::max(best_val, (y.transpose() * c * y).trace());
}

// Grass(1, 2) by a dense angle grid over lines (cos t, sin t), t in [0, pi).
inline double grid_max_lines(const Eigen::MatrixXd& c, int points = 200000) {
  double best = -1e300;
  for (int i = 0; i < points; ++i) {
    const double t = std::numbers::pi * i / points;
    Eigen::Vector2d u(std::cos(t), std::sin(t));
    best = std::max(best, u.dot(c * u));
  }
  return best;
}

// Central finite difference of f along a curve t -> point(t).
template <class F>
double central_difference(F&& f, double eps) {
  return (f(eps) - f(-eps)) / (2.0 * eps);
}

// Matrix exponential of a small skew matrix (Rodrigues-free, by scaling and
// squaring with a Taylor core).
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  int s = 0;
  double norm = a.norm();
  while (norm > 0.1) {
    norm /= 2.0;
    ++s;
  }
  const Eigen::MatrixXd b = a / std::pow(2.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 20; ++k) {
    term = term * b / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

// Least-squares fit of log(y) = a + b t; returns R^2 and the slope.
struct LogLinearFit {
  double slope = 0.0;
  double r2 = 0.0;
};

inline LogLinearFit log_linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  double st = 0, sl = 0, stt = 0, stl = 0, sll = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = std::log(y[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
    sll += l * l;
  }
  const double cov = stl - st * sl / n, vt = stt - st * st / n, vl = sll - sl * sl / n;
  LogLinearFit f;
  f.slope = cov / vt;
  f.r2 = vl > 0 ? cov * cov / (vt * vl) : 1.0;
  return f;
}

// Alternating local extrema whose successive differences exceed `amplitude`.
inline int alternating_extrema(const std::vector<double>& v, double amplitude) {
  if (v.size() < 3) return 0;
  int count = 0;
  double anchor = v[0];
  int dir = 0;  // +1 rising towards a max, -1 falling towards a min
  double extreme = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (dir >= 0 && v[i] > extreme) {
      extreme = v[i];
      if (dir == 0 && extreme - anchor > amplitude) dir = 1;
    } else if (dir <= 0 && v[i] < extreme) {
      extreme = v[i];
      if (dir == 0 && anchor - extreme > amplitude) dir = -1;
    }
    if (dir == 1 && extreme - v[i] > amplitude) {
      ++count;
      dir = -1;
      extreme = v[i];
    } else if (dir == -1 && v[i] - extreme > amplitude) {
      ++count;
      dir = 1;
      extreme = v[i];
    }
  }
  return count;
}

}  // namespace oracle
