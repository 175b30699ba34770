#include "manisync/means.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace manisync {

Centroid centroid(const std::vector<ManifoldPoint>& points,
                  const std::vector<double>& weights) {
  if (points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "centroid of an empty set");
  }
  if (!weights.empty() && weights.size() != points.size()) {
    throw Error(ErrorCode::InvalidArgument, "one weight per point is required");
  }
  const ManifoldDescriptor& d = points.front().descriptor();
  Centroid c{Eigen::MatrixXd::Zero(d.rows(), d.cols()), 0.0};
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].descriptor() != d) {
      throw Error(ErrorCode::DimensionMismatch, "points lie on different manifolds");
    }
    const double w = weights.empty() ? 1.0 : weights[k];
    if (!(w > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "centroid weights must be positive");
    }
    c.value += w * points[k].matrix();
    c.total_weight += w;
  }
  c.value /= c.total_weight;
  return c;
}

double iam_value(const ManifoldPoint& c, const Eigen::MatrixXd& ce) {
  if (c.matrix().rows() != ce.rows() || c.matrix().cols() != ce.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "iam_value: shape mismatch");
  }
  return inner(c.matrix(), ce);
}

MeanResult iam(const ManifoldDescriptor& d, const Eigen::MatrixXd& ce) {
  if (ce.rows() != d.rows() || ce.cols() != d.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "centroid shape does not match " + d.name());
  }
  switch (d.kind) {
    case ManifoldKind::Circle: return iam_circle(ce);
    case ManifoldKind::SpecialOrthogonal: return iam_so_n(ce);
    case ManifoldKind::Grassmann: return iam_grassmann(ce, d.p);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown manifold kind");
}

MeanResult aiam(const ManifoldDescriptor& d, const Eigen::MatrixXd& ce) {
  return iam(d, -ce);
}

MeanResult iam_circle(const Eigen::MatrixXd& ce) {
  if (ce.rows() != 2 || ce.cols() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "circle centroid must be 2x1");
  }
  const ManifoldDescriptor d = ManifoldDescriptor::circle();
  const double norm = ce.norm();
  if (norm > 1e-9 * d.radius()) {
    return {ManifoldPoint(d, ce / norm), true, Degeneracy::None, {}, norm};
  }
  return {ManifoldPoint::from_angle(0.0), false, Degeneracy::WholeManifold,
          "centroid is zero: every point of the circle is a mean", norm};
}

MeanResult iam_so_n(const Eigen::MatrixXd& ce_in) {
  const int n = static_cast<int>(ce_in.rows());
  if (n < 2 || ce_in.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "SO(n) centroid must be square, n >= 2");
  }
  const ManifoldDescriptor d = ManifoldDescriptor::special_orthogonal(n);
  // SO(2) spans only {aI + bJ}; the rest of C_e does not change <Q, C_e>.
  Eigen::MatrixXd ce = ce_in;
  if (n == 2) {
    const double a = 0.5 * (ce_in(0, 0) + ce_in(1, 1));
    const double b = 0.5 * (ce_in(1, 0) - ce_in(0, 1));
    ce << a, -b, b, a;
  }
  const double norm = ce.norm();
  if (norm <= 1e-9 * d.radius()) {
    return {ManifoldPoint(d, Eigen::MatrixXd::Identity(n, n)), false,
            Degeneracy::WholeManifold,
            "centroid is zero: every rotation is a mean", 0.0};
  }

  // C_e = W S V^T, so the polar factors are U = W V^T and R = V S V^T.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ce, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd& w = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  const Eigen::VectorXd& s = svd.singularValues();  // descending
  const double tol = 1e-9 * norm;
  const double smin = s(n - 1);
  const double det_u = w.determinant() * v.determinant();

  Eigen::VectorXd flip = Eigen::VectorXd::Ones(n);
  MeanResult result{ManifoldPoint(d, Eigen::MatrixXd::Identity(n, n)), true,
                    Degeneracy::None, {}, s.sum()};
  std::ostringstream desc;

  if (smin <= tol) {
    // Singular: both branches give the same value; pick the polar factor with
    // det > 0. Unique while the kernel is at most one-dimensional.
    if (det_u < 0.0) flip(n - 1) = -1.0;
    result.optimal_value = s.sum() - (det_u < 0.0 ? 2.0 * smin : 0.0);
    int kernel = 0;
    for (int i = 0; i < n; ++i) kernel += s(i) <= tol ? 1 : 0;
    if (kernel > 1) {
      result.unique = false;
      result.degeneracy = Degeneracy::Subset;
      desc << "all polar factors U of C_e with det(U) > 0; C_e has a " << kernel
           << "-dimensional kernel";
    }
  } else if (det_u > 0.0) {
    result.optimal_value = s.sum();
  } else {
    // det(C_e) < 0: Q = U H J H^T with the smallest eigenvector of R flipped.
    flip(n - 1) = -1.0;
    result.optimal_value = s.sum() - 2.0 * smin;
    int multiplicity = 0;
    for (int i = 0; i < n; ++i) multiplicity += s(i) - smin <= tol ? 1 : 0;
    if (multiplicity > 1) {
      result.unique = false;
      result.degeneracy = Degeneracy::Subset;
      desc << "U H J H^T for every unit eigenvector of R in the eigenspace of "
              "its smallest eigenvalue (multiplicity "
           << multiplicity << ")";
    }
  }
  result.description = desc.str();
  result.representative =
      project_to_manifold(d, w * flip.asDiagonal() * v.transpose());
  return result;
}

MeanResult iam_grassmann(const Eigen::MatrixXd& ce, int p) {
  const int n = static_cast<int>(ce.rows());
  if (ce.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "Grassmann centroid must be square");
  }
  const ManifoldDescriptor d = ManifoldDescriptor::grassmann(p, n);
  const double norm = ce.norm();
  if ((ce - ce.transpose()).norm() > 1e-9 * std::max(1.0, norm)) {
    throw Error(ErrorCode::InvalidArgument, "Grassmann centroid must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (ce + ce.transpose()));
  const Eigen::VectorXd lam = eig.eigenvalues().reverse();  // descending
  Eigen::MatrixXd y = eig.eigenvectors().rowwise().reverse().leftCols(p);
  canonicalize_column_signs(y);

  Eigen::MatrixXd pi = y * y.transpose();
  pi = 0.5 * (pi + pi.transpose());
  const double tol = 1e-9 * norm;

  MeanResult result{ManifoldPoint(d, std::move(pi)), true, Degeneracy::None, {},
                    lam.head(p).sum()};
  if (lam(0) - lam(n - 1) <= tol) {
    result.unique = false;
    result.degeneracy = Degeneracy::WholeManifold;
    result.description = "all eigenvalues of C_e are equal: every subspace is a mean";
  } else if (lam(p - 1) - lam(p) <= tol) {
    result.unique = false;
    result.degeneracy = Degeneracy::Subset;
    std::ostringstream desc;
    desc << "every dominant " << p << "-eigenspace of C_e; eigenvalue " << lam(p - 1)
         << " is shared across the cut";
    result.description = desc.str();
  }
  return result;
}

std::vector<ManifoldPoint> critical_rotations(const Eigen::MatrixXd& b,
                                              bool allow_degenerate) {
  const int n = static_cast<int>(b.rows());
  if (n < 2 || b.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "critical_rotations needs a square matrix");
  }
  if (n > 20) {
    throw Error(ErrorCode::InvalidArgument, "critical_rotations: n too large to enumerate");
  }
  const ManifoldDescriptor d = ManifoldDescriptor::special_orthogonal(n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!allow_degenerate) {
    for (int i = 0; i + 1 < n; ++i) {
      if (s(i) - s(i + 1) < 1e-6) {
        throw Error(ErrorCode::Degenerate,
                    "R has a repeated eigenvalue: the critical set is a continuum");
      }
    }
  }
  const Eigen::MatrixXd& w = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  // Q = U H J H^T with U = W V^T and H = V reduces to W J V^T.
  const unsigned parity = w.determinant() * v.determinant() > 0.0 ? 0u : 1u;

  std::vector<ManifoldPoint> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if ((static_cast<unsigned>(std::popcount(mask)) & 1u) != parity) continue;
    Eigen::VectorXd j = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) j(i) = -1.0;
    }
    out.push_back(project_to_manifold(d, w * j.asDiagonal() * v.transpose()));
  }
  return out;
}

}  // namespace manisync
