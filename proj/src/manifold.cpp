#include "manisync/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace manisync {

ManifoldDescriptor ManifoldDescriptor::circle() {
  return {ManifoldKind::Circle, 2, 1};
}

ManifoldDescriptor ManifoldDescriptor::special_orthogonal(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "SO(n) requires n >= 2");
  return {ManifoldKind::SpecialOrthogonal, n, n};
}

ManifoldDescriptor ManifoldDescriptor::grassmann(int p, int n) {
  if (p < 1 || 2 * p > n) {
    throw Error(ErrorCode::InvalidArgument, "Grass(p, n) requires 1 <= p <= n/2");
  }
  return {ManifoldKind::Grassmann, n, p};
}

double ManifoldDescriptor::radius() const {
  switch (kind) {
    case ManifoldKind::Circle: return 1.0;
    case ManifoldKind::SpecialOrthogonal: return std::sqrt(static_cast<double>(n));
    case ManifoldKind::Grassmann: return std::sqrt(static_cast<double>(p));
  }
  return 0.0;
}

std::string ManifoldDescriptor::name() const {
  std::ostringstream os;
  switch (kind) {
    case ManifoldKind::Circle: os << "circle"; break;
    case ManifoldKind::SpecialOrthogonal: os << "so(" << n << ")"; break;
    case ManifoldKind::Grassmann: os << "grass(" << p << "," << n << ")"; break;
  }
  return os.str();
}

double membership_error(const ManifoldDescriptor& d, const Eigen::MatrixXd& m) {
  switch (d.kind) {
    case ManifoldKind::Circle:
      return std::abs(m.norm() - 1.0);
    case ManifoldKind::SpecialOrthogonal:
      return (m.transpose() * m - Eigen::MatrixXd::Identity(d.n, d.n)).norm();
    case ManifoldKind::Grassmann: {
      const double sym = (m - m.transpose()).norm();
      const double idem = (m * m - m).norm();
      const double rank = std::abs(m.trace() - d.p);
      return std::max({sym, idem, rank});
    }
  }
  return 0.0;
}

namespace {

void check_shape(const ManifoldDescriptor& d, const Eigen::MatrixXd& m,
                 const char* what) {
  if (m.rows() != d.rows() || m.cols() != d.cols()) {
    std::ostringstream msg;
    msg << what << ": expected a " << d.rows() << "x" << d.cols()
        << " matrix for " << d.name() << ", got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

}  // namespace

ManifoldPoint::ManifoldPoint(ManifoldDescriptor d, Eigen::MatrixXd data)
    : desc_(d), data_(std::move(data)) {
  check_shape(desc_, data_, "ManifoldPoint");
  const double err = membership_error(desc_, data_);
  if (!(err <= kMembershipTol)) {
    std::ostringstream msg;
    msg << "matrix is not a point of " << desc_.name()
        << " (membership error " << err << ")";
    throw Error(ErrorCode::NotOnManifold, msg.str());
  }
  if (desc_.kind == ManifoldKind::SpecialOrthogonal && !(data_.determinant() > 0.0)) {
    throw Error(ErrorCode::NotOnManifold, "rotation matrix must have det = +1");
  }
}

ManifoldPoint ManifoldPoint::from_angle(double theta) {
  Eigen::MatrixXd y(2, 1);
  y << std::cos(theta), std::sin(theta);
  return ManifoldPoint(ManifoldDescriptor::circle(), std::move(y));
}

double ManifoldPoint::angle() const {
  if (desc_.kind != ManifoldKind::Circle) {
    throw Error(ErrorCode::InvalidArgument, "angle() is only defined on the circle");
  }
  return std::atan2(data_(1, 0), data_(0, 0));
}

GrassmannBasis::GrassmannBasis(Eigen::MatrixXd y) : y_(std::move(y)) {
  if (y_.cols() < 1 || y_.rows() < y_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "basis must be n x p with n >= p >= 1");
  }
  const double err =
      (y_.transpose() * y_ - Eigen::MatrixXd::Identity(y_.cols(), y_.cols())).norm();
  if (!(err <= kMembershipTol)) {
    throw Error(ErrorCode::NotOnManifold, "basis columns are not orthonormal");
  }
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  }
  return v;
}

Eigen::MatrixXd unflatten(const ManifoldDescriptor& d, const Eigen::VectorXd& v) {
  if (v.size() != d.embedding_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "vector size does not match embedding");
  }
  Eigen::MatrixXd m(d.rows(), d.cols());
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) m(i, j) = v(i * d.cols() + j);
  }
  return m;
}

Eigen::VectorXd embed(const ManifoldPoint& pt) { return flatten(pt.matrix()); }

Eigen::MatrixXd tangent_project(const ManifoldPoint& base, const Eigen::MatrixXd& v) {
  const ManifoldDescriptor& d = base.descriptor();
  check_shape(d, v, "tangent_project");
  const Eigen::MatrixXd& y = base.matrix();
  switch (d.kind) {
    case ManifoldKind::Circle:
      return v - inner(v, y) * y;
    case ManifoldKind::SpecialOrthogonal: {
      const Eigen::MatrixXd qtv = y.transpose() * v;
      return y * (0.5 * (qtv - qtv.transpose()));
    }
    case ManifoldKind::Grassmann: {
      const Eigen::MatrixXd s = 0.5 * (v + v.transpose());
      const Eigen::MatrixXd perp = Eigen::MatrixXd::Identity(d.n, d.n) - y;
      const Eigen::MatrixXd half = y * s * perp;
      return half + half.transpose();
    }
  }
  return v;
}

Eigen::VectorXd tangent_project_embedded(const ManifoldPoint& base,
                                         const Eigen::VectorXd& v) {
  return flatten(tangent_project(base, unflatten(base.descriptor(), v)));
}

ManifoldPoint project_to_manifold(const ManifoldDescriptor& d,
                                  const Eigen::MatrixXd& ambient) {
  check_shape(d, ambient, "project_to_manifold");
  if (!ambient.allFinite()) {
    throw Error(ErrorCode::RetractionFailure, "non-finite matrix cannot be projected");
  }
  switch (d.kind) {
    case ManifoldKind::Circle: {
      const double norm = ambient.norm();
      if (!(norm > 1e-300)) {
        throw Error(ErrorCode::RetractionFailure, "cannot normalize a zero vector");
      }
      return ManifoldPoint(d, ambient / norm);
    }
    case ManifoldKind::SpecialOrthogonal: {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(ambient,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::VectorXd& s = svd.singularValues();
      if (!(s(d.n - 1) > 1e-12 * s(0))) {
        std::ostringstream msg;
        msg << "polar retraction: matrix is numerically singular (sigma_min = "
            << s(d.n - 1) << ")";
        throw Error(ErrorCode::RetractionFailure, msg.str());
      }
      Eigen::MatrixXd q = svd.matrixU() * svd.matrixV().transpose();
      if (q.determinant() < 0.0) {
        throw Error(ErrorCode::RetractionFailure,
                    "polar retraction: polar factor has det = -1 (step too large)");
      }
      return ManifoldPoint(d, std::move(q));
    }
    case ManifoldKind::Grassmann: {
      const Eigen::MatrixXd sym = 0.5 * (ambient + ambient.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
      const Eigen::VectorXd& lam = eig.eigenvalues();  // ascending
      const int first = d.n - d.p;
      const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
      if (!(lam(first) - lam(first - 1) > 1e-12 * scale)) {
        throw Error(ErrorCode::RetractionFailure,
                    "eigenprojector retraction: no gap after the p-th eigenvalue");
      }
      const Eigen::MatrixXd y = eig.eigenvectors().rightCols(d.p);
      Eigen::MatrixXd pi = y * y.transpose();
      pi = 0.5 * (pi + pi.transpose());
      return ManifoldPoint(d, std::move(pi));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown manifold kind");
}

ManifoldPoint retract(const ManifoldPoint& base, const Eigen::MatrixXd& tangent,
                      double step) {
  if (step == 0.0) return base;
  return project_to_manifold(base.descriptor(), base.matrix() + step * tangent);
}

double chordal_distance(const ManifoldPoint& a, const ManifoldPoint& b) {
  if (a.descriptor() != b.descriptor()) {
    throw Error(ErrorCode::DimensionMismatch, "points lie on different manifolds");
  }
  return (a.matrix() - b.matrix()).norm();
}

namespace {

Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(i, j) = normal(rng);
  }
  return g;
}

// Haar-distributed orthogonal matrix: QR with positive diagonal of R.
Eigen::MatrixXd haar_orthogonal(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, n, rng));
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace

ManifoldPoint random_point(const ManifoldDescriptor& d, std::mt19937_64& rng) {
  switch (d.kind) {
    case ManifoldKind::Circle: {
      std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
      return ManifoldPoint::from_angle(uni(rng));
    }
    case ManifoldKind::SpecialOrthogonal: {
      Eigen::MatrixXd q = haar_orthogonal(d.n, rng);
      if (q.determinant() < 0.0) q.col(0) *= -1.0;
      return project_to_manifold(d, q);
    }
    case ManifoldKind::Grassmann: {
      const Eigen::MatrixXd q = haar_orthogonal(d.n, rng);
      const Eigen::MatrixXd y = q.leftCols(d.p);
      Eigen::MatrixXd pi = y * y.transpose();
      pi = 0.5 * (pi + pi.transpose());
      return ManifoldPoint(d, std::move(pi));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown manifold kind");
}

ManifoldPoint random_point(const ManifoldDescriptor& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_point(d, rng);
}

std::vector<double> principal_angles(const GrassmannBasis& a, const GrassmannBasis& b) {
  if (a.n() != b.n() || a.p() != b.p()) {
    throw Error(ErrorCode::DimensionMismatch, "bases have different shapes");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.matrix().transpose() * b.matrix());
  const Eigen::VectorXd& cosines = svd.singularValues();  // descending
  std::vector<double> angles(cosines.size());
  for (Eigen::Index i = 0; i < cosines.size(); ++i) {
    angles[i] = std::acos(std::clamp(cosines(i), 0.0, 1.0));
  }
  return angles;
}

ManifoldPoint basis_to_projector(const GrassmannBasis& y) {
  const ManifoldDescriptor d = ManifoldDescriptor::grassmann(y.p(), y.n());
  Eigen::MatrixXd pi = y.matrix() * y.matrix().transpose();
  pi = 0.5 * (pi + pi.transpose());
  return ManifoldPoint(d, std::move(pi));
}

GrassmannBasis projector_to_basis(const ManifoldPoint& pi) {
  const ManifoldDescriptor& d = pi.descriptor();
  if (d.kind != ManifoldKind::Grassmann) {
    throw Error(ErrorCode::InvalidArgument, "projector_to_basis needs a Grassmann point");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pi.matrix());
  if (eig.eigenvalues()(d.n - d.p) < 0.5) {
    throw Error(ErrorCode::Degenerate, "projector does not have rank p");
  }
  Eigen::MatrixXd y = eig.eigenvectors().rightCols(d.p).rowwise().reverse();
  canonicalize_column_signs(y);
  // Re-orthonormalize to absorb eigen-solver rounding.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d.n, d.p);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(d.p).triangularView<Eigen::Upper>();
  for (int j = 0; j < d.p; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return GrassmannBasis(std::move(q));
}

void canonicalize_column_signs(Eigen::MatrixXd& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      if (std::abs(columns(i, j)) > 1e-12) {
        if (columns(i, j) < 0.0) columns.col(j) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace manisync
