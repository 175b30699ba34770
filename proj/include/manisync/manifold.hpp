#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manisync/error.hpp"

namespace manisync {

enum class ManifoldKind { Circle, SpecialOrthogonal, Grassmann };

/// Which manifold, and its embedding in R^m. Points are stored in matrix form:
/// 2x1 for the circle, n x n for SO(n) and for Grass(p, n) projectors.
struct ManifoldDescriptor {
  ManifoldKind kind = ManifoldKind::Circle;
  int n = 2;
  int p = 1;

  static ManifoldDescriptor circle();
  /// Requires n >= 2.
  static ManifoldDescriptor special_orthogonal(int n);
  /// Requires 1 <= p <= n / 2.
  static ManifoldDescriptor grassmann(int p, int n);

  int rows() const { return kind == ManifoldKind::Circle ? 2 : n; }
  int cols() const { return kind == ManifoldKind::Circle ? 1 : n; }
  int embedding_dim() const { return rows() * cols(); }
  /// Constant Frobenius norm of every embedded point: 1, sqrt(n), sqrt(p).
  double radius() const;
  /// "circle", "so(3)", "grass(2,4)".
  std::string name() const;

  bool operator==(const ManifoldDescriptor& other) const {
    return kind == other.kind && rows() == other.rows() &&
           (kind != ManifoldKind::Grassmann || p == other.p);
  }
  bool operator!=(const ManifoldDescriptor& other) const {
    return !(*this == other);
  }
};

/// Tolerance for manifold membership checks.
inline constexpr double kMembershipTol = 1e-9;

/// Largest violation of the membership equations for `m` (not including the
/// SO(n) determinant sign, which is reported separately by the constructor).
double membership_error(const ManifoldDescriptor& d, const Eigen::MatrixXd& m);

class ManifoldPoint {
 public:
  /// Throws Error(NotOnManifold) unless `data` satisfies the membership
  /// equations within kMembershipTol, and Error(DimensionMismatch) on shape.
  ManifoldPoint(ManifoldDescriptor d, Eigen::MatrixXd data);

  static ManifoldPoint from_angle(double theta);

  const ManifoldDescriptor& descriptor() const noexcept { return desc_; }
  const Eigen::MatrixXd& matrix() const noexcept { return data_; }
  /// Circle only.
  double angle() const;

 private:
  ManifoldDescriptor desc_;
  Eigen::MatrixXd data_;
};

/// An n x p matrix with orthonormal columns spanning a Grassmann point.
class GrassmannBasis {
 public:
  explicit GrassmannBasis(Eigen::MatrixXd y);

  const Eigen::MatrixXd& matrix() const noexcept { return y_; }
  int n() const { return static_cast<int>(y_.rows()); }
  int p() const { return static_cast<int>(y_.cols()); }

 private:
  Eigen::MatrixXd y_;
};

/// Frobenius inner product; equals the dot product of the embeddings.
inline double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

/// Row-major flattening into R^m.
Eigen::VectorXd embed(const ManifoldPoint& pt);
Eigen::VectorXd flatten(const Eigen::MatrixXd& m);
/// Inverse of flatten for the descriptor's matrix shape.
Eigen::MatrixXd unflatten(const ManifoldDescriptor& d, const Eigen::VectorXd& v);

/// Orthogonal projection of an ambient matrix onto the tangent space at base.
///   circle:  v - (v . y) y
///   SO(n):   Q skew(Q^T V)
///   Grass:   Pi S Pi_perp + Pi_perp S Pi,  S = sym(V)
Eigen::MatrixXd tangent_project(const ManifoldPoint& base, const Eigen::MatrixXd& v);
/// Same map on flattened vectors.
Eigen::VectorXd tangent_project_embedded(const ManifoldPoint& base,
                                         const Eigen::VectorXd& v);

/// Nearest point on the manifold to an ambient matrix: normalization, polar
/// factor, or dominant-p eigenprojector of the symmetric part. Throws
/// Error(RetractionFailure) when that point is not well defined.
ManifoldPoint project_to_manifold(const ManifoldDescriptor& d,
                                  const Eigen::MatrixXd& ambient);

/// project_to_manifold(base + step * tangent).
ManifoldPoint retract(const ManifoldPoint& base, const Eigen::MatrixXd& tangent,
                      double step);

double chordal_distance(const ManifoldPoint& a, const ManifoldPoint& b);

/// Haar-distributed point (uniform angle; QR of a Gaussian matrix with sign
/// fix; span of a Gaussian frame).
ManifoldPoint random_point(const ManifoldDescriptor& d, std::mt19937_64& rng);
ManifoldPoint random_point(const ManifoldDescriptor& d, std::uint64_t seed);

/// Principal angles in [0, pi/2], ascending.
std::vector<double> principal_angles(const GrassmannBasis& a, const GrassmannBasis& b);

ManifoldPoint basis_to_projector(const GrassmannBasis& y);
/// Orthonormal basis of the range of a rank-p projector. Throws
/// Error(Degenerate) if the p-th largest eigenvalue is below 0.5.
GrassmannBasis projector_to_basis(const ManifoldPoint& pi);

/// Flips each column so its first entry with magnitude above 1e-12 is positive.
void canonicalize_column_signs(Eigen::MatrixXd& columns);

}  // namespace manisync
