#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manisync/manifold.hpp"

namespace manisync {

/// Weighted Euclidean average of embedded points. Generally off-manifold.
struct Centroid {
  Eigen::MatrixXd value;
  double total_weight = 0.0;
};

enum class Degeneracy {
  None,           ///< the mean is a single point
  WholeManifold,  ///< c^T C_e is constant: every point is a mean
  Subset,         ///< a proper family of points; see MeanResult::description
};

struct MeanResult {
  /// Canonical member of the mean set.
  ManifoldPoint representative;
  bool unique = false;
  Degeneracy degeneracy = Degeneracy::None;
  /// Human-readable description of the non-unique family (empty if unique).
  std::string description;
  /// max over the manifold of <c, C_e>.
  double optimal_value = 0.0;
};

/// Throws Error(InvalidArgument) on empty input, size mismatch or
/// non-positive weights. Empty `weights` means unit weights.
Centroid centroid(const std::vector<ManifoldPoint>& points,
                  const std::vector<double>& weights = {});

/// <c, C_e> in the embedding space.
double iam_value(const ManifoldPoint& c, const Eigen::MatrixXd& ce);

/// Induced arithmetic mean: argmax of <c, C_e> over the manifold.
MeanResult iam(const ManifoldDescriptor& d, const Eigen::MatrixXd& ce);
/// Anti-mean: argmax of <c, -C_e>; equals iam(d, -C_e).
MeanResult aiam(const ManifoldDescriptor& d, const Eigen::MatrixXd& ce);

MeanResult iam_circle(const Eigen::MatrixXd& ce);
MeanResult iam_so_n(const Eigen::MatrixXd& ce);
/// Throws Error(InvalidArgument) if `ce` is not symmetric within 1e-9.
MeanResult iam_grassmann(const Eigen::MatrixXd& ce, int p);

/// All rotations Q = U H J H^T with Q^T B symmetric, where B = U R is the
/// polar decomposition, H the eigenvectors of R and J = diag(+-1) with a
/// number of -1 entries whose parity matches det(U). Returns 2^(n-1) points.
///
/// When R has a repeated eigenvalue (gap below 1e-6) the critical set is a
/// continuum; this throws Error(Degenerate) unless `allow_degenerate` is set,
/// in which case only the sign patterns in the computed eigenbasis are
/// returned.
std::vector<ManifoldPoint> critical_rotations(const Eigen::MatrixXd& b,
                                              bool allow_degenerate = false);

}  // namespace manisync
