#include <doctest.h>

#include <numbers>

#include "manisync/means.hpp"
#include "oracles.hpp"

using namespace manisync;
using std::numbers::pi;

TEST_CASE("centroid examples") {
  const Centroid c = centroid({ManifoldPoint::from_angle(0.0), ManifoldPoint::from_angle(pi / 2)});
  CHECK(c.value.isApprox(Eigen::Vector2d(0.5, 0.5)));
  CHECK(c.total_weight == 2.0);

  const Centroid w = centroid({ManifoldPoint::from_angle(0.0), ManifoldPoint::from_angle(pi / 2)},
                              {3.0, 1.0});
  CHECK(w.value.isApprox(Eigen::Vector2d(0.75, 0.25)));

  const Centroid anti = centroid({ManifoldPoint::from_angle(0.0), ManifoldPoint::from_angle(pi)});
  CHECK(anti.value.norm() < 1e-15);

  CHECK_THROWS_AS(centroid({}), Error);
  CHECK_THROWS_AS(centroid({ManifoldPoint::from_angle(0.0)}, {0.0}), Error);
  CHECK_THROWS_AS(centroid({ManifoldPoint::from_angle(0.0)}, {1.0, 2.0}), Error);
}

TEST_CASE("circle mean") {
  const MeanResult m = iam_circle(Eigen::Vector2d(0.5, 0.5));
  CHECK(m.unique);
  CHECK(m.representative.angle() == doctest::Approx(pi / 4));
  CHECK(m.optimal_value == doctest::Approx(std::sqrt(0.5)));

  const MeanResult z = iam_circle(Eigen::Vector2d::Zero());
  CHECK_FALSE(z.unique);
  CHECK(z.degeneracy == Degeneracy::WholeManifold);
  CHECK_FALSE(z.description.empty());

  const MeanResult a = aiam(ManifoldDescriptor::circle(), Eigen::Vector2d(0.5, 0.5));
  CHECK(a.representative.angle() == doctest::Approx(-3 * pi / 4));
}

TEST_CASE("rotation mean examples") {
  const MeanResult neg = iam_so_n(Eigen::Vector2d(1, -2).asDiagonal());
  CHECK(neg.unique);
  CHECK(neg.representative.matrix().isApprox(-Eigen::Matrix2d::Identity()));
  CHECK(neg.optimal_value == doctest::Approx(1.0));

  const MeanResult pos = iam_so_n(Eigen::Vector2d(2, 1).asDiagonal());
  CHECK(pos.representative.matrix().isApprox(Eigen::Matrix2d::Identity()));
  CHECK(pos.optimal_value == doctest::Approx(3.0));

  const MeanResult zero = iam_so_n(Eigen::Matrix3d::Zero());
  CHECK_FALSE(zero.unique);
  CHECK(zero.degeneracy == Degeneracy::WholeManifold);

  // det < 0 with a repeated smallest singular value: a circle of maxima.
  const MeanResult fam = iam_so_n(Eigen::Vector3d(1, 1, -1).asDiagonal());
  CHECK_FALSE(fam.unique);
  CHECK(fam.degeneracy == Degeneracy::Subset);
  CHECK(fam.optimal_value == doctest::Approx(1.0));
  CHECK(iam_value(fam.representative, Eigen::Vector3d(1, 1, -1).asDiagonal()) ==
        doctest::Approx(1.0));
}

TEST_CASE("rotation mean is equivariant") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXd c = oracle::gaussian(3, 3, rng);
    const Eigen::MatrixXd q = oracle::haar_rotation(3, rng);
    const MeanResult a = iam_so_n(c);
    const MeanResult b = iam_so_n(q * c);
    CHECK((q * a.representative.matrix() - b.representative.matrix()).norm() < 1e-9);
    CHECK(a.optimal_value == doctest::Approx(b.optimal_value));
  }
}

TEST_CASE("singular rotation centroid") {
  // Rank one: the kernel is one-dimensional so the maximizer is unique.
  const MeanResult r = iam_so_n(Eigen::Vector2d(1, 0).asDiagonal());
  CHECK(r.unique);
  CHECK(r.representative.matrix().isApprox(Eigen::Matrix2d::Identity()));
  CHECK(r.optimal_value == doctest::Approx(1.0));
  CHECK(oracle::grid_max_so2(Eigen::Vector2d(1, 0).asDiagonal()) == doctest::Approx(1.0));

  const MeanResult k2 = iam_so_n(Eigen::Vector3d(1, 0, 0).asDiagonal());
  CHECK_FALSE(k2.unique);
}

TEST_CASE("grassmann mean examples") {
  Eigen::Matrix2d c;
  c << 0.75, 0.25, 0.25, 0.25;
  const MeanResult m = iam_grassmann(c, 1);
  CHECK(m.unique);
  const double theta = pi / 8;
  const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
  CHECK((m.representative.matrix() - u * u.transpose()).norm() < 1e-12);

  const MeanResult iso = iam_grassmann(0.5 * Eigen::Matrix2d::Identity(), 1);
  CHECK_FALSE(iso.unique);
  CHECK(iso.degeneracy == Degeneracy::WholeManifold);

  const MeanResult cut = iam_grassmann(Eigen::Vector4d(3, 2, 2, 1).asDiagonal(), 2);
  CHECK_FALSE(cut.unique);
  CHECK(cut.degeneracy == Degeneracy::Subset);
  CHECK(cut.optimal_value == doctest::Approx(5.0));

  Eigen::Matrix2d asym;
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(iam_grassmann(asym, 1), Error);
}

TEST_CASE("mean dispatch checks shapes") {
  CHECK_THROWS_AS(iam(ManifoldDescriptor::special_orthogonal(3), Eigen::Matrix2d::Identity()),
                  Error);
  CHECK_THROWS_AS(iam(ManifoldDescriptor::circle(), Eigen::Matrix2d::Identity()), Error);
}

TEST_CASE("critical rotations") {
  std::mt19937_64 rng(8);
  for (int n = 2; n <= 4; ++n) {
    const Eigen::MatrixXd b = oracle::gaussian(n, n, rng);
    const auto crit = critical_rotations(b);
    CHECK(crit.size() == (1u << (n - 1)));
    for (const ManifoldPoint& q : crit) {
      const Eigen::MatrixXd m = q.matrix().transpose() * b;
      CHECK((m - m.transpose()).norm() < 1e-9);
    }
  }
  CHECK_THROWS_AS(critical_rotations(Eigen::Matrix3d::Identity()), Error);
  CHECK(critical_rotations(Eigen::Matrix3d::Identity(), true).size() == 4);
}

TEST_CASE("mean of a single point is the point") {
  std::mt19937_64 rng(31);
  for (const auto& d : {ManifoldDescriptor::circle(), ManifoldDescriptor::special_orthogonal(3),
                        ManifoldDescriptor::grassmann(2, 4)}) {
    const ManifoldPoint y = random_point(d, rng);
    const MeanResult m = iam(d, centroid({y}).value);
    CHECK(m.unique);
    CHECK((m.representative.matrix() - y.matrix()).norm() < 1e-10);
  }
}

TEST_CASE("isotropic grassmann centroid is degenerate everywhere") {
  const MeanResult m = iam_grassmann(0.5 * Eigen::Matrix4d::Identity(), 2);
  CHECK_FALSE(m.unique);
  CHECK(m.degeneracy == Degeneracy::WholeManifold);
}

TEST_CASE("so(2) ignores the part of C_e outside the rotation span") {
  const MeanResult flat = iam_so_n(Eigen::Vector2d(1, -1).asDiagonal());
  CHECK_FALSE(flat.unique);
  CHECK(flat.degeneracy == Degeneracy::WholeManifold);

  Eigen::Matrix2d c;
  c << 3, 1, 2, -1;
  const MeanResult m = iam_so_n(c);
  CHECK(m.optimal_value == doctest::Approx(oracle::grid_max_so2(c)));
  CHECK(iam_value(m.representative, c) == doctest::Approx(m.optimal_value));
}
