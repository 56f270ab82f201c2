#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <torwalk/errors.hpp>
#include <torwalk/hyperbolic.hpp>
#include <torwalk/rng.hpp>
#include <torwalk/smith.hpp>

using namespace torwalk;

namespace {

const IntMat kFib = IntMat::from_rows({{1, 1}, {1, 0}});
const IntMat kCat = IntMat::from_rows({{2, 1}, {1, 1}});

Eigen::VectorXd rand_vec(Rng& rng, int d, double scale) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = (rng.next_double() - 0.5) * 2.0 * scale;
  return v;
}

// smallest adapted norm over nonzero integer vectors in a generous box
double shortest_by_enumeration(const AdaptedNorm& nrm, int reach) {
  double best = 1e100;
  for (int a = -reach; a <= reach; ++a)
    for (int b = -reach; b <= reach; ++b) {
      if (a == 0 && b == 0) continue;
      Eigen::VectorXd v(2);
      v << a, b;
      best = std::min(best, nrm(v));
    }
  return best;
}

}  // namespace

TEST_CASE("splitting solves the eigenproblem") {
  for (const IntMat& A : {kFib, kCat}) {
    const Splitting s = stable_unstable_split(A);
    CHECK(s.stable_dim == 1);
    CHECK(s.unstable_dim == 1);
    // invariance: A maps each factor into itself
    const Eigen::VectorXd vs = s.stable_basis.col(0);
    const Eigen::VectorXd vu = s.unstable_basis.col(0);
    CHECK((s.proj_unstable * (s.map * vs)).norm() < 1e-9);
    CHECK((s.proj_stable * (s.map * vu)).norm() < 1e-9);
    // the projections decompose the identity
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    CHECK((s.proj_stable + s.proj_unstable - I).norm() < 1e-9);
    CHECK((s.proj_stable * s.proj_stable - s.proj_stable).norm() < 1e-9);
    CHECK((s.map * s.map_inv - I).norm() < 1e-12);
  }
}

TEST_CASE("non-hyperbolic matrices are refused") {
  CHECK_THROWS_AS(stable_unstable_split(IntMat::identity(2)), NotHyperbolic);
  CHECK_THROWS_AS(stable_unstable_split(IntMat::from_rows({{1, 1}, {0, 1}})), NotHyperbolic);
  CHECK_THROWS_AS(stable_unstable_split(IntMat::from_rows({{0, -1}, {1, 0}})), NotHyperbolic);
}

TEST_CASE("adapted contraction rates") {
  const AdaptedNorm fib = adapted_norm(stable_unstable_split(kFib));
  CHECK(fib.lambda == doctest::Approx(0.618034).epsilon(1e-5));
  const AdaptedNorm cat = adapted_norm(stable_unstable_split(kCat));
  CHECK(cat.lambda == doctest::Approx(0.381966).epsilon(1e-5));
  CHECK(fib.lambda < 1.0);
  CHECK(cat.lambda < 1.0);
  CHECK(fib.stable_rate <= fib.lambda + 1e-12);
  CHECK(fib.unstable_rate <= fib.lambda + 1e-12);
}

TEST_CASE("norm axioms and equivalence constants") {
  Rng rng(7);
  for (const IntMat& A : {kFib, kCat}) {
    const AdaptedNorm nrm = adapted_norm(stable_unstable_split(A));
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::VectorXd x = rand_vec(rng, 2, 3.0);
      const Eigen::VectorXd y = rand_vec(rng, 2, 3.0);
      CHECK(nrm(x + y) <= nrm(x) + nrm(y) + 1e-12);
      CHECK(nrm(2.5 * x) == doctest::Approx(2.5 * nrm(x)).epsilon(1e-12));
      CHECK(nrm(x) >= nrm.equiv_lower * x.norm() - 1e-12);
      CHECK(nrm(x) <= nrm.equiv_upper * x.norm() + 1e-12);
    }
  }
}

TEST_CASE("the map contracts the stable factor, its inverse the unstable one") {
  Rng rng(11);
  for (const IntMat& A : {kFib, kCat}) {
    const AdaptedNorm nrm = adapted_norm(stable_unstable_split(A));
    const Splitting& s = nrm.split;
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd v = rand_vec(rng, 2, 2.0);
      const Eigen::VectorXd vs = s.proj_stable * v;
      const Eigen::VectorXd vu = s.proj_unstable * v;
      CHECK(nrm(s.map * vs) <= nrm.lambda * nrm(vs) + 1e-10);
      CHECK(nrm(s.map_inv * vu) <= nrm.lambda * nrm(vu) + 1e-10);
    }
  }
}

TEST_CASE("shortest lattice vector in the adapted norm") {
  const AdaptedNorm fib = adapted_norm(stable_unstable_split(kFib));
  CHECK(fib.shortest_vector == doctest::Approx(shortest_by_enumeration(fib, 8)).epsilon(1e-9));
  const AdaptedNorm cat = adapted_norm(stable_unstable_split(kCat));
  CHECK(cat.shortest_vector == doctest::Approx(shortest_by_enumeration(cat, 8)).epsilon(1e-9));
  CHECK(cat.shortest_vector == doctest::Approx(0.8506508).epsilon(1e-5));
}

TEST_CASE("derived constants") {
  const AdaptedNorm fib = adapted_norm(stable_unstable_split(kFib));
  const HyperbolicConstants hf = hyperbolic_constants(fib);
  CHECK(hf.expansiveness_constant == doctest::Approx(0.262866).epsilon(1e-4));
  CHECK(hf.gap_exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(hf.gap_scale > 0.0);
  CHECK(hf.shortest_vector == doctest::Approx(fib.shortest_vector).epsilon(1e-12));

  const AdaptedNorm cat = adapted_norm(stable_unstable_split(kCat));
  const HyperbolicConstants hc = hyperbolic_constants(cat);
  CHECK(hc.expansiveness_constant == doctest::Approx(0.16246).epsilon(1e-4));

  // larger invariant factors shrink the guaranteed character gap
  const HyperbolicConstants scaled = hyperbolic_constants(fib, Int(3));
  CHECK(scaled.gap_scale < hf.gap_scale);
  CHECK(scaled.gap_exponent == doctest::Approx(hf.gap_exponent).epsilon(1e-12));
}

TEST_CASE("torus metric uses the minimal lift") {
  const AdaptedNorm nrm = adapted_norm(stable_unstable_split(kFib));
  Eigen::VectorXd e1(2), x(2), y(2);
  e1 << 1.0, 0.0;
  x << 0.15, 0.0;
  y << 0.0, 0.0;
  CHECK(torus_distance(x, y, nrm) == doctest::Approx(0.15 * nrm(e1)).epsilon(1e-12));
  x << 0.95, 0.0;
  CHECK(torus_distance(x, y, nrm) == doctest::Approx(0.05 * nrm(e1)).epsilon(1e-12));
  // symmetry and identity
  CHECK(torus_distance(x, y, nrm) == doctest::Approx(torus_distance(y, x, nrm)).epsilon(1e-12));
  CHECK(torus_distance(x, x, nrm) == 0.0);
  // the lift is the global minimiser over a window of integer shifts
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a = rand_vec(rng, 2, 1.0), b = rand_vec(rng, 2, 1.0);
    const Eigen::VectorXd rep = torus_representative(a - b, nrm);
    double best = 1e100;
    for (int s1 = -3; s1 <= 3; ++s1)
      for (int s2 = -3; s2 <= 3; ++s2) {
        Eigen::VectorXd lift = a - b;
        lift(0) += s1;
        lift(1) += s2;
        best = std::min(best, nrm(lift));
      }
    CHECK(nrm(rep) == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("orbit separation report") {
  const AdaptedNorm nrm = adapted_norm(stable_unstable_split(kFib));
  const double eps = 0.9 * hyperbolic_constants(nrm).expansiveness_constant;
  Eigen::VectorXd x(2);
  x << 0.37, 0.21;
  // displacement along the stable direction survives forward iteration
  const Eigen::VectorXd es = nrm.split.stable_basis.col(0);
  const Eigen::VectorXd y = x + 0.005 * es;
  const ExpansivenessReport rep = expansiveness_report(x, y, nrm, eps, 60);
  CHECK(rep.within_eps);
  CHECK(rep.forward_horizon == 60);
  CHECK(rep.unstable_norm <= rep.unstable_bound + 1e-12);
  CHECK(rep.stable_norm <= rep.stable_bound + 1e-12);
  // and the opposite alignment survives backward iteration
  const Eigen::VectorXd eu = nrm.split.unstable_basis.col(0);
  const ExpansivenessReport rep2 = expansiveness_report(x, x + 0.005 * eu, nrm, eps, 60);
  CHECK(rep2.backward_horizon == 60);
  CHECK(rep2.stable_norm <= rep2.stable_bound + 1e-12);
}

TEST_CASE("expansiveness: distinct orbits must separate") {
  // points whose orbits stay close for a long window are nearly equal
  const AdaptedNorm nrm = adapted_norm(stable_unstable_split(kFib));
  const double eps = 0.9 * hyperbolic_constants(nrm).expansiveness_constant;
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(2), y(2);
    x << rng.next_double(), rng.next_double();
    y = x;
    y(0) += (rng.next_double() - 0.5) * 0.02;
    y(1) += (rng.next_double() - 0.5) * 0.02;
    const ExpansivenessReport rep = expansiveness_report(x, y, nrm, eps, 40);
    if (!rep.within_eps) continue;
    const double lam = std::pow(nrm.lambda, static_cast<double>(rep.forward_horizon));
    CHECK(rep.unstable_norm <= lam * eps + 1e-12);
  }
}

TEST_CASE("canonical intersection of stable and unstable sets") {
  const AdaptedNorm nrm = adapted_norm(stable_unstable_split(kFib));
  const double eps = hyperbolic_constants(nrm).expansiveness_constant;
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(2), y(2);
    x << rng.next_double(), rng.next_double();
    y(0) = x(0) + (rng.next_double() - 0.5) * 0.1;
    y(1) = x(1) + (rng.next_double() - 0.5) * 0.1;
    if (torus_distance(x, y, nrm) >= eps) continue;
    const Eigen::VectorXd z = local_product(x, y, nrm, eps);
    // z - x is purely stable, z - y purely unstable (up to a lattice shift)
    const Eigen::VectorXd dx = torus_representative(z - x, nrm);
    const Eigen::VectorXd dy = torus_representative(z - y, nrm);
    CHECK((nrm.split.proj_unstable * dx).norm() < 1e-9);
    CHECK((nrm.split.proj_stable * dy).norm() < 1e-9);
  }
  Eigen::VectorXd x(2), far(2);
  x << 0.1, 0.1;
  far << 0.6, 0.6;
  CHECK_THROWS_AS(local_product(x, far, nrm, 0.05), TooFar);
}

TEST_CASE("pseudo-orbits are shadowed by true orbits") {
  const AdaptedNorm nrm = adapted_norm(stable_unstable_split(kFib));
  const double alpha = 1e-3;
  Eigen::Matrix2d Ad;
  Ad << 1, 1, 1, 0;
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::VectorXd> orbit;
    Eigen::VectorXd x(2);
    x << rng.next_double(), rng.next_double();
    orbit.push_back(x);
    for (int k = 0; k < 60; ++k) {
      Eigen::VectorXd next = Ad * orbit.back();
      next(0) -= std::floor(next(0));
      next(1) -= std::floor(next(1));
      // perturb within alpha in the adapted metric
      Eigen::VectorXd noise(2);
      noise << rng.next_double() - 0.5, rng.next_double() - 0.5;
      noise *= 0.5 * alpha / std::max(nrm(noise), 1e-30);
      orbit.push_back(next + noise);
    }
    const ShadowResult res = shadow_orbit(orbit, nrm, alpha);
    CHECK(res.beta <= alpha / (1.0 - nrm.lambda) + 1e-9);
    CHECK(res.observed <= res.beta + 1e-12);
    // independent replay: the true orbit of the returned point
    Eigen::VectorXd z = res.point;
    double worst = 0.0;
    for (size_t k = 0; k < orbit.size(); ++k) {
      worst = std::max(worst, torus_distance(z, orbit[k], nrm));
      z = Ad * z;
      z(0) -= std::floor(z(0));
      z(1) -= std::floor(z(1));
    }
    CHECK(worst <= res.beta + 1e-9);
  }
}

TEST_CASE("orbits that are not pseudo-orbits are refused") {
  const AdaptedNorm nrm = adapted_norm(stable_unstable_split(kFib));
  std::vector<Eigen::VectorXd> junk;
  Eigen::VectorXd a(2), b(2);
  a << 0.1, 0.2;
  b << 0.7, 0.9;  // nowhere near A(a)
  junk.push_back(a);
  junk.push_back(b);
  CHECK_THROWS_AS(shadow_orbit(junk, nrm, 1e-3), NotPseudoOrbit);
}
