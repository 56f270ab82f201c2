#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <torwalk/errors.hpp>
#include <torwalk/intmat.hpp>
#include <torwalk/measure.hpp>
#include <torwalk/rng.hpp>
#include <torwalk/smith.hpp>

#include "oracles.hpp"

using namespace torwalk;

namespace {

const IntMat kFib = IntMat::from_rows({{1, 1}, {1, 0}});
const IntMat kCat = IntMat::from_rows({{2, 1}, {1, 1}});

IntMat random_mat(Rng& rng, int rows, int cols, long long span) {
  IntMat M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      M.at(i, j) = static_cast<long long>(rng.next() % (2 * span + 1)) - span;
  return M;
}

}  // namespace

TEST_CASE("determinant and unimodularity") {
  CHECK(determinant(kFib) == -1);
  CHECK(determinant(kCat) == 1);
  CHECK(is_unimodular(kFib));
  CHECK(is_unimodular(kCat));
  CHECK(!is_unimodular(IntMat::from_rows({{2, 0}, {0, 1}})));

  const IntMat inv = inverse_unimodular(kCat);
  CHECK(kCat * inv == IntMat::identity(2));
  CHECK(inverse_unimodular(kFib) * kFib == IntMat::identity(2));
}

TEST_CASE("matrix powers") {
  CHECK(mat_pow(kFib, 0) == IntMat::identity(2));
  CHECK(mat_pow(kFib, 2) == kCat);
  CHECK(mat_pow(kFib, 5) == kFib * kFib * kFib * kFib * kFib);
}

TEST_CASE("characteristic polynomial, ascending coefficients") {
  const IntPoly fib = characteristic_polynomial(kFib);  // x^2 - x - 1
  REQUIRE(fib.size() == 3);
  CHECK(fib[0] == -1);
  CHECK(fib[1] == -1);
  CHECK(fib[2] == 1);

  const IntPoly cat = characteristic_polynomial(kCat);  // x^2 - 3x + 1
  CHECK(cat[0] == 1);
  CHECK(cat[1] == -3);
  CHECK(cat[2] == 1);

  const IntPoly id3 = characteristic_polynomial(IntMat::identity(3));  // (x-1)^3
  REQUIRE(id3.size() == 4);
  CHECK(id3[0] == -1);
  CHECK(id3[1] == 3);
  CHECK(id3[2] == -3);
  CHECK(id3[3] == 1);
}

TEST_CASE("hyperbolicity decision") {
  CHECK(is_hyperbolic(kFib));
  CHECK(is_hyperbolic(kCat));
  CHECK(!is_hyperbolic(IntMat::identity(2)));
  CHECK(!is_hyperbolic(IntMat::from_rows({{0, -1}, {1, 0}})));  // rotation
  CHECK(!is_hyperbolic(IntMat::from_rows({{1, 1}, {0, 1}})));   // shear
}

TEST_CASE("smith normal form of a fixed matrix") {
  const IntMat M = IntMat::from_rows({{4, 0}, {0, 6}});
  const SmithDecomposition S = smith_normal_form(M);
  REQUIRE(S.rank == 2);
  CHECK(S.factors[0] == 2);
  CHECK(S.factors[1] == 12);
  CHECK(S.U * M * S.V == S.diagonal(2, 2));
}

TEST_CASE("smith normal form properties on random matrices") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const int rows = 1 + static_cast<int>(rng.next() % 4);
    const int cols = 1 + static_cast<int>(rng.next() % 4);
    const IntMat M = random_mat(rng, rows, cols, 9);
    const SmithDecomposition S = smith_normal_form(M);
    CHECK(is_unimodular(S.U));
    CHECK(is_unimodular(S.V));
    CHECK(S.U * M * S.V == S.diagonal(rows, cols));
    for (size_t i = 0; i + 1 < S.factors.size(); ++i) {
      CHECK(S.factors[i] > 0);
      CHECK(S.factors[i + 1] % S.factors[i] == 0);
    }
  }
}

TEST_CASE("invariant subgroup of a full-rank support") {
  const IncrementMeasure mu = IncrementMeasure::uniform({{0, 0}, {1, 0}, {-1, 0}});
  const SubgroupBasis H = invariant_subgroup(kFib, mu.points);
  CHECK(H.rank == 2);
  REQUIRE(H.factors.size() == 2);
  CHECK(H.factors[0] == 1);
  CHECK(H.factors[1] == 1);
  CHECK(H.contains({Int(1), Int(0)}));
  CHECK(H.contains({Int(0), Int(1)}));
  CHECK(H.contains({Int(-3), Int(7)}));
}

TEST_CASE("invariant subgroup with even factors") {
  const IncrementMeasure mu = IncrementMeasure::uniform({{0, 0}, {2, 0}, {0, 2}});
  const SubgroupBasis H = invariant_subgroup(kCat, mu.points);
  CHECK(H.rank == 2);
  CHECK(H.factors[0] == 2);
  CHECK(H.factors[1] == 2);
  CHECK(H.contains({Int(2), Int(0)}));
  CHECK(H.contains({Int(4), Int(-2)}));
  CHECK(!H.contains({Int(1), Int(0)}));
  CHECK(!H.contains({Int(2), Int(1)}));
}

TEST_CASE("invariant subgroup, degenerate supports") {
  const SubgroupBasis H0 = invariant_subgroup(kFib, {{0, 0}});
  CHECK(H0.rank == 0);

  // one-dimensional differences still close up under the matrix action
  const SubgroupBasis H1 = invariant_subgroup(IntMat::identity(2), {{0, 0}, {3, 0}});
  CHECK(H1.rank == 1);
  CHECK(H1.factors[0] == 3);
  CHECK(H1.contains({Int(3), Int(0)}));
  CHECK(!H1.contains({Int(0), Int(3)}));
}

TEST_CASE("invariant subgroup matches additive closure mod M") {
  // reductions mod M of the subgroup must agree with the brute-force
  // additive closure of the reduced generators
  const std::vector<IntMat> mats = {kFib, kCat, IntMat::from_rows({{0, 1}, {1, 0}})};
  const std::vector<std::vector<std::vector<long long>>> supports = {
      {{0, 0}, {1, 0}, {-1, 0}}, {{0, 0}, {2, 0}, {0, 2}}, {{1, 1}, {3, 1}}, {{0, 0}, {6, 0}}};
  for (const IntMat& A : mats) {
    for (const auto& support : supports) {
      const SubgroupBasis H = invariant_subgroup(A, support);
      // generators: A^k (x - y) for k < d
      std::vector<std::vector<long long>> gens;
      for (size_t i = 0; i < support.size(); ++i)
        for (size_t j = 0; j < support.size(); ++j) {
          std::vector<long long> g(2);
          for (int c = 0; c < 2; ++c) g[c] = support[i][c] - support[j][c];
          for (int k = 0; k < 2; ++k) {
            gens.push_back(g);
            std::vector<long long> next(2, 0);
            for (int r = 0; r < 2; ++r)
              for (int c = 0; c < 2; ++c)
                next[r] += A.at(r, c).convert_to<long long>() * g[c];
            g = next;
          }
        }
      for (long long M : {2, 3, 8, 12}) {
        const std::set<std::vector<long long>> brute = oracle::subgroup_mod(gens, M);
        // enumerate the reduction of H mod M from its basis representation
        std::set<std::vector<long long>> mine;
        std::vector<long long> coef(static_cast<size_t>(H.rank), 0);
        while (true) {
          std::vector<long long> v(2, 0);
          for (int i = 0; i < H.rank; ++i)
            for (int c = 0; c < 2; ++c)
              v[c] += coef[i] * (H.factors[i] * H.basis[i][c]).convert_to<long long>();
          for (int c = 0; c < 2; ++c) v[c] = ((v[c] % M) + M) % M;
          mine.insert(v);
          int pos = 0;
          while (pos < H.rank && ++coef[pos] == M) coef[pos++] = 0;
          if (pos == H.rank) break;
        }
        if (H.rank == 0) mine.insert({0, 0});
        CHECK(brute == mine);
      }
    }
  }
}

TEST_CASE("convergence criterion against support iteration") {
  const std::vector<IntMat> mats = {kFib, kCat, IntMat::from_rows({{0, 1}, {1, 0}}),
                                    IntMat::from_rows({{1, 2}, {0, 1}})};
  const std::vector<std::vector<std::vector<long long>>> supports = {
      {{0, 0}},
      {{0, 0}, {1, 0}},
      {{0, 0}, {2, 0}},
      {{0, 0}, {2, 0}, {0, 2}},
      {{0, 0}, {3, 0}, {0, 3}},
  };
  for (const IntMat& A : mats) {
    for (const auto& support : supports) {
      const SubgroupBasis H = invariant_subgroup(A, support);
      for (long long n = 2; n <= 12; ++n) {
        const bool brute = oracle::converges_bfs(A, support, n);
        const ConvergenceReport rep = convergence_check(H, n);
        INFO("A=", A.str(), " |supp|=", support.size(), " n=", n);
        CHECK(rep.converges == brute);
      }
    }
  }
}

TEST_CASE("convergence diagnostics name the obstruction") {
  const SubgroupBasis Hfull =
      invariant_subgroup(kFib, {{0, 0}, {1, 0}, {-1, 0}});
  CHECK(convergence_check(Hfull, 7).converges);

  const SubgroupBasis Heven = invariant_subgroup(kCat, {{0, 0}, {2, 0}, {0, 2}});
  const ConvergenceReport even = convergence_check(Heven, 6);
  CHECK(!even.converges);
  CHECK(!even.diagnostic.empty());
  CHECK(convergence_check(Heven, 9).converges);

  const SubgroupBasis Hdef = invariant_subgroup(kFib, {{0, 0}});
  const ConvergenceReport def = convergence_check(Hdef, 5);
  CHECK(!def.converges);
  CHECK(!def.diagnostic.empty());
}
