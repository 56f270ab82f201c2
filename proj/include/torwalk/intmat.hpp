#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace torwalk {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Dense integer matrix with arbitrary-precision entries, row-major.
// Square in most uses; generator stacks passed to Smith reduction may be
// rectangular.
class IntMat {
public:
    IntMat() : rows_(0), cols_(0) {}
    IntMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

    static IntMat identity(int n);
    static IntMat from_rows(const std::vector<std::vector<long long>>& rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Int& at(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const Int& at(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    bool operator==(const IntMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    IntMat transpose() const;
    IntMat operator*(const IntMat& o) const;
    std::vector<Int> operator*(const std::vector<Int>& v) const;

    void swap_rows(int i, int j);
    void swap_cols(int i, int j);

    std::string str() const;

private:
    int rows_, cols_;
    std::vector<Int> a_;
};

// Polynomial with integer coefficients, ascending degree order.
using IntPoly = std::vector<Int>;

IntMat mat_pow(const IntMat& A, unsigned k);

// Exact determinant (Bareiss fraction-free elimination).
Int determinant(const IntMat& A);

bool is_unimodular(const IntMat& A);

// Exact inverse of a matrix with determinant +-1.
IntMat inverse_unimodular(const IntMat& A);

// Entrywise reduction into [0, n).
IntMat mod_reduce(const IntMat& A, long long n);

// Monic characteristic polynomial det(xI - A), ascending coefficients,
// computed exactly (Faddeev-LeVerrier; every division is exact).
IntPoly characteristic_polynomial(const IntMat& A);

// True when no eigenvalue has modulus one. Decided exactly where possible:
// the unit-circle eigenvalues are among the roots of
// g = gcd(p, reverse(p)) over Q; a constant g certifies hyperbolicity with
// no floating point at all. Otherwise g's roots are isolated numerically and
// each must sit farther than tau_eig from the unit circle. Roots inside the
// band [tau_eig, 10*tau_eig) raise AmbiguousSpectrum instead of guessing.
bool is_hyperbolic(const IntMat& A, double tau_eig = 1e-9);

// Roots of an integer polynomial via the companion matrix (helper shared
// with the splitting code).
std::vector<std::pair<double, double>> polynomial_roots(const IntPoly& p);

} // namespace torwalk
