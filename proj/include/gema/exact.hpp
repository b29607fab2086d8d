#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gema::exact {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <class T>
using Matrix = std::vector<std::vector<T>>;

using IntMatrix = Matrix<BigInt>;
using RationalMatrix = Matrix<Rational>;

IntMatrix to_big(const Matrix<std::int64_t>& m);
IntMatrix transpose(const IntMatrix& m);

/// Fraction-free Bareiss elimination. Square input required.
BigInt determinant(const IntMatrix& m);

/// Classical adjugate: adj(M) M = M adj(M) = det(M) I.
IntMatrix adjugate(const IntMatrix& m);

/*
 * Diagonal of the Smith normal form, nonnegative and in divisibility order
 * (d_1 | d_2 | ...). Zero entries, if any, come last. Works on rectangular
 * input; the diagonal has min(rows, cols) entries.
 */
std::vector<BigInt> smith_diagonal(IntMatrix m);

/// Gauss-Jordan inverse over the rationals; returns false when singular.
bool invert(const RationalMatrix& m, RationalMatrix& out);

RationalMatrix transpose(const RationalMatrix& m);
RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);

/// Narrowing with a range check; throws OverflowError.
std::int64_t to_int64(const BigInt& v);

}  // namespace gema::exact
