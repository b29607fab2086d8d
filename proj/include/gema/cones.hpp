#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gema/errors.hpp"
#include "gema/hessian_core.hpp"
#include "gema/random.hpp"

/*
 * Cones of positive definite real symmetric and complex Hermitian matrices,
 * with the potential -log det. Most operations are templates over the scalar
 * type, instantiated for double and std::complex<double> in cones.cpp.
 */
namespace gema::cones {

using Complex = std::complex<double>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

/// A matrix known to be Hermitian (symmetric) positive definite.
template <class Scalar>
class ConePoint {
   public:
    /// NotSymmetric beyond 1e-12 (relative to the largest entry), NotInCone if not positive definite.
    explicit ConePoint(Matrix<Scalar> x);

    const Matrix<Scalar>& matrix() const { return x_; }
    Eigen::Index n() const { return x_.rows(); }

   private:
    Matrix<Scalar> x_;
};

/// Throws NotSymmetric for non-square or non-Hermitian input.
template <class Scalar>
void require_hermitian(const Matrix<Scalar>& x);

/// True iff x is positive definite. Throws NotSymmetric if x is not Hermitian.
template <class Scalar>
bool in_cone(const Matrix<Scalar>& x);

/// -log det X.
template <class Scalar>
double koszul_potential(const ConePoint<Scalar>& x);

/// g_X(V, W) = Re Tr(X^-1 V X^-1 W).
template <class Scalar>
double cone_metric(const ConePoint<Scalar>& x, const Matrix<Scalar>& v, const Matrix<Scalar>& w);

struct MaCheck {
    double det_hess = 0.0;
    double target = 0.0;
    double relative_error() const { return std::abs(det_hess - target) / target; }
};

/// kappa_n: det Hess(-log det) at the identity in the coordinates below.
template <class Scalar>
double ma_constant(Eigen::Index n);

/*
 * Finite-difference determinant of Hess(-log det) in real coordinates
 * against kappa_n det(X)^{-(n+1)} (real) or kappa_n det(X)^{-2n} (complex).
 */
template <class Scalar>
MaCheck cone_ma_check(const ConePoint<Scalar>& x, std::optional<double> h = {});

/// X^{1/2} exp(t X^{-1/2} V X^{-1/2}) X^{1/2}; V must be Hermitian.
template <class Scalar>
ConePoint<Scalar> geodesic(const ConePoint<Scalar>& x, const Matrix<Scalar>& v, double t);

/// (XY + YX) / 2.
template <class Scalar>
Matrix<Scalar> jordan_product(const Matrix<Scalar>& x, const Matrix<Scalar>& y);

/// Re Tr(XY).
template <class Scalar>
double trace_form(const Matrix<Scalar>& x, const Matrix<Scalar>& y);

// Coordinates run row-major over the upper triangle i <= j. A diagonal entry
// contributes x_ii; an off-diagonal entry contributes x_ij (real) or the pair
// Re x_ij, Im x_ij (complex). coordinate_basis(n)[k] is dX / dc_k.

template <class Scalar>
std::size_t coordinate_count(Eigen::Index n);

template <class Scalar>
std::vector<Matrix<Scalar>> coordinate_basis(Eigen::Index n);

template <class Scalar>
Matrix<Scalar> from_coordinates(const hessian::Point& c, Eigen::Index n);

template <class Scalar>
hessian::Point to_coordinates(const Matrix<Scalar>& x);

/// -log det on the cone in the coordinates above, with closed-form derivatives.
template <class Scalar>
hessian::Potential logdet_potential(Eigen::Index n);

/// Q diag(lambda) Q^* with lambda uniform in [lo, hi] and Q a random orthogonal/unitary matrix.
template <class Scalar>
Matrix<Scalar> random_cone_point(Eigen::Index n, Rng& rng, double lo = 0.5, double hi = 2.0);

/// Hermitian matrix with entries uniform in [-1, 1].
template <class Scalar>
Matrix<Scalar> random_hermitian(Eigen::Index n, Rng& rng);

struct CartanReport {
    double commutativity = 0.0;
    double associativity = 0.0;  // sampled (x o y) o z - x o (y o z)
    double wdvv = 0.0;           // wdvv_residual of the structure constants
    double unit = 0.0;
    double invariance = 0.0;     // <x o y, z> - <x, y o z>
    double compatibility = 0.0;  // compatibility_residual of (Gram, A, table)
    double gram_determinant = 0.0;
    double max_residual() const;
};

/*
 * Algebra-level Frobenius check on the diagonal n x n matrices with the
 * Jordan product and trace form (the tangent algebra of the Cartan torus).
 */
CartanReport cartan_frobenius_check(Eigen::Index n, std::size_t samples, std::uint64_t seed);

/*
 * Induced metric of the cone on the torus {exp(diag(a)) : sum a = 0}, in the
 * coordinates u = (a_0, ..., a_{n-2}).
 */
Eigen::MatrixXd cartan_torus_metric(Eigen::Index n, const hessian::Point& u);

/// max |R^a_bcd| of cartan_torus_metric at u, by finite differences.
double cartan_torus_curvature(Eigen::Index n, const hessian::Point& u, double h = 1e-3);

struct ConeTorus {
    Eigen::MatrixXd lattice_basis;  // columns generate Y Z^n
    double covolume = 0.0;
};

/// The real torus R^n / Y Z^n. NotInCone unless Y is positive definite.
ConeTorus torus_from_cone(const RealMatrix& y);

/*
 * Complex 2n x 2n image [[A, B], [-conj(B), conj(A)]] of the quaternionic
 * matrix A + B j. Quaternionic Hermitian matrices map to Hermitian ones and
 * positivity is preserved, so the complex routines apply. Experimental.
 */
ComplexMatrix embed_quaternionic(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace gema::cones
