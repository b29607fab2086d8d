#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gema/bhk.hpp"
#include "gema/errors.hpp"
#include "gema/exact.hpp"
#include "gema/random.hpp"

namespace gema::syz {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

/// Homogeneous coordinates [z_0 : ... : z_N] on the weighted projective space P(w).
struct WeightedProjectivePoint {
    CVector z;
    Eigen::VectorXd w;
};

/// A point of the closed standard simplex.
struct MomentImage {
    Eigen::VectorXd eta;
};

Eigen::VectorXd weight_vector(const bhk::WeightSystem& ws);

/*
 * eta_i = w_i |z_i|^2 / sum_j w_j |z_j|^2. Invariant under per-coordinate
 * phases; under t . z it is invariant only for |t| = 1 or equal weights.
 * ZeroVector for z = 0, DomainError for nonpositive weights.
 */
MomentImage moment_map(const WeightedProjectivePoint& p);

/// t . z = (t^{w_0} z_0, ..., t^{w_N} z_N).
WeightedProjectivePoint act(const WeightedProjectivePoint& p, Complex t);

/// z_k -> e^{i phi_k} z_k.
WeightedProjectivePoint rotate_phases(const WeightedProjectivePoint& p, const Eigen::VectorXd& phi);

/*
 * The real point s . z (s > 0) on the level set sum w_j |z_j|^2 = 1. Every
 * orbit of the weighted C^x action meets the level set in one U(1) orbit, so
 * moduli of the representative are invariants of the orbit.
 */
WeightedProjectivePoint canonical_representative(const WeightedProjectivePoint& p);

/// moment_map of the canonical representative: invariant under the full weighted C^x action.
MomentImage reduced_moment_map(const WeightedProjectivePoint& p);

/// {eta in the open simplex : sum w_i eta_i = level}.
struct SlicePolytope {
    Eigen::VectorXd w;
    double degree = 1.0;
    double level = 1.0;

    /// True when the slice misses the open simplex: not (min w < c < max w) and not (all w = c).
    bool empty() const;

    /// Vertices of the closed slice polytope, one per row.
    Eigen::MatrixXd vertices() const;
};

/// Slice for a weight system; level defaults to 1/d.
SlicePolytope make_slice(const bhk::WeightSystem& ws, std::optional<double> level = {});

/// |sum w eta - c| <= tol, eta strictly positive and summing to 1 within tol.
bool slice_membership(const MomentImage& eta, const SlicePolytope& s, double tol);

/// Random interior points of a nonempty slice (Dirichlet mixtures of its vertices). DomainError if empty.
std::vector<MomentImage> sample_slice(const SlicePolytope& s, std::size_t count, std::uint64_t seed);

/// z_i = sqrt(eta_i / w_i) e^{i phi_i}, phi uniform. BoundaryError unless eta is interior.
std::vector<WeightedProjectivePoint> sample_fiber(const MomentImage& eta, const Eigen::VectorXd& w,
                                                  std::size_t count, std::uint64_t seed);

/// i z_k e_k: generator of the k-th phase rotation at z.
CVector phase_direction(const CVector& z, std::size_t k);

/// z_k e_k: the radial (non-fiber) direction.
CVector radial_direction(const CVector& z, std::size_t k);

/// omega(u, v) = Im sum conj(u_a) v_a.
double symplectic_pairing(const CVector& u, const CVector& v);

/*
 * max |omega(u, v)| over all pairs of pure phase directions and over
 * tangent_pairs random real combinations of them.
 */
double isotropy_residual(const WeightedProjectivePoint& p, std::size_t tangent_pairs, std::uint64_t seed);

struct FiberDimension {
    int dimension = 0;     // N - rank
    int rank = 0;          // real rank of d(Re W, Im W)/d phi at the solution
    double residual = 0.0; // |W| at the solution
    std::size_t start = 0; // which seeded start converged
};

/*
 * Numerical dimension of {phi : W(sqrt(eta / w) e^{i phi}) = 0} modulo the
 * overall weighted phase, with unit coefficients on every monomial. Newton
 * (minimum-norm Gauss-Newton steps) runs from `starts` seeded phase vectors;
 * NoSolutionFound if none converges.
 */
FiberDimension hypersurface_fiber_dimension(const bhk::ExponentMatrix& e, const bhk::WeightSystem& ws,
                                            const MomentImage& eta, std::uint64_t seed, std::size_t starts = 16);

struct TorusFiber {
    Eigen::MatrixXd lattice_basis;  // columns span the lattice
    std::size_t rank() const { return static_cast<std::size_t>(lattice_basis.cols()); }
};

/// Inverse transpose of the basis. SingularBasis if it is not invertible.
TorusFiber dual_fiber(const TorusFiber& f);

/// basis^T dual_basis; the identity for a dual pair.
Eigen::MatrixXd pairing_matrix(const TorusFiber& f, const TorusFiber& dual);

/// Exact inverse transpose over the rationals. SingularBasis if det = 0.
exact::RationalMatrix dual_basis_exact(const exact::RationalMatrix& basis);

/// theta = log eta (the categorical natural parameters). BoundaryError on the boundary.
Eigen::VectorXd legendre_chart(const MomentImage& eta);

}  // namespace gema::syz
