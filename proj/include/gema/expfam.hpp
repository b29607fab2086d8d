#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gema/errors.hpp"
#include "gema/hessian_core.hpp"

namespace gema::expfam {

using Vector = Eigen::VectorXd;

enum class SampleSpace {
    Categorical,  // atoms 0..K-1, statistics are indicators
    Finite,       // arbitrary finite atoms with base weights
    Quadrature,   // fixed quadrature grid over a bounded region (experimental)
};

/*
 * Densities exp(C(x) + <theta, F(x)> - Psi(theta)) with respect to a weighted
 * base measure on finitely many nodes. Finite sample spaces and quadrature
 * grids share this representation; only their construction differs.
 *
 * A categorical family with K atoms carries either all K indicators
 * (gauge_fixed = false, translation invariant in theta) or the K-1
 * indicators of atoms 1..K-1 (gauge_fixed = true, theta_0 = 0).
 */
struct ExponentialFamily {
    SampleSpace space = SampleSpace::Finite;
    bool gauge_fixed = false;
    std::vector<double> base_weights;  // per node
    std::vector<double> carrier;       // C per node
    Eigen::MatrixXd statistics;        // nodes x parameters
    Eigen::MatrixXd nodes;             // node coordinates (quadrature), one row per node

    std::size_t size() const { return base_weights.size(); }
    std::size_t num_params() const { return static_cast<std::size_t>(statistics.cols()); }
    bool experimental() const { return space == SampleSpace::Quadrature; }
};

ExponentialFamily categorical(std::size_t atoms);

/// Drops the indicator of atom 0. Only categorical families have a gauge to fix.
ExponentialFamily gauge_fixed(const ExponentialFamily& fam);

/// General finite family; validates shapes, positivity of weights and finiteness.
ExponentialFamily finite_family(std::vector<double> base_weights, std::vector<double> carrier,
                                Eigen::MatrixXd statistics);

/*
 * Midpoint rule on a regular grid of per_axis^k cells over the box [lo, hi],
 * keeping cells whose centre satisfies region. Experimental.
 */
ExponentialFamily quadrature_family(const Vector& lo, const Vector& hi, std::size_t per_axis,
                                    const std::function<bool(const Vector&)>& region,
                                    const std::function<Vector(const Vector&)>& statistics,
                                    const std::function<double(const Vector&)>& carrier);

/*
 * Lebesgue measure on the open simplex {eta_1..eta_n > 0, sum < 1} with
 * statistics F_i(eta) = eta_i, i = 1..n. Experimental.
 */
ExponentialFamily simplex_lebesgue_family(std::size_t n, std::size_t per_axis);

/// A point of the open mean-parameter domain.
struct MeanPoint {
    Vector eta;
};

/// Psi(theta) = log sum_x w(x) exp(C(x) + <theta, F(x)>), max-shifted.
double log_partition(const ExponentialFamily& fam, const Vector& theta);

/// exp(C(x) + <theta, F(x)> - Psi(theta)) at node x, with respect to the base weights.
double density(const ExponentialFamily& fam, const Vector& theta, std::size_t node);

/// Probability mass w(x) density(x) at every node; sums to 1.
Vector probabilities(const ExponentialFamily& fam, const Vector& theta);

/// eta = grad Psi(theta) = E_theta[F].
MeanPoint mean_params(const ExponentialFamily& fam, const Vector& theta);

/*
 * Categorical convention theta_i = log eta_i (additive constant zero). eta is
 * the full probability vector; BoundaryError on any eta_i <= 0, DomainError if
 * it does not sum to 1.
 */
Vector natural_params(const MeanPoint& eta);

/// sum eta_i log eta_i; BoundaryError on the simplex boundary.
double negative_entropy(const MeanPoint& eta);

/// theta - theta_0 * 1, the gauge representative with theta_0 = 0.
Vector gauge_fix(const Vector& theta);

/*
 * Hess Psi(theta) as the covariance of F. ConvexityError if it is not
 * positive definite, which is always the case for a categorical family
 * without gauge fixing.
 */
hessian::Metric fisher_metric(const ExponentialFamily& fam, const Vector& theta);

/// Psi as a hessian::Potential on R^m (no closed forms), for finite-difference cross-checks.
hessian::Potential log_partition_potential(const ExponentialFamily& fam);

struct DualMaCheck {
    double det_hess = 0.0;
    double target = 0.0;
    double relative_error() const { return std::abs(det_hess - target) / target; }
};

/*
 * Finite-difference det Hess of the negative entropy in the chart that drops
 * eta_0, against exp(-sum_{i=0}^{N} log eta_i) = 1 / prod eta_i.
 */
DualMaCheck dual_ma_check(const MeanPoint& eta, std::optional<double> h = {});

struct MomentMatch {
    Vector theta;
    double residual = 0.0;  // max |E_theta[F] - target|
    std::size_t iterations = 0;
};

/*
 * Solves grad Psi(theta) = target by damped Newton on Psi(theta) - <theta, target>,
 * with minimum-norm steps where the Fisher matrix is singular. Throws
 * NotInFamily (carrying the residual) if it does not converge.
 */
MomentMatch match_moments(const ExponentialFamily& fam, const Vector& target, double tol = 1e-12,
                          std::size_t max_iterations = 200);

}  // namespace gema::expfam
