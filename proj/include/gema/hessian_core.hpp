#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gema/errors.hpp"

namespace gema::hessian {

using Point = Eigen::VectorXd;

/*
 * Dense dim x dim x dim array stored row-major in (a, b, c). The tag makes
 * Tensor3 (all indices down) and MultiplicationTable (last index up) distinct
 * types so that one cannot be passed where the other is expected.
 */
template <class Tag>
class Cube {
   public:
    Cube() = default;
    explicit Cube(std::size_t dim) : dim_(dim), data_(dim * dim * dim, 0.0) {}

    std::size_t dim() const { return dim_; }

    double& operator()(std::size_t a, std::size_t b, std::size_t c) {
        return data_[(a * dim_ + b) * dim_ + c];
    }
    double operator()(std::size_t a, std::size_t b, std::size_t c) const {
        return data_[(a * dim_ + b) * dim_ + c];
    }

    const std::vector<double>& data() const { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    friend bool operator==(const Cube&, const Cube&) = default;

   private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

using Tensor3 = Cube<struct Tensor3Tag>;
using MultiplicationTable = Cube<struct MultiplicationTableTag>;

/// Average over all six index permutations.
Tensor3 symmetrized(const Tensor3& t);

/// max |A_abc - A_sigma(abc)| over all permutations sigma.
double symmetry_defect(const Tensor3& t);

// Symmetric dim x dim matrix g_ij. Positive definiteness is checked where a
// caller needs it (hessian_metric) rather than on construction.
class Metric {
   public:
    Metric() = default;
    explicit Metric(Eigen::MatrixXd entries);

    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    double operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    bool is_positive_definite() const;

    /// Inverse metric g^{ij}; SingularMetric when g is not invertible.
    Eigen::MatrixXd inverse() const;

   private:
    Eigen::MatrixXd entries_;
};

/*
 * A smooth scalar function on an open convex domain. eval and domain are
 * required; the closed-form derivative evaluators are optional and, when
 * present, are preferred by hessian_metric and third_tensor.
 */
struct Potential {
    std::string name;
    std::size_t dim = 0;
    std::function<double(const Point&)> eval;
    std::function<bool(const Point&)> domain;
    std::function<Point(const Point&)> gradient;
    std::function<Eigen::MatrixXd(const Point&)> hessian;
    std::function<Tensor3(const Point&)> third;

    bool contains(const Point& x) const;

    /// Copy with every closed-form derivative dropped, forcing finite differences.
    Potential without_closed_forms() const;
};

/// Fixed finite-difference step for callers that want one: 1e-3 * max(1, |x|).
double default_step(const Point& x);

/*
 * Coarsest step of the extrapolated differences used when no step is given:
 * 0.05 * max(1, |x|), shrunk by 1.4 per level over ten levels.
 */
double extrapolation_start(const Point& x);

/*
 * Fourth-order central finite differences of p.eval. Repeated indices use the
 * dedicated 1-D stencil for that derivative order; distinct indices combine
 * by tensor product. Stencils reach up to 3h from x along each axis, and a
 * DomainError is raised if any evaluation point falls outside the domain.
 */
double fd_partial(const Potential& p, const Point& x, const std::vector<std::size_t>& indices,
                  double h);

/*
 * With an explicit step h the routines below apply fd_partial at that step
 * (DomainError if a stencil leaves the domain). Without one they extrapolate
 * over a decreasing step sequence starting at extrapolation_start(x), which
 * removes most truncation error without driving the step into rounding noise;
 * coarse steps that leave the domain are skipped.
 */

/// Unsymmetrized finite-difference Hessian.
Eigen::MatrixXd fd_hessian(const Potential& p, const Point& x, std::optional<double> h = {});

/// Unsymmetrized finite-difference third derivative, each entry in its own index order.
Tensor3 fd_third_raw(const Potential& p, const Point& x, std::optional<double> h = {});

/*
 * g_ij = d_i d_j p at x, symmetrized as (H + H^T)/2. Uses p.hessian when
 * available, finite differences otherwise. Throws ConvexityError if the
 * result is not positive definite (no regularization is attempted).
 */
Metric hessian_metric(const Potential& p, const Point& x, std::optional<double> h = {});

/// A_abc = d_a d_b d_c p at x, totally symmetrized.
Tensor3 third_tensor(const Potential& p, const Point& x, std::optional<double> h = {});

/// det(Hess p)(x) - f(x).
double ma_residual(const Potential& p, const Point& x, const std::function<double(const Point&)>& f,
                   std::optional<double> h = {});

/// Gamma_ab^c = 1/2 sum_e g^{ce} A_abe (Levi-Civita connection in flat coordinates).
MultiplicationTable christoffel(const Metric& g, const Tensor3& a);

/// A_ab^c = sum_e A_abe g^{ec}. Unlike christoffel there is no factor 1/2.
MultiplicationTable structure_constants(const Metric& g, const Tensor3& a);

/// sum_e m_ab^e g_ec; inverse of structure_constants.
Tensor3 lower_index(const Metric& g, const MultiplicationTable& m);

/*
 * max_abc |sum_e m_ab^e g_ec - A_abc| + max_abc |A_abc - A_bca|.
 * The first term checks g(X o Y, Z) = g(X, Y o Z) given A; the second the
 * cyclic symmetry of A.
 */
double compatibility_residual(const Metric& g, const Tensor3& a, const MultiplicationTable& m);

/// max_abcd |sum_e (m_ab^e m_ec^d - m_bc^e m_ae^d)|. OpenMP-parallel over (a, b).
double wdvv_residual(const MultiplicationTable& m);

/*
 * Largest absolute component of the Riemann tensor R^a_bcd of the metric
 * field u -> metric(u), computed by nested fourth-order central differences
 * (Christoffel symbols from differenced metrics, then differenced again).
 */
double max_riemann_fd(const std::function<Eigen::MatrixXd(const Point&)>& metric, const Point& u,
                      double h);

/*
 * Geodesic of the Hessian metric of p, x'' = -Gamma(x', x'), integrated by
 * classical RK4 from (x, v) over [0, t]. Returns the endpoint.
 */
Point integrate_geodesic(const Potential& p, const Point& x, const Point& v, double t, std::size_t steps);

namespace serial {

/// Single-threaded reference for wdvv_residual; same reduction, same result.
double wdvv_residual(const MultiplicationTable& m);

}  // namespace serial

}  // namespace gema::hessian
