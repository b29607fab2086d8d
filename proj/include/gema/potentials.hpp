#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "gema/hessian_core.hpp"
#include "gema/random.hpp"

namespace gema::potentials {

using hessian::Point;
using hessian::Potential;

/// 1/2 |x|^2 on R^dim.
Potential quadratic(std::size_t dim);

/*
 * Negative entropy sum_{i=0}^{n} eta_i log eta_i on the open simplex, in the
 * chart (eta_1, ..., eta_n) with eta_0 = 1 - sum eta_i.
 */
Potential simplex_entropy(std::size_t n);

/// log(1 + sum_i e^{theta_i}): the categorical log-partition with theta_0 fixed to 0.
Potential softmax(std::size_t n);

/// Full probability vector (eta_0, ..., eta_n) from a simplex chart point.
Eigen::VectorXd simplex_point(const Point& chart);

/*
 * A potential bundled with the right-hand side f of det Hess = f (derived
 * independently of the Hessian code) and a sampler for interior points.
 */
struct GemaModel {
    Potential potential;
    std::function<double(const Point&)> ma_density;
    std::function<Point(Rng&)> sample;
};

/*
 * Names: quadratic, simplex-entropy, softmax (dim = number of free
 * coordinates), logdet-<n> and logdet-complex-<n> (dim ignored).
 * Throws UnknownPotential for anything else.
 */
GemaModel make_model(std::string_view name, std::size_t dim);

}  // namespace gema::potentials
