#include "gema/potentials.hpp"

#include <charconv>
#include <cmath>

#include "gema/cones.hpp"

namespace gema::potentials {

Potential quadratic(std::size_t dim) {
    Potential p;
    p.name = "quadratic";
    p.dim = dim;
    p.eval = [](const Point& x) { return 0.5 * x.squaredNorm(); };
    p.gradient = [](const Point& x) { return x; };
    p.hessian = [dim](const Point&) {
        return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    };
    p.third = [dim](const Point&) { return hessian::Tensor3(dim); };
    return p;
}

Eigen::VectorXd simplex_point(const Point& chart) {
    Eigen::VectorXd eta(chart.size() + 1);
    eta[0] = 1.0 - chart.sum();
    eta.tail(chart.size()) = chart;
    return eta;
}

Potential simplex_entropy(std::size_t n) {
    Potential p;
    p.name = "simplex-entropy";
    p.dim = n;
    p.domain = [](const Point& x) { return (x.array() > 0.0).all() && x.sum() < 1.0; };
    p.eval = [](const Point& x) {
        const Eigen::VectorXd eta = simplex_point(x);
        return (eta.array() * eta.array().log()).sum();
    };
    p.gradient = [](const Point& x) {
        const double eta0 = 1.0 - x.sum();
        return Point(x.array().log() - std::log(eta0));
    };
    p.hessian = [](const Point& x) {
        const double eta0 = 1.0 - x.sum();
        Eigen::MatrixXd h = Eigen::MatrixXd::Constant(x.size(), x.size(), 1.0 / eta0);
        h.diagonal().array() += x.array().inverse();
        return h;
    };
    p.third = [n](const Point& x) {
        const double eta0 = 1.0 - x.sum();
        hessian::Tensor3 t(n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) t(a, b, c) = 1.0 / (eta0 * eta0);
        for (std::size_t a = 0; a < n; ++a) {
            const double e = x[static_cast<Eigen::Index>(a)];
            t(a, a, a) -= 1.0 / (e * e);
        }
        return t;
    };
    return p;
}

namespace {

// (eta_1, ..., eta_n) = softmax with an implicit theta_0 = 0.
Eigen::VectorXd free_softmax(const Point& theta) {
    const double shift = std::max(0.0, theta.size() ? theta.maxCoeff() : 0.0);
    const Eigen::ArrayXd e = (theta.array() - shift).exp();
    return e / (std::exp(-shift) + e.sum());
}

}  // namespace

Potential softmax(std::size_t n) {
    Potential p;
    p.name = "softmax";
    p.dim = n;
    p.eval = [](const Point& theta) {
        const double shift = std::max(0.0, theta.size() ? theta.maxCoeff() : 0.0);
        return shift + std::log(std::exp(-shift) + (theta.array() - shift).exp().sum());
    };
    p.gradient = [](const Point& theta) { return Point(free_softmax(theta)); };
    p.hessian = [](const Point& theta) {
        const Eigen::VectorXd eta = free_softmax(theta);
        Eigen::MatrixXd h = -eta * eta.transpose();
        h.diagonal() += eta;
        return h;
    };
    p.third = [n](const Point& theta) {
        const Eigen::VectorXd eta = free_softmax(theta);
        hessian::Tensor3 t(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    const double ei = eta[static_cast<Eigen::Index>(i)];
                    const double ej = eta[static_cast<Eigen::Index>(j)];
                    const double ek = eta[static_cast<Eigen::Index>(k)];
                    double v = 2.0 * ei * ej * ek;
                    if (i == j) v -= ei * ek;
                    if (i == k) v -= ei * ej;
                    if (j == k) v -= ei * ej;
                    if (i == j && j == k) v += ei;
                    t(i, j, k) = v;
                }
        return t;
    };
    return p;
}

namespace {

std::size_t parse_suffix(std::string_view name, std::string_view prefix) {
    std::size_t n = 0;
    const auto digits = name.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || n < 1) {
        throw UnknownPotential(std::string(name));
    }
    return n;
}

Point random_simplex_chart(std::size_t n, Rng& rng) {
    // Uniform Dirichlet(1, ..., 1) mixed half-and-half with the barycenter,
    // so every coordinate stays at least 1 / (2(n+1)).
    Eigen::VectorXd e(static_cast<Eigen::Index>(n + 1));
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = -std::log(1.0 - uniform(rng));
    e /= e.sum();
    const Eigen::VectorXd eta = 0.5 * e.array() + 0.5 / static_cast<double>(n + 1);
    return eta.tail(static_cast<Eigen::Index>(n));
}

template <class Scalar>
GemaModel logdet_model(Eigen::Index n) {
    GemaModel m;
    m.potential = cones::logdet_potential<Scalar>(n);
    const bool complex = !std::is_same_v<Scalar, double>;
    const double power = complex ? 2.0 * static_cast<double>(n) : static_cast<double>(n + 1);
    m.ma_density = [n, power](const Point& c) {
        const double det = std::real(cones::from_coordinates<Scalar>(c, n).determinant());
        return cones::ma_constant<Scalar>(n) * std::pow(det, -power);
    };
    m.sample = [n](Rng& rng) { return cones::to_coordinates<Scalar>(cones::random_cone_point<Scalar>(n, rng)); };
    return m;
}

}  // namespace

GemaModel make_model(std::string_view name, std::size_t dim) {
    GemaModel m;
    if (name == "quadratic") {
        m.potential = quadratic(dim);
        m.ma_density = [](const Point&) { return 1.0; };
        m.sample = [dim](Rng& rng) {
            Point x(static_cast<Eigen::Index>(dim));
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform(rng, -2.0, 2.0);
            return x;
        };
    } else if (name == "simplex-entropy") {
        m.potential = simplex_entropy(dim);
        m.ma_density = [](const Point& x) { return 1.0 / simplex_point(x).prod(); };
        m.sample = [dim](Rng& rng) { return random_simplex_chart(dim, rng); };
    } else if (name == "softmax") {
        m.potential = softmax(dim);
        // Legendre dual of the entropy case: the product of all n+1 probabilities.
        m.ma_density = [](const Point& theta) {
            const Eigen::VectorXd eta = free_softmax(theta);
            return eta.prod() * (1.0 - eta.sum());
        };
        m.sample = [dim](Rng& rng) {
            Point x(static_cast<Eigen::Index>(dim));
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform(rng, -2.0, 2.0);
            return x;
        };
    } else if (name.starts_with("logdet-complex-")) {
        m = logdet_model<cones::Complex>(static_cast<Eigen::Index>(parse_suffix(name, "logdet-complex-")));
    } else if (name.starts_with("logdet-")) {
        m = logdet_model<double>(static_cast<Eigen::Index>(parse_suffix(name, "logdet-")));
    } else {
        throw UnknownPotential(std::string(name));
    }
    if (m.potential.dim == 0) throw UnknownPotential(std::string(name) + " with dimension 0");
    return m;
}

}  // namespace gema::potentials
