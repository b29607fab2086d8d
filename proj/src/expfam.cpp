#include "gema/expfam.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gema/potentials.hpp"

namespace gema::expfam {

namespace {

void require_params(const ExponentialFamily& fam, const Vector& theta) {
    if (static_cast<std::size_t>(theta.size()) != fam.num_params()) {
        throw DimensionMismatch("theta has " + std::to_string(theta.size()) + " entries, family has " +
                                std::to_string(fam.num_params()) + " parameters");
    }
}

// log w(x) + C(x) + <theta, F(x)> for every node.
Vector log_terms(const ExponentialFamily& fam, const Vector& theta) {
    require_params(fam, theta);
    Vector t = fam.statistics * theta;
    for (std::size_t x = 0; x < fam.size(); ++x) {
        t[static_cast<Eigen::Index>(x)] += std::log(fam.base_weights[x]) + fam.carrier[x];
    }
    return t;
}

double log_sum_exp(const Vector& t) {
    const double shift = t.maxCoeff();
    if (!std::isfinite(shift)) throw DomainError("log-partition diverges");
    const double psi = shift + std::log((t.array() - shift).exp().sum());
    if (!std::isfinite(psi)) throw DomainError("log-partition diverges");
    return psi;
}

Eigen::MatrixXd covariance(const ExponentialFamily& fam, const Vector& p) {
    const Vector mean = fam.statistics.transpose() * p;
    const Eigen::MatrixXd centered = fam.statistics.rowwise() - mean.transpose();
    return centered.transpose() * p.asDiagonal() * centered;
}

void require_interior(const MeanPoint& eta) {
    if (eta.eta.size() < 1) throw DimensionMismatch("empty mean point");
    for (Eigen::Index i = 0; i < eta.eta.size(); ++i) {
        if (!(eta.eta[i] > 0.0)) {
            std::ostringstream os;
            os << "eta_" << i << " = " << eta.eta[i] << " is on or outside the simplex boundary";
            throw BoundaryError(os.str());
        }
    }
    if (std::abs(eta.eta.sum() - 1.0) > 1e-9) throw DomainError("mean point does not sum to 1");
}

}  // namespace

ExponentialFamily categorical(std::size_t atoms) {
    if (atoms < 2) throw DimensionMismatch("a categorical family needs at least two atoms");
    ExponentialFamily fam;
    fam.space = SampleSpace::Categorical;
    fam.base_weights.assign(atoms, 1.0);
    fam.carrier.assign(atoms, 0.0);
    fam.statistics = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(atoms), static_cast<Eigen::Index>(atoms));
    return fam;
}

ExponentialFamily gauge_fixed(const ExponentialFamily& fam) {
    if (fam.space != SampleSpace::Categorical) throw DomainError("only categorical families carry a gauge");
    if (fam.gauge_fixed) return fam;
    ExponentialFamily out = fam;
    out.statistics = fam.statistics.rightCols(fam.statistics.cols() - 1);
    out.gauge_fixed = true;
    return out;
}

ExponentialFamily finite_family(std::vector<double> base_weights, std::vector<double> carrier,
                                Eigen::MatrixXd statistics) {
    if (base_weights.empty()) throw DimensionMismatch("family has no atoms");
    if (carrier.size() != base_weights.size() ||
        static_cast<std::size_t>(statistics.rows()) != base_weights.size()) {
        throw DimensionMismatch("weights, carrier and statistics disagree on the number of atoms");
    }
    for (double w : base_weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("base weights must be positive and finite");
    for (double c : carrier)
        if (!std::isfinite(c)) throw DomainError("carrier values must be finite");
    if (!statistics.allFinite()) throw DomainError("statistics must be finite");
    ExponentialFamily fam;
    fam.space = SampleSpace::Finite;
    fam.base_weights = std::move(base_weights);
    fam.carrier = std::move(carrier);
    fam.statistics = std::move(statistics);
    return fam;
}

ExponentialFamily quadrature_family(const Vector& lo, const Vector& hi, std::size_t per_axis,
                                    const std::function<bool(const Vector&)>& region,
                                    const std::function<Vector(const Vector&)>& statistics,
                                    const std::function<double(const Vector&)>& carrier) {
    const auto k = lo.size();
    if (hi.size() != k || k == 0 || per_axis == 0) throw DimensionMismatch("bad quadrature box");
    const Vector step = (hi - lo) / static_cast<double>(per_axis);
    const double cell = step.prod();

    std::vector<Vector> centres;
    std::vector<std::size_t> index(static_cast<std::size_t>(k), 0);
    while (true) {
        Vector c(k);
        for (Eigen::Index a = 0; a < k; ++a)
            c[a] = lo[a] + (static_cast<double>(index[static_cast<std::size_t>(a)]) + 0.5) * step[a];
        if (region(c)) centres.push_back(c);
        Eigen::Index a = k - 1;
        while (a >= 0 && ++index[static_cast<std::size_t>(a)] == per_axis) index[static_cast<std::size_t>(a--)] = 0;
        if (a < 0) break;
    }
    if (centres.empty()) throw DomainError("quadrature region contains no cells");

    const Eigen::Index m = statistics(centres.front()).size();
    ExponentialFamily fam;
    fam.space = SampleSpace::Quadrature;
    fam.statistics.resize(static_cast<Eigen::Index>(centres.size()), m);
    fam.nodes.resize(static_cast<Eigen::Index>(centres.size()), k);
    for (std::size_t i = 0; i < centres.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        fam.statistics.row(row) = statistics(centres[i]).transpose();
        fam.nodes.row(row) = centres[i].transpose();
        fam.base_weights.push_back(cell);
        fam.carrier.push_back(carrier(centres[i]));
    }
    return fam;
}

ExponentialFamily simplex_lebesgue_family(std::size_t n, std::size_t per_axis) {
    const auto k = static_cast<Eigen::Index>(n);
    return quadrature_family(
        Vector::Zero(k), Vector::Ones(k), per_axis, [](const Vector& x) { return x.sum() < 1.0; },
        [](const Vector& x) { return x; }, [](const Vector&) { return 0.0; });
}

double log_partition(const ExponentialFamily& fam, const Vector& theta) {
    return log_sum_exp(log_terms(fam, theta));
}

double density(const ExponentialFamily& fam, const Vector& theta, std::size_t node) {
    if (node >= fam.size()) throw DomainError("node " + std::to_string(node) + " is not in the sample space");
    require_params(fam, theta);
    const double psi = log_partition(fam, theta);
    return std::exp(fam.carrier[node] + fam.statistics.row(static_cast<Eigen::Index>(node)).dot(theta) - psi);
}

Vector probabilities(const ExponentialFamily& fam, const Vector& theta) {
    const Vector t = log_terms(fam, theta);
    const double psi = log_sum_exp(t);
    return (t.array() - psi).exp();
}

MeanPoint mean_params(const ExponentialFamily& fam, const Vector& theta) {
    return MeanPoint{fam.statistics.transpose() * probabilities(fam, theta)};
}

Vector natural_params(const MeanPoint& eta) {
    require_interior(eta);
    return eta.eta.array().log();
}

double negative_entropy(const MeanPoint& eta) {
    require_interior(eta);
    return (eta.eta.array() * eta.eta.array().log()).sum();
}

Vector gauge_fix(const Vector& theta) {
    if (theta.size() == 0) return theta;
    return theta.array() - theta[0];
}

hessian::Metric fisher_metric(const ExponentialFamily& fam, const Vector& theta) {
    const Eigen::MatrixXd cov = covariance(fam, probabilities(fam, theta));
    hessian::Metric g(0.5 * (cov + cov.transpose()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries(), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (ev.size() == 0 || !(ev.minCoeff() > 1e-12 * std::max(1.0, ev.maxCoeff()))) {
        throw ConvexityError("Fisher metric is degenerate; fix the gauge theta_0 = 0 first");
    }
    return g;
}

hessian::Potential log_partition_potential(const ExponentialFamily& fam) {
    hessian::Potential p;
    p.name = "log-partition";
    p.dim = fam.num_params();
    p.eval = [fam](const hessian::Point& theta) { return log_partition(fam, theta); };
    return p;
}

DualMaCheck dual_ma_check(const MeanPoint& eta, std::optional<double> h) {
    require_interior(eta);
    const auto n = static_cast<std::size_t>(eta.eta.size() - 1);
    if (n < 1) throw DimensionMismatch("the simplex chart needs at least two atoms");
    const hessian::Potential phi = potentials::simplex_entropy(n).without_closed_forms();
    const Eigen::MatrixXd hess = hessian::fd_hessian(phi, eta.eta.tail(static_cast<Eigen::Index>(n)), h);
    DualMaCheck out;
    out.det_hess = (0.5 * (hess + hess.transpose())).determinant();
    out.target = std::exp(-eta.eta.array().log().sum());
    return out;
}

MomentMatch match_moments(const ExponentialFamily& fam, const Vector& target, double tol,
                          std::size_t max_iterations) {
    if (static_cast<std::size_t>(target.size()) != fam.num_params()) {
        throw DimensionMismatch("target moments have the wrong length");
    }
    MomentMatch out;
    out.theta = Vector::Zero(target.size());
    auto objective = [&](const Vector& theta) { return log_partition(fam, theta) - theta.dot(target); };

    Vector p = probabilities(fam, out.theta);
    Vector grad = fam.statistics.transpose() * p - target;
    double value = objective(out.theta);
    for (; out.iterations < max_iterations; ++out.iterations) {
        out.residual = grad.cwiseAbs().maxCoeff();
        if (out.residual <= tol) return out;

        const Eigen::MatrixXd fisher = covariance(fam, p);
        const Vector step = -Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(fisher).solve(grad);
        const double slope = grad.dot(step);

        bool moved = false;
        for (double t = 1.0; t > 1e-12; t *= 0.5) {
            const Vector trial = out.theta + t * step;
            Vector trial_p, trial_grad;
            double trial_value = 0.0;
            try {
                trial_p = probabilities(fam, trial);
                trial_grad = fam.statistics.transpose() * trial_p - target;
                trial_value = objective(trial);
            } catch (const DomainError&) {
                // Targets on or beyond the boundary push theta to infinity; shorter steps stay finite.
                continue;
            }
            // Near convergence the objective stalls at rounding level; progress on the
            // moment residual is accepted instead.
            if (trial_value <= value + 1e-4 * t * slope ||
                trial_grad.cwiseAbs().maxCoeff() < (1.0 - 1e-4 * t) * out.residual) {
                out.theta = trial;
                p = trial_p;
                grad = trial_grad;
                value = trial_value;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    out.residual = grad.cwiseAbs().maxCoeff();
    if (out.residual <= tol) return out;
    std::ostringstream os;
    os << "moment matching did not converge, residual " << out.residual;
    throw NotInFamily(os.str());
}

}  // namespace gema::expfam
