#include "gema/hessian_core.hpp"

#include <array>
#include <span>
#include <sstream>
#include <utility>

namespace gema::hessian {

namespace {

struct Stencil {
    std::span<const int> offsets;
    std::span<const double> weights;
};

constexpr std::array<int, 4> kFirstOffsets{-2, -1, 1, 2};
constexpr std::array<double, 4> kFirstWeights{1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
constexpr std::array<int, 5> kSecondOffsets{-2, -1, 0, 1, 2};
constexpr std::array<double, 5> kSecondWeights{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12,
                                               -1.0 / 12};
constexpr std::array<int, 6> kThirdOffsets{-3, -2, -1, 1, 2, 3};
constexpr std::array<double, 6> kThirdWeights{1.0 / 8, -1.0, 13.0 / 8, -13.0 / 8, 1.0, -1.0 / 8};

Stencil stencil_for(std::size_t order) {
    switch (order) {
        case 1: return {kFirstOffsets, kFirstWeights};
        case 2: return {kSecondOffsets, kSecondWeights};
        case 3: return {kThirdOffsets, kThirdWeights};
        default: throw DimensionMismatch("finite-difference order above 3 is not supported");
    }
}

std::string describe(const Point& x) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

void require_interior(const Potential& p, const Point& x) {
    if (static_cast<std::size_t>(x.size()) != p.dim) {
        throw DimensionMismatch("point has dimension " + std::to_string(x.size()) +
                                ", potential " + p.name + " expects " + std::to_string(p.dim));
    }
    if (!p.contains(x)) throw DomainError(p.name + ": point " + describe(x) + " outside domain");
}

double checked_eval(const Potential& p, const Point& x) {
    if (!p.contains(x)) {
        throw DomainError(p.name + ": stencil point " + describe(x) + " leaves the domain");
    }
    return p.eval(x);
}

// Tensor product of per-axis stencils, accumulated depth-first in axis order.
double accumulate(const Potential& p, Point& y, const std::vector<std::pair<Eigen::Index, Stencil>>& axes,
                  std::size_t level, double h) {
    if (level == axes.size()) return checked_eval(p, y);
    const auto& [axis, st] = axes[level];
    const double base = y[axis];
    double sum = 0.0;
    for (std::size_t k = 0; k < st.offsets.size(); ++k) {
        y[axis] = base + st.offsets[k] * h;
        sum += st.weights[k] * accumulate(p, y, axes, level + 1, h);
    }
    y[axis] = base;
    return sum;
}

Eigen::MatrixXd first_derivative(const std::function<Eigen::MatrixXd(const Point&)>& field,
                                 const Point& u, Eigen::Index axis, double h) {
    Eigen::MatrixXd acc;
    Point y = u;
    for (std::size_t k = 0; k < kFirstOffsets.size(); ++k) {
        y[axis] = u[axis] + kFirstOffsets[k] * h;
        Eigen::MatrixXd term = kFirstWeights[k] * field(y);
        if (k == 0) {
            acc = std::move(term);
        } else {
            acc += term;
        }
    }
    return acc / h;
}

}  // namespace

Tensor3 symmetrized(const Tensor3& t) {
    const std::size_t n = t.dim();
    Tensor3 out(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                out(a, b, c) = (t(a, b, c) + t(a, c, b) + t(b, a, c) + t(b, c, a) + t(c, a, b) +
                                t(c, b, a)) /
                               6.0;
    return out;
}

double symmetry_defect(const Tensor3& t) {
    const std::size_t n = t.dim();
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                const double v = t(a, b, c);
                for (double w : {t(a, c, b), t(b, a, c), t(b, c, a), t(c, a, b), t(c, b, a)})
                    worst = std::max(worst, std::abs(v - w));
            }
    return worst;
}

Metric::Metric(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw DimensionMismatch("metric must be square");
    }
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if (entries_.size() > 0 && (entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw NotSymmetric("metric entries are not symmetric");
    }
}

bool Metric::is_positive_definite() const {
    if (!entries_.allFinite()) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(entries_);
    return llt.info() == Eigen::Success;
}

Eigen::MatrixXd Metric::inverse() const {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(entries_);
    if (!entries_.allFinite() || !lu.isInvertible()) {
        throw SingularMetric("metric is not invertible");
    }
    return lu.inverse();
}

bool Potential::contains(const Point& x) const {
    if (!x.allFinite()) return false;
    return !domain || domain(x);
}

Potential Potential::without_closed_forms() const {
    Potential p = *this;
    p.gradient = nullptr;
    p.hessian = nullptr;
    p.third = nullptr;
    return p;
}

double default_step(const Point& x) { return 1e-3 * std::max(1.0, x.norm()); }

double fd_partial(const Potential& p, const Point& x, const std::vector<std::size_t>& indices,
                  double h) {
    if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
    std::vector<std::pair<Eigen::Index, std::size_t>> counts;
    for (std::size_t i : indices) {
        if (i >= p.dim) throw DimensionMismatch("derivative index out of range");
        auto it = std::find_if(counts.begin(), counts.end(),
                               [&](const auto& c) { return c.first == static_cast<Eigen::Index>(i); });
        if (it == counts.end()) {
            counts.emplace_back(static_cast<Eigen::Index>(i), 1);
        } else {
            ++it->second;
        }
    }
    std::vector<std::pair<Eigen::Index, Stencil>> axes;
    for (const auto& [axis, order] : counts) axes.emplace_back(axis, stencil_for(order));
    Point y = x;
    return accumulate(p, y, axes, 0, h) / std::pow(h, static_cast<double>(indices.size()));
}

namespace {

// True when the stencil box for these indices, doubled, lies in the domain.
// Convexity makes the corners sufficient. Steps that merely fit put stencil
// points next to the boundary, where truncation error is too large to extrapolate.
bool comfortably_inside(const Potential& p, const Point& x, const std::vector<std::size_t>& indices, double h) {
    std::vector<std::pair<Eigen::Index, double>> axes;
    for (std::size_t i : indices) {
        auto it = std::find_if(axes.begin(), axes.end(), [&](const auto& a) { return a.first == static_cast<Eigen::Index>(i); });
        if (it == axes.end()) {
            axes.emplace_back(static_cast<Eigen::Index>(i), 1.0);
        } else {
            it->second += 1.0;
        }
    }
    // Reach of the 1-D stencils: 2h for orders 1 and 2, 3h for order 3.
    for (auto& a : axes) a.second = 2.0 * (a.second >= 3.0 ? 3.0 : 2.0) * h;
    const std::size_t corners = std::size_t{1} << axes.size();
    for (std::size_t mask = 0; mask < corners; ++mask) {
        Point y = x;
        for (std::size_t k = 0; k < axes.size(); ++k) y[axes[k].first] += (mask >> k & 1U) ? axes[k].second : -axes[k].second;
        if (!p.contains(y)) return false;
    }
    return true;
}

// Ridders-style extrapolation over steps h0, h0/r, h0/r^2, ... The fourth-order
// stencils leave even error terms from h^4 upward, so column j removes h^(2j+2).
double extrapolated_partial(const Potential& p, const Point& x, const std::vector<std::size_t>& indices, double h0) {
    constexpr double r = 1.4;
    constexpr int levels = 10;
    std::vector<std::vector<double>> t;
    double best = 0.0, best_err = INFINITY;
    bool have = false;
    // Near the boundary the sequence starts late; it keeps shrinking until
    // `levels` steps fit, down to a floor far below any useful step.
    const double floor = h0 * 1e-6;
    for (double h = h0; h >= floor && static_cast<int>(t.size()) < levels; h /= r) {
        if (!comfortably_inside(p, x, indices, h)) continue;
        const double d = fd_partial(p, x, indices, h);
        std::vector<double> row{d};
        if (!have) {
            best = d;
            have = true;
        }
        for (std::size_t j = 1; j <= t.size(); ++j) {
            const double fac = std::pow(r, static_cast<double>(2 * j + 2));
            const double v = (row[j - 1] * fac - t.back()[j - 1]) / (fac - 1.0);
            const double err = std::max(std::abs(v - row[j - 1]), std::abs(v - t.back()[j - 1]));
            row.push_back(v);
            if (err <= best_err) {
                best_err = err;
                best = v;
            }
        }
        const bool diverging = !t.empty() && t.size() == row.size() - 1 &&
                               std::abs(row.back() - t.back().back()) >= 2.0 * best_err;
        t.push_back(std::move(row));
        if (diverging) break;
    }
    if (!have) throw DomainError(p.name + ": every finite-difference stencil at " + describe(x) + " leaves the domain");
    return best;
}

double partial(const Potential& p, const Point& x, const std::vector<std::size_t>& indices,
               std::optional<double> h) {
    return h ? fd_partial(p, x, indices, *h) : extrapolated_partial(p, x, indices, extrapolation_start(x));
}

}  // namespace

double extrapolation_start(const Point& x) { return 0.05 * std::max(1.0, x.norm()); }

Eigen::MatrixXd fd_hessian(const Potential& p, const Point& x, std::optional<double> h) {
    require_interior(p, x);
    const auto n = static_cast<Eigen::Index>(p.dim);
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = partial(p, x, {static_cast<std::size_t>(i), static_cast<std::size_t>(j)}, h);
    return out;
}

Tensor3 fd_third_raw(const Potential& p, const Point& x, std::optional<double> h) {
    require_interior(p, x);
    Tensor3 out(p.dim);
    for (std::size_t a = 0; a < p.dim; ++a)
        for (std::size_t b = 0; b < p.dim; ++b)
            for (std::size_t c = 0; c < p.dim; ++c) out(a, b, c) = partial(p, x, {a, b, c}, h);
    return out;
}

Metric hessian_metric(const Potential& p, const Point& x, std::optional<double> h) {
    require_interior(p, x);
    Eigen::MatrixXd raw = p.hessian ? p.hessian(x) : fd_hessian(p, x, h);
    Metric g(Eigen::MatrixXd(0.5 * (raw + raw.transpose())));
    if (!g.is_positive_definite()) {
        throw ConvexityError(p.name + ": Hessian at " + describe(x) + " is not positive definite");
    }
    // Cholesky can succeed on a semidefinite matrix perturbed by rounding.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries(), Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 1e-10 * es.eigenvalues().maxCoeff())) {
        throw ConvexityError(p.name + ": Hessian at " + describe(x) + " is numerically degenerate");
    }
    return g;
}

Tensor3 third_tensor(const Potential& p, const Point& x, std::optional<double> h) {
    require_interior(p, x);
    if (p.third) return symmetrized(p.third(x));
    // Only sorted index triples are differenced; the rest are copies.
    Tensor3 out(p.dim);
    for (std::size_t a = 0; a < p.dim; ++a)
        for (std::size_t b = a; b < p.dim; ++b)
            for (std::size_t c = b; c < p.dim; ++c) {
                const double v = partial(p, x, {a, b, c}, h);
                out(a, b, c) = out(a, c, b) = out(b, a, c) = v;
                out(b, c, a) = out(c, a, b) = out(c, b, a) = v;
            }
    return out;
}

double ma_residual(const Potential& p, const Point& x, const std::function<double(const Point&)>& f,
                   std::optional<double> h) {
    const Metric g = hessian_metric(p, x, h);
    return g.entries().determinant() - f(x);
}

MultiplicationTable christoffel(const Metric& g, const Tensor3& a) {
    MultiplicationTable m = structure_constants(g, a);
    MultiplicationTable out(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j)
            for (std::size_t k = 0; k < m.dim(); ++k) out(i, j, k) = 0.5 * m(i, j, k);
    return out;
}

MultiplicationTable structure_constants(const Metric& g, const Tensor3& a) {
    if (g.dim() != a.dim()) throw DimensionMismatch("metric and tensor dimensions differ");
    const Eigen::MatrixXd ginv = g.inverse();
    const std::size_t n = g.dim();
    MultiplicationTable m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t c = 0; c < n; ++c) {
                double s = 0.0;
                for (std::size_t e = 0; e < n; ++e)
                    s += a(i, j, e) * ginv(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(c));
                m(i, j, c) = s;
            }
    return m;
}

Tensor3 lower_index(const Metric& g, const MultiplicationTable& m) {
    if (g.dim() != m.dim()) throw DimensionMismatch("metric and table dimensions differ");
    const std::size_t n = g.dim();
    Tensor3 out(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                double s = 0.0;
                for (std::size_t e = 0; e < n; ++e) s += m(a, b, e) * g(e, c);
                out(a, b, c) = s;
            }
    return out;
}

double compatibility_residual(const Metric& g, const Tensor3& a, const MultiplicationTable& m) {
    if (g.dim() != a.dim() || g.dim() != m.dim()) {
        throw DimensionMismatch("metric, tensor and table dimensions differ");
    }
    const Tensor3 lowered = lower_index(g, m);
    const std::size_t n = g.dim();
    double lowering = 0.0;
    double cyclic = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                lowering = std::max(lowering, std::abs(lowered(i, j, k) - a(i, j, k)));
                cyclic = std::max(cyclic, std::abs(a(i, j, k) - a(j, k, i)));
            }
    return lowering + cyclic;
}

namespace {

double associator_row(const MultiplicationTable& m, std::size_t a, std::size_t b) {
    const std::size_t n = m.dim();
    double worst = 0.0;
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
            double s = 0.0;
            for (std::size_t e = 0; e < n; ++e) s += m(a, b, e) * m(e, c, d) - m(b, c, e) * m(a, e, d);
            worst = std::max(worst, std::abs(s));
        }
    return worst;
}

}  // namespace

double wdvv_residual(const MultiplicationTable& m) {
    const auto n = static_cast<long>(m.dim());
    double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
    for (long ab = 0; ab < n * n; ++ab) {
        worst = std::max(worst, associator_row(m, static_cast<std::size_t>(ab / n),
                                               static_cast<std::size_t>(ab % n)));
    }
    return worst;
}

namespace serial {

double wdvv_residual(const MultiplicationTable& m) {
    double worst = 0.0;
    for (std::size_t a = 0; a < m.dim(); ++a)
        for (std::size_t b = 0; b < m.dim(); ++b) worst = std::max(worst, associator_row(m, a, b));
    return worst;
}

}  // namespace serial

double max_riemann_fd(const std::function<Eigen::MatrixXd(const Point&)>& metric, const Point& u,
                      double h) {
    const auto n = u.size();

    // Gamma(a, b, c) = Gamma^c_ab, flattened into a (n*n) x n matrix for differencing.
    auto gamma = [&](const Point& at) {
        const Eigen::MatrixXd g = metric(at);
        const Eigen::MatrixXd ginv = g.inverse();
        std::vector<Eigen::MatrixXd> dg;
        for (Eigen::Index k = 0; k < n; ++k) dg.push_back(first_derivative(metric, at, k, h));
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b)
                for (Eigen::Index c = 0; c < n; ++c) {
                    double s = 0.0;
                    for (Eigen::Index d = 0; d < n; ++d)
                        s += ginv(c, d) * (dg[a](b, d) + dg[b](a, d) - dg[d](a, b));
                    out(a * n + b, c) = 0.5 * s;
                }
        return out;
    };

    const Eigen::MatrixXd g0 = gamma(u);
    std::vector<Eigen::MatrixXd> dgamma;
    for (Eigen::Index k = 0; k < n; ++k) dgamma.push_back(first_derivative(gamma, u, k, h));

    auto G = [&](Eigen::Index a, Eigen::Index b, Eigen::Index c) { return g0(a * n + b, c); };
    auto dG = [&](Eigen::Index k, Eigen::Index a, Eigen::Index b, Eigen::Index c) {
        return dgamma[k](a * n + b, c);
    };

    double worst = 0.0;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            for (Eigen::Index c = 0; c < n; ++c)
                for (Eigen::Index d = 0; d < n; ++d) {
                    // R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
                    double r = dG(c, d, b, a) - dG(d, c, b, a);
                    for (Eigen::Index e = 0; e < n; ++e) r += G(c, e, a) * G(d, b, e) - G(d, e, a) * G(c, b, e);
                    worst = std::max(worst, std::abs(r));
                }
    return worst;
}

Point integrate_geodesic(const Potential& p, const Point& x, const Point& v, double t, std::size_t steps) {
    if (x.size() != v.size() || static_cast<std::size_t>(x.size()) != p.dim) {
        throw DimensionMismatch("position and velocity must match the potential dimension");
    }
    if (steps == 0) throw DomainError("need at least one step");
    const auto n = x.size();

    // State (position, velocity); acceleration -Gamma^c_ab v^a v^b.
    auto rhs = [&](const Eigen::VectorXd& s) {
        const Point pos = s.head(n), vel = s.tail(n);
        const MultiplicationTable gam = christoffel(hessian_metric(p, pos), third_tensor(p, pos));
        Eigen::VectorXd out(2 * n);
        out.head(n) = vel;
        for (Eigen::Index c = 0; c < n; ++c) {
            double acc = 0.0;
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index b = 0; b < n; ++b)
                    acc += gam(static_cast<std::size_t>(a), static_cast<std::size_t>(b), static_cast<std::size_t>(c)) *
                           vel[a] * vel[b];
            out[n + c] = -acc;
        }
        return out;
    };

    Eigen::VectorXd s(2 * n);
    s << x, v;
    const double dt = t / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const Eigen::VectorXd k1 = rhs(s);
        const Eigen::VectorXd k2 = rhs(s + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(s + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(s + dt * k3);
        s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return s.head(n);
}

}  // namespace gema::hessian
