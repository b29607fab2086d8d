#include "gema/syz.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gema/expfam.hpp"

namespace gema::syz {

namespace {

void require_weights(const Eigen::VectorXd& w, Eigen::Index n) {
    if (w.size() != n) throw DimensionMismatch("weight vector and coordinates differ in length");
    if (n == 0) throw DimensionMismatch("no coordinates");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(w[i] > 0.0)) throw DomainError("weights must be positive");
}

void require_interior(const MomentImage& eta) {
    if (eta.eta.size() == 0) throw DimensionMismatch("empty moment image");
    for (Eigen::Index i = 0; i < eta.eta.size(); ++i)
        if (!(eta.eta[i] > 0.0)) throw BoundaryError("eta_" + std::to_string(i) + " is on the simplex boundary");
    if (std::abs(eta.eta.sum() - 1.0) > 1e-9) throw DomainError("moment image does not sum to 1");
}

}  // namespace

Eigen::VectorXd weight_vector(const bhk::WeightSystem& ws) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(ws.weights.size()));
    for (std::size_t i = 0; i < ws.weights.size(); ++i) w[static_cast<Eigen::Index>(i)] = static_cast<double>(ws.weights[i]);
    return w;
}

MomentImage moment_map(const WeightedProjectivePoint& p) {
    require_weights(p.w, p.z.size());
    const Eigen::VectorXd m = p.w.cwiseProduct(p.z.cwiseAbs2());
    const double total = m.sum();
    if (!(total > 0.0)) throw ZeroVector("the moment map is undefined at z = 0");
    return MomentImage{m / total};
}

WeightedProjectivePoint act(const WeightedProjectivePoint& p, Complex t) {
    require_weights(p.w, p.z.size());
    if (t == Complex(0.0, 0.0)) throw DomainError("t must be nonzero");
    WeightedProjectivePoint out = p;
    for (Eigen::Index i = 0; i < p.z.size(); ++i) out.z[i] *= std::pow(t, p.w[i]);
    return out;
}

WeightedProjectivePoint rotate_phases(const WeightedProjectivePoint& p, const Eigen::VectorXd& phi) {
    if (phi.size() != p.z.size()) throw DimensionMismatch("one phase per coordinate");
    WeightedProjectivePoint out = p;
    for (Eigen::Index i = 0; i < p.z.size(); ++i) out.z[i] *= std::polar(1.0, phi[i]);
    return out;
}

WeightedProjectivePoint canonical_representative(const WeightedProjectivePoint& p) {
    require_weights(p.w, p.z.size());
    std::vector<double> logs, ws;
    for (Eigen::Index i = 0; i < p.z.size(); ++i) {
        const double m = std::norm(p.z[i]);
        if (m > 0.0) {
            logs.push_back(std::log(p.w[i] * m));
            ws.push_back(p.w[i]);
        }
    }
    if (logs.empty()) throw ZeroVector("z = 0 has no representative");

    // g(lambda) = log sum_j w_j |z_j|^2 e^{2 w_j lambda} is convex and increasing,
    // so Newton converges monotonically once it lands right of the root.
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        double shift = -INFINITY;
        for (std::size_t j = 0; j < logs.size(); ++j) shift = std::max(shift, logs[j] + 2.0 * ws[j] * lambda);
        double s = 0.0, ds = 0.0;
        for (std::size_t j = 0; j < logs.size(); ++j) {
            const double e = std::exp(logs[j] + 2.0 * ws[j] * lambda - shift);
            s += e;
            ds += 2.0 * ws[j] * e;
        }
        const double g = shift + std::log(s);
        const double step = g / (ds / s);
        lambda -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(lambda))) break;
    }
    WeightedProjectivePoint out = p;
    for (Eigen::Index i = 0; i < p.z.size(); ++i) out.z[i] *= std::exp(p.w[i] * lambda);
    return out;
}

MomentImage reduced_moment_map(const WeightedProjectivePoint& p) { return moment_map(canonical_representative(p)); }

bool SlicePolytope::empty() const {
    if (w.size() == 0) return true;
    const double lo = w.minCoeff(), hi = w.maxCoeff();
    if (lo == hi) return lo != level;
    return !(lo < level && level < hi);
}

Eigen::MatrixXd SlicePolytope::vertices() const {
    std::vector<Eigen::VectorXd> vs;
    const Eigen::Index n = w.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w[i] == level) vs.push_back(Eigen::VectorXd::Unit(n, i));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (w[i] < level && level < w[j]) {
                // (1 - t) w_i + t w_j = level on the edge e_i -- e_j.
                const double t = (level - w[i]) / (w[j] - w[i]);
                Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
                v[i] = 1.0 - t;
                v[j] = t;
                vs.push_back(v);
            }
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(vs.size()), n);
    for (std::size_t k = 0; k < vs.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = vs[k].transpose();
    return out;
}

SlicePolytope make_slice(const bhk::WeightSystem& ws, std::optional<double> level) {
    if (ws.degree <= 0) throw DomainError("degree must be positive");
    SlicePolytope s;
    s.w = weight_vector(ws);
    s.degree = static_cast<double>(ws.degree);
    s.level = level.value_or(1.0 / s.degree);
    return s;
}

bool slice_membership(const MomentImage& eta, const SlicePolytope& s, double tol) {
    if (eta.eta.size() != s.w.size()) return false;
    if (!(eta.eta.array() > 0.0).all()) return false;
    if (std::abs(eta.eta.sum() - 1.0) > tol) return false;
    return std::abs(s.w.dot(eta.eta) - s.level) <= tol;
}

std::vector<MomentImage> sample_slice(const SlicePolytope& s, std::size_t count, std::uint64_t seed) {
    if (s.empty()) throw DomainError("the slice polytope is empty");
    const Eigen::MatrixXd v = s.vertices();
    std::vector<MomentImage> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Rng rng = make_stream(seed, "syz.slice", k);
        Eigen::VectorXd lam(v.rows());
        for (Eigen::Index i = 0; i < lam.size(); ++i) lam[i] = -std::log(1.0 - uniform(rng));
        lam /= lam.sum();
        out.push_back(MomentImage{v.transpose() * lam});
    }
    return out;
}

std::vector<WeightedProjectivePoint> sample_fiber(const MomentImage& eta, const Eigen::VectorXd& w,
                                                  std::size_t count, std::uint64_t seed) {
    require_interior(eta);
    require_weights(w, eta.eta.size());
    std::vector<WeightedProjectivePoint> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Rng rng = make_stream(seed, "syz.fiber", k);
        WeightedProjectivePoint p{CVector(eta.eta.size()), w};
        for (Eigen::Index i = 0; i < eta.eta.size(); ++i)
            p.z[i] = std::polar(std::sqrt(eta.eta[i] / w[i]), uniform(rng, 0.0, 2.0 * std::numbers::pi));
        out.push_back(std::move(p));
    }
    return out;
}

CVector phase_direction(const CVector& z, std::size_t k) {
    CVector v = CVector::Zero(z.size());
    v[static_cast<Eigen::Index>(k)] = Complex(0.0, 1.0) * z[static_cast<Eigen::Index>(k)];
    return v;
}

CVector radial_direction(const CVector& z, std::size_t k) {
    CVector v = CVector::Zero(z.size());
    v[static_cast<Eigen::Index>(k)] = z[static_cast<Eigen::Index>(k)];
    return v;
}

double symplectic_pairing(const CVector& u, const CVector& v) {
    if (u.size() != v.size()) throw DimensionMismatch("tangent vectors differ in length");
    return u.dot(v).imag();  // Eigen's dot conjugates the left argument
}

double isotropy_residual(const WeightedProjectivePoint& p, std::size_t tangent_pairs, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(p.z.size());
    std::vector<CVector> dirs;
    for (std::size_t k = 0; k < n; ++k) dirs.push_back(phase_direction(p.z, k));
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(symplectic_pairing(dirs[j], dirs[k])));
    for (std::size_t s = 0; s < tangent_pairs; ++s) {
        Rng rng = make_stream(seed, "syz.isotropy", s);
        CVector u = CVector::Zero(p.z.size()), v = CVector::Zero(p.z.size());
        for (std::size_t k = 0; k < n; ++k) {
            u += uniform(rng, -1.0, 1.0) * dirs[k];
            v += uniform(rng, -1.0, 1.0) * dirs[k];
        }
        worst = std::max(worst, std::abs(symplectic_pairing(u, v)));
    }
    return worst;
}

FiberDimension hypersurface_fiber_dimension(const bhk::ExponentMatrix& e, const bhk::WeightSystem& ws,
                                            const MomentImage& eta, std::uint64_t seed, std::size_t starts) {
    const auto n = static_cast<Eigen::Index>(e.size());
    if (eta.eta.size() != n || static_cast<Eigen::Index>(ws.weights.size()) != n) {
        throw DimensionMismatch("exponent matrix, weights and eta differ in size");
    }
    require_interior(eta);
    const Eigen::VectorXd w = weight_vector(ws);
    require_weights(w, n);

    Eigen::MatrixXd ex(n, n);
    Eigen::VectorXd coeff(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        double c = 1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            ex(r, j) = static_cast<double>(e(static_cast<std::size_t>(r), static_cast<std::size_t>(j)));
            c *= std::pow(std::sqrt(eta.eta[j] / w[j]), ex(r, j));
        }
        coeff[r] = c;
    }
    const double scale = coeff.sum();

    // W(phi) = sum_r c_r e^{i (E phi)_r}; returns W and fills the real 2 x n Jacobian.
    auto evaluate = [&](const Eigen::VectorXd& phi, Eigen::MatrixXd& jac) {
        const Eigen::VectorXd theta = ex * phi;
        Complex W(0.0, 0.0);
        jac.setZero(2, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            const Complex term = coeff[r] * std::polar(1.0, theta[r]);
            W += term;
            const Complex dterm = Complex(0.0, 1.0) * term;
            for (Eigen::Index j = 0; j < n; ++j) {
                jac(0, j) += ex(r, j) * dterm.real();
                jac(1, j) += ex(r, j) * dterm.imag();
            }
        }
        return W;
    };

    for (std::size_t s = 0; s < starts; ++s) {
        Rng rng = make_stream(seed, "syz.newton", s);
        Eigen::VectorXd phi(n);
        for (Eigen::Index j = 0; j < n; ++j) phi[j] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        Eigen::MatrixXd jac;
        Complex W = evaluate(phi, jac);
        for (int it = 0; it < 100 && std::abs(W) > 1e-14 * scale; ++it) {
            const Eigen::Vector2d f(W.real(), W.imag());
            phi -= Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(jac).solve(f);
            W = evaluate(phi, jac);
        }
        if (!(std::abs(W) <= 1e-12 * scale)) continue;

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (Eigen::Index k = 0; k < sv.size(); ++k)
            if (sv[k] > 1e-8 * scale) ++rank;
        FiberDimension out;
        out.rank = rank;
        out.dimension = static_cast<int>(n) - 1 - rank;
        out.residual = std::abs(W);
        out.start = s;
        return out;
    }
    std::ostringstream os;
    os << "no point of W = 0 found over this eta from " << starts << " starts";
    throw NoSolutionFound(os.str());
}

TorusFiber dual_fiber(const TorusFiber& f) {
    const Eigen::MatrixXd& b = f.lattice_basis;
    if (b.rows() != b.cols() || b.rows() == 0) throw SingularBasis("lattice basis must be square");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (!lu.isInvertible()) throw SingularBasis("lattice basis is singular");
    return TorusFiber{lu.inverse().transpose()};
}

Eigen::MatrixXd pairing_matrix(const TorusFiber& f, const TorusFiber& dual) {
    return f.lattice_basis.transpose() * dual.lattice_basis;
}

exact::RationalMatrix dual_basis_exact(const exact::RationalMatrix& basis) {
    for (const auto& row : basis)
        if (row.size() != basis.size()) throw SingularBasis("lattice basis must be square");
    exact::RationalMatrix inv;
    if (basis.empty() || !exact::invert(basis, inv)) throw SingularBasis("lattice basis is singular");
    return exact::transpose(inv);
}

Eigen::VectorXd legendre_chart(const MomentImage& eta) { return expfam::natural_params(expfam::MeanPoint{eta.eta}); }

}  // namespace gema::syz
