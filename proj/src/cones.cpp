#include "gema/cones.hpp"

#include <cmath>
#include <memory>
#include <type_traits>

namespace gema::cones {

namespace {

template <class Scalar>
constexpr bool is_complex_v = !std::is_same_v<Scalar, double>;

template <class Scalar>
Matrix<Scalar> hermitian_part(const Matrix<Scalar>& m) {
    return (m + m.adjoint()) / 2.0;
}

template <class Scalar, class F>
Matrix<Scalar> apply_spectral(const Matrix<Scalar>& m, F f) {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m);
    const Eigen::VectorXd mapped = es.eigenvalues().unaryExpr(f);
    Matrix<Scalar> out = es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().adjoint();
    return hermitian_part<Scalar>(out);
}

template <class Scalar>
void require_same_shape(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("matrix shapes differ");
    }
}

template <class Scalar>
Scalar random_scalar(Rng& rng) {
    if constexpr (is_complex_v<Scalar>) {
        return Scalar(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    } else {
        return uniform(rng, -1.0, 1.0);
    }
}

}  // namespace

template <class Scalar>
void require_hermitian(const Matrix<Scalar>& x) {
    if (x.rows() != x.cols()) throw NotSymmetric("matrix is not square");
    if (x.size() == 0) return;
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if ((x - x.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw NotSymmetric(is_complex_v<Scalar> ? "matrix is not Hermitian" : "matrix is not symmetric");
    }
}

template <class Scalar>
bool in_cone(const Matrix<Scalar>& x) {
    require_hermitian(x);
    if (x.size() == 0 || !x.allFinite()) return false;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(x, Eigen::EigenvaluesOnly);
    return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
}

template <class Scalar>
ConePoint<Scalar>::ConePoint(Matrix<Scalar> x) : x_(hermitian_part<Scalar>(x)) {
    if (!in_cone(x)) throw NotInCone("matrix is not positive definite");
}

template <class Scalar>
double koszul_potential(const ConePoint<Scalar>& x) {
    Eigen::LLT<Matrix<Scalar>> llt(x.matrix());
    if (llt.info() != Eigen::Success) throw NotInCone("Cholesky factorization failed");
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < x.n(); ++i) logdet += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
    return -logdet;
}

template <class Scalar>
double cone_metric(const ConePoint<Scalar>& x, const Matrix<Scalar>& v, const Matrix<Scalar>& w) {
    require_same_shape<Scalar>(x.matrix(), v);
    require_same_shape<Scalar>(x.matrix(), w);
    Eigen::LLT<Matrix<Scalar>> llt(x.matrix());
    const Matrix<Scalar> a = llt.solve(v);
    const Matrix<Scalar> b = llt.solve(w);
    return std::real((a * b).trace());
}

template <class Scalar>
double ma_constant(Eigen::Index n) {
    const double offdiag = static_cast<double>(n * (n - 1) / 2);
    return std::pow(2.0, is_complex_v<Scalar> ? 2.0 * offdiag : offdiag);
}

template <class Scalar>
MaCheck cone_ma_check(const ConePoint<Scalar>& x, std::optional<double> h) {
    const Eigen::Index n = x.n();
    const hessian::Potential p = logdet_potential<Scalar>(n).without_closed_forms();
    const Eigen::MatrixXd hess = hessian::fd_hessian(p, to_coordinates<Scalar>(x.matrix()), h);
    MaCheck out;
    out.det_hess = (0.5 * (hess + hess.transpose())).determinant();
    const double det = std::exp(-koszul_potential(x));
    const double power = is_complex_v<Scalar> ? 2.0 * static_cast<double>(n) : static_cast<double>(n + 1);
    out.target = ma_constant<Scalar>(n) * std::pow(det, -power);
    return out;
}

template <class Scalar>
ConePoint<Scalar> geodesic(const ConePoint<Scalar>& x, const Matrix<Scalar>& v, double t) {
    require_same_shape<Scalar>(x.matrix(), v);
    require_hermitian(v);
    const Matrix<Scalar> root = apply_spectral<Scalar>(x.matrix(), [](double l) { return std::sqrt(l); });
    const Matrix<Scalar> inv_root =
        apply_spectral<Scalar>(x.matrix(), [](double l) { return 1.0 / std::sqrt(l); });
    const Matrix<Scalar> m = hermitian_part<Scalar>(inv_root * v * inv_root);
    const Matrix<Scalar> e = apply_spectral<Scalar>(m, [t](double l) { return std::exp(t * l); });
    return ConePoint<Scalar>(root * e * root);
}

template <class Scalar>
Matrix<Scalar> jordan_product(const Matrix<Scalar>& x, const Matrix<Scalar>& y) {
    require_same_shape<Scalar>(x, y);
    if (x.rows() != x.cols()) throw DimensionMismatch("Jordan product needs square matrices");
    return (x * y + y * x) / 2.0;
}

template <class Scalar>
double trace_form(const Matrix<Scalar>& x, const Matrix<Scalar>& y) {
    require_same_shape<Scalar>(x, y);
    if (x.rows() != x.cols()) throw DimensionMismatch("trace form needs square matrices");
    return std::real((x * y).trace());
}

template <class Scalar>
std::size_t coordinate_count(Eigen::Index n) {
    const auto nn = static_cast<std::size_t>(n);
    return is_complex_v<Scalar> ? nn * nn : nn * (nn + 1) / 2;
}

template <class Scalar>
std::vector<Matrix<Scalar>> coordinate_basis(Eigen::Index n) {
    std::vector<Matrix<Scalar>> basis;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            Matrix<Scalar> b = Matrix<Scalar>::Zero(n, n);
            if (i == j) {
                b(i, i) = 1.0;
                basis.push_back(b);
                continue;
            }
            b(i, j) = b(j, i) = 1.0;
            basis.push_back(b);
            if constexpr (is_complex_v<Scalar>) {
                Matrix<Scalar> c = Matrix<Scalar>::Zero(n, n);
                c(i, j) = Scalar(0.0, 1.0);
                c(j, i) = Scalar(0.0, -1.0);
                basis.push_back(c);
            }
        }
    return basis;
}

template <class Scalar>
Matrix<Scalar> from_coordinates(const hessian::Point& c, Eigen::Index n) {
    if (static_cast<std::size_t>(c.size()) != coordinate_count<Scalar>(n)) {
        throw DimensionMismatch("coordinate vector has the wrong length");
    }
    Matrix<Scalar> x(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            if (i == j) {
                x(i, i) = c[k++];
                continue;
            }
            if constexpr (is_complex_v<Scalar>) {
                x(i, j) = Scalar(c[k], c[k + 1]);
                k += 2;
            } else {
                x(i, j) = c[k++];
            }
            x(j, i) = Eigen::numext::conj(x(i, j));
        }
    return x;
}

template <class Scalar>
hessian::Point to_coordinates(const Matrix<Scalar>& x) {
    const Eigen::Index n = x.rows();
    hessian::Point c(static_cast<Eigen::Index>(coordinate_count<Scalar>(n)));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            if (i == j) {
                c[k++] = std::real(x(i, i));
            } else if constexpr (is_complex_v<Scalar>) {
                c[k++] = std::real(x(i, j));
                c[k++] = std::imag(x(i, j));
            } else {
                c[k++] = std::real(x(i, j));
            }
        }
    return c;
}

template <class Scalar>
hessian::Potential logdet_potential(Eigen::Index n) {
    hessian::Potential p;
    p.name = std::string(is_complex_v<Scalar> ? "logdet-complex-" : "logdet-") + std::to_string(n);
    p.dim = coordinate_count<Scalar>(n);
    const auto basis = std::make_shared<std::vector<Matrix<Scalar>>>(coordinate_basis<Scalar>(n));

    p.domain = [n](const hessian::Point& c) {
        Eigen::LLT<Matrix<Scalar>> llt(from_coordinates<Scalar>(c, n));
        return llt.info() == Eigen::Success;
    };
    p.eval = [n](const hessian::Point& c) {
        Eigen::LLT<Matrix<Scalar>> llt(from_coordinates<Scalar>(c, n));
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
        return -logdet;
    };

    // P_a = X^{-1} B_a; every derivative is a trace of products of these.
    auto products = [n, basis](const hessian::Point& c) {
        Eigen::LLT<Matrix<Scalar>> llt(from_coordinates<Scalar>(c, n));
        std::vector<Matrix<Scalar>> ps;
        ps.reserve(basis->size());
        for (const auto& b : *basis) ps.push_back(llt.solve(b));
        return ps;
    };
    p.gradient = [products](const hessian::Point& c) {
        const auto ps = products(c);
        hessian::Point g(static_cast<Eigen::Index>(ps.size()));
        for (std::size_t a = 0; a < ps.size(); ++a) g[static_cast<Eigen::Index>(a)] = -std::real(ps[a].trace());
        return g;
    };
    p.hessian = [products](const hessian::Point& c) {
        const auto ps = products(c);
        const auto d = static_cast<Eigen::Index>(ps.size());
        Eigen::MatrixXd h(d, d);
        for (Eigen::Index a = 0; a < d; ++a)
            for (Eigen::Index b = 0; b < d; ++b) h(a, b) = std::real((ps[a] * ps[b]).trace());
        return h;
    };
    p.third = [products](const hessian::Point& c) {
        const auto ps = products(c);
        const std::size_t d = ps.size();
        hessian::Tensor3 t(d);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                const Matrix<Scalar> ab = ps[a] * ps[b];
                for (std::size_t c3 = 0; c3 < d; ++c3)
                    t(a, b, c3) = -std::real((ab * ps[c3]).trace()) - std::real((ps[a] * ps[c3] * ps[b]).trace());
            }
        return t;
    };
    return p;
}

template <class Scalar>
Matrix<Scalar> random_cone_point(Eigen::Index n, Rng& rng, double lo, double hi) {
    Matrix<Scalar> a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = random_scalar<Scalar>(rng);
    Eigen::HouseholderQR<Matrix<Scalar>> qr(a);
    const Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(n, n);
    Eigen::VectorXd lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) lambda[i] = uniform(rng, lo, hi);
    return hermitian_part<Scalar>(q * lambda.asDiagonal() * q.adjoint());
}

template <class Scalar>
Matrix<Scalar> random_hermitian(Eigen::Index n, Rng& rng) {
    Matrix<Scalar> a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = random_scalar<Scalar>(rng);
    return hermitian_part<Scalar>(a);
}

double CartanReport::max_residual() const {
    return std::max({commutativity, associativity, wdvv, unit, invariance, compatibility});
}

CartanReport cartan_frobenius_check(Eigen::Index n, std::size_t samples, std::uint64_t seed) {
    if (n < 2) throw DimensionMismatch("Cartan check needs n >= 2");
    const auto d = static_cast<std::size_t>(n);
    std::vector<RealMatrix> basis;
    for (Eigen::Index i = 0; i < n; ++i) {
        RealMatrix e = RealMatrix::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(e);
    }

    Eigen::MatrixXd gram(n, n);
    hessian::Tensor3 a(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = trace_form(basis[i], basis[j]);
            const RealMatrix prod = jordan_product(basis[i], basis[j]);
            for (std::size_t k = 0; k < d; ++k) a(i, j, k) = trace_form(prod, basis[k]);
        }
    const hessian::Metric g(gram);
    const hessian::MultiplicationTable table = hessian::structure_constants(g, a);

    CartanReport report;
    report.wdvv = hessian::wdvv_residual(table);
    report.compatibility = hessian::compatibility_residual(g, a, table);
    report.gram_determinant = gram.determinant();

    Rng rng = make_stream(seed, "cartan");
    auto sample = [&] {
        RealMatrix x = RealMatrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) x(i, i) = uniform(rng, -1.0, 1.0);
        return x;
    };
    const RealMatrix id = RealMatrix::Identity(n, n);
    for (std::size_t s = 0; s < samples; ++s) {
        const RealMatrix x = sample(), y = sample(), z = sample();
        const RealMatrix xy = jordan_product(x, y);
        const RealMatrix yz = jordan_product(y, z);
        report.commutativity = std::max(report.commutativity, (xy - jordan_product(y, x)).cwiseAbs().maxCoeff());
        report.associativity = std::max(
            report.associativity, (jordan_product(xy, z) - jordan_product(x, yz)).cwiseAbs().maxCoeff());
        report.unit = std::max(report.unit, (jordan_product(id, x) - x).cwiseAbs().maxCoeff());
        report.invariance = std::max(report.invariance, std::abs(trace_form(xy, z) - trace_form(x, yz)));
    }
    return report;
}

Eigen::MatrixXd cartan_torus_metric(Eigen::Index n, const hessian::Point& u) {
    if (u.size() != n - 1) throw DimensionMismatch("torus coordinates must have n - 1 entries");
    Eigen::VectorXd a(n);
    a.head(n - 1) = u;
    a[n - 1] = -u.sum();
    const RealMatrix x = a.array().exp().matrix().asDiagonal();
    const ConePoint<double> point(x);
    std::vector<RealMatrix> tangents;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        RealMatrix t = RealMatrix::Zero(n, n);
        t(k, k) = x(k, k);
        t(n - 1, n - 1) = -x(n - 1, n - 1);
        tangents.push_back(t);
    }
    Eigen::MatrixXd g(n - 1, n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        for (Eigen::Index j = 0; j + 1 < n; ++j) g(i, j) = cone_metric(point, tangents[i], tangents[j]);
    return g;
}

double cartan_torus_curvature(Eigen::Index n, const hessian::Point& u, double h) {
    return hessian::max_riemann_fd([n](const hessian::Point& v) { return cartan_torus_metric(n, v); }, u, h);
}

ConeTorus torus_from_cone(const RealMatrix& y) {
    if (!in_cone(y)) throw NotInCone("lattice matrix is not positive definite");
    return ConeTorus{y, y.determinant()};
}

ComplexMatrix embed_quaternionic(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != a.cols() || a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("quaternionic parts must be square and of equal size");
    }
    const Eigen::Index n = a.rows();
    ComplexMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = a;
    out.topRightCorner(n, n) = b;
    out.bottomLeftCorner(n, n) = -b.conjugate();
    out.bottomRightCorner(n, n) = a.conjugate();
    return out;
}

#define GEMA_INSTANTIATE_CONES(S)                                                             \
    template class ConePoint<S>;                                                              \
    template void require_hermitian<S>(const Matrix<S>&);                                     \
    template bool in_cone<S>(const Matrix<S>&);                                               \
    template double koszul_potential<S>(const ConePoint<S>&);                                 \
    template double cone_metric<S>(const ConePoint<S>&, const Matrix<S>&, const Matrix<S>&);  \
    template double ma_constant<S>(Eigen::Index);                                             \
    template MaCheck cone_ma_check<S>(const ConePoint<S>&, std::optional<double>);            \
    template ConePoint<S> geodesic<S>(const ConePoint<S>&, const Matrix<S>&, double);         \
    template Matrix<S> jordan_product<S>(const Matrix<S>&, const Matrix<S>&);                 \
    template double trace_form<S>(const Matrix<S>&, const Matrix<S>&);                        \
    template std::size_t coordinate_count<S>(Eigen::Index);                                   \
    template std::vector<Matrix<S>> coordinate_basis<S>(Eigen::Index);                        \
    template Matrix<S> from_coordinates<S>(const hessian::Point&, Eigen::Index);              \
    template hessian::Point to_coordinates<S>(const Matrix<S>&);                              \
    template hessian::Potential logdet_potential<S>(Eigen::Index);                            \
    template Matrix<S> random_cone_point<S>(Eigen::Index, Rng&, double, double);              \
    template Matrix<S> random_hermitian<S>(Eigen::Index, Rng&);

GEMA_INSTANTIATE_CONES(double)
GEMA_INSTANTIATE_CONES(Complex)

#undef GEMA_INSTANTIATE_CONES

}  // namespace gema::cones
