#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gema/cones.hpp"
#include "gema/hessian_core.hpp"
#include "gema/random.hpp"
#include "oracles.hpp"

using namespace gema;
using cones::ComplexMatrix;
using cones::RealMatrix;

namespace {

template <class M>
double max_abs(const M& m) {
    return m.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE_TEMPLATE("closed-form logdet derivatives match the trace oracle", S, double, std::complex<double>) {
    Rng rng = make_stream(1, "test.cones.derivs");
    for (Eigen::Index n : {2, 3}) {
        const auto p = cones::logdet_potential<S>(n);
        const auto x = cones::random_cone_point<S>(n, rng);
        const auto c = cones::to_coordinates<S>(x);
        CHECK(p.eval(c) == doctest::Approx(-std::log(std::real(x.determinant()))));
        const RealMatrix g = p.hessian(c);
        CHECK(max_abs(g - oracle::logdet_hessian<S>(x)) <= 1e-12 * max_abs(g));
        const auto a = p.third(c);
        const int m = int(c.size());
        double err = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) err = std::max(err, std::abs(a(i, j, k) - oracle::logdet_third<S>(x, i, j, k)));
        CHECK(err <= 1e-12 * a.max_abs());
    }
}

TEST_CASE_TEMPLATE("coordinates roundtrip", S, double, std::complex<double>) {
    Rng rng = make_stream(2, "test.cones.coords");
    const auto x = cones::random_hermitian<S>(3, rng);
    CHECK(max_abs(cones::from_coordinates<S>(cones::to_coordinates<S>(x), 3) - x) == 0.0);
    CHECK(cones::coordinate_count<S>(3) == (std::is_same_v<S, double> ? 6u : 9u));
}

TEST_CASE("Monge-Ampere constants") {
    // det of the Gram matrix of the trace metric at the identity, by the oracle
    for (Eigen::Index n : {2, 3}) {
        CHECK(cones::ma_constant<double>(n) == doctest::Approx(oracle::logdet_hessian<double>(RealMatrix::Identity(n, n)).determinant()));
        CHECK(cones::ma_constant<std::complex<double>>(n) ==
              doctest::Approx(oracle::logdet_hessian<std::complex<double>>(ComplexMatrix::Identity(n, n)).determinant()));
    }
    CHECK(cones::ma_constant<double>(2) == doctest::Approx(2.0));
    CHECK(cones::ma_constant<double>(3) == doctest::Approx(8.0));
}

TEST_CASE_TEMPLATE("det Hess is kappa det(X)^-power", S, double, std::complex<double>) {
    Rng rng = make_stream(3, "test.cones.ma");
    const Eigen::Index n = 2;
    for (int s = 0; s < 5; ++s) {
        const cones::ConePoint<S> x(cones::random_cone_point<S>(n, rng));
        const auto check = cones::cone_ma_check(x);
        CHECK(check.relative_error() <= 1e-7);
    }
}

TEST_CASE_TEMPLATE("closed-form geodesic solves the geodesic ODE", S, double, std::complex<double>) {
    Rng rng = make_stream(4, "test.cones.geo");
    const cones::ConePoint<S> x(cones::random_cone_point<S>(3, rng));
    const auto v = cones::random_hermitian<S>(3, rng);
    const auto end = cones::geodesic(x, v, 0.8).matrix();
    const auto ode = oracle::rk4_cone_geodesic<S>(x.matrix(), v, 0.8, 4000);
    CHECK(max_abs(end - ode) <= 1e-9);
}

TEST_CASE("cone membership") {
    CHECK(cones::in_cone<double>(RealMatrix::Identity(2, 2)));
    CHECK_FALSE(cones::in_cone<double>((RealMatrix(2, 2) << 1, 2, 2, 1).finished()));
    CHECK_THROWS_AS(cones::ConePoint<double>((RealMatrix(2, 2) << 1, 2, 0, 1).finished()), NotSymmetric);
    CHECK_THROWS_AS(cones::ConePoint<double>((RealMatrix(2, 2) << -1, 0, 0, 1).finished()), NotInCone);
}

TEST_CASE("trace form is invariant under the Jordan product") {
    Rng rng = make_stream(5, "test.cones.jordan");
    for (int s = 0; s < 10; ++s) {
        const auto x = cones::random_hermitian<std::complex<double>>(3, rng);
        const auto y = cones::random_hermitian<std::complex<double>>(3, rng);
        const auto z = cones::random_hermitian<std::complex<double>>(3, rng);
        const double lhs = cones::trace_form(cones::jordan_product(x, y), z);
        const double rhs = cones::trace_form(x, cones::jordan_product(y, z));
        CHECK(std::abs(lhs - rhs) <= 1e-13);
    }
}

TEST_CASE("the Jordan algebra of symmetric matrices is not associative") {
    const RealMatrix x = (RealMatrix(2, 2) << 1, 1, 1, 0).finished();
    const RealMatrix y = (RealMatrix(2, 2) << 0, 0, 0, 1).finished();
    const RealMatrix z = (RealMatrix(2, 2) << 0, 1, 1, 0).finished();
    const RealMatrix left = cones::jordan_product<double>(cones::jordan_product<double>(x, y), z);
    const RealMatrix right = cones::jordan_product<double>(x, cones::jordan_product<double>(y, z));
    CHECK(max_abs(left - right) > 0.1);
}

TEST_CASE("Cartan algebra is an exact Frobenius algebra") {
    for (Eigen::Index n : {2, 3, 4}) {
        const auto r = cones::cartan_frobenius_check(n, 20, 7);
        CHECK(r.wdvv == 0.0);
        CHECK(r.compatibility == 0.0);
        CHECK(r.commutativity == 0.0);
        CHECK(r.max_residual() <= 1e-14);
        CHECK(r.gram_determinant == 1.0);
    }
}

TEST_CASE("Cartan torus is flat") {
    const hessian::Point u = (hessian::Point(2) << 0.3, -0.4).finished();
    CHECK(cones::cartan_torus_curvature(3, u) <= 1e-6);
    const RealMatrix g = cones::cartan_torus_metric(3, u);
    CHECK(max_abs(g - cones::cartan_torus_metric(3, hessian::Point::Zero(2))) <= 1e-14);
}

TEST_CASE("torus from a cone point") {
    const RealMatrix y = (RealMatrix(2, 2) << 2, 1, 1, 3).finished();
    const auto t = cones::torus_from_cone(y);
    CHECK(t.covolume == doctest::Approx(5.0));
    CHECK_THROWS_AS(cones::torus_from_cone((RealMatrix(2, 2) << 1, 2, 2, 1).finished()), NotInCone);
}

TEST_CASE("quaternionic embedding is Hermitian and keeps positivity") {
    const ComplexMatrix a = (ComplexMatrix(2, 2) << 2.0, std::complex<double>(0.1, 0.2), std::complex<double>(0.1, -0.2), 3.0).finished();
    const ComplexMatrix b = (ComplexMatrix(2, 2) << 0.0, std::complex<double>(0.3, 0.1), std::complex<double>(-0.3, -0.1), 0.0).finished();
    const ComplexMatrix q = cones::embed_quaternionic(a, b);
    CHECK(max_abs(q - q.adjoint()) <= 1e-15);
    CHECK(cones::in_cone<std::complex<double>>(q));
}
