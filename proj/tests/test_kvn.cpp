#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gema/expfam.hpp"
#include "gema/kvn.hpp"
#include "gema/kvn_io.hpp"
#include "gema/random.hpp"
#include "oracles.hpp"

using namespace gema;
using kvn::Complex;

namespace {

kvn::WaveFunction ring(const std::vector<Complex>& values, double h) {
    kvn::WaveFunction psi;
    psi.points.resize(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) psi.points(static_cast<Eigen::Index>(i), 0) = h * double(i);
    psi.values = values;
    psi.cell_volume = h;
    return psi;
}

kvn::WaveFunction plane(std::size_t nx, std::size_t ny, double h, Rng& rng) {
    kvn::WaveFunction psi;
    psi.points.resize(static_cast<Eigen::Index>(nx * ny), 2);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const auto r = static_cast<Eigen::Index>(i * ny + j);
            psi.points(r, 0) = h * double(i);
            psi.points(r, 1) = h * double(j);
            psi.values.emplace_back(uniform(rng, 0.2, 1.0), uniform(rng, -0.5, 0.5));
        }
    psi.cell_volume = h * h;
    return psi;
}

std::vector<Complex> random_values(std::size_t n, Rng& rng) {
    std::vector<Complex> v;
    for (std::size_t i = 0; i < n; ++i) v.emplace_back(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    return v;
}

}  // namespace

TEST_CASE("normalize gives unit Liouville mass and rejects zero") {
    const auto psi = ring({{1.0, 0.0}, {0.0, 2.0}, {1.0, 1.0}}, 0.5);
    const auto unit = kvn::normalize(psi);
    double mass = 0.0;
    for (double r : kvn::density_of(unit)) mass += r;
    CHECK(mass * unit.cell_volume == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(kvn::normalize(ring({{0.0, 0.0}, {0.0, 0.0}}, 1.0)), ZeroFunction);
}

TEST_CASE("projection is constant on phase fibers") {
    Rng rng = make_stream(1, "test.kvn.phase");
    const auto psi = kvn::normalize(plane(3, 4, 0.5, rng));
    for (bool fixed : {false, true}) {
        auto fam = expfam::categorical(psi.size());
        if (fixed) fam = expfam::gauge_fixed(fam);
        const auto base = kvn::project_pi(psi, fam);
        CHECK(base.in_family);
        for (int s = 0; s < 10; ++s) {
            const auto turned = kvn::project_pi(kvn::phase_fiber(psi, uniform(rng, 0.0, 6.3)), fam);
            CHECK((turned.theta - base.theta).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("categorical projection reproduces the density") {
    Rng rng = make_stream(2, "test.kvn.pi");
    const auto psi = kvn::normalize(plane(2, 3, 1.0, rng));
    const auto fam = expfam::categorical(psi.size());
    const auto pi = kvn::project_pi(psi, fam);
    const auto p = expfam::probabilities(fam, pi.theta);
    const auto rho = kvn::density_of(psi);
    for (std::size_t i = 0; i < rho.size(); ++i) CHECK(p[Eigen::Index(i)] == doctest::Approx(rho[i] * psi.cell_volume).epsilon(1e-13));
}

TEST_CASE("projection needs a positive density and matching sizes") {
    const auto psi = ring({{1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}, 1.0);
    CHECK_THROWS_AS(kvn::project_pi(psi, expfam::categorical(3)), BoundaryError);
    CHECK_THROWS_AS(kvn::project_pi(kvn::normalize(ring({{1.0, 0.0}, {1.0, 0.0}}, 1.0)), expfam::categorical(3)),
                    DimensionMismatch);
}

TEST_CASE("constant minimizer of the LG functional") {
    kvn::LGParams p;
    p.alpha = 1.5;
    p.beta = 0.75;
    p.F0 = 0.2;
    p.grid_spacing = 0.5;
    const Complex amp = std::polar(std::sqrt(p.alpha / p.beta), 0.7);
    const auto psi = ring(std::vector<Complex>(10, amp), 0.5);
    CHECK(kvn::lg_residual_max(psi, p) <= 1e-14);
    const double volume = 10 * 0.5;
    CHECK(kvn::lg_free_energy(psi, p) == doctest::Approx((p.F0 - p.alpha * p.alpha / (2 * p.beta)) * volume).epsilon(1e-14));
    p.magnetization_offset = 3.0;
    CHECK(kvn::lg_free_energy(psi, p) == doctest::Approx((p.F0 - p.alpha * p.alpha / (2 * p.beta)) * volume + 3.0));
}

TEST_CASE("LG free energy matches a direct 1-D evaluation") {
    Rng rng = make_stream(4, "test.kvn.energy");
    kvn::LGParams p;
    p.alpha = 0.8;
    p.beta = 1.3;
    p.mass = 0.6;
    p.F0 = -0.1;
    p.grid_spacing = 0.25;
    const auto values = random_values(12, rng);
    const auto psi = ring(values, 0.25);
    CHECK(kvn::lg_free_energy(psi, p) ==
          doctest::Approx(oracle::lg_energy_1d(values, 0.25, p.alpha, p.beta, p.mass, p.F0)).epsilon(1e-13));
}

TEST_CASE("LG residual is the gradient of the free energy") {
    // dE/d conj(psi_j) = (dE/dRe + i dE/dIm) / 2, and the residual is that over cell_volume
    Rng rng = make_stream(5, "test.kvn.grad");
    kvn::LGParams p;
    p.alpha = 1.1;
    p.beta = 0.9;
    p.mass = 1.4;
    p.charge = 0.7;
    p.grid_spacing = 0.5;
    auto psi = plane(3, 4, 0.5, rng);
    p.vector_potential.resize(12, 2);
    for (Eigen::Index i = 0; i < 12; ++i) {
        p.vector_potential(i, 0) = uniform(rng, -1.0, 1.0);
        p.vector_potential(i, 1) = uniform(rng, -1.0, 1.0);
    }
    const auto res = kvn::lg_equation_residual(psi, p);
    const double eps = 1e-6;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        auto energy_at = [&](Complex d) {
            auto q = psi;
            q.values[j] += d;
            return kvn::lg_free_energy(q, p);
        };
        const double d_re = (energy_at({eps, 0}) - energy_at({-eps, 0})) / (2 * eps);
        const double d_im = (energy_at({0, eps}) - energy_at({0, -eps})) / (2 * eps);
        const Complex grad = Complex(d_re, d_im) / (2.0 * psi.cell_volume);
        CHECK(std::abs(grad - res[j]) <= 1e-7);
    }
}

TEST_CASE("regular_grid recognises lattices and rejects the rest") {
    Rng rng = make_stream(6, "test.kvn.grid");
    const auto psi = plane(3, 5, 0.5, rng);
    const auto g = kvn::regular_grid(psi, 0.5);
    CHECK(g.shape == std::vector<std::size_t>{3, 5});
    CHECK(g.cells() == 15);
    CHECK_THROWS_AS(kvn::regular_grid(psi, 0.25), GridError);
    auto shuffled = psi;
    shuffled.points.row(0).swap(shuffled.points.row(1));
    CHECK_THROWS_AS(kvn::regular_grid(shuffled, 0.5), GridError);
    auto wrong_volume = psi;
    wrong_volume.cell_volume = 1.0;
    CHECK_THROWS_AS(kvn::regular_grid(wrong_volume, 0.5), GridError);
}

TEST_CASE("params validation") {
    kvn::LGParams p;
    CHECK_NOTHROW(p.validate());
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("wavefunction files roundtrip through JSON and CSV") {
    Rng rng = make_stream(7, "test.kvn.io");
    const auto psi = plane(2, 2, 0.5, rng);
    const auto from_json = kvn::wavefunction_from_json(nlohmann::json::parse(kvn::wavefunction_to_json(psi).dump()));
    const auto from_csv = kvn::wavefunction_from_csv(kvn::wavefunction_to_csv(psi));
    for (const auto* q : {&from_json, &from_csv}) {
        CHECK(q->points == psi.points);
        CHECK(q->values == psi.values);
        CHECK(q->cell_volume == psi.cell_volume);
    }
    CHECK_THROWS_AS(kvn::wavefunction_from_csv("0,1,0,1\n1,1,0,2\n"), ParseError);
    CHECK_THROWS_AS(kvn::load_wavefunction("/nonexistent.json"), ParseError);
}

TEST_CASE("shipped test data are minimizers") {
    const auto params = kvn::load_params(std::string(GEMA_TEST_DATA) + "/lg_params.json");
    for (const char* name : {"/minimizer_2d.json", "/minimizer_1d.csv"}) {
        const auto psi = kvn::load_wavefunction(std::string(GEMA_TEST_DATA) + name);
        CHECK(kvn::lg_residual_max(psi, params) <= 1e-12);
    }
}
