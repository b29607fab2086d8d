#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>

#include <omp.h>

#include "gema/hessian_core.hpp"
#include "gema/kvn.hpp"
#include "gema/random.hpp"

// The OpenMP kernels must agree bit for bit with their serial references,
// whatever the thread count.

using namespace gema;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

hessian::MultiplicationTable random_table(std::size_t n, std::uint64_t seed) {
    Rng rng = make_stream(seed, "test.parallel.table");
    hessian::MultiplicationTable m(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) m(a, b, c) = uniform(rng, -1.0, 1.0);
    return m;
}

kvn::WaveFunction random_field(std::size_t nx, std::size_t ny, std::size_t nz, std::uint64_t seed) {
    Rng rng = make_stream(seed, "test.parallel.field");
    kvn::WaveFunction psi;
    psi.points.resize(static_cast<Eigen::Index>(nx * ny * nz), 3);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k, ++r) {
                psi.points.row(r) << 0.5 * double(i), 0.5 * double(j), 0.5 * double(k);
                psi.values.emplace_back(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
            }
    psi.cell_volume = 0.125;
    return psi;
}

}  // namespace

TEST_CASE("wdvv_residual: parallel equals serial") {
    for (int threads : {1, 2, 4, 7}) {
        omp_set_num_threads(threads);
        for (std::size_t n : {3u, 8u, 17u}) {
            const auto m = random_table(n, n);
            CHECK(same_bits(hessian::wdvv_residual(m), hessian::serial::wdvv_residual(m)));
        }
    }
}

TEST_CASE("Landau-Ginzburg kernels: parallel equals serial") {
    kvn::LGParams p;
    p.alpha = 0.7;
    p.beta = 1.2;
    p.mass = 0.9;
    p.charge = 0.4;
    p.F0 = 0.1;
    p.grid_spacing = 0.5;
    const auto psi = random_field(6, 5, 4, 3);
    Rng rng = make_stream(8, "test.parallel.a");
    p.vector_potential.resize(static_cast<Eigen::Index>(psi.size()), 3);
    for (auto& v : p.vector_potential.reshaped()) v = uniform(rng, -1.0, 1.0);
    for (int threads : {1, 2, 3, 8}) {
        omp_set_num_threads(threads);
        CHECK(same_bits(kvn::lg_free_energy(psi, p), kvn::serial::lg_free_energy(psi, p)));
        const auto par = kvn::lg_equation_residual(psi, p);
        const auto ser = kvn::serial::lg_equation_residual(psi, p);
        REQUIRE(par.size() == ser.size());
        bool equal = true;
        for (std::size_t i = 0; i < par.size(); ++i)
            equal &= same_bits(par[i].real(), ser[i].real()) && same_bits(par[i].imag(), ser[i].imag());
        CHECK(equal);
    }
}
