#include "gema/kvn.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace gema::kvn {

void LGParams::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(mass > 0.0)) {
        throw DomainError("alpha, beta and mass must be positive");
    }
    if (!(grid_spacing > 0.0)) throw DomainError("grid spacing must be positive");
    if (!std::isfinite(charge) || !std::isfinite(F0) || !std::isfinite(magnetization_offset)) {
        throw DomainError("charge, F0 and the magnetization offset must be finite");
    }
}

std::size_t Grid::cells() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void validate(const WaveFunction& psi) {
    if (static_cast<std::size_t>(psi.points.rows()) != psi.values.size()) {
        throw DimensionMismatch("wavefunction has " + std::to_string(psi.points.rows()) + " points but " +
                                std::to_string(psi.values.size()) + " values");
    }
    if (!(psi.cell_volume > 0.0) || !std::isfinite(psi.cell_volume)) {
        throw DomainError("cell volume must be positive and finite");
    }
    for (const Complex& v : psi.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("non-finite amplitude");
    if (!psi.points.allFinite()) throw DomainError("non-finite grid coordinate");
}

Grid regular_grid(const WaveFunction& psi, double spacing) {
    validate(psi);
    const auto k = psi.points.cols();
    if (k < 1 || k > 3) throw GridError("grids must be 1-, 2- or 3-dimensional");
    if (psi.size() == 0) throw GridError("empty grid");
    if (!(spacing > 0.0)) throw GridError("grid spacing must be positive");

    const Eigen::RowVectorXd origin = psi.points.colwise().minCoeff();
    const double slack = 1e-9 * std::max(1.0, spacing);
    Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> idx(psi.points.rows(), k);
    Grid grid;
    grid.spacing = spacing;
    grid.shape.assign(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < psi.points.rows(); ++i) {
        for (Eigen::Index a = 0; a < k; ++a) {
            const double offset = psi.points(i, a) - origin[a];
            const double r = std::round(offset / spacing);
            if (std::abs(offset - r * spacing) > slack) {
                std::ostringstream os;
                os << "point " << i << " is off the lattice with spacing " << spacing;
                throw GridError(os.str());
            }
            idx(i, a) = static_cast<long>(r);
            auto& n = grid.shape[static_cast<std::size_t>(a)];
            n = std::max(n, static_cast<std::size_t>(r) + 1);
        }
    }
    if (grid.cells() != psi.size()) throw GridError("points do not fill a rectangular grid");

    // Row-major order: decompose each linear index and compare.
    for (Eigen::Index i = 0; i < psi.points.rows(); ++i) {
        auto rest = static_cast<std::size_t>(i);
        for (Eigen::Index a = k - 1; a >= 0; --a) {
            const auto n = grid.shape[static_cast<std::size_t>(a)];
            if (static_cast<std::size_t>(idx(i, a)) != rest % n) {
                throw GridError("points are not listed in row-major order");
            }
            rest /= n;
        }
    }

    const double expected = std::pow(spacing, static_cast<double>(k));
    if (std::abs(psi.cell_volume - expected) > 1e-9 * expected) {
        std::ostringstream os;
        os << "cell volume " << psi.cell_volume << " differs from spacing^" << k << " = " << expected;
        throw GridError(os.str());
    }
    return grid;
}

std::vector<double> density_of(const WaveFunction& psi) {
    std::vector<double> rho(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi.values[i]);
    return rho;
}

WaveFunction normalize(const WaveFunction& psi) {
    validate(psi);
    double mass = 0.0;
    for (double r : density_of(psi)) mass += r;
    mass *= psi.cell_volume;
    if (!(mass > 0.0)) throw ZeroFunction("cannot normalize the zero function");
    WaveFunction out = psi;
    const double scale = 1.0 / std::sqrt(mass);
    for (auto& v : out.values) v *= scale;
    return out;
}

WaveFunction phase_fiber(const WaveFunction& psi, double alpha) {
    WaveFunction out = psi;
    const Complex u = std::polar(1.0, alpha);
    for (auto& v : out.values) v *= u;
    return out;
}

Projection project_pi(const WaveFunction& psi, const expfam::ExponentialFamily& fam) {
    validate(psi);
    if (fam.size() != psi.size()) {
        throw DimensionMismatch("family has " + std::to_string(fam.size()) + " atoms, grid has " +
                                std::to_string(psi.size()) + " cells");
    }
    const std::vector<double> rho = density_of(psi);
    Eigen::VectorXd p(static_cast<Eigen::Index>(rho.size()));
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0)) throw BoundaryError("density vanishes at cell " + std::to_string(i));
        p[static_cast<Eigen::Index>(i)] = rho[i] * psi.cell_volume;
    }
    p /= p.sum();

    Projection out;
    if (fam.space == expfam::SampleSpace::Categorical) {
        Eigen::VectorXd full(p.size());
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            const auto x = static_cast<std::size_t>(i);
            full[i] = std::log(p[i] / fam.base_weights[x]) - fam.carrier[x];
        }
        full = expfam::gauge_fix(full);
        out.theta = fam.gauge_fixed ? Eigen::VectorXd(full.tail(full.size() - 1)) : full;
        out.residual = (expfam::probabilities(fam, out.theta) - p).cwiseAbs().maxCoeff();
        out.in_family = true;
        return out;
    }
    const Eigen::VectorXd target = fam.statistics.transpose() * p;
    const auto match = expfam::match_moments(fam, target);
    out.theta = match.theta;
    out.residual = match.residual;
    out.in_family = (expfam::probabilities(fam, out.theta) - p).cwiseAbs().maxCoeff() <= 1e-9;
    return out;
}

namespace {

// Periodic neighbours along each axis, precomputed once per evaluation.
struct Stencil {
    std::size_t cells = 0;
    std::size_t axes = 0;
    std::vector<std::size_t> plus, minus;  // [axis * cells + cell]

    explicit Stencil(const Grid& g) : cells(g.cells()), axes(g.shape.size()) {
        plus.resize(axes * cells);
        minus.resize(axes * cells);
        std::size_t stride = 1;
        for (std::size_t a = axes; a-- > 0;) {
            const std::size_t n = g.shape[a];
            for (std::size_t i = 0; i < cells; ++i) {
                const std::size_t j = (i / stride) % n;
                const std::size_t base = i - j * stride;
                plus[a * cells + i] = base + ((j + 1) % n) * stride;
                minus[a * cells + i] = base + ((j + n - 1) % n) * stride;
            }
            stride *= n;
        }
    }
};

struct Setup {
    Grid grid;
    Stencil stencil;
};

Setup prepare(const WaveFunction& psi, const LGParams& p) {
    p.validate();
    Grid grid = regular_grid(psi, p.grid_spacing);
    if (p.vector_potential.size() != 0 &&
        (static_cast<std::size_t>(p.vector_potential.rows()) != psi.size() ||
         static_cast<std::size_t>(p.vector_potential.cols()) != grid.shape.size())) {
        throw GridError("vector potential must have one row per cell and one column per axis");
    }
    Stencil s(grid);
    return Setup{std::move(grid), std::move(s)};
}

double potential_at(const LGParams& p, std::size_t cell, std::size_t axis) {
    if (p.vector_potential.size() == 0) return 0.0;
    return p.vector_potential(static_cast<Eigen::Index>(cell), static_cast<Eigen::Index>(axis));
}

// (D_a f)(i) = -i (f(i+) - f(i-)) / 2h - q A_a(i) f(i).
Complex covariant(const std::vector<Complex>& f, const Stencil& s, const LGParams& p, std::size_t axis,
                  std::size_t i) {
    const Complex diff = (f[s.plus[axis * s.cells + i]] - f[s.minus[axis * s.cells + i]]) / (2.0 * p.grid_spacing);
    return Complex(0.0, -1.0) * diff - p.charge * potential_at(p, i, axis) * f[i];
}

double cell_energy(const WaveFunction& psi, const Stencil& s, const LGParams& p, std::size_t i) {
    const double rho = std::norm(psi.values[i]);
    double kinetic = 0.0;
    for (std::size_t a = 0; a < s.axes; ++a) kinetic += std::norm(covariant(psi.values, s, p, a, i));
    return (p.F0 - p.alpha * rho + 0.5 * p.beta * rho * rho + kinetic / (2.0 * p.mass)) * psi.cell_volume;
}

double sum_energy(const std::vector<double>& e, const LGParams& p) {
    double total = 0.0;
    for (double v : e) total += v;
    return total + p.magnetization_offset;
}

Complex cell_residual(const WaveFunction& psi, const std::vector<Complex>& d, const Stencil& s, const LGParams& p,
                      std::size_t i) {
    Complex lap(0.0, 0.0);
    for (std::size_t a = 0; a < s.axes; ++a) {
        // d holds D_a psi for axis a in the slice [a * cells, (a + 1) * cells).
        const Complex diff = (d[a * s.cells + s.plus[a * s.cells + i]] - d[a * s.cells + s.minus[a * s.cells + i]]) /
                             (2.0 * p.grid_spacing);
        lap += Complex(0.0, -1.0) * diff - p.charge * potential_at(p, i, a) * d[a * s.cells + i];
    }
    const Complex v = psi.values[i];
    return lap / (2.0 * p.mass) + (-p.alpha + p.beta * std::norm(v)) * v;
}

}  // namespace

double lg_free_energy(const WaveFunction& psi, const LGParams& p) {
    const Setup setup = prepare(psi, p);
    const auto n = static_cast<long>(psi.size());
    std::vector<double> e(psi.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = cell_energy(psi, setup.stencil, p, static_cast<std::size_t>(i));
    return sum_energy(e, p);
}

std::vector<Complex> lg_equation_residual(const WaveFunction& psi, const LGParams& p) {
    const Setup setup = prepare(psi, p);
    const Stencil& s = setup.stencil;
    const auto n = static_cast<long>(psi.size());
    std::vector<Complex> d(s.axes * s.cells);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        for (std::size_t a = 0; a < s.axes; ++a)
            d[a * s.cells + static_cast<std::size_t>(i)] = covariant(psi.values, s, p, a, static_cast<std::size_t>(i));
    std::vector<Complex> r(psi.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = cell_residual(psi, d, s, p, static_cast<std::size_t>(i));
    return r;
}

double lg_residual_max(const WaveFunction& psi, const LGParams& p) {
    double m = 0.0;
    for (const Complex& v : lg_equation_residual(psi, p)) m = std::max(m, std::abs(v));
    return m;
}

namespace serial {

double lg_free_energy(const WaveFunction& psi, const LGParams& p) {
    const Setup setup = prepare(psi, p);
    std::vector<double> e(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) e[i] = cell_energy(psi, setup.stencil, p, i);
    return sum_energy(e, p);
}

std::vector<Complex> lg_equation_residual(const WaveFunction& psi, const LGParams& p) {
    const Setup setup = prepare(psi, p);
    const Stencil& s = setup.stencil;
    std::vector<Complex> d(s.axes * s.cells);
    for (std::size_t i = 0; i < s.cells; ++i)
        for (std::size_t a = 0; a < s.axes; ++a) d[a * s.cells + i] = covariant(psi.values, s, p, a, i);
    std::vector<Complex> r(psi.size());
    for (std::size_t i = 0; i < s.cells; ++i) r[i] = cell_residual(psi, d, s, p, i);
    return r;
}

}  // namespace serial

}  // namespace gema::kvn
