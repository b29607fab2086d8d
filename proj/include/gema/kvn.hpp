#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "gema/errors.hpp"
#include "gema/expfam.hpp"

namespace gema::kvn {

using Complex = std::complex<double>;

/*
 * Sampled wavefunction on a phase-space grid. points has one row per cell
 * (coordinates of the cell centre); every cell carries the same Liouville
 * weight cell_volume.
 */
struct WaveFunction {
    Eigen::MatrixXd points;
    std::vector<Complex> values;
    double cell_volume = 1.0;

    std::size_t size() const { return values.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
};

/*
 * Landau-Ginzburg parameters in units hbar = c = 1. vector_potential has one
 * row per cell and one column per axis, or is empty for A = 0. The
 * magnetization term has no constitutive law and enters only as a constant
 * added to the free energy.
 */
struct LGParams {
    double alpha = 1.0;
    double beta = 1.0;
    double mass = 1.0;
    double charge = 0.0;
    double F0 = 0.0;
    double grid_spacing = 1.0;
    Eigen::MatrixXd vector_potential;
    double magnetization_offset = 0.0;

    /// DomainError unless alpha, beta, mass > 0 and grid_spacing > 0.
    void validate() const;
};

/// Shape of a regular periodic grid, last axis fastest.
struct Grid {
    std::vector<std::size_t> shape;
    double spacing = 1.0;

    std::size_t cells() const;
};

/*
 * Recognises a regular 1-, 2- or 3-dim grid with the given spacing whose
 * points are listed in row-major order. GridError otherwise, including when
 * cell_volume differs from spacing^dim.
 */
Grid regular_grid(const WaveFunction& psi, double spacing);

/// Checks finiteness and shape agreement between points and values.
void validate(const WaveFunction& psi);

/// rho = |psi|^2 per cell.
std::vector<double> density_of(const WaveFunction& psi);

/// Rescales so that sum |psi|^2 cell_volume = 1. ZeroFunction for psi = 0.
WaveFunction normalize(const WaveFunction& psi);

/// e^{i alpha} psi.
WaveFunction phase_fiber(const WaveFunction& psi, double alpha);

struct Projection {
    Eigen::VectorXd theta;
    double residual = 0.0;   // max |p_theta - p| over cells (categorical) or moment residual
    bool in_family = false;  // p_theta reproduces the empirical distribution
};

/*
 * pi(psi): the parameter of the family member with the same distribution as
 * |psi|^2. Categorical families use the closed form theta = log(p/w) - C with
 * theta_0 = 0 (the free coordinates only when the family is gauge fixed);
 * other families fall back to moment matching. The family must have one
 * atom per cell and the density must be strictly positive.
 */
Projection project_pi(const WaveFunction& psi, const expfam::ExponentialFamily& fam);

/*
 * sum over cells of [F0 - alpha|psi|^2 + beta/2 |psi|^4 + 1/(2m) sum_k |D_k psi|^2]
 * cell_volume, plus the magnetization offset. D_k = -i d_k - q A_k with
 * periodic central differences. Cell terms are summed in lexicographic order.
 */
double lg_free_energy(const WaveFunction& psi, const LGParams& p);

/*
 * Per-cell [1/(2m) sum_k D_k D_k - alpha + beta|psi|^2] psi. The discrete D_k
 * is Hermitian, so this is exactly the gradient of lg_free_energy with
 * respect to conj(psi), divided by cell_volume.
 */
std::vector<Complex> lg_equation_residual(const WaveFunction& psi, const LGParams& p);

/// max_cells |lg_equation_residual|.
double lg_residual_max(const WaveFunction& psi, const LGParams& p);

namespace serial {

double lg_free_energy(const WaveFunction& psi, const LGParams& p);
std::vector<Complex> lg_equation_residual(const WaveFunction& psi, const LGParams& p);

}  // namespace serial

}  // namespace gema::kvn
