#include "gema/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "gema/bhk.hpp"
#include "gema/cones.hpp"
#include "gema/expfam.hpp"
#include "gema/expfam_io.hpp"
#include "gema/hessian_core.hpp"
#include "gema/kvn.hpp"
#include "gema/kvn_io.hpp"
#include "gema/potentials.hpp"
#include "gema/syz.hpp"

namespace gema::cli {

bool Report::passed() const {
    if (error) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

int Report::exit_code() const {
    if (error) return 2;
    return passed() ? 0 : 1;
}

const std::vector<std::pair<std::string, double>>& default_tolerances(const std::string& command) {
    static const std::map<std::string, std::vector<std::pair<std::string, double>>> table = {
        {"gema-check",
         {{"ma", 1e-5},
          {"ma_fd_relative", 1e-5},
          {"fd_metric", 1e-6},
          {"fd_third", 1e-6},
          {"symmetry", 1e-6},
          {"compatibility", 1e-6}}},
        {"expfam-check",
         {{"normalization", 1e-12},
          {"roundtrip", 1e-8},
          {"fenchel", 1e-10},
          {"fisher_closed_form", 1e-8},
          {"fisher_fd", 1e-6},
          {"dual_ma", 1e-5}}},
        {"bhk", {}},
        {"syz",
         {{"fiber_moment", 1e-12},
          {"level_set", 1e-14},
          {"slice", 1e-12},
          {"invariance_phase", 1e-12},
          {"invariance_cx", 1e-12},
          {"isotropy", 1e-12},
          {"legendre", 1e-12}}},
        {"kvn", {{"normalization", 1e-12}, {"phase_invariance", 1e-10}, {"lg_residual", 1e-12}}},
        {"cone-check",
         {{"kappa", 1e-5},
          {"ma_spread", 1e-5},
          {"metric_fd", 1e-6},
          {"geodesic_ode", 1e-6},
          {"trace_invariance", 1e-12},
          {"cartan", 1e-12},
          {"curvature", 1e-6}}},
    };
    const auto it = table.find(command);
    if (it == table.end()) throw std::invalid_argument("unknown command " + command);
    return it->second;
}

namespace {

// Collects checks against the command's tolerance table and the overrides.
class Checks {
   public:
    Checks(std::string command, const RunConfig& cfg) : command_(std::move(command)), cfg_(cfg) {}

    double tol(const std::string& name) const {
        if (auto it = cfg_.tolerances.find(name); it != cfg_.tolerances.end()) return it->second;
        for (const auto& [n, v] : default_tolerances(command_))
            if (n == name) return v;
        throw std::logic_error("no tolerance named " + name);
    }

    void at_most(const std::string& name, double value) {
        const double t = tol(name);
        checks_.push_back(Check{name, value, t, false, value <= t});
    }

    void holds(const std::string& name, bool ok) { checks_.push_back(Check{name, ok ? 1.0 : 0.0, 0.0, true, ok}); }

    std::vector<Check> take() { return std::move(checks_); }

   private:
    std::string command_;
    const RunConfig& cfg_;
    std::vector<Check> checks_;
};

std::size_t samples_or(const RunConfig& cfg, std::size_t fallback) { return cfg.samples.value_or(fallback); }

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double relative(double diff, double scale) { return scale > 0.0 ? diff / scale : diff; }

double cube_diff(const hessian::Tensor3& a, const hessian::Tensor3& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

Json vec(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

template <class T>
Json ints(const std::vector<T>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(x);
    return a;
}

Json matrix_json(const bhk::ExponentMatrix& e) {
    Json a = Json::array();
    for (const auto& row : e.rows()) a.push_back(ints(row));
    return a;
}

}  // namespace

Report cmd_gema_check(const std::string& potential, std::size_t dim, const RunConfig& cfg) {
    Report r;
    r.command = "gema-check";
    const potentials::GemaModel model = potentials::make_model(potential, dim);
    const hessian::Potential& closed = model.potential;
    const hessian::Potential fd = closed.without_closed_forms();
    const std::size_t points = samples_or(cfg, 100);
    r.input["potential"] = potential;
    r.input["dim"] = closed.dim;
    r.input["points"] = points;

    double ma = 0.0, ma_fd = 0.0, fd_metric = 0.0, fd_third = 0.0, sym = 0.0, compat = 0.0, wdvv = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        Rng rng = make_stream(cfg.seed, "gema-check", i);
        const hessian::Point x = model.sample(rng);
        const double f = model.ma_density(x);

        const hessian::Metric g = hessian::hessian_metric(closed, x);
        const hessian::Tensor3 a = hessian::third_tensor(closed, x);
        ma = std::max(ma, std::abs(hessian::ma_residual(closed, x, model.ma_density)));

        const Eigen::MatrixXd h_fd = hessian::fd_hessian(fd, x);
        const double det_fd = (0.5 * (h_fd + h_fd.transpose())).determinant();
        ma_fd = std::max(ma_fd, std::abs(det_fd - f) / f);
        fd_metric = std::max(fd_metric, relative(max_abs(h_fd - g.entries()), max_abs(g.entries())));

        const hessian::Tensor3 raw = hessian::fd_third_raw(fd, x);
        sym = std::max(sym, hessian::symmetry_defect(raw));
        fd_third = std::max(fd_third, relative(cube_diff(hessian::symmetrized(raw), a), a.max_abs()));

        const hessian::MultiplicationTable m = hessian::structure_constants(g, a);
        compat = std::max(compat, hessian::compatibility_residual(g, a, m));
        wdvv = std::max(wdvv, hessian::wdvv_residual(m));
    }

    if (potential.starts_with("logdet-")) {
        const bool complex = potential.starts_with("logdet-complex-");
        const auto n = static_cast<Eigen::Index>(std::stoul(potential.substr(complex ? 15 : 7)));
        const double kappa = complex ? cones::ma_constant<cones::Complex>(n) : cones::ma_constant<double>(n);
        const hessian::Point id = complex ? cones::to_coordinates<cones::Complex>(cones::ComplexMatrix::Identity(n, n))
                                          : cones::to_coordinates<double>(cones::RealMatrix::Identity(n, n));
        const Eigen::MatrixXd h = hessian::fd_hessian(fd, id);
        r.result["kappa"] = kappa;
        r.result["kappa_fd"] = (0.5 * (h + h.transpose())).determinant();
    }
    Json res;
    res["ma"] = ma;
    res["ma_fd_relative"] = ma_fd;
    res["fd_metric"] = fd_metric;
    res["fd_third"] = fd_third;
    res["symmetry"] = sym;
    res["compatibility"] = compat;
    res["wdvv"] = wdvv;
    r.result["residuals"] = res;

    Checks c(r.command, cfg);
    c.at_most("ma", ma);
    c.at_most("ma_fd_relative", ma_fd);
    c.at_most("fd_metric", fd_metric);
    c.at_most("fd_third", fd_third);
    c.at_most("symmetry", sym);
    c.at_most("compatibility", compat);
    r.checks = c.take();
    return r;
}

Report cmd_expfam_check(const std::optional<std::string>& family_path, std::size_t dim, const RunConfig& cfg) {
    Report r;
    r.command = "expfam-check";
    const std::size_t points = samples_or(cfg, 100);
    const expfam::ExponentialFamily fam =
        family_path ? expfam::load_family(*family_path) : expfam::categorical(dim + 1);
    const bool categorical = fam.space == expfam::SampleSpace::Categorical;
    r.input["family"] = expfam::family_to_json(fam);
    r.input["points"] = points;

    const std::size_t atoms = fam.size();
    // Free coordinates: categorical families are gauge fixed at theta_0 = 0.
    const expfam::ExponentialFamily free = categorical ? expfam::gauge_fixed(fam) : fam;
    const auto m = static_cast<Eigen::Index>(free.num_params());
    const hessian::Potential psi = expfam::log_partition_potential(free);

    double norm = 0.0, roundtrip = 0.0, fenchel = 0.0, fisher_closed = 0.0, fisher_fd = 0.0, dual = 0.0;
    bool fisher_degenerate = false;
    for (std::size_t i = 0; i < points; ++i) {
        Rng rng = make_stream(cfg.seed, "expfam-check", i);
        Eigen::VectorXd theta(m);
        for (Eigen::Index k = 0; k < m; ++k) theta[k] = uniform(rng, -2.0, 2.0);
        const Eigen::VectorXd p = expfam::probabilities(free, theta);
        norm = std::max(norm, std::abs(p.sum() - 1.0));
        const Eigen::VectorXd eta = expfam::mean_params(free, theta).eta;

        if (categorical) {
            Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(atoms));
            full.tail(m) = theta;
            const Eigen::VectorXd eta_full = expfam::mean_params(fam, full).eta;
            const Eigen::VectorXd back = expfam::gauge_fix(expfam::natural_params({eta_full}));
            roundtrip = std::max(roundtrip, (back - full).cwiseAbs().maxCoeff());
            fenchel = std::max(fenchel, std::abs(expfam::log_partition(fam, full) +
                                                 expfam::negative_entropy({eta_full}) - full.dot(eta_full)));
            const Eigen::MatrixXd closed = potentials::softmax(static_cast<std::size_t>(m)).hessian(theta);
            fisher_closed = std::max(fisher_closed, max_abs(expfam::fisher_metric(free, theta).entries() - closed));
        } else {
            const auto match = expfam::match_moments(free, eta);
            roundtrip = std::max(roundtrip, match.residual);
        }
        try {
            const hessian::Metric g = expfam::fisher_metric(free, theta);
            const Eigen::MatrixXd h = hessian::fd_hessian(psi, theta);
            fisher_fd = std::max(fisher_fd, relative(max_abs(h - g.entries()), max_abs(g.entries())));
        } catch (const ConvexityError&) {
            fisher_degenerate = true;
        }
    }
    if (categorical) {
        const auto model = potentials::make_model("simplex-entropy", atoms - 1);
        for (std::size_t i = 0; i < points; ++i) {
            Rng rng = make_stream(cfg.seed, "expfam-check.dual", i);
            const auto check = expfam::dual_ma_check({potentials::simplex_point(model.sample(rng))});
            dual = std::max(dual, check.relative_error());
        }
    }

    r.result["normalization"] = norm;
    r.result["roundtrip"] = roundtrip;
    if (categorical) {
        r.result["fenchel"] = fenchel;
        r.result["fisher_closed_form"] = fisher_closed;
        r.result["dual_ma"] = dual;
    }
    r.result["fisher_fd"] = fisher_fd;
    r.result["fisher_degenerate"] = fisher_degenerate;

    Checks c(r.command, cfg);
    c.at_most("normalization", norm);
    c.at_most("roundtrip", roundtrip);
    if (categorical) {
        c.at_most("fenchel", fenchel);
        c.at_most("fisher_closed_form", fisher_closed);
        c.at_most("dual_ma", dual);
    }
    c.holds("fisher_positive_definite", !fisher_degenerate);
    if (!fisher_degenerate) c.at_most("fisher_fd", fisher_fd);
    r.checks = c.take();
    return r;
}

namespace {

bhk::ExponentMatrix parse_invertible(const std::string& polynomial) {
    try {
        return bhk::parse_polynomial(polynomial);
    } catch (const NotSquare& e) {
        // A non-square exponent matrix cannot be invertible.
        throw NotInvertible(e.detail());
    }
}

bool quasi_homogeneous(const bhk::ExponentMatrix& e, const bhk::WeightSystem& ws) {
    for (std::size_t i = 0; i < e.size(); ++i) {
        exact::BigInt s = 0;
        for (std::size_t j = 0; j < e.size(); ++j) s += exact::BigInt(e(i, j)) * ws.weights[j];
        if (s != ws.degree) return false;
    }
    return true;
}

Json weight_json(const bhk::WeightSystem& ws) {
    Json j;
    j["weights"] = ints(ws.weights);
    j["degree"] = ws.degree;
    j["calabi_yau"] = bhk::is_calabi_yau(ws);
    return j;
}

}  // namespace

Report cmd_bhk(const std::string& polynomial, const RunConfig& cfg) {
    Report r;
    r.command = "bhk";
    r.input["polynomial"] = polynomial;
    const bhk::ExponentMatrix e = parse_invertible(polynomial);
    const auto atoms = bhk::classify_atoms(e);
    const bhk::WeightSystem ws = bhk::weights(e);
    const bhk::ExponentMatrix mirror = bhk::transpose_mirror(e);
    const bhk::WeightSystem mws = bhk::weights(mirror);
    const bhk::SymmetryGroup group = bhk::symmetry_group(e);
    const std::int64_t det = bhk::determinant(e);

    r.result["matrix"] = matrix_json(e);
    r.result["determinant"] = det;
    const Json wj = weight_json(ws);
    for (const auto& [k, v] : wj.items()) r.result[k] = v;
    Json atom_list = Json::array();
    for (const auto& a : atoms) {
        Json j;
        j["kind"] = bhk::atom_name(a.kind);
        Json names = Json::array();
        for (auto v : a.variables) names.push_back(e.variable(v));
        j["variables"] = names;
        j["exponents"] = ints(a.exponents);
        atom_list.push_back(j);
    }
    r.result["atoms"] = atom_list;
    Json mj;
    mj["polynomial"] = mirror.polynomial();
    mj["matrix"] = matrix_json(mirror);
    const Json mwj = weight_json(mws);
    for (const auto& [k, v] : mwj.items()) mj[k] = v;
    r.result["mirror"] = mj;
    Json gj;
    gj["invariant_factors"] = ints(group.invariant_factors);
    gj["order"] = group.order;
    r.result["group"] = gj;
    r.result["calabi_yau_agrees_with_mirror"] = bhk::is_calabi_yau(ws) == bhk::is_calabi_yau(mws);

    Checks c(r.command, cfg);
    c.holds("quasi_homogeneous", quasi_homogeneous(e, ws));
    c.holds("mirror_quasi_homogeneous", quasi_homogeneous(mirror, mws));
    c.holds("mirror_involution", bhk::transpose_mirror(mirror) == e);
    c.holds("group_order", group.order == (det < 0 ? -det : det));
    r.checks = c.take();
    return r;
}

Report cmd_syz(const std::string& polynomial, const RunConfig& cfg) {
    Report r;
    r.command = "syz";
    r.input["polynomial"] = polynomial;
    const bhk::ExponentMatrix e = parse_invertible(polynomial);
    bhk::classify_atoms(e);
    const bhk::WeightSystem ws = bhk::weights(e);
    const Eigen::VectorXd w = syz::weight_vector(ws);
    const auto n = w.size();
    const syz::SlicePolytope slice = syz::make_slice(ws, cfg.level);
    const std::size_t count = samples_or(cfg, 100);
    r.input["samples"] = count;

    // Base points: on the slice when it meets the open simplex, anywhere in it otherwise.
    std::vector<syz::MomentImage> base;
    if (!slice.empty()) {
        base = syz::sample_slice(slice, count, cfg.seed);
    } else {
        const auto model = potentials::make_model("simplex-entropy", static_cast<std::size_t>(n - 1));
        for (std::size_t i = 0; i < count; ++i) {
            Rng rng = make_stream(cfg.seed, "syz.base", i);
            base.push_back({potentials::simplex_point(model.sample(rng))});
        }
    }

    const expfam::ExponentialFamily cat = expfam::categorical(static_cast<std::size_t>(n));
    double fiber = 0.0, level = 0.0, slice_err = 0.0, inv_phase = 0.0, inv_cx = 0.0, iso = 0.0, legendre = 0.0;
    std::map<std::string, std::size_t> dims;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const syz::MomentImage& eta = base[i];
        if (!slice.empty()) slice_err = std::max(slice_err, std::abs(slice.w.dot(eta.eta) - slice.level));
        const auto pts = syz::sample_fiber(eta, w, 1, make_stream(cfg.seed, "syz.seed", i)());
        const syz::WeightedProjectivePoint& z = pts.front();
        fiber = std::max(fiber, (syz::moment_map(z).eta - eta.eta).cwiseAbs().maxCoeff());
        level = std::max(level, std::abs(w.dot(z.z.cwiseAbs2()) - 1.0));

        Rng rng = make_stream(cfg.seed, "syz.group", i);
        Eigen::VectorXd phi(n);
        for (Eigen::Index k = 0; k < n; ++k) phi[k] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const syz::Complex t = std::polar(std::exp(uniform(rng, std::log(0.5), std::log(2.0))),
                                          uniform(rng, 0.0, 2.0 * std::numbers::pi));
        inv_phase = std::max(inv_phase,
                             (syz::moment_map(syz::rotate_phases(z, phi)).eta - syz::moment_map(z).eta).cwiseAbs().maxCoeff());
        inv_cx = std::max(inv_cx, (syz::reduced_moment_map(syz::act(z, t)).eta - syz::reduced_moment_map(z).eta)
                                      .cwiseAbs()
                                      .maxCoeff());
        iso = std::max(iso, syz::isotropy_residual(z, 8, make_stream(cfg.seed, "syz.tangent", i)()));
        const Eigen::VectorXd theta = syz::legendre_chart(eta);
        legendre = std::max(legendre, (expfam::mean_params(cat, theta).eta - eta.eta).cwiseAbs().maxCoeff());

        std::string key = "none";
        try {
            key = std::to_string(syz::hypersurface_fiber_dimension(e, ws, eta, make_stream(cfg.seed, "syz.dim", i)()).dimension);
        } catch (const NoSolutionFound&) {
        }
        ++dims[key];
    }

    r.result["weights"] = ints(ws.weights);
    r.result["degree"] = ws.degree;
    r.result["level"] = slice.level;
    r.result["empty_slice"] = slice.empty();
    r.result["samples"] = base.size();
    r.result["fiber_moment_max"] = fiber;
    r.result["level_set_max"] = level;
    r.result["slice_max"] = slice_err;
    r.result["invariance_phase_max"] = inv_phase;
    r.result["invariance_cx_max"] = inv_cx;
    r.result["isotropy_max"] = iso;
    r.result["legendre_roundtrip_max"] = legendre;
    Json hist = Json::object();
    for (const auto& [k, v] : dims) hist[k] = v;
    r.result["fiber_dims_histogram"] = hist;

    Checks c(r.command, cfg);
    c.at_most("fiber_moment", fiber);
    c.at_most("level_set", level);
    if (!slice.empty()) c.at_most("slice", slice_err);
    c.at_most("invariance_phase", inv_phase);
    c.at_most("invariance_cx", inv_cx);
    c.at_most("isotropy", iso);
    c.at_most("legendre", legendre);
    r.checks = c.take();
    return r;
}

Report cmd_kvn(const std::string& wavefunction_path, const std::string& params_path,
               const std::optional<std::string>& family_path, const RunConfig& cfg) {
    Report r;
    r.command = "kvn";
    r.input["wavefunction"] = wavefunction_path;
    r.input["params"] = params_path;
    const kvn::WaveFunction psi = kvn::load_wavefunction(wavefunction_path);
    const kvn::LGParams params = kvn::load_params(params_path);
    const expfam::ExponentialFamily fam =
        family_path ? expfam::load_family(*family_path) : expfam::categorical(psi.size());
    r.input["family"] = expfam::family_to_json(fam);

    double mass = 0.0;
    for (double v : kvn::density_of(psi)) mass += v;
    mass *= psi.cell_volume;
    const kvn::WaveFunction unit = kvn::normalize(psi);
    double unit_mass = 0.0;
    for (double v : kvn::density_of(unit)) unit_mass += v;
    unit_mass *= unit.cell_volume;

    const kvn::Projection pi = kvn::project_pi(unit, fam);
    Rng rng = make_stream(cfg.seed, "kvn");
    const double alpha = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const kvn::Projection rotated = kvn::project_pi(kvn::phase_fiber(unit, alpha), fam);
    const double phase = (rotated.theta - pi.theta).cwiseAbs().maxCoeff();

    const kvn::Grid grid = kvn::regular_grid(psi, params.grid_spacing);
    const double energy = kvn::lg_free_energy(psi, params);
    const double residual = kvn::lg_residual_max(psi, params);

    r.result["cells"] = psi.size();
    r.result["shape"] = ints(grid.shape);
    r.result["norm"] = mass;
    r.result["normalization_error"] = std::abs(unit_mass - 1.0);
    r.result["theta"] = vec(pi.theta);
    r.result["projection_residual"] = pi.residual;
    r.result["in_family"] = pi.in_family;
    r.result["phase_alpha"] = alpha;
    r.result["phase_invariance"] = phase;
    r.result["free_energy"] = energy;
    r.result["lg_residual_max"] = residual;

    Checks c(r.command, cfg);
    c.at_most("normalization", std::abs(unit_mass - 1.0));
    c.at_most("phase_invariance", phase);
    c.at_most("lg_residual", residual);
    r.checks = c.take();
    return r;
}

namespace {

template <class S>
void cone_checks(Eigen::Index n, const RunConfig& cfg, Report& r, Checks& c) {
    using M = cones::Matrix<S>;
    const std::size_t count = samples_or(cfg, 50);
    const bool complex = !std::is_same_v<S, double>;
    const double power = complex ? 2.0 * static_cast<double>(n) : static_cast<double>(n + 1);
    const double kappa = cones::ma_constant<S>(n);
    const hessian::Potential closed = cones::logdet_potential<S>(n);
    const hessian::Potential fd = closed.without_closed_forms();

    const auto at_identity = cones::cone_ma_check(cones::ConePoint<S>(M::Identity(n, n)));
    const double kappa_err = std::abs(at_identity.det_hess - kappa) / kappa;

    double lo = INFINITY, hi = -INFINITY, sum = 0.0, metric = 0.0, trace = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = make_stream(cfg.seed, "cone-check", i);
        const cones::ConePoint<S> x(cones::random_cone_point<S>(n, rng));
        const auto check = cones::cone_ma_check(x);
        const double det = std::real(x.matrix().determinant());
        const double ratio = check.det_hess / std::pow(det, -power);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        sum += ratio;

        const hessian::Point coords = cones::to_coordinates<S>(x.matrix());
        const Eigen::MatrixXd g = closed.hessian(coords);
        const Eigen::MatrixXd h = hessian::fd_hessian(fd, coords);
        metric = std::max(metric, relative(max_abs(h - g), max_abs(g)));

        const M a = cones::random_hermitian<S>(n, rng), b = cones::random_hermitian<S>(n, rng),
                d = cones::random_hermitian<S>(n, rng);
        trace = std::max(trace, std::abs(cones::trace_form<S>(cones::jordan_product<S>(a, b), d) -
                                         cones::trace_form<S>(a, cones::jordan_product<S>(b, d))));
    }
    const double spread = (hi - lo) / (sum / static_cast<double>(count));

    double ode = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(count, 4); ++i) {
        Rng rng = make_stream(cfg.seed, "cone-check.geodesic", i);
        const cones::ConePoint<S> x(cones::random_cone_point<S>(n, rng));
        const M v = 0.5 * cones::random_hermitian<S>(n, rng);
        const M exact = cones::geodesic(x, v, 1.0).matrix();
        const hessian::Point end = hessian::integrate_geodesic(closed, cones::to_coordinates<S>(x.matrix()),
                                                               cones::to_coordinates<S>(v), 1.0, 200);
        const hessian::Point want = cones::to_coordinates<S>(exact);
        ode = std::max(ode, relative((end - want).cwiseAbs().maxCoeff(), want.cwiseAbs().maxCoeff()));
    }

    r.result["kappa"] = kappa;
    r.result["kappa_fd"] = at_identity.det_hess;
    r.result["ma_ratio_min"] = lo;
    r.result["ma_ratio_max"] = hi;
    r.result["ma_spread"] = spread;
    r.result["metric_fd"] = metric;
    r.result["geodesic_ode"] = ode;
    r.result["trace_invariance"] = trace;
    c.at_most("kappa", kappa_err);
    c.at_most("ma_spread", spread);
    c.at_most("metric_fd", metric);
    c.at_most("geodesic_ode", ode);
    c.at_most("trace_invariance", trace);
}

}  // namespace

Report cmd_cone_check(std::size_t n, bool complex, const RunConfig& cfg) {
    Report r;
    r.command = "cone-check";
    if (n < 2) throw DimensionMismatch("cone-check needs n >= 2");
    const auto dim = static_cast<Eigen::Index>(n);
    r.input["n"] = n;
    r.input["field"] = complex ? "complex" : "real";
    r.input["samples"] = samples_or(cfg, 50);

    Checks c(r.command, cfg);
    if (complex) {
        cone_checks<cones::Complex>(dim, cfg, r, c);
    } else {
        cone_checks<double>(dim, cfg, r, c);
    }

    const cones::CartanReport cartan = cones::cartan_frobenius_check(dim, samples_or(cfg, 50), cfg.seed);
    double curvature = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        Rng rng = make_stream(cfg.seed, "cone-check.torus", i);
        hessian::Point u(dim - 1);
        for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = uniform(rng, -1.0, 1.0);
        curvature = std::max(curvature, cones::cartan_torus_curvature(dim, u));
    }
    Json cj;
    cj["commutativity"] = cartan.commutativity;
    cj["associativity"] = cartan.associativity;
    cj["wdvv"] = cartan.wdvv;
    cj["unit"] = cartan.unit;
    cj["invariance"] = cartan.invariance;
    cj["compatibility"] = cartan.compatibility;
    cj["gram_determinant"] = cartan.gram_determinant;
    r.result["cartan"] = cj;
    r.result["torus_curvature"] = curvature;

    c.at_most("cartan", cartan.max_residual());
    c.holds("cartan_wdvv_exact", cartan.wdvv == 0.0);
    c.holds("cartan_compatibility_exact", cartan.compatibility == 0.0);
    c.holds("cartan_nondegenerate", cartan.gram_determinant != 0.0);
    c.at_most("curvature", curvature);
    r.checks = c.take();
    return r;
}

Json to_json(const Report& report, const RunConfig& cfg) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = report.command;
    Json config;
    config["seed"] = cfg.seed;
    config["samples"] = cfg.samples ? Json(*cfg.samples) : Json(nullptr);
    config["level"] = cfg.level ? Json(*cfg.level) : Json(nullptr);
    Json tol = Json::object();
    for (const auto& [k, v] : cfg.tolerances) tol[k] = v;
    config["tolerances"] = tol;
    doc["config"] = config;
    doc["input"] = report.input;
    doc["result"] = report.error ? Json(nullptr) : report.result;

    Json checks = Json::array();
    Json failures = Json::array();
    for (const Check& c : report.checks) {
        Json j;
        j["name"] = c.name;
        if (c.exact) {
            j["value"] = c.passed;
        } else {
            j["value"] = c.value;
            j["tolerance"] = c.tolerance;
        }
        j["passed"] = c.passed;
        checks.push_back(j);
        if (!c.passed) {
            Json f;
            f["check"] = c.name;
            if (!c.exact) {
                f["value"] = c.value;
                f["tolerance"] = c.tolerance;
            }
            failures.push_back(f);
        }
    }
    if (report.error) {
        Json f;
        f["check"] = "error";
        f["kind"] = report.error->first;
        f["message"] = report.error->second;
        failures.push_back(f);
    }
    doc["checks"] = checks;
    doc["passed"] = report.passed();
    doc["failures"] = failures;
    if (report.error) doc["error"] = Json{{"kind", report.error->first}, {"message", report.error->second}};
    return doc;
}

std::string render(const Report& report, const RunConfig& cfg) {
    const Json doc = to_json(report, cfg);
    if (cfg.format == Format::Json) return doc.dump(2) + "\n";

    std::ostringstream os;
    os << report.command << " (seed " << cfg.seed << ")\n";
    if (report.error) {
        os << "error: " << report.error->first << ": " << report.error->second << "\n";
    } else {
        for (const auto& [k, v] : report.result.items()) os << "  " << k << ": " << v.dump() << "\n";
    }
    for (const auto& c : doc["checks"]) {
        os << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
        if (c.contains("tolerance")) os << "  " << c["value"].dump() << " <= " << c["tolerance"].dump();
        os << "\n";
    }
    os << (report.passed() ? "status: PASS" : "status: FAIL") << "\n";
    return os.str();
}

namespace {

std::pair<std::string, double> parse_tolerance(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--tol", "expected name=value, got " + arg);
    const std::string name = arg.substr(0, eq);
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(arg.substr(eq + 1), &used);
        if (used != arg.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw CLI::ValidationError("--tol", "bad value in " + arg);
    }
    if (!(value >= 0.0)) throw CLI::ValidationError("--tol", "tolerances must be nonnegative: " + arg);
    return {name, value};
}

struct Common {
    std::uint64_t seed = kDefaultSeed;
    std::vector<std::string> tol;
    std::string format = "json";
    std::string out;
    std::size_t samples = 0;
    double level = 0.0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Run seed")->capture_default_str();
    sub->add_option("--tol", c.tol, "Tolerance override name=value (repeatable)");
    sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
    sub->add_option("--out", c.out, "Write the report to this file instead of stdout");
    sub->add_option("--samples", c.samples, "Number of sample points (command default when omitted)");
    sub->add_option("--level", c.level, "Slice level c for syz (default 1/d)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical checks for Hessian geometry, exponential families, BHK mirrors, SYZ fibrations and symmetric cones", "gema"};
    app.require_subcommand(1);

    Common common;
    std::string potential, polynomial, wavefunction, params, family;
    std::size_t dim = 2, n = 2;
    bool complex = false;

    auto* gema = app.add_subcommand("gema-check", "Monge-Ampere and pre-Frobenius residuals of a potential");
    gema->add_option("potential", potential, "quadratic | simplex-entropy | softmax | logdet-<n> | logdet-complex-<n>")->required();
    gema->add_option("--dim", dim, "Dimension (free coordinates)")->capture_default_str();
    auto* ef = app.add_subcommand("expfam-check", "Exponential family identities and the dual Monge-Ampere check");
    ef->add_option("--family", family, "Family descriptor (JSON); categorical with dim+1 atoms by default");
    ef->add_option("--dim", dim, "Free coordinates of the default categorical family")->capture_default_str();
    auto* bh = app.add_subcommand("bhk", "Weights, atoms, mirror and symmetry group of an invertible polynomial");
    bh->add_option("polynomial", polynomial, "e.g. \"x0^3*x1 + x1^3\"")->required();
    auto* sy = app.add_subcommand("syz", "Moment map, slice, fiber and isotropy diagnostics");
    sy->add_option("polynomial", polynomial, "Invertible polynomial")->required();
    auto* kv = app.add_subcommand("kvn", "Wavefunction projection and Landau-Ginzburg functionals");
    kv->add_option("wavefunction", wavefunction, "Wavefunction file (.json or .csv)")->required();
    kv->add_option("params", params, "Landau-Ginzburg parameter file (JSON)")->required();
    kv->add_option("--family", family, "Family descriptor (JSON); categorical over the grid cells by default");
    auto* co = app.add_subcommand("cone-check", "Symmetric cone and Cartan torus checks");
    co->add_option("--dim", n, "Matrix size n")->capture_default_str();
    co->add_flag("--complex", complex, "Hermitian instead of real symmetric matrices");
    for (auto* sub : {gema, ef, bh, sy, kv, co}) add_common(sub, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    RunConfig cfg;
    cfg.seed = common.seed;
    cfg.format = common.format == "text" ? Format::Text : Format::Json;
    if (!common.out.empty()) cfg.out = common.out;
    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--samples")) cfg.samples = common.samples;
    if (chosen->count("--level")) cfg.level = common.level;
    const std::string command = chosen->get_name();

    try {
        for (const auto& t : common.tol) {
            const auto [name, value] = parse_tolerance(t);
            const auto& known = default_tolerances(command);
            if (std::none_of(known.begin(), known.end(), [&](const auto& kv) { return kv.first == name; })) {
                throw CLI::ValidationError("--tol", "no tolerance named " + name + " for " + command);
            }
            cfg.tolerances[name] = value;
        }
    } catch (const CLI::Error& e) {
        err << "gema: " << e.what() << "\n";
        return 2;
    }

    Report report;
    report.command = command;
    try {
        if (command == "gema-check") {
            report = cmd_gema_check(potential, dim, cfg);
        } else if (command == "expfam-check") {
            report = cmd_expfam_check(family.empty() ? std::nullopt : std::optional(family), dim, cfg);
        } else if (command == "bhk") {
            report = cmd_bhk(polynomial, cfg);
        } else if (command == "syz") {
            report = cmd_syz(polynomial, cfg);
        } else if (command == "kvn") {
            report = cmd_kvn(wavefunction, params, family.empty() ? std::nullopt : std::optional(family), cfg);
        } else {
            report = cmd_cone_check(n, complex, cfg);
        }
    } catch (const Error& e) {
        report.input = Json::object();
        if (command == "gema-check") {
            report.input["potential"] = potential;
            report.input["dim"] = dim;
        } else if (command == "expfam-check") {
            report.input["family"] = family.empty() ? Json(nullptr) : Json(family);
            report.input["dim"] = dim;
        } else if (command == "bhk" || command == "syz") {
            report.input["polynomial"] = polynomial;
        } else if (command == "kvn") {
            report.input["wavefunction"] = wavefunction;
            report.input["params"] = params;
            report.input["family"] = family.empty() ? Json(nullptr) : Json(family);
        } else {
            report.input["n"] = n;
            report.input["complex"] = complex;
        }
        report.result = Json::object();
        report.checks.clear();
        report.error = {std::string(error_name(e.kind())), e.detail()};
    }

    const std::string text = render(report, cfg);
    if (cfg.out) {
        std::ofstream file(*cfg.out, std::ios::binary);
        if (!file) {
            err << "gema: cannot write " << *cfg.out << "\n";
            return 2;
        }
        file << text;
    } else {
        out << text;
    }
    if (report.error) err << "gema: " << report.error->first << ": " << report.error->second << "\n";
    return report.exit_code();
}

}  // namespace gema::cli
