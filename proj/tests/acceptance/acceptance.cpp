// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gema/bhk.hpp"
#include "gema/cli/commands.hpp"
#include "gema/cones.hpp"
#include "gema/expfam.hpp"
#include "gema/hessian_core.hpp"
#include "gema/kvn.hpp"
#include "gema/kvn_io.hpp"
#include "gema/potentials.hpp"
#include "gema/random.hpp"
#include "gema/syz.hpp"
#include "oracles.hpp"

using namespace gema;
using hessian::Point;

namespace {

constexpr std::uint64_t kSeed = kDefaultSeed;

// Collects the measurements of one criterion and prints its verdict line.
class Criterion {
   public:
    Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

    void at_most(const std::string& what, double value, double tol) {
        ok_ &= value <= tol;  // NaN fails
        std::ostringstream s;
        s << what << " " << value << " <= " << tol;
        notes_.push_back(s.str());
    }

    void expect(const std::string& what, bool holds) {
        ok_ &= holds;
        notes_.push_back(what + (holds ? " ok" : " MISMATCH"));
    }

    void error(const std::string& what) {
        ok_ = false;
        notes_.push_back("error: " + what);
    }

    bool report() const {
        std::printf("%s %d %s", ok_ ? "PASS" : "FAIL", number_, title_.c_str());
        for (std::size_t i = 0; i < notes_.size(); ++i) std::printf("%s%s", i ? "; " : ": ", notes_[i].c_str());
        std::printf("\n");
        return ok_;
    }

   private:
    int number_;
    std::string title_;
    std::vector<std::string> notes_;
    bool ok_ = true;
};

template <class F>
bool run_criterion(int number, const std::string& title, F body) {
    Criterion c(number, title);
    try {
        body(c);
    } catch (const std::exception& e) {
        c.error(e.what());
    }
    return c.report();
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// ------------------------------------------------------------------ 1

struct GemaCase {
    std::string label;
    hessian::Potential potential;
    std::function<Point(Rng&)> sample;
    std::function<double(const Point&)> density;  // oracle right-hand side
};

std::vector<GemaCase> gema_cases() {
    std::vector<GemaCase> out;
    for (std::size_t n = 1; n <= 5; ++n) {
        auto model = potentials::make_model("simplex-entropy", n);
        out.push_back({"simplex-entropy-" + std::to_string(n), model.potential, model.sample,
                       [](const Point& x) { return oracle::entropy_hessian(x).determinant(); }});
    }
    for (std::size_t n = 1; n <= 5; ++n) {
        auto model = potentials::make_model("softmax", n);
        out.push_back({"softmax-" + std::to_string(n), model.potential, model.sample, [](const Point& x) {
                           const Eigen::VectorXd p = oracle::softmax_probs(x);
                           return p.prod() * (1.0 - p.sum());
                       }});
    }
    for (Eigen::Index n = 1; n <= 3; ++n) {
        auto model = potentials::make_model("logdet-" + std::to_string(n), 0);
        const double kappa = oracle::logdet_hessian<double>(Eigen::MatrixXd::Identity(n, n)).determinant();
        out.push_back({"logdet-" + std::to_string(n), model.potential, model.sample, [n, kappa](const Point& x) {
                           const Eigen::MatrixXd m = cones::from_coordinates<double>(x, n);
                           return kappa * std::pow(m.determinant(), -static_cast<double>(n + 1));
                       }});
    }
    return out;
}

void criterion_gema(Criterion& c) {
    double ma = 0.0, ma_fd = 0.0, compat = 0.0, sym = 0.0;
    for (const auto& gc : gema_cases()) {
        const auto fd = gc.potential.without_closed_forms();
        for (std::size_t i = 0; i < 100; ++i) {
            Rng rng = make_stream(kSeed, "acceptance.gema." + gc.label, i);
            const Point x = gc.sample(rng);
            const double f = gc.density(x);
            ma = std::max(ma, std::abs(hessian::ma_residual(gc.potential, x, gc.density)));
            ma_fd = std::max(ma_fd, std::abs(hessian::ma_residual(fd, x, gc.density)) / f);
            const auto g = hessian::hessian_metric(gc.potential, x);
            const auto a = hessian::third_tensor(gc.potential, x);
            compat = std::max(compat, hessian::compatibility_residual(g, a, hessian::structure_constants(g, a)));
            sym = std::max(sym, hessian::symmetry_defect(hessian::fd_third_raw(fd, x)));
        }
    }
    c.at_most("ma_residual", ma, 1e-5);
    c.at_most("ma_residual_fd_relative", ma_fd, 1e-5);
    c.at_most("compatibility", compat, 1e-6);
    c.at_most("symmetry_fd", sym, 1e-6);
}

// ------------------------------------------------------------------ 2

void criterion_dual_ma(Criterion& c) {
    double worst = 0.0;
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto model = potentials::make_model("simplex-entropy", n);
        for (std::size_t i = 0; i < 100; ++i) {
            Rng rng = make_stream(kSeed, "acceptance.dual", n * 1000 + i);
            const Eigen::VectorXd eta = potentials::simplex_point(model.sample(rng));
            const auto check = expfam::dual_ma_check({eta});
            const double target = 1.0 / eta.prod();
            worst = std::max(worst, std::abs(check.det_hess - target) / target);
        }
    }
    c.at_most("relative_error", worst, 1e-5);
}

// ------------------------------------------------------------------ 3

void criterion_legendre(Criterion& c) {
    double roundtrip = 0.0, fenchel = 0.0;
    for (std::size_t atoms = 2; atoms <= 6; ++atoms) {
        const auto fam = expfam::categorical(atoms);
        for (std::size_t i = 0; i < 100; ++i) {
            Rng rng = make_stream(kSeed, "acceptance.legendre", atoms * 1000 + i);
            Eigen::VectorXd theta(atoms);
            for (auto& v : theta) v = uniform(rng, -3.0, 3.0);
            theta = expfam::gauge_fix(theta);
            const Eigen::VectorXd eta = expfam::mean_params(fam, theta).eta;
            const Eigen::VectorXd back = expfam::gauge_fix(expfam::natural_params({eta}));
            roundtrip = std::max(roundtrip, (back - theta).cwiseAbs().maxCoeff());
            const Eigen::VectorXd again = expfam::mean_params(fam, back).eta;
            roundtrip = std::max(roundtrip, (again - eta).cwiseAbs().maxCoeff());
            // Psi(theta) + Phi(eta) - <theta, eta>, with Phi = sum eta log eta computed here
            const double phi = (eta.array() * eta.array().log()).sum();
            fenchel = std::max(fenchel, std::abs(expfam::log_partition(fam, theta) + phi - theta.dot(eta)));
        }
    }
    c.at_most("roundtrip", roundtrip, 1e-8);
    c.at_most("fenchel", fenchel, 1e-10);
}

// ------------------------------------------------------------------ 4

void criterion_bhk(Criterion& c) {
    using V = std::vector<std::int64_t>;
    auto factors = [](const bhk::ExponentMatrix& e) {
        V out;
        for (const auto& f : oracle::invariant_factors(e.rows())) out.push_back(static_cast<std::int64_t>(f));
        return out;
    };

    const auto quintic = bhk::parse_polynomial("x0^5 + x1^5 + x2^5 + x3^5 + x4^5");
    const auto qw = bhk::weights(quintic);
    const auto qg = bhk::symmetry_group(quintic);
    c.expect("quintic weights", qw.weights == V{1, 1, 1, 1, 1} && qw.weights == oracle::cramer_weights(quintic.rows()).w);
    c.expect("quintic degree", qw.degree == 5);
    c.expect("quintic CY", bhk::is_calabi_yau(qw));
    c.expect("quintic group", qg.order == 3125 && qg.invariant_factors == V{5, 5, 5, 5, 5} &&
                                  factors(bhk::transpose_mirror(quintic)) == qg.invariant_factors);

    const auto loop = bhk::parse_polynomial("x0^2*x1 + x1^2*x2 + x2^2*x0");
    const auto lw = bhk::weights(loop);
    const auto lg = bhk::symmetry_group(loop);
    c.expect("loop3 weights", lw.weights == V{1, 1, 1} && lw.weights == oracle::cramer_weights(loop.rows()).w);
    c.expect("loop3 degree", lw.degree == 3);
    c.expect("loop3 CY", bhk::is_calabi_yau(lw));
    c.expect("loop3 group Z/9", lg.order == 9 && lg.invariant_factors == V{9} &&
                                    factors(bhk::transpose_mirror(loop)) == lg.invariant_factors);

    const bhk::ExponentMatrix chain({{3, 1}, {0, 3}});
    const auto cw = bhk::weights(chain);
    const auto mirror = bhk::transpose_mirror(chain);
    c.expect("chain weights", cw.weights == V{2, 3} && cw.weights == oracle::cramer_weights(chain.rows()).w);
    c.expect("chain degree", cw.degree == 9);
    c.expect("chain not CY", !bhk::is_calabi_yau(cw));
    c.expect("chain mirror weights", bhk::weights(mirror).weights == V{3, 2} &&
                                         oracle::cramer_weights(mirror.rows()).w == V{3, 2});
}

// ------------------------------------------------------------------ 5

void criterion_syz(Criterion& c) {
    double invariance_phase = 0.0, invariance_cx = 0.0, fiber = 0.0, isotropy = 0.0;
    const std::vector<Eigen::VectorXd> weight_sets{
        Eigen::VectorXd::Ones(5),
        (Eigen::VectorXd(2) << 2, 3).finished(),
        (Eigen::VectorXd(4) << 1, 2, 3, 6).finished(),
    };
    for (std::size_t k = 0; k < weight_sets.size(); ++k) {
        const Eigen::VectorXd& w = weight_sets[k];
        const auto n = w.size();
        Rng base = make_stream(kSeed, "acceptance.syz.base", k);
        syz::WeightedProjectivePoint p{Eigen::VectorXcd(n), w};
        for (auto& z : p.z) z = {uniform(base, -1.0, 1.0), uniform(base, -1.0, 1.0)};
        const Eigen::VectorXd eta = syz::moment_map(p).eta;
        const Eigen::VectorXd reduced = syz::reduced_moment_map(p).eta;
        for (std::size_t i = 0; i < 100; ++i) {
            Rng rng = make_stream(kSeed, "acceptance.syz.group", k * 1000 + i);
            Eigen::VectorXd phi(n);
            for (auto& v : phi) v = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            invariance_phase = std::max(invariance_phase, (syz::moment_map(syz::rotate_phases(p, phi)).eta - eta).cwiseAbs().maxCoeff());
            const std::complex<double> t = std::polar(std::exp(uniform(rng, -1.0, 1.0)), uniform(rng, 0.0, 2.0 * std::numbers::pi));
            invariance_cx = std::max(invariance_cx, (syz::reduced_moment_map(syz::act(p, t)).eta - reduced).cwiseAbs().maxCoeff());
        }
        for (const auto& q : syz::sample_fiber({eta}, w, 100, kSeed + k)) {
            fiber = std::max(fiber, (syz::moment_map(q).eta - eta).cwiseAbs().maxCoeff());
            // all pairs of pure phase directions, computed here
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index b = 0; b < n; ++b)
                    isotropy = std::max(isotropy, std::abs(syz::symplectic_pairing(syz::phase_direction(q.z, std::size_t(a)),
                                                                                   syz::phase_direction(q.z, std::size_t(b)))));
            isotropy = std::max(isotropy, syz::isotropy_residual(q, 10, kSeed));
        }
    }
    c.at_most("invariance_phase", invariance_phase, 1e-12);
    c.at_most("invariance_weighted_cx", invariance_cx, 1e-12);
    c.at_most("fiber_moment", fiber, 1e-12);
    c.at_most("isotropy", isotropy, 1e-12);

    bool involution = true;
    for (std::size_t i = 0; i < 20; ++i) {
        Rng rng = make_stream(kSeed, "acceptance.syz.lattice", i);
        const std::size_t dim = 2 + i % 3;
        exact::RationalMatrix b(dim, std::vector<exact::Rational>(dim));
        std::vector<std::vector<std::int64_t>> ints(dim, std::vector<std::int64_t>(dim));
        do {
            for (std::size_t r = 0; r < dim; ++r)
                for (std::size_t s = 0; s < dim; ++s) {
                    ints[r][s] = std::int64_t(rng() % 9) - 4;
                    b[r][s] = ints[r][s];
                }
        } while (oracle::cofactor_det(exact::to_big(ints)) == 0);
        const auto d = syz::dual_basis_exact(b);
        exact::RationalMatrix identity(dim, std::vector<exact::Rational>(dim, 0));
        for (std::size_t r = 0; r < dim; ++r) identity[r][r] = 1;
        involution &= syz::dual_basis_exact(d) == b && exact::multiply(exact::transpose(b), d) == identity;
    }
    c.expect("dual_fiber involution (exact)", involution);

    const auto slice = syz::make_slice(bhk::weights(bhk::parse_polynomial("x0^5 + x1^5 + x2^5 + x3^5 + x4^5")));
    c.expect("quintic slice at 1/d empty", slice.empty());
}

// ------------------------------------------------------------------ 6

template <class S>
double geodesic_gap(Eigen::Index n, std::size_t count) {
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = make_stream(kSeed, "acceptance.cone.geodesic", i);
        const cones::ConePoint<S> x(cones::random_cone_point<S>(n, rng));
        const auto v = cones::random_hermitian<S>(n, rng);
        const auto closed = cones::geodesic(x, v, 1.0).matrix();
        const auto ode = oracle::rk4_cone_geodesic<S>(x.matrix(), v, 1.0, 2000);
        worst = std::max(worst, (closed - ode).cwiseAbs().maxCoeff());
    }
    return worst;
}

void criterion_cones(Criterion& c) {
    double spread = 0.0, kappa = 0.0;
    for (Eigen::Index n : {2, 3}) {
        // kappa from finite differences at the identity; the oracle Gram determinant gives 2 and 8
        const double expected = oracle::logdet_hessian<double>(Eigen::MatrixXd::Identity(n, n)).determinant();
        const double kappa_fd = cones::cone_ma_check(cones::ConePoint<double>(Eigen::MatrixXd::Identity(n, n))).det_hess;
        kappa = std::max(kappa, std::abs(kappa_fd - expected) / expected);
        kappa = std::max(kappa, std::abs(expected - (n == 2 ? 2.0 : 8.0)));
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < 50; ++i) {
            Rng rng = make_stream(kSeed, "acceptance.cone.ma", std::size_t(n) * 1000 + i);
            const cones::ConePoint<double> x(cones::random_cone_point<double>(n, rng));
            const double ratio = cones::cone_ma_check(x).det_hess * std::pow(x.matrix().determinant(), double(n + 1));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        spread = std::max(spread, (hi - lo) / expected);
    }
    c.at_most("kappa", kappa, 1e-5);
    c.at_most("ma_ratio_spread", spread, 1e-5);
    c.at_most("geodesic_ode", std::max(geodesic_gap<double>(3, 10), geodesic_gap<std::complex<double>>(3, 10)), 1e-6);

    double wdvv = 0.0, compat = 0.0;
    for (Eigen::Index n : {2, 3, 4}) {
        const auto r = cones::cartan_frobenius_check(n, 50, kSeed);
        wdvv = std::max(wdvv, r.wdvv);
        compat = std::max(compat, r.compatibility);
    }
    c.expect("cartan wdvv == 0", wdvv == 0.0);
    c.expect("cartan compatibility == 0", compat == 0.0);

    double trace = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        Rng rng = make_stream(kSeed, "acceptance.cone.trace", i);
        const auto x = cones::random_hermitian<std::complex<double>>(3, rng);
        const auto y = cones::random_hermitian<std::complex<double>>(3, rng);
        const auto z = cones::random_hermitian<std::complex<double>>(3, rng);
        trace = std::max(trace, std::abs(cones::trace_form(cones::jordan_product(x, y), z) -
                                         cones::trace_form(x, cones::jordan_product(y, z))));
    }
    c.at_most("trace_invariance", trace, 1e-12);

    double curvature = 0.0;
    for (Eigen::Index n : {2, 3, 4}) {
        Rng rng = make_stream(kSeed, "acceptance.cone.curvature", std::size_t(n));
        Point u(n - 1);
        for (auto& v : u) v = uniform(rng, -1.0, 1.0);
        curvature = std::max(curvature, cones::cartan_torus_curvature(n, u));
    }
    c.at_most("torus_curvature", curvature, 1e-6);
}

// ------------------------------------------------------------------ 7

void criterion_kvn(Criterion& c) {
    const auto params = kvn::load_params(std::string(GEMA_TEST_DATA) + "/lg_params.json");
    double residual = 0.0, energy = 0.0;
    for (const char* name : {"/minimizer_2d.json", "/minimizer_1d.csv"}) {
        const auto psi = kvn::load_wavefunction(std::string(GEMA_TEST_DATA) + name);
        residual = std::max(residual, kvn::lg_residual_max(psi, params));
        const double volume = psi.cell_volume * double(psi.size());
        const double expected = (params.F0 - params.alpha * params.alpha / (2.0 * params.beta)) * volume;
        energy = std::max(energy, std::abs(kvn::lg_free_energy(psi, params) - expected));
    }
    // a 3-D minimizer with other constants and a nontrivial phase
    kvn::LGParams p3;
    p3.alpha = 2.0;
    p3.beta = 0.5;
    p3.F0 = 1.5;
    p3.mass = 0.7;
    p3.grid_spacing = 0.25;
    kvn::WaveFunction cube;
    cube.points.resize(27, 3);
    for (Eigen::Index r = 0; r < 27; ++r) cube.points.row(r) << 0.25 * double(r / 9), 0.25 * double(r / 3 % 3), 0.25 * double(r % 3);
    cube.values.assign(27, std::polar(std::sqrt(p3.alpha / p3.beta), 1.1));
    cube.cell_volume = 0.25 * 0.25 * 0.25;
    residual = std::max(residual, kvn::lg_residual_max(cube, p3));
    energy = std::max(energy, std::abs(kvn::lg_free_energy(cube, p3) -
                                       (p3.F0 - p3.alpha * p3.alpha / (2.0 * p3.beta)) * 27.0 * cube.cell_volume));
    c.at_most("lg_residual", residual, 1e-12);
    c.at_most("free_energy", energy, 1e-10);

    double phase = 0.0;
    Rng rng = make_stream(kSeed, "acceptance.kvn");
    kvn::WaveFunction psi = cube;
    for (auto& v : psi.values) v = {uniform(rng, 0.1, 1.0), uniform(rng, -1.0, 1.0)};
    psi = kvn::normalize(psi);
    const auto fam = expfam::categorical(psi.size());
    const auto base = kvn::project_pi(psi, fam);
    for (std::size_t i = 0; i < 100; ++i) {
        const auto turned = kvn::project_pi(kvn::phase_fiber(psi, uniform(rng, 0.0, 2.0 * std::numbers::pi)), fam);
        phase = std::max(phase, (turned.theta - base.theta).cwiseAbs().maxCoeff());
    }
    c.at_most("pi_phase_invariance", phase, 1e-10);
}

// ------------------------------------------------------------------ 8

std::string capture(const std::vector<std::string>& args, int& code) {
    std::vector<const char*> argv{"gema"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return out.str();
}

void criterion_determinism(Criterion& c) {
    const std::string data = GEMA_TEST_DATA;
    const std::vector<std::vector<std::string>> runs{
        {"gema-check", "simplex-entropy", "--dim", "3", "--samples", "20"},
        {"gema-check", "logdet-2", "--samples", "10"},
        {"expfam-check", "--dim", "4", "--samples", "20"},
        {"bhk", "x0^2*x1 + x1^2*x2 + x2^2*x0"},
        {"syz", "x0^5 + x1^5 + x2^5 + x3^5 + x4^5", "--samples", "20"},
        {"kvn", data + "/minimizer_2d.json", data + "/lg_params.json"},
        {"cone-check", "--dim", "2", "--samples", "10"},
        {"cone-check", "--dim", "2", "--samples", "5", "--complex"},
    };
    std::size_t identical = 0, total = 0;
    for (auto args : runs) {
        for (const char* format : {"json", "text"}) {
            auto full = args;
            full.insert(full.end(), {"--seed", "7", "--format", format});
            int a_code = 0, b_code = 0;
            const std::string a = capture(full, a_code), b = capture(full, b_code);
            ++total;
            if (a == b && a_code == b_code && !a.empty()) ++identical;
        }
    }
    c.expect(std::to_string(identical) + "/" + std::to_string(total) + " reports byte-identical", identical == total);
}

}  // namespace

int main() {
    bool all = true;
    all &= run_criterion(1, "GEMA/pre-Frobenius suite", criterion_gema);
    all &= run_criterion(2, "dual Monge-Ampere", criterion_dual_ma);
    all &= run_criterion(3, "Legendre duality", criterion_legendre);
    all &= run_criterion(4, "BHK suite", criterion_bhk);
    all &= run_criterion(5, "SYZ suite", criterion_syz);
    all &= run_criterion(6, "cone suite", criterion_cones);
    all &= run_criterion(7, "KvN suite", criterion_kvn);
    all &= run_criterion(8, "determinism", criterion_determinism);
    return all ? 0 : 1;
}
