// Acceptance checks 1-12. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixtures.hpp"
#include "helmix/conjugate.hpp"
#include "helmix/constitutive.hpp"
#include "helmix/eos.hpp"
#include "helmix/format.hpp"
#include "helmix/limits.hpp"
#include "helmix/mixing.hpp"
#include "helmix/potentials.hpp"
#include "helmix/regimes.hpp"
#include "helmix/stability.hpp"

using namespace helmix;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
    if (!ok) o.pass = false;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += what + (ok ? "" : " [x]");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Vec densities(const ConstitutiveModel& m, double T, double p, const Vec& x) {
    return densities_from_tpx(ThermoStateTPX{T, p, Composition(x)}, m);
}

// Fourth-order central difference.
double d5(const std::function<double(double)>& f, double at, double h) {
    return (f(at - 2 * h) - 8 * f(at - h) + 8 * f(at + h) - f(at + 2 * h)) / (12 * h);
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome o;
    const EpsilonScaling e = epsilon_scaling(ReferenceScales{}, 1e-4);
    note(o, rel(e.beta0, 6.07) <= 0.01, "beta0=" + fmt(e.beta0));
    note(o, rel(e.alpha0, 0.46) <= 0.01, "alpha0=" + fmt(e.alpha0));
    return o;
}

Outcome criterion2() {
    Outcome o;
    const ReferenceScales s;
    const InequalityResult r = leading_order_inequality(s, 1e-4, s.T_R, Vec::Ones(1), Vec::Constant(1, s.M_S),
                                                        Vec::Constant(1, s.v_S));
    note(o, rel(r.lhs, 37.0) <= 0.01, "lhs=" + fmt(r.lhs));
    note(o, rel(r.rhs, 5618.0) <= 0.02, "rhs=" + fmt(r.rhs));
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto M = fixtures::water_ethanol();
    const Vec v00 = fixtures::water_ethanol_v00();
    const ReferenceState ref{};
    const double K = 2.18e9;
    // Zero heat capacity and entropy, enthalpy p0 v00: the assembled energy reduces to the closed form.
    auto th = std::make_shared<SpeciesThermal>(Vec::Zero(2), Vec::Zero(2), ref.p0 * v00, true);
    const ConstitutiveModel va = make_volume_additive(M, K, v00, th, ref);
    double worst_va = 0.0;
    std::size_t n_va = 0;
    for (double T : {280.0, 290.0, 300.0, 310.0, 320.0})
        for (double x1 : {0.1, 0.3, 0.5, 0.7, 0.9})
            for (double s : {0.99, 0.995, 1.0, 1.005, 1.01}) {
                const Vec x = (Vec(2) << x1, 1.0 - x1).finished();
                const double n = s / v00.dot(x);
                const Vec rho = n * x.cwiseProduct(M.values());
                const double closed = K * s * std::log(s) + (ref.p0 - K) * (s - 1.0) +
                                      gas_constant * T * n * (x.array() * x.array().log()).sum();
                worst_va = std::max(worst_va, rel(free_energy(va, T, rho), closed));
                ++n_va;
            }
    note(o, worst_va <= 1e-8, "volume additive max rel=" + fmt(worst_va) + " on " + std::to_string(n_va));

    const ConstitutiveModel s16 = fixtures::section16();
    const auto& law = dynamic_cast<const Section16Law&>(s16.volume());
    const double n0 = law.n0(), K16 = law.modulus(), p0 = ref.p0;
    double worst_16 = 0.0;
    std::size_t n_16 = 0;
    for (double T : {280.0, 290.0, 300.0, 310.0, 320.0})
        for (double x1 : {0.1, 0.3, 0.5, 0.7, 0.9})
            for (double d : {-0.05, -0.03, 0.0, 0.03, 0.05}) {
                const Vec x = (Vec(2) << x1, 1.0 - x1).finished();
                const double a = law.shape().tau(T) * law.shape().q(x).value;
                const double r = a * (1.0 + d);
                const double n = r * n0;
                const Vec rho = n * x.cwiseProduct(M.values());
                const double closed = K16 * r * std::log(r) - K16 * r * (1.0 + std::log(a)) - p0 + K16 * a;
                const double mech = free_energy_parts(s16, T, rho).mechanical();
                worst_16 = std::max(worst_16, std::abs(mech - closed) / std::max(std::abs(closed), 1.0));
                ++n_16;
            }
    note(o, worst_16 <= 1e-8, "section16 max rel=" + fmt(worst_16) + " on " + std::to_string(n_16));
    return o;
}

Outcome criterion4() {
    Outcome o;
    struct Case {
        const char* name;
        ConstitutiveModel model;
        double p_lo, p_hi;
    };
    const std::vector<Case> cases = {
        {"volume_additive", fixtures::volume_additive(), 1e5, 1e7},
        {"simple_law", fixtures::simple_law(), 1e5, 1e7},
        {"section16", fixtures::section16(), 1e5, 1e7},
        {"ideal_gas", fixtures::ideal_gas(), 1e4, 1e6},
    };
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const auto& c : cases) {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double T = 280.0 + 40.0 * U(rng);
            const double p = c.p_lo * std::pow(c.p_hi / c.p_lo, U(rng));
            const double x1 = 0.02 + 0.96 * U(rng);
            const Vec rho = densities(c.model, T, p, (Vec(2) << x1, 1.0 - x1).finished());
            const PotentialBundle b = evaluate_bundle(c.model, T, rho);
            worst = std::max(worst, std::abs(-b.f + rho.dot(b.mu) - b.p) / (1.0 + std::abs(b.p)));
        }
        note(o, worst <= 1e-8, std::string(c.name) + " max=" + fmt(worst));
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    const std::vector<std::pair<const char*, ConstitutiveModel>> models = {
        {"volume_additive", fixtures::volume_additive()},
        {"simple_law", fixtures::simple_law()},
        {"section16", fixtures::section16()},
        {"ideal_gas", fixtures::ideal_gas()},
    };
    double w_mu = 0, w_hess = 0, w_s = 0, w_dc = 0;
    for (const auto& [name, m] : models) {
        const bool gas = std::string(name) == "ideal_gas";
        for (double T : {285.0, 305.0})
            for (double x1 : {0.25, 0.6}) {
                const double p = gas ? 2e5 : 3e6;
                const Vec x = (Vec(2) << x1, 1.0 - x1).finished();
                const Vec rho = densities(m, T, p, x);
                const PotentialBundle b = evaluate_bundle(m, T, rho);

                Vec mu_fd(2);
                Mat H_fd(2, 2);
                for (int i = 0; i < 2; ++i) {
                    const double h = 1e-4 * rho[i];
                    mu_fd[i] = d5([&](double r) { Vec q = rho; q[i] = r; return free_energy(m, T, q); }, rho[i], h);
                    for (int j = 0; j < 2; ++j)
                        H_fd(j, i) = d5([&](double r) { Vec q = rho; q[i] = r; return chemical_potentials(m, T, q)[j]; },
                                        rho[i], h);
                }
                w_mu = std::max(w_mu, (mu_fd - b.mu).cwiseAbs().maxCoeff() / std::max(b.mu.cwiseAbs().maxCoeff(), 1.0));
                w_hess = std::max(w_hess, (H_fd - b.hessian).cwiseAbs().maxCoeff() / b.hessian.cwiseAbs().maxCoeff());

                const double fT = d5([&](double t) { return free_energy(m, t, rho); }, T, 1e-2);
                const double s_fd = -fT / rho.sum();
                const StateFunctions sf = state_functions(m, ThermoStateTPX{T, b.p, Composition(x)});
                w_s = std::max(w_s, std::abs(s_fd - sf.s) / std::max(std::abs(sf.s), 1.0));

                // c_p from dh/dT at fixed p, c_v from du/dT at fixed densities.
                const double cp_fd = d5([&](double t) { return state_functions(m, ThermoStateTPX{t, b.p, Composition(x)}).h; }, T, 1e-2);
                const double cv_fd = d5([&](double t) { return evaluate_bundle(m, t, rho).u; }, T, 1e-2);
                const HeatCapacities hc = heat_capacities(m, ThermoStateTPX{T, b.p, Composition(x)});
                w_dc = std::max(w_dc, std::abs((cp_fd - cv_fd) - hc.difference) / std::max(std::abs(hc.difference), 1e-3 * hc.c_p));
            }
    }
    note(o, w_mu <= 1e-6, "mu rel=" + fmt(w_mu));
    note(o, w_hess <= 1e-5, "hessian rel=" + fmt(w_hess));
    note(o, w_s <= 1e-6, "entropy rel=" + fmt(w_s));
    note(o, w_dc <= 1e-6, "c_p-c_v rel=" + fmt(w_dc));
    return o;
}

Outcome criterion6() {
    Outcome o;
    const auto M = fixtures::water_ethanol();
    const ReferenceState ref{};
    // Pivot away from p0 so the on-constraint gap is nonzero for finite K.
    const ModelFamily fam = volume_additive_family(M, fixtures::water_ethanol_v00(), fixtures::liquid_thermal(M, true),
                                                   ref, 3e5, 1e5);
    std::vector<ProbeState> probes;
    const double T = 300.0;
    for (int i = 0; i < 10; ++i) {
        const double x1 = 0.05 + 0.09 * i;
        const Vec x = (Vec(2) << x1, 1.0 - x1).finished();
        probes.push_back(constraint_probe(fam, T, x, 1.0));
        probes.push_back(constraint_probe(fam, T, x, i % 2 ? 1.02 : 0.98));
    }
    const LimitReport rep = family_sweep(fam, probes);
    int on_ok = 0, off_ok = 0, on_n = 0, off_n = 0;
    double slope_lo = 1e9, slope_hi = -1e9, off_min = 1e9;
    for (const auto& r : rep.probes) {
        if (r.on_constraint) {
            ++on_n;
            slope_lo = std::min(slope_lo, r.fitted_slope);
            slope_hi = std::max(slope_hi, r.fitted_slope);
            if (r.classification == "converges" && std::abs(r.fitted_slope + 1.0) <= 0.1) ++on_ok;
        } else {
            ++off_n;
            off_min = std::min(off_min, r.fitted_slope);
            if (r.classification == "diverges" && r.fitted_slope > 0.0) ++off_ok;
        }
    }
    note(o, on_n == 10 && on_ok == on_n, "on-constraint " + std::to_string(on_ok) + "/" + std::to_string(on_n) +
                                             " slopes in [" + fmt(slope_lo) + ", " + fmt(slope_hi) + "]");
    note(o, off_n == 10 && off_ok == off_n,
         "off-constraint " + std::to_string(off_ok) + "/" + std::to_string(off_n) + " min slope " + fmt(off_min));

    std::size_t violations = 0, samples = 0;
    for (std::size_t i = 0; i < probes.size(); i += 4)
        for (double p : {1e5, 5e6}) {
            const SubgradientReport s = check_subgradient(fam, T, probes[i].rho, p, 1000, 7 + i);
            violations += s.violations;
            samples += s.samples;
        }
    note(o, violations == 0, "subgradient violations " + std::to_string(violations) + " of " + std::to_string(samples));
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto M = fixtures::water_ethanol();
    const Vec v00 = fixtures::water_ethanol_v00();
    const double w = v00.mean();
    const Mat W = (Mat(2, 2) << 0.0, w, w, 0.0).finished();
    const double T = 300.0;
    const Composition x{0.4, 0.6};
    std::vector<double> products;
    bool finite = true;
    for (double eq : {1e-2, 5e-3, 2.5e-3}) {
        const ModelFamily fam = volume_additive_family(M, v00, fixtures::liquid_thermal(M, true), ReferenceState{},
                                                       1e5, 1e5, eq * W);
        const PressureSweepResult r = pressure_sweep_definiteness(fam.limit(), T, x);
        finite = finite && !r.pass && std::isfinite(r.failure_offset);
        products.push_back(r.failure_offset * eq);
        note(o, !r.pass, "eps_q=" + fmt(eq) + " failure at p=" + fmt(r.failure_pressure));
    }
    const double ratio = *std::max_element(products.begin(), products.end()) /
                         *std::min_element(products.begin(), products.end());
    note(o, finite && ratio <= 2.0, "offset*eps_q spread " + fmt(ratio));

    const ModelFamily lin = volume_additive_family(M, v00, fixtures::liquid_thermal(M, true), ReferenceState{}, 1e5);
    PressureSweepOptions opt;
    opt.max_offset = 1e4 * 1e5;
    const PressureSweepResult r = pressure_sweep_definiteness(lin.limit(), T, x, opt);
    note(o, r.pass, "linear limit passes to 1e4 pR");
    return o;
}

Outcome criterion8() {
    Outcome o;
    const MolarMasses M{0.0180153};
    const Vec vR = Vec::Constant(1, 1.0 / 55400.0);
    auto th = SpeciesThermal::from_specific(M, Vec::Constant(1, 4180.0), Vec::Zero(1), Vec::Zero(1), false);
    const double TR = 293.0, pR = 1e5;
    std::vector<ThermoStateTPX> states;
    for (double r : {0.8, 0.9, 1.0, 1.1, 1.2})
        for (double p : {1e5, 1e6}) states.push_back({r * TR, p, Composition{1.0}});

    SimpleLawScaling fixed;
    const MuellerSweep a = mueller_sweep(simple_law_family(M, vR, th, ReferenceState{}, TR, pR, fixed), states);
    note(o, a.flag && a.first_negative_index >= 0,
         "fixed beta: first negative at K=" + (a.first_negative_index >= 0 ? fmt(a.schedule[a.first_negative_index]) : "none"));

    SimpleLawScaling scaled;
    scaled.epsilon_scaled = true;
    scaled.beta0 = 0.0;
    const EpsilonScaling e = epsilon_scaling(ReferenceScales{}, 1e-4);
    scaled.beta0 = e.beta0;
    scaled.alpha0 = e.alpha0;
    const MuellerSweep b = mueller_sweep(simple_law_family(M, vR, th, ReferenceState{}, TR, pR, scaled), states);
    double min_margin = infinity;
    for (const auto& row : b.margin)
        for (double m : row) min_margin = std::min(min_margin, m);
    note(o, !b.flag && min_margin > 0.0, "epsilon-scaled: min margin " + fmt(min_margin));
    return o;
}

Outcome criterion9() {
    Outcome o;
    double worst = 0.0;
    bool bounds = true, unimodal = true;
    for (int k = -6; k <= 6; ++k) {
        const double K = std::pow(10.0, k);
        std::vector<double> g;
        for (int i = 0; i <= 100; ++i) {
            const double x = i / 100.0;
            g.push_back(reaction_extent_closed(x, K));
            worst = std::max(worst, std::abs(mass_action_residual(x, K, g.back())));
            bounds = bounds && g.back() >= 0.0 && g.back() <= std::min(x, 1.0 - x) + 1e-15;
        }
        int changes = 0;
        int last = 0;
        for (std::size_t i = 1; i < g.size(); ++i) {
            const double d = g[i] - g[i - 1];
            const int sgn = d > 0 ? 1 : (d < 0 ? -1 : 0);
            if (sgn != 0 && last != 0 && sgn != last) ++changes;
            if (sgn != 0) last = sgn;
        }
        unimodal = unimodal && changes <= 1;
    }
    note(o, worst <= 1e-12, "quadratic residual " + fmt(worst));
    note(o, bounds, "0 <= gamma <= min(x, 1-x)");
    note(o, reaction_extent_closed(0.0, 1.0) == 0.0 && reaction_extent_closed(1.0, 1.0) == 0.0, "gamma(0)=gamma(1)=0");
    note(o, unimodal, "unimodal in x");

    MixingModel m;
    m.v_W = 1.807e-5;
    m.v_E = 5.868e-5;
    m.v_C = 7.5e-5;
    m.dg = -2000.0;
    int increasing = 0;
    for (int i = 0; i < 50; ++i) {
        const double x = 0.02 + 0.96 * (i % 10) / 9.0;
        const double p = 1e5 * std::pow(10.0, (i / 10) * 0.5);
        const double h = 1e-3 * p;
        const double dg = (reaction_extent(m, x, p + h) - reaction_extent(m, x, p - h)) / (2 * h);
        if (dg > 0.0) ++increasing;
    }
    note(o, increasing == 50, "d gamma/dp > 0 at " + std::to_string(increasing) + "/50");
    return o;
}

Outcome criterion10() {
    Outcome o;
    struct Case {
        const char* name;
        ConstitutiveModel model;
        double box_lo, box_hi, win_lo, win_hi;
    };
    const MolarMasses Mw{0.0180153};
    auto th = SpeciesThermal::from_specific(Mw, Vec::Constant(1, 4180.0), Vec::Zero(1), Vec::Zero(1), false);
    const std::vector<Case> cases = {
        {"ideal_gas", make_ideal_gas_mixture(MolarMasses{0.028014}, Vec::Constant(1, 2.5), Vec::Constant(1, 3e5),
                                             Vec::Constant(1, 6.8e3), ReferenceState{}),
         0.05, 12.0, 0.3, 6.0},
        {"volume_additive", make_volume_additive(Mw, 2.18e9, Vec::Constant(1, 1.807e-5), th, ReferenceState{}),
         900.0, 1100.0, 950.0, 1050.0},
    };
    const double T = 300.0;
    for (const auto& c : cases) {
        const Sampler f = free_energy_sampler(c.model, T);
        const ConvexConjugate conj(f, Box{Vec::Constant(1, c.box_lo), Vec::Constant(1, c.box_hi)}, 65);
        std::vector<Vec> mus;
        for (int i = 0; i <= 100; ++i) {
            const double r = c.win_lo + (c.win_hi - c.win_lo) * i / 100.0;
            mus.push_back(f(Vec::Constant(1, r)).grad);
        }
        const DualPdeStats st = dual_pde_residual(c.model, T, [&](const Vec& mu) { return conj(mu).g; }, mus);
        note(o, st.used == 101 && st.max_abs <= 1e-5,
             std::string(c.name) + " dual residual " + fmt(st.max_abs) + " on " + std::to_string(st.used));

        const double mu_lo = f(Vec::Constant(1, 0.5 * (c.box_lo + c.win_lo))).grad[0];
        const double mu_hi = f(Vec::Constant(1, 0.5 * (c.box_hi + c.win_hi))).grad[0];
        const ConvexConjugate bi(conjugate_sampler(conj), Box{Vec::Constant(1, mu_lo), Vec::Constant(1, mu_hi)}, 65);
        double worst = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double r = c.win_lo + (c.win_hi - c.win_lo) * i / 20.0;
            const double fv = f(Vec::Constant(1, r)).f;
            worst = std::max(worst, rel(bi(Vec::Constant(1, r)).g, fv));
        }
        note(o, worst <= 1e-5, std::string(c.name) + " round trip rel " + fmt(worst));
    }
    return o;
}

Outcome criterion11() {
    Outcome o;
    const ConstitutiveModel base = fixtures::volume_additive();
    const ModelFamily fam = band_warp_family(base, 0.5e5, 4e5);
    const double T = 300.0;
    double worst = 0.0;
    for (double x1 : {0.2, 0.5, 0.8}) {
        const ProbeState on = constraint_probe(fam, T, (Vec(2) << x1, 1.0 - x1).finished());
        const double f1 = limit_free_energy(fam, T, on.rho);
        const double h = 1e-5;
        for (int side : {-1, +1}) {
            auto F = [&](double t) { return limit_free_energy(fam, T, t * on.rho); };
            const double lim = 2.0 * F(1.0 + side * h / 2) - F(1.0 + side * h);
            worst = std::max(worst, std::abs(lim - f1) / std::max(std::abs(f1), 1.0));
        }
    }
    note(o, worst <= 1e-8, "one-sided ray limits rel " + fmt(worst));

    std::vector<ProbeState> probes;
    for (double x1 : {0.2, 0.5, 0.8})
        for (double fac : {0.97, 1.03}) probes.push_back(constraint_probe(fam, T, (Vec(2) << x1, 1.0 - x1).finished(), fac));
    const LimitReport rep = family_sweep(fam, probes);
    double resid = 0.0, gap = 0.0;
    bool beyond = true;
    for (const auto& r : rep.probes) {
        resid = std::max(resid, r.final_constraint_residual);
        gap = std::max(gap, std::abs(r.p.back() - r.limit_pressure) / std::abs(r.limit_pressure));
        beyond = beyond && (r.limit_pressure > fam.upper_threshold() || r.limit_pressure < fam.lower_threshold());
    }
    note(o, resid <= 1e-8, "|V(p^m)-1| " + fmt(resid));
    note(o, beyond && gap <= 1e-6, "p^m to root rel " + fmt(gap));
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

Outcome criterion12() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "helmix_acceptance_determinism";
    fs::remove_all(root);
    const fs::path cfg = root / "run.ini";
    fs::create_directories(root);
    {
        std::ofstream f(cfg);
        f << "[model]\ntype = volume_additive\nM = 0.0180153, 0.04607\nv00 = 1.807e-5, 5.868e-5\n"
             "cp = 4180, 2440\n\n[region]\nT_count = 5\np_count = 5\nx_per_edge = 5\n\n"
             "[family]\npivot = 3e5\n\n[probes]\nx = 0.3, 0.7; 0.6, 0.4\nsubgradient_samples = 100\n";
    }
    const char* commands[] = {"eval", "consistency", "limit-sweep", "excess-volume", "regime", "validate"};
    std::size_t compared = 0;
    for (const char* cmd : commands)
        for (const char* format : {"json", "csv"}) {
            std::vector<std::string> bodies;
            for (int run = 0; run < 2; ++run) {
                const fs::path out = root / ("run" + std::to_string(run));
                const std::string model = cfg.string(), outdir = out.string();
                const char* argv[] = {"helmix", cmd, "--model", model.c_str(), "--out", outdir.c_str(),
                                      "--format", format, "--seed", "42"};
                std::ostringstream so, se;
                const int rc = cli::run(10, argv, so, se);
                if (rc != 0) note(o, false, std::string(cmd) + " exit " + std::to_string(rc) + " " + se.str());
                std::string all;
                for (const auto& e : fs::directory_iterator(out)) all += e.path().filename().string() + "\n" + slurp(e.path());
                bodies.push_back(all);
                fs::remove_all(out);
            }
            if (bodies[0] != bodies[1] || bodies[0].empty()) note(o, false, std::string(cmd) + "/" + format + " differs");
            ++compared;
        }
    note(o, o.pass, std::to_string(compared) + " command/format pairs byte-identical");
    fs::remove_all(root);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> checks = {criterion1, criterion2, criterion3,  criterion4,
                                                          criterion5, criterion6, criterion7,  criterion8,
                                                          criterion9, criterion10, criterion11, criterion12};
    int failed = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        Outcome o;
        try {
            o = checks[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail += std::string("exception: ") + e.what();
        }
        std::printf("criterion %zu: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
