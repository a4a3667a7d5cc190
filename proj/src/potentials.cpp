#include "helmix/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "helmix/format.hpp"
#include "helmix/numerics.hpp"

namespace helmix {

ThermalPart thermal_part(const ConstitutiveModel& model, double T, const Vec& x) {
    const ThermalData& th = model.thermal();
    const auto [lo, hi] = th.temperature_range();
    if (!(T > 0.0)) throw DomainError("temperature must be positive, got " + format_double(T) + " K");
    if (!(T >= lo && T <= hi))
        throw DomainError("temperature " + format_double(T) + " K outside the caloric data range [" +
                          format_double(lo) + ", " + format_double(hi) + "]");
    const double T0 = model.reference().T0;
    const ThermalIntegrals I = th.integrals(T, T0, x);
    const ScalarJet S = th.molar_entropy(x);
    const ScalarJet H = th.molar_enthalpy(x);

    ThermalPart out;
    out.phi = H - T * S - I.double_int;
    out.phi_T = -(I.int_c_over_t.value + S.value);
    out.phi_TT = -I.heat_capacity.value / T;
    out.C = I.heat_capacity.value;
    out.int_c = I.int_c.value;
    out.int_c_over_t = I.int_c_over_t.value;
    out.S = S.value;
    out.H = H.value;
    return out;
}

namespace {

ScalarJet jet_of(const VolumeJet& j) { return ScalarJet{j.v, j.grad_x, j.hess_x}; }
ScalarJet jet_of(const VolumeIntegral& I) { return ScalarJet{I.v, I.grad_x, I.hess_x}; }

// Everything needed at one state, with the pressure already known.
struct Assembly {
    double T, p, n;
    Vec x;
    ThermalPart th;
    VolumeJet at_p0;
    VolumeJet at_p;
    VolumeIntegral Iv;  // int_{p0}^{p}
};

Assembly assemble(const ConstitutiveModel& model, double T, double p, const MoleData& md) {
    const VolumeLaw& law = model.volume();
    const double p0 = model.reference().p0;
    Assembly a{T, p, md.n, md.x.values(), {}, {}, {}, {}};
    law.require_domain(T, p0, a.x);
    law.require_domain(T, p, a.x);
    a.th = thermal_part(model, T, a.x);
    a.at_p0 = law.evaluate(T, p0, a.x);
    a.at_p = (p == p0) ? a.at_p0 : law.evaluate(T, p, a.x);
    a.Iv = law.integrate(T, p0, p, a.x);
    return a;
}

Assembly assemble(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt) {
    const MoleData md = mole_data_from_densities(rho, model.molar_masses());
    const PressureSolution sol = solve_pressure(model, T, rho, opt);
    return assemble(model, T, sol.p, md);
}

// Molar Gibbs energy G = Phi + int_{p0}^{p} v dp' as an x-jet.
ScalarJet gibbs_jet(const Assembly& a) { return a.th.phi + jet_of(a.Iv); }

double f_of(const Assembly& a) { return a.n * (a.th.phi.value + a.Iv.v) - a.p; }

Vec mu_of(const Assembly& a, const MolarMasses& M) { return homogeneous_gradient(gibbs_jet(a), a.x, M); }

Mat hessian_of(const Assembly& a, const ConstitutiveModel& model) {
    const MolarMasses& M = model.molar_masses();
    const double Vp = a.n * a.at_p.v_p;
    const double V = a.n * a.at_p.v;
    if (std::abs(Vp) * std::max(1.0, std::abs(model.reference().p0)) < SolverOptions{}.incompressible_guard)
        throw IllPosedError("Hessian blows up in the rank-one direction: dV/dp = " + format_double(Vp) +
                            ", lambda = -V/V_p = " + format_double(Vp == 0.0 ? infinity : -V / Vp));
    const Vec V_rho = homogeneous_gradient(jet_of(a.at_p), a.x, M);
    Mat H = homogeneous_hessian(gibbs_jet(a), a.x, a.n, M) - (V_rho * V_rho.transpose()) / Vp;
    return 0.5 * (H + H.transpose());
}

double d2f_dT2_of(const Assembly& a) {
    const VolumeJet& j = a.at_p;
    double tail = 0.0;
    if (j.v_T != 0.0) {
        if (j.v_p == 0.0) return infinity;
        tail = j.v_T * j.v_T / j.v_p;
    }
    return a.n * (a.th.phi_TT + a.Iv.v_TT - tail);
}

StateFunctions state_of(const Assembly& a, const MolarMasses& M) {
    const double Mx = mean_molar_mass(a.x, M);
    StateFunctions sf;
    sf.v = a.at_p.v;
    sf.g = (a.th.phi.value + a.Iv.v) / Mx;
    sf.h = (a.Iv.v - a.T * a.Iv.v_T + a.th.int_c + a.th.H) / Mx;
    sf.s = (-a.Iv.v_T + a.th.int_c_over_t + a.th.S) / Mx;
    sf.u = sf.h - a.p * sf.v / Mx;
    return sf;
}

HeatCapacities heat_of(const Assembly& a, const MolarMasses& M, const ConstitutiveModel& model) {
    const double Mx = mean_molar_mass(a.x, M);
    HeatCapacities hc;
    hc.c_p = (a.th.C - a.T * a.Iv.v_TT) / Mx;
    const VolumeJet& j = a.at_p;
    if (j.v_T == 0.0) {
        hc.difference = 0.0;
    } else {
        if (std::abs(j.v_p / j.v) * std::max(1.0, std::abs(model.reference().p0)) <
            SolverOptions{}.incompressible_guard)
            throw IllPosedError("c_v is undefined at an incompressible point with thermal expansion");
        hc.difference = -(a.T / Mx) * j.v_T * j.v_T / j.v_p;
    }
    hc.c_v = hc.c_p - hc.difference;
    return hc;
}

PotentialBundle bundle_of(const Assembly& a, const ConstitutiveModel& model, Vec rho) {
    const MolarMasses& M = model.molar_masses();
    PotentialBundle b;
    b.T = a.T;
    b.rho = std::move(rho);
    b.p = a.p;
    b.f = f_of(a);
    b.mu = mu_of(a, M);
    b.hessian = hessian_of(a, model);
    const StateFunctions sf = state_of(a, M);
    b.s = sf.s;
    b.u = sf.u;
    b.h = sf.h;
    b.g = sf.g;
    b.v = sf.v;
    const HeatCapacities hc = heat_of(a, M, model);
    b.c_p = hc.c_p;
    b.c_v = hc.c_v;
    b.d2f_dT2 = d2f_dT2_of(a);
    return b;
}

Assembly assemble_tpx(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    const Vec rho = densities_from_tpx(s, model);
    const MoleData md = mole_data_from_densities(rho, model.molar_masses());
    return assemble(model, s.T, s.p, md);
}

}  // namespace

MechanicallyNeutralPart mechanically_neutral_k(const ConstitutiveModel& model, double T, const Vec& rho) {
    const MoleData md = mole_data_from_densities(rho, model.molar_masses());
    const Vec& x = md.x.values();
    const double p0 = model.reference().p0;
    model.volume().require_domain(T, p0, x);
    const ThermalPart th = thermal_part(model, T, x);
    const VolumeJet j = model.volume().evaluate(T, p0, x);
    const ScalarJet phi = th.phi - p0 * jet_of(j);

    MechanicallyNeutralPart k;
    k.k = md.n * phi.value;
    k.grad = homogeneous_gradient(phi, x, model.molar_masses());
    k.hess = homogeneous_hessian(phi, x, md.n, model.molar_masses());
    k.k_T = md.n * (th.phi_T - p0 * j.v_T);
    k.k_TT = md.n * (th.phi_TT - p0 * j.v_TT);
    return k;
}

FreeEnergyParts free_energy_parts(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt) {
    const Assembly a = assemble(model, T, rho, opt);
    const double p0 = model.reference().p0;
    FreeEnergyParts parts;
    parts.k = a.n * (a.th.phi.value - p0 * a.at_p0.v);
    parts.p0_V0 = p0 * a.n * a.at_p0.v;
    parts.Vbar = a.n * a.Iv.v;
    parts.p = a.p;
    parts.f = f_of(a);
    return parts;
}

double free_energy(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt) {
    return f_of(assemble(model, T, rho, opt));
}

Vec chemical_potentials(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt) {
    return mu_of(assemble(model, T, rho, opt), model.molar_masses());
}

Mat hessian(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt) {
    return hessian_of(assemble(model, T, rho, opt), model);
}

double d2f_dT2(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt) {
    return d2f_dT2_of(assemble(model, T, rho, opt));
}

PotentialBundle evaluate_bundle(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt) {
    return bundle_of(assemble(model, T, rho, opt), model, rho);
}

PotentialBundle evaluate_bundle(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    return bundle_of(assemble_tpx(model, s), model, densities_from_tpx(s, model));
}

StateFunctions state_functions(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    const Vec& x = s.x.values();
    const VolumeLaw& law = model.volume();
    const double p0 = model.reference().p0;
    law.require_domain(s.T, s.p, x);
    law.require_domain(s.T, p0, x);
    Assembly a{s.T, s.p, 0.0, x, thermal_part(model, s.T, x), {}, law.evaluate(s.T, s.p, x),
               law.integrate(s.T, p0, s.p, x)};
    a.n = 1.0 / a.at_p.v;
    return state_of(a, model.molar_masses());
}

HeatCapacities heat_capacities(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    const Vec& x = s.x.values();
    const VolumeLaw& law = model.volume();
    const double p0 = model.reference().p0;
    law.require_domain(s.T, s.p, x);
    law.require_domain(s.T, p0, x);
    Assembly a{s.T, s.p, 0.0, x, thermal_part(model, s.T, x), {}, law.evaluate(s.T, s.p, x),
               law.integrate(s.T, p0, s.p, x)};
    a.n = 1.0 / a.at_p.v;
    return heat_of(a, model.molar_masses(), model);
}

HomogeneityReport check_homogeneity(const std::function<double(double, const Vec&)>& k, double T,
                                    const std::vector<Vec>& rhos, double tolerance) {
    HomogeneityReport rep;
    constexpr double lambdas[] = {0.5, 2.0, 3.7};
    for (const Vec& rho : rhos) {
        ++rep.samples;
        const double k0 = k(T, rho);
        for (double lam : lambdas) {
            const double kl = k(T, lam * rho);
            const double scale = std::max({std::abs(kl), std::abs(lam * k0), 1e-300});
            rep.max_scaling_error = std::max(rep.max_scaling_error, std::abs(kl - lam * k0) / scale);
        }
        double euler = 0.0, mag = std::abs(k0);
        for (Eigen::Index i = 0; i < rho.size(); ++i) {
            const double h = fd_step(rho[i]);
            Vec up = rho, dn = rho;
            up[i] += h;
            dn[i] = std::max(0.0, dn[i] - h);
            const double d = (k(T, up) - k(T, dn)) / (up[i] - dn[i]);
            euler += rho[i] * d;
            mag += std::abs(rho[i] * d);
        }
        rep.max_euler_error = std::max(rep.max_euler_error, std::abs(euler - k0) / std::max(mag, 1e-300));
    }
    // The Euler residual carries finite-difference truncation error, hence the looser bar.
    rep.pass = rep.max_scaling_error <= tolerance && rep.max_euler_error <= std::max(tolerance, 1e-6);
    return rep;
}

}  // namespace helmix
