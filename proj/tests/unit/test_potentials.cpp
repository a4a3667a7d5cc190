#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "helmix/potentials.hpp"

using namespace helmix;

namespace {

ConstitutiveModel pure_water(double K = 2.18e9) {
    const MolarMasses M{0.0180153};
    auto th = SpeciesThermal::from_specific(M, Vec::Constant(1, 4180.0), Vec::Constant(1, 3880.0),
                                            Vec::Constant(1, -1.5e7), false);
    return make_volume_additive(M, K, Vec::Constant(1, 1.807e-5), th, ReferenceState{});
}

ConstitutiveModel nitrogen(double z = 2.5) {
    return make_ideal_gas_mixture(MolarMasses{0.028014}, Vec::Constant(1, z), Vec::Constant(1, 3e5),
                                  Vec::Constant(1, 6.8e3), ReferenceState{});
}

}  // namespace

TEST_CASE("mechanically neutral part at the reference temperature") {
    const ConstitutiveModel m = pure_water();
    const ReferenceState ref = m.reference();
    const Vec rho = Vec::Constant(1, 990.0);
    const MechanicallyNeutralPart k = mechanically_neutral_k(m, ref.T0, rho);
    const double expected = -990.0 * (ref.T0 * 3880.0 - (-1.5e7)) - ref.p0 * (990.0 / 0.0180153) * 1.807e-5;
    CHECK(k.k == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("mechanically neutral part is homogeneous") {
    const ConstitutiveModel m = fixtures::section16();
    const Vec rho = (Vec(2) << 250.0, 800.0).finished();
    const MechanicallyNeutralPart a = mechanically_neutral_k(m, 305.0, rho);
    const MechanicallyNeutralPart b = mechanically_neutral_k(m, 305.0, 2.0 * rho);
    CHECK(b.k == doctest::Approx(2.0 * a.k).epsilon(1e-13));
    CHECK(rho.dot(a.grad) == doctest::Approx(a.k).epsilon(1e-12));

    auto kfun = [&](double T, const Vec& r) { return mechanically_neutral_k(m, T, r).k; };
    const HomogeneityReport ok = check_homogeneity(kfun, 305.0, {rho, (Vec(2) << 100.0, 1000.0).finished()});
    CHECK(ok.pass);
    auto bad = [&](double T, const Vec& r) { return kfun(T, r) + r.squaredNorm(); };
    CHECK_FALSE(check_homogeneity(bad, 305.0, {rho}).pass);
}

TEST_CASE("ideal mixture mechanically neutral part") {
    const ConstitutiveModel g = fixtures::ideal_gas();
    const ReferenceState ref = g.reference();
    const double T = 320.0;
    const Vec rho = (Vec(2) << 1.1, 0.3).finished();
    const MoleData md = mole_data_from_densities(rho, g.molar_masses());
    const Vec M = g.molar_masses().values();
    const Vec hR = (Vec(2) << 3.0e5, 2.7e5).finished(), sR = (Vec(2) << 6.8e3, 6.4e3).finished();
    double expected = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double cp = 3.5 * gas_constant / M[i];
        const double gi = hR[i] + cp * (T - ref.T0) - T * (sR[i] + cp * std::log(T / ref.T0));
        // mu0_i = g_i(T, p0) - p0 d_p g_i(T, p0)
        const double mu0 = gi - gas_constant * T / M[i];
        expected += mu0 * rho[i];
    }
    expected += gas_constant * T * md.n * (md.x.values().array() * md.x.values().array().log()).sum();
    CHECK(mechanically_neutral_k(g, T, rho).k == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("free energy on the reference isobar equals k") {
    const ConstitutiveModel m = fixtures::simple_law();
    const double T = 300.0;
    const Vec rho = densities_from_tpx(ThermoStateTPX{T, m.reference().p0, Composition{0.3, 0.7}}, m);
    CHECK(free_energy(m, T, rho) == doctest::Approx(mechanically_neutral_k(m, T, rho).k).epsilon(1e-12));
}

TEST_CASE("ideal mixture chemical potentials") {
    const ConstitutiveModel g = fixtures::ideal_gas();
    const ReferenceState ref = g.reference();
    const double T = 300.0, p = 3e5;
    const Composition x{0.7, 0.3};
    const Vec rho = densities_from_tpx(ThermoStateTPX{T, p, x}, g);
    const Vec mu = chemical_potentials(g, T, rho);
    const Vec M = g.molar_masses().values();
    const Vec hR = (Vec(2) << 3.0e5, 2.7e5).finished(), sR = (Vec(2) << 6.8e3, 6.4e3).finished();
    for (int i = 0; i < 2; ++i) {
        const double cp = 3.5 * gas_constant / M[i];
        const double gi = hR[i] + cp * (T - ref.T0) -
                          T * (sR[i] + cp * std::log(T / ref.T0) - gas_constant / M[i] * std::log(p / ref.p0));
        CHECK(mu[i] == doctest::Approx(gi + gas_constant * T / M[i] * std::log(x[i])).epsilon(1e-11));
    }
}

TEST_CASE("single species identities") {
    const ConstitutiveModel m = pure_water();
    const Vec rho = Vec::Constant(1, 1003.0);
    const PotentialBundle b = evaluate_bundle(m, 290.0, rho);
    CHECK(b.mu[0] == doctest::Approx((b.f + b.p) / rho[0]).epsilon(1e-12));

    const ConstitutiveModel n2 = nitrogen();
    const double T = 300.0;
    const Vec r = Vec::Constant(1, 2.3);
    const double n = r[0] / 0.028014;
    const Mat H = hessian(n2, T, r);
    CHECK(H(0, 0) == doctest::Approx(gas_constant * T / (0.028014 * 0.028014 * n)).epsilon(1e-12));
}

TEST_CASE("Hessian is symmetric and matches finite differences of mu") {
    const ConstitutiveModel m = fixtures::section16();
    const double T = 300.0;
    const Vec rho = densities_from_tpx(ThermoStateTPX{T, 5e6, Composition{0.4, 0.6}}, m);
    const Mat H = hessian(m, T, rho);
    CHECK(H(0, 1) == H(1, 0));
    for (int i = 0; i < 2; ++i) {
        const double h = 1e-4 * rho[i];
        Vec up = rho, dn = rho;
        up[i] += h;
        dn[i] -= h;
        const Vec col = (chemical_potentials(m, T, up) - chemical_potentials(m, T, dn)) / (2 * h);
        for (int j = 0; j < 2; ++j) CHECK(H(j, i) == doctest::Approx(col[j]).epsilon(1e-5));
    }
}

TEST_CASE("incompressible Hessian reports lambda") {
    const MolarMasses M = fixtures::water_ethanol();
    const ConstitutiveModel inc = make_volume_additive(M, infinity, fixtures::water_ethanol_v00(),
                                                       fixtures::liquid_thermal(M, true), ReferenceState{});
    CHECK_THROWS_AS(evaluate_bundle(inc, 300.0, (Vec(2) << 300.0, 700.0).finished()), IllPosedError);
}

TEST_CASE("state functions at the reference state") {
    const ConstitutiveModel m = pure_water();
    const ReferenceState ref = m.reference();
    const StateFunctions s = state_functions(m, ThermoStateTPX{ref.T0, ref.p0, Composition{1.0}});
    CHECK(s.h == doctest::Approx(-1.5e7));
    CHECK(s.s == doctest::Approx(3880.0));
    CHECK(s.g == doctest::Approx(-1.5e7 - ref.T0 * 3880.0));
}

TEST_CASE("state functions connect to the free energy and chemical potentials") {
    for (const ConstitutiveModel& m : {fixtures::simple_law(), fixtures::section16(), fixtures::ideal_gas()}) {
        const double T = 305.0;
        const bool gas = m.volume().family() == "ideal_gas";
        const double p = gas ? 4e5 : 4e6;
        const Composition x{0.45, 0.55};
        const Vec rho = densities_from_tpx(ThermoStateTPX{T, p, x}, m);
        const StateFunctions sf = state_functions(m, ThermoStateTPX{T, p, x});
        const PotentialBundle b = evaluate_bundle(m, T, rho);
        CHECK(rho.sum() * sf.g - b.p == doctest::Approx(b.f).epsilon(1e-10));
        const Vec Mv = m.molar_masses().values();
        const double Mbar = mean_molar_mass(x, m.molar_masses());
        double gm = 0.0;
        for (int i = 0; i < 2; ++i) gm += x[i] * Mv[i] * b.mu[i];
        CHECK(sf.g == doctest::Approx(gm / Mbar).epsilon(1e-8));
        CHECK(sf.u == doctest::Approx(sf.h - p * sf.v / Mbar).epsilon(1e-12));
    }
}

TEST_CASE("heat capacities") {
    const ConstitutiveModel n2 = nitrogen(1.5);
    const HeatCapacities g = heat_capacities(n2, ThermoStateTPX{300.0, 1e5, Composition{1.0}});
    CHECK(g.difference == doctest::Approx(gas_constant / 0.028014).epsilon(1e-12));
    CHECK(g.c_p == doctest::Approx(2.5 * gas_constant / 0.028014).epsilon(1e-12));

    const HeatCapacities va = heat_capacities(pure_water(), ThermoStateTPX{300.0, 1e6, Composition{1.0}});
    CHECK(va.c_p == va.c_v);

    const MolarMasses M{0.0180153};
    auto th = SpeciesThermal::from_specific(M, Vec::Constant(1, 4180.0), Vec::Zero(1), Vec::Zero(1), false);
    const double vR = 1.0 / 55400.0, beta = 2.07e-4, K = 2.18e9, TR = 293.0;
    const ConstitutiveModel w = make_simple_law(M, Vec::Constant(1, vR), beta, K, TR, 1e5, th, ReferenceState{});
    const HeatCapacities hc = heat_capacities(w, ThermoStateTPX{TR, 1e5, Composition{1.0}});
    CHECK(hc.difference == doctest::Approx(TR / 0.0180153 * beta * beta * K * vR).epsilon(1e-10));
    // Second route: c_p from dh/dT at fixed p, c_v from du/dT at fixed density.
    const Vec rho = densities_from_tpx(ThermoStateTPX{TR, 1e5, Composition{1.0}}, w);
    const double h = 1e-2;
    auto hT = [&](double T) { return state_functions(w, ThermoStateTPX{T, 1e5, Composition{1.0}}).h; };
    auto uT = [&](double T) { return evaluate_bundle(w, T, rho).u; };
    const double cp = (hT(TR - 2 * h) - 8 * hT(TR - h) + 8 * hT(TR + h) - hT(TR + 2 * h)) / (12 * h);
    const double cv = (uT(TR - 2 * h) - 8 * uT(TR - h) + 8 * uT(TR + h) - uT(TR + 2 * h)) / (12 * h);
    CHECK(cp - cv == doctest::Approx(hc.difference).epsilon(1e-6));
    CHECK(cp == doctest::Approx(hc.c_p).epsilon(1e-8));
}

TEST_CASE("temperature outside the thermal range is a domain error") {
    const ConstitutiveModel m = pure_water();
    CHECK_THROWS_AS(evaluate_bundle(m, -5.0, Vec::Constant(1, 1000.0)), DomainError);
}
