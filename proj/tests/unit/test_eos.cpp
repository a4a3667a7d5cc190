#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fixtures.hpp"
#include "helmix/eos.hpp"
#include "helmix/tabulated.hpp"

using namespace helmix;

namespace {

Vec va_rho(double s, double x1) {
    const Vec v00 = fixtures::water_ethanol_v00();
    const Vec x = (Vec(2) << x1, 1.0 - x1).finished();
    const double n = s / v00.dot(x);
    return n * x.cwiseProduct(fixtures::water_ethanol().values());
}

}  // namespace

TEST_CASE("volume potential is homogeneous of degree one") {
    const ConstitutiveModel m = fixtures::section16();
    const Vec rho = (Vec(2) << 300.0, 900.0).finished();
    const VolumePotentialEval a = eval_V(m, 300.0, 2e6, rho);
    const VolumePotentialEval b = eval_V(m, 300.0, 2e6, 2.0 * rho);
    CHECK(b.V == doctest::Approx(2.0 * a.V).epsilon(1e-14));
    CHECK(b.Vbar == doctest::Approx(2.0 * a.Vbar).epsilon(1e-14));
    CHECK(rho.dot(a.V_rho) == doctest::Approx(a.V).epsilon(1e-13));
}

TEST_CASE("ideal gas volume potential") {
    const ConstitutiveModel g = fixtures::ideal_gas();
    const Vec rho = (Vec(2) << 1.2, 0.4).finished();
    const double T = 300.0, pi = 1.5e5;
    const VolumePotentialEval e = eval_V(g, T, pi, rho);
    const Vec M = g.molar_masses().values();
    for (int i = 0; i < 2; ++i) CHECK(e.V_rho[i] == doctest::Approx(gas_constant * T / (M[i] * pi)));
    CHECK(e.V == doctest::Approx(rho.dot(e.V_rho)));
}

TEST_CASE("volume additive pressure integral in closed form") {
    const double K = 2.18e9, p0 = 1e5;
    const ConstitutiveModel m = fixtures::volume_additive(K);
    for (double s : {0.97, 1.0, 1.02}) {
        const Vec rho = va_rho(s, 0.4);
        const double p = p0 + K * (s - 1.0);
        const VolumePotentialEval e = eval_V(m, 300.0, p, rho);
        CHECK(e.V == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(e.Vbar == doctest::Approx(K * s * std::log(s)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("pressure solve") {
    const double K = 2.18e9, p0 = 1e5;
    const ConstitutiveModel m = fixtures::volume_additive(K);
    CHECK(solve_pressure(m, 300.0, va_rho(1.0, 0.3)).p == doctest::Approx(p0).epsilon(1e-12));
    for (double s : {0.95, 0.999, 1.003, 1.05}) {
        const PressureSolution sol = solve_pressure(m, 300.0, va_rho(s, 0.6));
        CHECK(sol.p == doctest::Approx(p0 + K * (s - 1.0)).epsilon(1e-10));
        CHECK(std::abs(sol.residual) <= 1e-10);
    }
    const ConstitutiveModel g = fixtures::ideal_gas();
    const Vec rho = (Vec(2) << 1.2, 0.4).finished();
    const MoleData md = mole_data_from_densities(rho, g.molar_masses());
    CHECK(solve_pressure(g, 310.0, rho).p == doctest::Approx(md.n * gas_constant * 310.0).epsilon(1e-12));
}

TEST_CASE("pressure solve failures") {
    const MolarMasses M = fixtures::water_ethanol();
    auto th = fixtures::liquid_thermal(M, true);
    const ConstitutiveModel inc = make_volume_additive(M, infinity, fixtures::water_ethanol_v00(), th, ReferenceState{});
    CHECK_THROWS_AS(solve_pressure(inc, 300.0, va_rho(1.0, 0.5)), IllPosedError);
    const ConstitutiveModel neg = make_simple_law(M, fixtures::water_ethanol_v00(), 0.0, -2.18e9, 293.0, 1e5, th, ReferenceState{});
    CHECK_THROWS_AS(solve_pressure(neg, 300.0, va_rho(1.01, 0.5)), ModelInvalidError);
}

TEST_CASE("monotonicity checks") {
    SampleRegion region;
    region.T_count = 3;
    region.p_count = 4;
    region.x_per_edge = 3;
    CHECK(check_monotonicity(fixtures::volume_additive(), region).pass);
    CHECK(check_monotonicity(fixtures::section16(), region).pass);

    const MolarMasses M{0.0180153};
    auto th = SpeciesThermal::from_specific(M, Vec::Constant(1, 4180.0), Vec::Zero(1), Vec::Zero(1), false);
    const std::string path = "tab_flat.csv";
    {
        std::ofstream f(path);
        f << "T,p,x1,v\n";
        for (double T : {270.0, 300.0, 330.0})
            for (double p : {5e4, 1e6, 5e6, 1e7, 2e7}) f << T << ',' << p << ",1," << 1.8e-5 << '\n';
    }
    const ConstitutiveModel flat(M, load_volume_table(path, 1), th, ReferenceState{}, "tabulated");
    region.x_per_edge = 1;
    const MonotonicityReport r = check_monotonicity(flat, region);
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.violations.empty());
    std::remove(path.c_str());
}
