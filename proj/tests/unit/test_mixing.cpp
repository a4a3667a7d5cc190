#include <doctest.h>

#include <cmath>

#include "helmix/mixing.hpp"

using namespace helmix;

namespace {

MixingModel model(double dg = -2000.0) {
    MixingModel m;
    m.v_W = 1.807e-5;
    m.v_E = 5.868e-5;
    m.v_C = 7.5e-5;
    m.dg = dg;
    return m;
}

// Plain bisection on (x - g)(1 - x - g) = K g (1 - g) over [0, min(x, 1 - x)].
double bisect_extent(double x, double K) {
    double lo = 0.0, hi = std::min(x, 1.0 - x);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((x - mid) * (1.0 - x - mid) - K * mid * (1.0 - mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("equilibrium constant") {
    MixingModel m = model(0.0);
    CHECK(equilibrium_constant(m, m.pR) == doctest::Approx(1.0).epsilon(1e-15));
    m.dg = m.R * m.T * std::log(2.0);
    CHECK(equilibrium_constant(m, m.pR) == doctest::Approx(0.5).epsilon(1e-14));
    // The clustered state is denser, so K falls with pressure.
    REQUIRE(m.delta_v() > 0.0);
    CHECK(equilibrium_constant(m, 1e8) < equilibrium_constant(m, 1e7));
    const double expected = std::exp(-(m.dg + m.delta_v() * (1e8 - m.pR)) / (m.R * m.T));
    CHECK(equilibrium_constant(m, 1e8) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("closed-form extent") {
    CHECK(reaction_extent_closed(0.5, 1.0) == doctest::Approx((1.0 - std::sqrt(0.5)) / 2.0).epsilon(1e-15));
    CHECK(reaction_extent_closed(0.2, 0.0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(reaction_extent_closed(0.0, 3.0) == 0.0);
    CHECK(reaction_extent_closed(1.0, 3.0) == 0.0);
    for (double K : {1e-6, 0.3, 1.0, 7.0, 1e6})
        for (double x : {1e-9, 0.1, 0.37, 0.5, 0.93}) {
            const double g = reaction_extent_closed(x, K);
            CHECK(g == doctest::Approx(bisect_extent(x, K)).epsilon(1e-12));
            CHECK(std::abs(mass_action_residual(x, K, g)) <= 1e-14);
        }
}

TEST_CASE("general solver agrees with the closed form") {
    for (double K : {0.01, 1.0, 50.0})
        for (double x : {0.05, 0.5, 0.8})
            CHECK(reaction_extent_general(x, K, 1.0, 1.0) == doctest::Approx(reaction_extent_closed(x, K)).epsilon(1e-10));
}

TEST_CASE("general stoichiometry satisfies mass action") {
    const double kA = 2.0, kS = 1.0, K = 4.0;
    for (double x : {0.1, 0.3, 0.6}) {
        const double g = reaction_extent_general(x, K, kA, kS);
        const double total = 1.0 - (kA + kS - 1.0) * g;
        const double yW = (1.0 - x - kA * g) / total, yE = (x - kS * g) / total, yC = g / total;
        CHECK(yW > 0.0);
        CHECK(yE > 0.0);
        CHECK(std::pow(yW, kA) * std::pow(yE, kS) / yC == doctest::Approx(K).epsilon(1e-10));
    }
}

TEST_CASE("excess volume") {
    MixingModel m = model();
    m.v_C = m.v_W + m.v_E;
    for (const ExcessVolumeRow& r : excess_volume_profile(m, 1e7, 11)) CHECK(r.v_E == 0.0);

    const MixingModel sym = model(0.0);
    const auto rows = excess_volume_profile(sym, sym.pR, 101);
    REQUIRE(rows.size() == 101);
    std::size_t imin = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].v_E < rows[imin].v_E) imin = i;
    CHECK(rows[imin].x == doctest::Approx(0.5));
    CHECK(rows.front().v_E == 0.0);
    CHECK(rows.back().v_E == 0.0);
    CHECK(rows[imin].v_E == doctest::Approx(-sym.delta_v() * (1.0 - std::sqrt(0.5)) / 2.0));

    const MixingModel d = model();
    CHECK(std::abs(excess_volume(d, 0.3, 5e7)) > std::abs(excess_volume(d, 0.3, 1e7)));
    CHECK_THROWS_AS(excess_volume_profile(d, 1e5, 1), ConfigError);
}

TEST_CASE("invalid parameters") {
    MixingModel m = model();
    m.T = -1.0;
    CHECK_THROWS(m.validate());
    CHECK_THROWS_AS(reaction_extent_general(1.5, 1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(reaction_extent_general(0.5, 0.0, 2.0, 1.0), DomainError);
}
