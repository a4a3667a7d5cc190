#include "helmix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

namespace helmix {

namespace {

// Adding zero maps -0 to +0 so a vanishing extent prints as 0.
double excess_volume_from_extent(const MixingModel& m, double gamma) { return -m.delta_v() * gamma + 0.0; }

}  // namespace

void MixingModel::validate() const {
    if (!(v_W > 0.0) || !(v_E > 0.0) || !(v_C > 0.0))
        throw ConfigError("mixing: molar volumes must be positive");
    if (!(T > 0.0)) throw DomainError("mixing: temperature must be positive");
    if (!(R > 0.0)) throw ConfigError("mixing: gas constant must be positive");
    if (!(kappa_A > 0.0) || !(kappa_S > 0.0)) throw ConfigError("mixing: stoichiometric coefficients must be positive");
}

double equilibrium_constant(const MixingModel& m, double p) {
    if (!(m.T > 0.0)) throw DomainError("mixing: temperature must be positive");
    return std::exp(-(m.dg + m.delta_v() * (p - m.pR)) / (m.R * m.T));
}

double reaction_extent_closed(double x, double K) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("mixing: mole fraction outside [0, 1]");
    if (!(K >= 0.0)) throw DomainError("mixing: equilibrium constant must be nonnegative");
    if (std::isinf(K)) return 0.0;
    const double c = x * (1.0 - x) / (1.0 + K);
    return 2.0 * c / (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * c)));
}

double mass_action_residual(double x, double K, double gamma) {
    return (x - gamma) * (1.0 - x - gamma) - K * gamma * (1.0 - gamma);
}

double reaction_extent_general(double x, double K, double kappa_A, double kappa_S) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("mixing: mole fraction outside [0, 1]");
    if (!(K > 0.0)) throw DomainError("mixing: equilibrium constant must be positive for the general solve");
    if (x == 0.0 || x == 1.0) return 0.0;
    const double gmax = std::min((1.0 - x) / kappa_A, x / kappa_S);
    const double shrink = kappa_A + kappa_S - 1.0;
    const double lnK = std::log(K);
    auto residual = [&](double g) {
        const double total = 1.0 - shrink * g;
        const double yW = (1.0 - x - kappa_A * g) / total;
        const double yE = (x - kappa_S * g) / total;
        const double yC = g / total;
        return kappa_A * std::log(yW) + kappa_S * std::log(yE) - std::log(yC) - lnK;
    };
    // The residual decreases from +inf at g = 0 to -inf at g = gmax.
    double lo = 1e-3 * gmax;
    while (residual(lo) < 0.0 && lo > 1e-300) lo *= 1e-3;
    double gap = 1e-3 * gmax;
    double hi = gmax - gap;
    while (residual(hi) > 0.0 && gap > 1e-300) {
        gap *= 1e-3;
        hi = gmax - gap;
        if (hi == gmax) break;
    }
    const double rlo = residual(lo), rhi = residual(hi);
    if (rlo < 0.0) return 0.0;
    if (rhi > 0.0) return hi;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(residual, lo, hi, rlo, rhi,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

double reaction_extent(const MixingModel& m, double x, double p) {
    const double K = equilibrium_constant(m, p);
    if (m.kappa_A == 1.0 && m.kappa_S == 1.0) return reaction_extent_closed(x, K);
    return reaction_extent_general(x, K, m.kappa_A, m.kappa_S);
}

double excess_volume(const MixingModel& m, double x, double p) {
    return excess_volume_from_extent(m, reaction_extent(m, x, p));
}

std::vector<ExcessVolumeRow> excess_volume_profile(const MixingModel& m, double p, std::size_t points) {
    if (points < 2) throw ConfigError("mixing: profile needs at least 2 points");
    m.validate();
    std::vector<ExcessVolumeRow> rows;
    rows.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(points - 1);
        const double g = reaction_extent(m, x, p);
        rows.push_back({x, g, excess_volume_from_extent(m, g)});
    }
    return rows;
}

}  // namespace helmix
