#include "helmix/regimes.hpp"

#include <cmath>
#include <string>

namespace helmix {

namespace {

Eigen::Index solvent_index(int solvent, Eigen::Index n) {
    const Eigen::Index s = solvent < 0 ? n - 1 : solvent;
    if (s < 0 || s >= n) throw ConfigError("regimes: solvent index out of range");
    return s;
}

void check_sizes(const Vec& a, const Vec& b, const Vec& c) {
    if (a.size() == 0 || a.size() != b.size() || a.size() != c.size())
        throw ConfigError("regimes: composition, molar masses and volumes must have equal nonzero length");
}

}  // namespace

void ReferenceScales::validate() const {
    const double positive[] = {L0, t0, T_R, p_R, v_S, M_S, eta, kappa, c_p, b, K};
    for (double v : positive)
        if (!(v > 0.0)) throw ConfigError("regimes: reference scales must be positive");
    if (!(beta >= 0.0)) throw ConfigError("regimes: thermal expansion must be nonnegative");
}

CharacteristicNumbers characteristic_numbers(const ReferenceScales& s) {
    s.validate();
    const double v0 = s.v0();
    CharacteristicNumbers c;
    c.Ma2 = s.L0 * s.L0 * s.M_S / (s.p_R * s.v_S * s.t0 * s.t0);
    c.Re = s.M_S * s.L0 * s.L0 / (s.eta * s.v_S * s.t0);
    c.Fr2 = v0 * v0 / (s.b * s.L0);
    c.Fo = s.kappa * s.v_S * s.t0 / (s.M_S * s.c_p * s.L0 * s.L0);
    return c;
}

EpsilonScaling epsilon_scaling(const ReferenceScales& s, double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError("regimes: epsilon must be positive");
    s.validate();
    return {epsilon, s.beta * s.T_R / std::sqrt(epsilon), s.p_R / (s.K * epsilon)};
}

InequalityResult leading_order_inequality(const ReferenceScales& s, double epsilon, double T, const Vec& x,
                                          const Vec& M, const Vec& vR, int solvent) {
    check_sizes(x, M, vR);
    if (!(T > 0.0)) throw DomainError("regimes: temperature must be positive");
    const EpsilonScaling e = epsilon_scaling(s, epsilon);
    const Eigen::Index S = solvent_index(solvent, x.size());
    double num = 1.0, den = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (i == S) continue;
        num += (M[i] / M[S] - 1.0) * x[i];
        den += (vR[i] / vR[S] - 1.0) * x[i];
    }
    if (!(den > 0.0) || !(num > 0.0))
        throw DomainError("regimes: unphysical composition (nonpositive mass or volume bracket)");
    InequalityResult r;
    r.lhs = e.beta0 * e.beta0;
    r.rhs = s.c_p * s.T_R * s.M_S / (s.p_R * s.v_S) * e.alpha0 * (s.T_R / T) * num / den;
    r.margin = r.rhs - r.lhs;
    return r;
}

DivergenceResult divergence_leading_order(const Vec& x0, const Vec& x0_rate, const Vec& M, const Vec& vR,
                                          double epsilon, int solvent) {
    check_sizes(x0, M, vR);
    if (x0_rate.size() != x0.size()) throw ConfigError("regimes: rate vector length mismatch");
    if (!(epsilon > 0.0)) throw ConfigError("regimes: epsilon must be positive");
    const Eigen::Index S = solvent_index(solvent, x0.size());
    double mass_rate = 0.0, mass_den = 1.0, vol_rate = 0.0, vol_den = 1.0;
    bool dilute = true;
    const double threshold = std::sqrt(epsilon);
    for (Eigen::Index j = 0; j < x0.size(); ++j) {
        if (j == S) continue;
        const double am = M[j] / M[S] - 1.0, av = vR[j] / vR[S] - 1.0;
        mass_rate += am * x0_rate[j];
        mass_den += am * x0[j];
        vol_rate += av * x0_rate[j];
        vol_den += av * x0[j];
        if (x0[j] > threshold) dilute = false;
    }
    if (!(mass_den > 0.0) || !(vol_den > 0.0))
        throw DomainError("regimes: unphysical composition (nonpositive mass or volume bracket)");
    DivergenceResult r;
    r.formula_value = -(mass_rate / mass_den - vol_rate / vol_den);
    r.dilute = dilute;
    r.div = dilute ? 0.0 : r.formula_value;
    return r;
}

double expanded_volume(const ReferenceScales& s, double epsilon, double T, double p, const Vec& x, const Vec& vR) {
    if (x.size() != vR.size()) throw ConfigError("regimes: composition and volume length mismatch");
    const EpsilonScaling e = epsilon_scaling(s, epsilon);
    const double theta = T / s.T_R - 1.0;
    const double pi = p / s.p_R - 1.0;
    const double corr = 1.0 + e.beta0 * theta * std::sqrt(epsilon) +
                        (e.beta0 * e.beta0 * theta * theta - e.alpha0 * pi) * epsilon;
    return vR.dot(x) * corr;
}

BoussinesqReport boussinesq_report(const ReferenceScales& s, double epsilon) {
    BoussinesqReport r;
    r.scaling = epsilon_scaling(s, epsilon);
    r.numbers = characteristic_numbers(s);
    r.buoyancy = r.scaling.beta0;
    r.viscous = 1.0 / r.numbers.Re;
    r.heat = r.numbers.Fo;
    r.fr2_over_ma = r.numbers.Fr2 / std::sqrt(r.numbers.Ma2);
    r.volume_sqrt_eps = r.scaling.beta0;
    r.volume_eps_theta2 = r.scaling.beta0 * r.scaling.beta0;
    r.volume_eps_pi = -r.scaling.alpha0;
    return r;
}

}  // namespace helmix
