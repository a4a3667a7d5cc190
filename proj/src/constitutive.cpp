#include "helmix/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "helmix/numerics.hpp"

namespace helmix {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void require_size(const Vec& v, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(v.size()) != n)
        throw ModelInvalidError(std::string(what) + ": expected " + std::to_string(n) + " entries");
}

Mat square_or_zero(const Mat& m, Eigen::Index n, const char* what) {
    if (m.size() == 0) return Mat::Zero(n, n);
    if (m.rows() != n || m.cols() != n) throw ModelInvalidError(std::string(what) + ": matrix size mismatch");
    return 0.5 * (m + m.transpose());
}

// int_{pf}^{pt} dp / (Df + (p - pf) iota), written to stay accurate for iota -> 0.
double inverse_linear_integral(double Df, double iota, double dp) {
    if (iota == 0.0) return dp / Df;
    return std::log1p(dp * iota / Df) / iota;
}

}  // namespace

VolumeIntegral VolumeIntegral::zero(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return VolumeIntegral{0.0, 0.0, 0.0, Vec::Zero(k), Mat::Zero(k, k)};
}

VolumeIntegral operator+(const VolumeIntegral& a, const VolumeIntegral& b) {
    return VolumeIntegral{a.v + b.v, a.v_T + b.v_T, a.v_TT + b.v_TT, a.grad_x + b.grad_x, a.hess_x + b.hess_x};
}

VolumeIntegral operator-(const VolumeIntegral& a, const VolumeIntegral& b) {
    return VolumeIntegral{a.v - b.v, a.v_T - b.v_T, a.v_TT - b.v_TT, a.grad_x - b.grad_x, a.hess_x - b.hess_x};
}

VolumeIntegral operator*(const VolumeIntegral& a, double s) {
    return VolumeIntegral{a.v * s, a.v_T * s, a.v_TT * s, a.grad_x * s, a.hess_x * s};
}

double magnitude(const VolumeIntegral& a) {
    return std::abs(a.v) + std::abs(a.v_T) + std::abs(a.v_TT) + a.grad_x.cwiseAbs().sum() +
           a.hess_x.cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// VolumeLaw base

std::pair<double, double> VolumeLaw::volume_and_slope(double T, double p, const Vec& x) const {
    const VolumeJet j = evaluate(T, p, x);
    return {j.v, j.v_p};
}

bool VolumeLaw::in_domain(double T, double p, const Vec& x) const {
    const auto [tl, tu] = temperature_bounds();
    if (!(T > tl && T < tu)) return false;
    const PressureBounds b = pressure_bounds(T, x);
    return p > b.lower && p < b.upper;
}

void VolumeLaw::require_domain(double T, double p, const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != species_)
        throw DomainError("composition has " + std::to_string(x.size()) + " entries, model has " +
                          std::to_string(species_));
    const auto [tl, tu] = temperature_bounds();
    if (!(T > tl)) throw DomainError("temperature " + fmt(T) + " K is not above T_inf = " + fmt(tl));
    if (!(T < tu)) throw DomainError("temperature " + fmt(T) + " K is not below T_sup = " + fmt(tu));
    const PressureBounds b = pressure_bounds(T, x);
    if (!(b.lower < b.upper))
        throw DomainError(family() + ": empty pressure range at T = " + fmt(T) + " K for this composition");
    if (!(p > b.lower)) throw DomainError("pressure " + fmt(p) + " Pa is not above p_inf = " + fmt(b.lower));
    if (!(p < b.upper)) throw DomainError("pressure " + fmt(p) + " Pa is not below p_sup = " + fmt(b.upper));
}

VolumeIntegral VolumeLaw::integrate(double T, double p_from, double p_to, const Vec& x) const {
    return integrate_numerically(T, p_from, p_to, x);
}

VolumeIntegral VolumeLaw::integrate_numerically(double T, double p_from, double p_to, const Vec& x) const {
    if (p_from == p_to) return VolumeIntegral::zero(species_);
    // Temperature derivatives are carried as T v_T and T^2 v_TT so that one error
    // norm controls entries of comparable size.
    auto integrand = [&](double p) {
        const VolumeJet j = evaluate(T, p, x);
        return VolumeIntegral{j.v, T * j.v_T, T * T * j.v_TT, j.grad_x, j.hess_x};
    };
    QuadratureOptions opt;
    opt.abs_tol = 1e-12 * (1.0 + std::abs(p_to - p_from)) * std::abs(volume(T, p_from, x));
    opt.rel_tol = 1e-12;
    VolumeIntegral r = integrate_adaptive<VolumeIntegral>(integrand, p_from, p_to, opt, breakpoints(T, x));
    r.v_T /= T;
    r.v_TT /= T * T;
    return r;
}

// ---------------------------------------------------------------------------
// Volume-additive law (with optional quadratic composition term)

VolumeAdditiveLaw::VolumeAdditiveLaw(double K, double p_pivot, Vec v00, Mat quadratic)
    : VolumeLaw(static_cast<std::size_t>(v00.size())), p_pivot_(p_pivot), v00_(std::move(v00)) {
    if (!(K > 0.0)) throw ModelInvalidError("volume_additive: modulus K must be positive");
    inv_K_ = std::isinf(K) ? 0.0 : 1.0 / K;
    Q_ = square_or_zero(quadratic, v00_.size(), "volume_additive quadratic term");
}

double VolumeAdditiveLaw::composition_part(const Vec& x) const { return v00_.dot(x) + 0.5 * x.dot(Q_ * x); }

PressureBounds VolumeAdditiveLaw::pressure_bounds(double, const Vec& x) const {
    if (!(composition_part(x) > 0.0)) return {infinity, -infinity};
    return {inv_K_ > 0.0 ? p_pivot_ - 1.0 / inv_K_ : -infinity, infinity};
}

VolumeJet VolumeAdditiveLaw::evaluate(double, double p, const Vec& x) const {
    const double c = 1.0 / (1.0 + (p - p_pivot_) * inv_K_);
    const double L = composition_part(x);
    VolumeJet j;
    j.v = c * L;
    j.v_p = -inv_K_ * c * c * L;
    j.grad_x = c * (v00_ + Q_ * x);
    j.hess_x = c * Q_;
    return j;
}

std::pair<double, double> VolumeAdditiveLaw::volume_and_slope(double, double p, const Vec& x) const {
    const double c = 1.0 / (1.0 + (p - p_pivot_) * inv_K_);
    const double L = composition_part(x);
    return {c * L, -inv_K_ * c * c * L};
}

VolumeIntegral VolumeAdditiveLaw::integrate(double, double p_from, double p_to, const Vec& x) const {
    const double Df = 1.0 + (p_from - p_pivot_) * inv_K_;
    const double I = inverse_linear_integral(Df, inv_K_, p_to - p_from);
    VolumeIntegral r = VolumeIntegral::zero(species());
    r.v = I * composition_part(x);
    r.grad_x = I * (v00_ + Q_ * x);
    r.hess_x = I * Q_;
    return r;
}

// ---------------------------------------------------------------------------
// Simple law with thermal expansion and elastic compression

SimpleLawVolume::SimpleLawVolume(Vec vR, double beta, double K, double TR, double pR)
    : VolumeLaw(static_cast<std::size_t>(vR.size())), vR_(std::move(vR)), beta_(beta), TR_(TR), pR_(pR) {
    if (K == 0.0 || std::isnan(K)) throw ModelInvalidError("simple_law: modulus K must be nonzero");
    if (!(TR > 0.0)) throw ModelInvalidError("simple_law: T_R must be positive");
    inv_K_ = std::isinf(K) ? 0.0 : 1.0 / K;
}

double SimpleLawVolume::denom(double T, double p) const { return 1.0 - beta_ * (T - TR_) + (p - pR_) * inv_K_; }

PressureBounds SimpleLawVolume::pressure_bounds(double T, const Vec& x) const {
    if (!(vR_.dot(x) > 0.0)) return {infinity, -infinity};
    const double thermal = 1.0 - beta_ * (T - TR_);
    if (inv_K_ > 0.0) return {pR_ - thermal / inv_K_, infinity};
    if (inv_K_ < 0.0) return {-infinity, pR_ - thermal / inv_K_};
    if (thermal > 0.0) return {-infinity, infinity};
    return {infinity, -infinity};
}

VolumeJet SimpleLawVolume::evaluate(double T, double p, const Vec& x) const {
    const double D = denom(T, p);
    const double L = vR_.dot(x);
    VolumeJet j;
    j.v = L / D;
    j.v_p = -inv_K_ * L / (D * D);
    j.v_T = beta_ * L / (D * D);
    j.v_TT = 2.0 * beta_ * beta_ * L / (D * D * D);
    j.grad_x = vR_ / D;
    j.hess_x = Mat::Zero(vR_.size(), vR_.size());
    return j;
}

std::pair<double, double> SimpleLawVolume::volume_and_slope(double T, double p, const Vec& x) const {
    const double D = denom(T, p);
    const double L = vR_.dot(x);
    return {L / D, -inv_K_ * L / (D * D)};
}

VolumeIntegral SimpleLawVolume::integrate(double T, double p_from, double p_to, const Vec& x) const {
    const double Df = denom(T, p_from), Dt = denom(T, p_to), dp = p_to - p_from;
    const double I1 = inverse_linear_integral(Df, inv_K_, dp);
    const double I2 = dp / (Df * Dt);
    const double I3 = dp * (Df + Dt) / (2.0 * Df * Df * Dt * Dt);
    const double L = vR_.dot(x);
    VolumeIntegral r = VolumeIntegral::zero(species());
    r.v = L * I1;
    r.v_T = beta_ * L * I2;
    r.v_TT = 2.0 * beta_ * beta_ * L * I3;
    r.grad_x = vR_ * I1;
    return r;
}

// ---------------------------------------------------------------------------
// Nonideal law with a composition- and temperature-dependent activity shape

ScalarJet Section16Shape::q(const Vec& x) const {
    ScalarJet j;
    j.value = a_lin.dot(x) + 0.5 * x.dot(a_quad * x);
    j.grad = a_lin + a_quad * x;
    j.hess = a_quad;
    return j;
}

double Section16Shape::tau(double T) const {
    const double d = T - T_ref;
    return 1.0 + t1 * d + t2 * d * d;
}

double Section16Shape::tau_T(double T) const { return t1 + 2.0 * t2 * (T - T_ref); }

Section16Law::Section16Law(double K, double n0, double p0, Section16Shape shape)
    : VolumeLaw(static_cast<std::size_t>(shape.a_lin.size())), n0_(n0), p0_(p0), shape_(std::move(shape)) {
    if (!(K > 0.0)) throw ModelInvalidError("section16: modulus K must be positive");
    if (!(n0 > 0.0)) throw ModelInvalidError("section16: reference density n0 must be positive");
    inv_K_ = std::isinf(K) ? 0.0 : 1.0 / K;
    shape_.a_quad = square_or_zero(shape_.a_quad, shape_.a_lin.size(), "section16 a_quad");
}

PressureBounds Section16Law::pressure_bounds(double T, const Vec& x) const {
    const double a = shape_.tau(T) * shape_.q(x).value;
    if (inv_K_ > 0.0) return {p0_ - a / inv_K_, infinity};
    if (a > 0.0) return {-infinity, infinity};
    return {infinity, -infinity};
}

VolumeJet Section16Law::evaluate(double T, double p, const Vec& x) const {
    const ScalarJet q = shape_.q(x);
    const double tau = shape_.tau(T);
    const double a = tau * q.value;
    const double aT = shape_.tau_T(T) * q.value;
    const double aTT = shape_.tau_TT() * q.value;
    const Vec ga = tau * q.grad;
    const Mat ha = tau * q.hess;
    const double D = a + (p - p0_) * inv_K_;
    const double D2 = D * D, D3 = D2 * D;
    VolumeJet j;
    j.v = 1.0 / (n0_ * D);
    j.v_p = -inv_K_ / (n0_ * D2);
    j.v_T = -aT / (n0_ * D2);
    j.v_TT = -aTT / (n0_ * D2) + 2.0 * aT * aT / (n0_ * D3);
    j.grad_x = -ga / (n0_ * D2);
    j.hess_x = -ha / (n0_ * D2) + 2.0 * ga * ga.transpose() / (n0_ * D3);
    return j;
}

std::pair<double, double> Section16Law::volume_and_slope(double T, double p, const Vec& x) const {
    const double D = shape_.tau(T) * shape_.q(x).value + (p - p0_) * inv_K_;
    return {1.0 / (n0_ * D), -inv_K_ / (n0_ * D * D)};
}

VolumeIntegral Section16Law::integrate(double T, double p_from, double p_to, const Vec& x) const {
    const ScalarJet q = shape_.q(x);
    const double tau = shape_.tau(T);
    const double a = tau * q.value;
    const double aT = shape_.tau_T(T) * q.value;
    const double aTT = shape_.tau_TT() * q.value;
    const Vec ga = tau * q.grad;
    const Mat ha = tau * q.hess;
    const double Df = a + (p_from - p0_) * inv_K_, Dt = a + (p_to - p0_) * inv_K_, dp = p_to - p_from;
    const double I1 = inverse_linear_integral(Df, inv_K_, dp);
    const double I2 = dp / (Df * Dt);
    const double I3 = dp * (Df + Dt) / (2.0 * Df * Df * Dt * Dt);
    VolumeIntegral r;
    r.v = I1 / n0_;
    r.v_T = -aT * I2 / n0_;
    r.v_TT = (-aTT * I2 + 2.0 * aT * aT * I3) / n0_;
    r.grad_x = -ga * I2 / n0_;
    r.hess_x = (-ha * I2 + 2.0 * ga * ga.transpose() * I3) / n0_;
    return r;
}

// ---------------------------------------------------------------------------
// Ideal gas

VolumeJet IdealGasLaw::evaluate(double T, double p, const Vec& x) const {
    VolumeJet j;
    j.v = gas_constant * T / p;
    j.v_p = -gas_constant * T / (p * p);
    j.v_T = gas_constant / p;
    j.v_TT = 0.0;
    j.grad_x = Vec::Constant(x.size(), j.v);
    j.hess_x = Mat::Zero(x.size(), x.size());
    return j;
}

std::pair<double, double> IdealGasLaw::volume_and_slope(double T, double p, const Vec&) const {
    return {gas_constant * T / p, -gas_constant * T / (p * p)};
}

VolumeIntegral IdealGasLaw::integrate(double T, double p_from, double p_to, const Vec& x) const {
    const double l = std::log(p_to / p_from);
    VolumeIntegral r = VolumeIntegral::zero(static_cast<std::size_t>(x.size()));
    r.v = gas_constant * T * l;
    r.v_T = gas_constant * l;
    r.grad_x = Vec::Constant(x.size(), r.v);
    return r;
}

// ---------------------------------------------------------------------------
// Band warp

BandWarpLaw::BandWarpLaw(VolumeLawPtr base, double a, double b, double eps, double p0)
    : VolumeLaw(base ? base->species() : 0), base_(std::move(base)), a_(a), b_(b), eps_(eps), p0_(p0) {
    if (!base_) throw ModelInvalidError("band_warp: missing base law");
    if (!(a < p0 && p0 < b)) throw ModelInvalidError("band_warp: thresholds must satisfy a < p0 < b");
    if (!(eps >= 0.0 && eps <= 1.0)) throw ModelInvalidError("band_warp: eps must lie in [0, 1]");
}

double BandWarpLaw::warp(double p) const {
    const double clamped = std::clamp(p, a_, b_);
    return p0_ + std::min(p - a_, 0.0) + std::max(p - b_, 0.0) + eps_ * (clamped - p0_);
}

double BandWarpLaw::warp_slope(double p) const { return (p < a_ || p > b_) ? 1.0 : eps_; }

PressureBounds BandWarpLaw::pressure_bounds(double T, const Vec& x) const {
    const PressureBounds wb = base_->pressure_bounds(T, x);
    const double wa = warp(a_), wbnd = warp(b_);
    auto inverse = [&](double w) {
        if (std::isinf(w)) return w;
        if (w < wa) return a_ + (w - wa);
        if (w > wbnd) return b_ + (w - wbnd);
        if (eps_ > 0.0) return p0_ + (w - p0_) / eps_;
        return w < p0_ ? a_ : b_;
    };
    return {inverse(wb.lower), inverse(wb.upper)};
}

VolumeJet BandWarpLaw::evaluate(double T, double p, const Vec& x) const {
    VolumeJet j = base_->evaluate(T, warp(p), x);
    j.v_p *= warp_slope(p);
    return j;
}

std::pair<double, double> BandWarpLaw::volume_and_slope(double T, double p, const Vec& x) const {
    auto [v, vp] = base_->volume_and_slope(T, warp(p), x);
    return {v, vp * warp_slope(p)};
}

VolumeIntegral BandWarpLaw::integrate(double T, double p_from, double p_to, const Vec& x) const {
    const double sign = p_to >= p_from ? 1.0 : -1.0;
    const double lo = std::min(p_from, p_to), hi = std::max(p_from, p_to);
    VolumeIntegral total = VolumeIntegral::zero(species());
    const double cuts[4] = {lo, std::clamp(a_, lo, hi), std::clamp(b_, lo, hi), hi};
    for (int k = 0; k < 3; ++k) {
        const double u1 = cuts[k], u2 = cuts[k + 1];
        if (!(u2 > u1)) continue;
        const bool band = (k == 1);
        const double slope = band ? eps_ : 1.0;
        if (slope == 0.0) {
            const VolumeJet j = base_->evaluate(T, warp(u1), x);
            total = total + VolumeIntegral{j.v, j.v_T, j.v_TT, j.grad_x, j.hess_x} * (u2 - u1);
        } else {
            total = total + base_->integrate(T, warp(u1), warp(u2), x) * (1.0 / slope);
        }
    }
    return total * sign;
}

// ---------------------------------------------------------------------------
// Function-backed volume law

FunctionVolumeLaw::FunctionVolumeLaw(std::size_t species, Fn fn, PressureBounds bounds, std::string name)
    : VolumeLaw(species), fn_(std::move(fn)), bounds_(bounds), name_(std::move(name)) {
    if (!fn_) throw ModelInvalidError("function volume law: empty callable");
}

VolumeJet FunctionVolumeLaw::evaluate(double T, double p, const Vec& x) const {
    VolumeJet j;
    j.v = fn_(T, p, x);
    const double hp = fd_step(p);
    j.v_p = (fn_(T, p + hp, x) - fn_(T, p - hp, x)) / (2.0 * hp);
    const double hT = fd_step(T);
    j.v_T = (fn_(T + hT, p, x) - fn_(T - hT, p, x)) / (2.0 * hT);
    const double hT2 = fd_step_second(T);
    j.v_TT = (fn_(T + hT2, p, x) - 2.0 * j.v + fn_(T - hT2, p, x)) / (hT2 * hT2);
    const ScalarJet xj = simplex_fd_jet([&](const Vec& y) { return fn_(T, p, y); }, x);
    j.grad_x = xj.grad;
    j.hess_x = xj.hess;
    return j;
}

// ---------------------------------------------------------------------------
// Thermal data

namespace {

struct ThermalTriple {
    ScalarJet c, c_over_t, weighted;
};

ThermalTriple operator+(const ThermalTriple& a, const ThermalTriple& b) {
    return {a.c + b.c, a.c_over_t + b.c_over_t, a.weighted + b.weighted};
}
ThermalTriple operator-(const ThermalTriple& a, const ThermalTriple& b) {
    return {a.c - b.c, a.c_over_t - b.c_over_t, a.weighted - b.weighted};
}
ThermalTriple operator*(const ThermalTriple& a, double s) { return {a.c * s, a.c_over_t * s, a.weighted * s}; }
double magnitude(const ThermalTriple& a) {
    return magnitude(a.c) + magnitude(a.c_over_t) + magnitude(a.weighted);
}

}  // namespace

ThermalIntegrals ThermalData::integrals(double T, double T0, const Vec& x) const {
    ThermalIntegrals out;
    out.heat_capacity = molar_heat_capacity(T, x);
    if (T == T0) {
        out.int_c = out.int_c_over_t = out.double_int = ScalarJet::zero(species());
        return out;
    }
    // The double integral int_{T0}^{T} int_{T0}^{theta} g reduces to int_{T0}^{T} (T - theta) g.
    auto f = [&](double theta) {
        const ScalarJet c = molar_heat_capacity(theta, x);
        ThermalTriple t{c, c * (1.0 / theta), c * ((T - theta) / theta)};
        return t;
    };
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-12 * std::abs(out.heat_capacity.value) * (1.0 + std::abs(T - T0));
    const ThermalTriple r = integrate_adaptive<ThermalTriple>(f, T0, T, opt);
    out.int_c = r.c;
    out.int_c_over_t = r.c_over_t;
    out.double_int = r.weighted;
    return out;
}

SpeciesThermal::SpeciesThermal(Vec molar_cp, Vec molar_s, Vec molar_h, bool ideal_mixing)
    : ThermalData(static_cast<std::size_t>(molar_cp.size())),
      C_(std::move(molar_cp)),
      S_(std::move(molar_s)),
      H_(std::move(molar_h)),
      ideal_(ideal_mixing) {
    require_size(S_, species(), "species thermal entropies");
    require_size(H_, species(), "species thermal enthalpies");
}

std::shared_ptr<SpeciesThermal> SpeciesThermal::from_specific(const MolarMasses& M, const Vec& cp, const Vec& s,
                                                              const Vec& h, bool ideal_mixing) {
    require_size(cp, M.size(), "specific heat capacities");
    require_size(s, M.size(), "specific reference entropies");
    require_size(h, M.size(), "specific reference enthalpies");
    return std::make_shared<SpeciesThermal>(cp.cwiseProduct(M.values()), s.cwiseProduct(M.values()),
                                            h.cwiseProduct(M.values()), ideal_mixing);
}

ScalarJet SpeciesThermal::molar_heat_capacity(double, const Vec& x) const {
    const auto n = static_cast<Eigen::Index>(species());
    return ScalarJet{C_.dot(x), C_, Mat::Zero(n, n)};
}

ScalarJet SpeciesThermal::molar_entropy(const Vec& x) const {
    const auto n = static_cast<Eigen::Index>(species());
    ScalarJet j{S_.dot(x), S_, Mat::Zero(n, n)};
    if (ideal_) {
        if (!(x.minCoeff() > x_floor))
            throw DomainError("ideal entropy of mixing needs an interior composition (min x_i > 1e-12)");
        const Vec lx = x.array().log().matrix();
        j.value -= gas_constant * x.dot(lx);
        j.grad -= gas_constant * (lx.array() + 1.0).matrix();
        j.hess.diagonal() -= gas_constant * x.cwiseInverse();
    }
    return j;
}

ScalarJet SpeciesThermal::molar_enthalpy(const Vec& x) const {
    const auto n = static_cast<Eigen::Index>(species());
    return ScalarJet{H_.dot(x), H_, Mat::Zero(n, n)};
}

ThermalIntegrals SpeciesThermal::integrals(double T, double T0, const Vec& x) const {
    const auto n = static_cast<Eigen::Index>(species());
    auto linear = [&](double factor) { return ScalarJet{factor * C_.dot(x), factor * C_, Mat::Zero(n, n)}; };
    const double lr = std::log(T / T0);
    ThermalIntegrals out;
    out.heat_capacity = linear(1.0);
    out.int_c = linear(T - T0);
    out.int_c_over_t = linear(lr);
    out.double_int = linear(T * lr - (T - T0));
    return out;
}

FunctionThermal::FunctionThermal(MolarMasses M, CpFn cp, RefFn s00, RefFn h00)
    : ThermalData(M.size()), M_(std::move(M)), cp_(std::move(cp)), s_(std::move(s00)), h_(std::move(h00)) {
    if (!cp_ || !s_ || !h_) throw ModelInvalidError("function thermal data: empty callable");
}

ScalarJet FunctionThermal::molar_heat_capacity(double T, const Vec& x) const {
    return simplex_fd_jet([&](const Vec& y) { return M_.values().dot(y) * cp_(T, y); }, x);
}

ScalarJet FunctionThermal::molar_entropy(const Vec& x) const {
    return simplex_fd_jet([&](const Vec& y) { return M_.values().dot(y) * s_(y); }, x);
}

ScalarJet FunctionThermal::molar_enthalpy(const Vec& x) const {
    return simplex_fd_jet([&](const Vec& y) { return M_.values().dot(y) * h_(y); }, x);
}

// ---------------------------------------------------------------------------
// Model bundle

ConstitutiveModel::ConstitutiveModel(MolarMasses M, VolumeLawPtr volume, ThermalDataPtr thermal, ReferenceState ref,
                                     std::string label)
    : M_(std::move(M)), volume_(std::move(volume)), thermal_(std::move(thermal)), ref_(ref), label_(std::move(label)) {
    if (!volume_ || !thermal_) throw ModelInvalidError("model: volume law and thermal data are required");
    if (volume_->species() != M_.size() || thermal_->species() != M_.size())
        throw ModelInvalidError("model: species count differs between molar masses, volume and thermal data");
    if (!(ref_.T0 > 0.0)) throw ModelInvalidError("model: reference temperature must be positive");
    const Vec xc = Vec::Constant(static_cast<Eigen::Index>(M_.size()), 1.0 / static_cast<double>(M_.size()));
    const PressureBounds b = volume_->pressure_bounds(ref_.T0, xc);
    if (!(ref_.p0 > b.lower && ref_.p0 < b.upper))
        throw ModelInvalidError("model: reference pressure p0 = " + fmt(ref_.p0) + " lies outside (" + fmt(b.lower) +
                                ", " + fmt(b.upper) + ")");
}

ConstitutiveModel ConstitutiveModel::with_volume(VolumeLawPtr v, std::string label) const {
    return ConstitutiveModel(M_, std::move(v), thermal_, ref_, label.empty() ? label_ : std::move(label));
}

ConstitutiveModel make_volume_additive(const MolarMasses& M, double K, const Vec& v00, ThermalDataPtr thermal,
                                       ReferenceState ref, double p_pivot) {
    return ConstitutiveModel(M, std::make_shared<VolumeAdditiveLaw>(K, p_pivot, v00), std::move(thermal), ref,
                             "volume_additive");
}

ConstitutiveModel make_volume_additive(const MolarMasses& M, double K, const Vec& v00, ThermalDataPtr thermal,
                                       ReferenceState ref) {
    return make_volume_additive(M, K, v00, std::move(thermal), ref, ref.p0);
}

ConstitutiveModel make_simple_law(const MolarMasses& M, const Vec& vR, double beta, double K, double TR, double pR,
                                  ThermalDataPtr thermal, ReferenceState ref) {
    return ConstitutiveModel(M, std::make_shared<SimpleLawVolume>(vR, beta, K, TR, pR), std::move(thermal), ref,
                             "simple_law");
}

ConstitutiveModel make_section16(const MolarMasses& M, double K, double n0, Section16Shape shape,
                                 ThermalDataPtr thermal, ReferenceState ref) {
    return ConstitutiveModel(M, std::make_shared<Section16Law>(K, n0, ref.p0, std::move(shape)), std::move(thermal),
                             ref, "section16");
}

ConstitutiveModel make_ideal_gas_mixture(const MolarMasses& M, const Vec& z, const Vec& hR, const Vec& sR,
                                         ReferenceState ref) {
    require_size(z, M.size(), "ideal gas exponents z");
    const Vec molar_cp = (z.array() + 1.0).matrix() * gas_constant;
    auto thermal = std::make_shared<SpeciesThermal>(molar_cp, sR.cwiseProduct(M.values()),
                                                    hR.cwiseProduct(M.values()), true);
    return ConstitutiveModel(M, std::make_shared<IdealGasLaw>(M.size()), thermal, ref, "ideal_gas");
}

// ---------------------------------------------------------------------------
// Evaluation helpers

double eval_volume(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    model.volume().require_domain(s.T, s.p, s.x.values());
    const double v = model.volume().volume(s.T, s.p, s.x.values());
    if (!(v > 0.0)) throw DomainError("molar volume is not positive at the requested state");
    return v;
}

VolumePartials volume_partials(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    const Vec& x = s.x.values();
    model.volume().require_domain(s.T, s.p, x);
    const VolumeJet j = model.volume().evaluate(s.T, s.p, x);
    return VolumePartials{j.v,
                          j.v_p,
                          j.v_T,
                          tangential_gradient(j.grad_x, x),
                          tangential_hessian(j.hess_x, x),
                          model.volume().analytic_partials() ? 0.0 : fd_step(s.p)};
}

Vec densities_from_tpx(const ThermoStateTPX& s, const ConstitutiveModel& model) {
    return densities_from_molar_volume(s.x, model.molar_masses(), eval_volume(model, s));
}

std::vector<double> SampleRegion::temperatures() const {
    std::vector<double> out;
    if (T_count <= 1) return {T_min};
    for (std::size_t i = 0; i < T_count; ++i)
        out.push_back(T_min + (T_max - T_min) * static_cast<double>(i) / static_cast<double>(T_count - 1));
    return out;
}

std::vector<double> SampleRegion::pressures() const {
    std::vector<double> out;
    if (p_count <= 1) return {p_min};
    if (p_log && !(p_min > 0.0)) throw ConfigError("logarithmic pressure spacing needs p_min > 0");
    for (std::size_t i = 0; i < p_count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(p_count - 1);
        out.push_back(p_log ? p_min * std::pow(p_max / p_min, t) : p_min + (p_max - p_min) * t);
    }
    return out;
}

std::vector<ThermoStateTPX> SampleRegion::states(std::size_t species) const {
    std::vector<ThermoStateTPX> out;
    const auto xs = simplex_lattice(species, x_per_edge);
    for (double T : temperatures())
        for (double p : pressures())
            for (const Vec& x : xs) out.push_back(ThermoStateTPX{T, p, Composition(x)});
    return out;
}

const char* to_string(Severity s) {
    switch (s) {
        case Severity::info: return "info";
        case Severity::warning: return "warning";
        case Severity::violation: return "violation";
    }
    return "unknown";
}

bool has_violation(const std::vector<Diagnostic>& d) {
    return std::any_of(d.begin(), d.end(), [](const Diagnostic& e) { return e.severity == Severity::violation; });
}

std::vector<Diagnostic> validate_model(const ConstitutiveModel& model, const SampleRegion& region) {
    std::vector<Diagnostic> out;
    const VolumeLaw& law = model.volume();
    const std::size_t N = model.species();
    std::size_t outside = 0;

    for (const ThermoStateTPX& s : region.states(N)) {
        const Vec& x = s.x.values();
        if (!law.in_domain(s.T, s.p, x)) {
            ++outside;
            continue;
        }
        VolumeJet j;
        try {
            j = law.evaluate(s.T, s.p, x);
        } catch (const Error& e) {
            out.push_back({Severity::violation, "evaluation", e.what(), s.T, s.p, x});
            continue;
        }
        if (!(j.v > 0.0))
            out.push_back({Severity::violation, "positive_volume", "molar volume " + fmt(j.v) + " is not positive",
                           s.T, s.p, x});
        if (!(j.v_p < 0.0))
            out.push_back({Severity::violation, "monotonicity",
                           "dv/dp = " + fmt(j.v_p) + " is not negative (volume must strictly decrease with pressure)",
                           s.T, s.p, x});
        try {
            const double c = model.thermal().molar_heat_capacity(s.T, x).value;
            if (!(c > 0.0))
                out.push_back({Severity::violation, "heat_capacity",
                               "reference heat capacity " + fmt(c) + " J/(mol K) is not positive", s.T, s.p, x});
        } catch (const Error& e) {
            out.push_back({Severity::violation, "thermal_data", e.what(), s.T, s.p, x});
        }
    }
    if (outside > 0)
        out.push_back({Severity::warning, "outside_domain",
                       std::to_string(outside) + " sample points lie outside the declared domain and were skipped",
                       0.0, 0.0, Vec()});

    // Asymptotic behaviour towards the pressure thresholds, checked at the barycentre.
    const Vec xc = Vec::Constant(static_cast<Eigen::Index>(N), 1.0 / static_cast<double>(N));
    for (double T : region.temperatures()) {
        const PressureBounds b = law.pressure_bounds(T, xc);
        if (!(b.lower < b.upper)) continue;
        double pref = model.reference().p0;
        if (!(pref > b.lower && pref < b.upper))
            pref = std::isfinite(b.lower) && std::isfinite(b.upper) ? 0.5 * (b.lower + b.upper)
                   : std::isfinite(b.lower)                         ? b.lower + std::max(1.0, std::abs(b.lower))
                                                                    : b.upper - std::max(1.0, std::abs(b.upper));
        double v_ref = 0.0;
        try {
            v_ref = law.volume(T, pref, xc);
        } catch (const Error&) {
            continue;
        }
        const double scale = std::max(1.0, std::abs(pref));
        auto probe = [&](double p) {
            try {
                return law.volume(T, p, xc);
            } catch (const Error&) {
                return std::nan("");
            }
        };
        double v_low = std::isfinite(b.lower) ? probe(b.lower + (pref - b.lower) * 1e-12) : probe(pref - scale * 1e15);
        if (!(v_low > 1e3 * v_ref))
            out.push_back({Severity::warning, "asymptote_lower",
                           "volume does not grow without bound towards p_inf = " + fmt(b.lower), T, b.lower, xc});
        if (std::isfinite(b.upper)) {
            out.push_back({Severity::warning, "finite_p_sup",
                           "finite p_sup = " + fmt(b.upper) + " Pa: volume would vanish at finite pressure", T,
                           b.upper, xc});
        } else {
            const double v_high = probe(pref + scale * 1e15);
            if (!(v_high < 1e-3 * v_ref))
                out.push_back({Severity::warning, "asymptote_upper",
                               "volume does not decay to zero as p -> +inf", T, infinity, xc});
        }
        if (T == region.temperatures().front() && std::isinf(b.upper))
            out.push_back({Severity::info, "p_sup_infinite", "p_sup = +inf", T, infinity, xc});
    }
    return out;
}

}  // namespace helmix
