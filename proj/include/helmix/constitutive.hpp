#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "helmix/core.hpp"

namespace helmix {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Molar volume and its partial derivatives at one (T, p, x).
// grad_x / hess_x belong to some smooth extension of the law off the simplex;
// only their tangential parts carry meaning.
struct VolumeJet {
    double v = 0.0;     // m^3/mol
    double v_p = 0.0;   // m^3/(mol Pa)
    double v_T = 0.0;   // m^3/(mol K)
    double v_TT = 0.0;  // m^3/(mol K^2)
    Vec grad_x;
    Mat hess_x;
};

// Pressure integrals int_{p_from}^{p_to} of the corresponding jet entries.
struct VolumeIntegral {
    double v = 0.0;
    double v_T = 0.0;
    double v_TT = 0.0;
    Vec grad_x;
    Mat hess_x;

    static VolumeIntegral zero(std::size_t n);
};

VolumeIntegral operator+(const VolumeIntegral& a, const VolumeIntegral& b);
VolumeIntegral operator-(const VolumeIntegral& a, const VolumeIntegral& b);
VolumeIntegral operator*(const VolumeIntegral& a, double s);
double magnitude(const VolumeIntegral& a);

struct PressureBounds {
    double lower = -infinity;  // p_inf, open
    double upper = infinity;   // p_sup, open
};

class VolumeLaw {
public:
    explicit VolumeLaw(std::size_t species) : species_(species) {}
    virtual ~VolumeLaw() = default;

    std::size_t species() const { return species_; }
    virtual std::string family() const = 0;
    virtual PressureBounds pressure_bounds(double T, const Vec& x) const = 0;
    virtual std::pair<double, double> temperature_bounds() const { return {0.0, infinity}; }

    // Full jet; callers are expected to have checked the domain.
    virtual VolumeJet evaluate(double T, double p, const Vec& x) const = 0;
    virtual double volume(double T, double p, const Vec& x) const { return evaluate(T, p, x).v; }
    virtual std::pair<double, double> volume_and_slope(double T, double p, const Vec& x) const;

    // Default: adaptive Gauss-Kronrod over the jet, split at breakpoints().
    virtual VolumeIntegral integrate(double T, double p_from, double p_to, const Vec& x) const;
    virtual std::vector<double> breakpoints(double /*T*/, const Vec& /*x*/) const { return {}; }

    virtual bool analytic_partials() const { return true; }

    bool in_domain(double T, double p, const Vec& x) const;
    // Throws DomainError naming the violated threshold.
    void require_domain(double T, double p, const Vec& x) const;

protected:
    VolumeIntegral integrate_numerically(double T, double p_from, double p_to, const Vec& x) const;

private:
    std::size_t species_;
};

using VolumeLawPtr = std::shared_ptr<const VolumeLaw>;

// v = (1 + (p - p_pivot)/K)^{-1} * (v00 . x + 0.5 x^T Q x); K = +inf gives the pressure-free limit.
// Q = 0 is the volume-additive law; a nonzero Q adds a quadratic composition term.
class VolumeAdditiveLaw final : public VolumeLaw {
public:
    VolumeAdditiveLaw(double K, double p_pivot, Vec v00, Mat quadratic = Mat());
    std::string family() const override { return "volume_additive"; }
    PressureBounds pressure_bounds(double T, const Vec& x) const override;
    VolumeJet evaluate(double T, double p, const Vec& x) const override;
    std::pair<double, double> volume_and_slope(double T, double p, const Vec& x) const override;
    VolumeIntegral integrate(double T, double p_from, double p_to, const Vec& x) const override;

    double modulus() const { return inv_K_ == 0.0 ? infinity : 1.0 / inv_K_; }
    double pivot() const { return p_pivot_; }
    const Vec& v00() const { return v00_; }
    const Mat& quadratic() const { return Q_; }

private:
    double composition_part(const Vec& x) const;
    double inv_K_;
    double p_pivot_;
    Vec v00_;
    Mat Q_;
};

// (v_R . x) / v = 1 - beta (T - T_R) + (p - p_R)/K
class SimpleLawVolume final : public VolumeLaw {
public:
    SimpleLawVolume(Vec vR, double beta, double K, double TR, double pR);
    std::string family() const override { return "simple_law"; }
    PressureBounds pressure_bounds(double T, const Vec& x) const override;
    VolumeJet evaluate(double T, double p, const Vec& x) const override;
    std::pair<double, double> volume_and_slope(double T, double p, const Vec& x) const override;
    VolumeIntegral integrate(double T, double p_from, double p_to, const Vec& x) const override;

    double beta() const { return beta_; }
    double modulus() const { return inv_K_ == 0.0 ? infinity : 1.0 / inv_K_; }

private:
    double denom(double T, double p) const;
    Vec vR_;
    double beta_, inv_K_, TR_, pR_;
};

// a(T, x) = tau(T) q(x), q(x) = a_lin . x + 0.5 x^T a_quad x, tau = 1 + t1 (T - T_ref) + t2 (T - T_ref)^2
struct Section16Shape {
    Vec a_lin;
    Mat a_quad;
    double t1 = 0.0;
    double t2 = 0.0;
    double T_ref = 298.15;

    ScalarJet q(const Vec& x) const;
    double tau(double T) const;
    double tau_T(double T) const;
    double tau_TT() const { return 2.0 * t2; }
};

// v = 1 / (n0 (a(T,x) + (p - p0)/K))
class Section16Law final : public VolumeLaw {
public:
    Section16Law(double K, double n0, double p0, Section16Shape shape);
    std::string family() const override { return "section16"; }
    PressureBounds pressure_bounds(double T, const Vec& x) const override;
    VolumeJet evaluate(double T, double p, const Vec& x) const override;
    std::pair<double, double> volume_and_slope(double T, double p, const Vec& x) const override;
    VolumeIntegral integrate(double T, double p_from, double p_to, const Vec& x) const override;

    const Section16Shape& shape() const { return shape_; }
    double n0() const { return n0_; }
    double modulus() const { return inv_K_ == 0.0 ? infinity : 1.0 / inv_K_; }
    double p0() const { return p0_; }

private:
    double inv_K_, n0_, p0_;
    Section16Shape shape_;
};

// v = R T / p
class IdealGasLaw final : public VolumeLaw {
public:
    explicit IdealGasLaw(std::size_t species) : VolumeLaw(species) {}
    std::string family() const override { return "ideal_gas"; }
    PressureBounds pressure_bounds(double, const Vec&) const override { return {0.0, infinity}; }
    VolumeJet evaluate(double T, double p, const Vec& x) const override;
    std::pair<double, double> volume_and_slope(double T, double p, const Vec& x) const override;
    VolumeIntegral integrate(double T, double p_from, double p_to, const Vec& x) const override;
};

// v(T, p, x) = v_base(T, w(p), x) with the pressure warp
//   w(p) = p0 + min(p - a, 0) + max(p - b, 0) + eps (clamp(p, a, b) - p0),
// stiff with slope eps on [a, b] and slope one outside. eps = 0 gives a volume
// that is pressure-independent on the band and compressible outside it.
class BandWarpLaw final : public VolumeLaw {
public:
    BandWarpLaw(VolumeLawPtr base, double a, double b, double eps, double p0);
    std::string family() const override { return "band_warp"; }
    PressureBounds pressure_bounds(double T, const Vec& x) const override;
    VolumeJet evaluate(double T, double p, const Vec& x) const override;
    std::pair<double, double> volume_and_slope(double T, double p, const Vec& x) const override;
    VolumeIntegral integrate(double T, double p_from, double p_to, const Vec& x) const override;
    std::vector<double> breakpoints(double, const Vec&) const override { return {a_, b_}; }

    double warp(double p) const;
    double warp_slope(double p) const;
    double lower_threshold() const { return a_; }
    double upper_threshold() const { return b_; }
    const VolumeLaw& base() const { return *base_; }

private:
    VolumeLawPtr base_;
    double a_, b_, eps_, p0_;
};

// User-supplied volume function; partials by central finite differences.
class FunctionVolumeLaw final : public VolumeLaw {
public:
    using Fn = std::function<double(double T, double p, const Vec& x)>;
    FunctionVolumeLaw(std::size_t species, Fn fn, PressureBounds bounds, std::string name = "function");
    std::string family() const override { return name_; }
    PressureBounds pressure_bounds(double, const Vec&) const override { return bounds_; }
    VolumeJet evaluate(double T, double p, const Vec& x) const override;
    double volume(double T, double p, const Vec& x) const override { return fn_(T, p, x); }
    bool analytic_partials() const override { return false; }

private:
    Fn fn_;
    PressureBounds bounds_;
    std::string name_;
};

// Molar caloric data at the reference pressure: C(T,x) = M(x) c_p(T,p0,x),
// S(x) = M(x) s00(x), H(x) = M(x) h00(x).
struct ThermalIntegrals {
    ScalarJet heat_capacity;   // C(T, x)
    ScalarJet int_c;           // int_{T0}^{T} C dtheta
    ScalarJet int_c_over_t;    // int_{T0}^{T} C / theta dtheta
    ScalarJet double_int;      // int_{T0}^{T} int_{T0}^{theta} C/theta' dtheta' dtheta
};

class ThermalData {
public:
    explicit ThermalData(std::size_t species) : species_(species) {}
    virtual ~ThermalData() = default;

    std::size_t species() const { return species_; }
    virtual ScalarJet molar_heat_capacity(double T, const Vec& x) const = 0;
    virtual ScalarJet molar_entropy(const Vec& x) const = 0;
    virtual ScalarJet molar_enthalpy(const Vec& x) const = 0;
    virtual ThermalIntegrals integrals(double T, double T0, const Vec& x) const;
    virtual std::pair<double, double> temperature_range() const { return {0.0, infinity}; }
    virtual std::string family() const = 0;

private:
    std::size_t species_;
};

using ThermalDataPtr = std::shared_ptr<const ThermalData>;

// Per-species constant molar heat capacities, reference entropies and enthalpies,
// optionally with the ideal entropy of mixing -R sum x ln x.
class SpeciesThermal final : public ThermalData {
public:
    SpeciesThermal(Vec molar_cp, Vec molar_s, Vec molar_h, bool ideal_mixing);
    static std::shared_ptr<SpeciesThermal> from_specific(const MolarMasses& M, const Vec& cp, const Vec& s,
                                                         const Vec& h, bool ideal_mixing);

    std::string family() const override { return "species"; }
    ScalarJet molar_heat_capacity(double T, const Vec& x) const override;
    ScalarJet molar_entropy(const Vec& x) const override;
    ScalarJet molar_enthalpy(const Vec& x) const override;
    ThermalIntegrals integrals(double T, double T0, const Vec& x) const override;

    const Vec& molar_cp() const { return C_; }
    const Vec& molar_s() const { return S_; }
    const Vec& molar_h() const { return H_; }
    bool ideal_mixing() const { return ideal_; }

private:
    Vec C_, S_, H_;
    bool ideal_;
};

// Caloric data from callables (specific quantities); x-derivatives by finite differences
// along simplex directions, temperature integrals by quadrature.
class FunctionThermal final : public ThermalData {
public:
    using CpFn = std::function<double(double T, const Vec& x)>;
    using RefFn = std::function<double(const Vec& x)>;
    FunctionThermal(MolarMasses M, CpFn cp, RefFn s00, RefFn h00);

    std::string family() const override { return "function"; }
    ScalarJet molar_heat_capacity(double T, const Vec& x) const override;
    ScalarJet molar_entropy(const Vec& x) const override;
    ScalarJet molar_enthalpy(const Vec& x) const override;

private:
    MolarMasses M_;
    CpFn cp_;
    RefFn s_, h_;
};

struct ReferenceState {
    double T0 = 298.15;
    double p0 = 1e5;
};

class ConstitutiveModel {
public:
    ConstitutiveModel(MolarMasses M, VolumeLawPtr volume, ThermalDataPtr thermal, ReferenceState ref,
                      std::string label = "");

    std::size_t species() const { return M_.size(); }
    const MolarMasses& molar_masses() const { return M_; }
    const VolumeLaw& volume() const { return *volume_; }
    const ThermalData& thermal() const { return *thermal_; }
    VolumeLawPtr volume_ptr() const { return volume_; }
    ThermalDataPtr thermal_ptr() const { return thermal_; }
    const ReferenceState& reference() const { return ref_; }
    const std::string& label() const { return label_; }

    ConstitutiveModel with_volume(VolumeLawPtr v, std::string label = "") const;

private:
    MolarMasses M_;
    VolumeLawPtr volume_;
    ThermalDataPtr thermal_;
    ReferenceState ref_;
    std::string label_;
};

// Built-in constructors.
ConstitutiveModel make_volume_additive(const MolarMasses& M, double K, const Vec& v00, ThermalDataPtr thermal,
                                       ReferenceState ref, double p_pivot);
ConstitutiveModel make_volume_additive(const MolarMasses& M, double K, const Vec& v00, ThermalDataPtr thermal,
                                       ReferenceState ref);
ConstitutiveModel make_simple_law(const MolarMasses& M, const Vec& vR, double beta, double K, double TR, double pR,
                                  ThermalDataPtr thermal, ReferenceState ref);
ConstitutiveModel make_section16(const MolarMasses& M, double K, double n0, Section16Shape shape,
                                 ThermalDataPtr thermal, ReferenceState ref);
// Ideal gas mixture from heat-capacity exponents z_i (c_p,i = (z_i + 1) R / M_i) and the specific
// enthalpies and entropies of the pure species at the reference state.
ConstitutiveModel make_ideal_gas_mixture(const MolarMasses& M, const Vec& z, const Vec& hR, const Vec& sR,
                                         ReferenceState ref);

struct VolumePartials {
    double v;
    double v_p;
    double v_T;
    Vec tangential_grad;  // D_x v . [e^i - x]
    Mat tangential_hess;  // D^2 v [e^i - x][e^j - x]
    double fd_step;       // zero when partials are analytic
};

double eval_volume(const ConstitutiveModel& model, const ThermoStateTPX& s);
VolumePartials volume_partials(const ConstitutiveModel& model, const ThermoStateTPX& s);
Vec densities_from_tpx(const ThermoStateTPX& s, const ConstitutiveModel& model);

struct SampleRegion {
    double T_min = 280.0, T_max = 320.0;
    std::size_t T_count = 21;
    double p_min = 1e5, p_max = 1e7;
    std::size_t p_count = 21;
    bool p_log = false;
    std::size_t x_per_edge = 11;

    std::vector<double> temperatures() const;
    std::vector<double> pressures() const;
    std::vector<ThermoStateTPX> states(std::size_t species) const;
};

enum class Severity { info, warning, violation };

struct Diagnostic {
    Severity severity;
    std::string code;
    std::string message;
    double T = 0.0;
    double p = 0.0;
    Vec x;
};

std::vector<Diagnostic> validate_model(const ConstitutiveModel& model, const SampleRegion& region);
bool has_violation(const std::vector<Diagnostic>& d);
const char* to_string(Severity s);

}  // namespace helmix
