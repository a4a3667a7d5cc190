#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "helmix/constitutive.hpp"
#include "helmix/potentials.hpp"
#include "helmix/stability.hpp"

namespace helmix {

enum class LimitMode { global, local };
const char* to_string(LimitMode m);

// A sequence of models indexed by a stiffness parameter (modulus K or band index m),
// together with the model that carries the limit volume V^inf.
class ModelFamily {
public:
    using Generator = std::function<ConstitutiveModel(double index)>;

    ModelFamily(std::string name, LimitMode mode, Generator generator, ConstitutiveModel limit,
                std::vector<double> default_schedule, std::string index_name = "K");

    const std::string& name() const { return name_; }
    LimitMode mode() const { return mode_; }
    ConstitutiveModel member(double index) const { return generator_(index); }
    const ConstitutiveModel& limit() const { return limit_; }
    const std::vector<double>& default_schedule() const { return schedule_; }
    const std::string& index_name() const { return index_name_; }
    std::size_t species() const { return limit_.species(); }
    const ReferenceState& reference() const { return limit_.reference(); }

    // Pressure band [a, b] of the local mode (constant thresholds).
    ModelFamily& set_thresholds(double a, double b);
    double lower_threshold() const { return a_; }
    double upper_threshold() const { return b_; }

private:
    std::string name_;
    LimitMode mode_;
    Generator generator_;
    ConstitutiveModel limit_;
    std::vector<double> schedule_;
    std::string index_name_;
    double a_ = 0.0, b_ = 0.0;
};

// Geometric schedule {10^lo, ..., 10^hi} * scale.
std::vector<double> geometric_schedule(int lo_exp, int hi_exp, double scale);

// v = (v00 . x + 0.5 x^T Q x) / (1 + (p - pivot)/K), K -> inf.
ModelFamily volume_additive_family(const MolarMasses& M, const Vec& v00, ThermalDataPtr thermal, ReferenceState ref,
                                   double pivot, double pR = 1e5, const Mat& quadratic = Mat());

struct SimpleLawScaling {
    bool epsilon_scaled = false;
    double beta = 2.07e-4;  // 1/K, used when not epsilon-scaled
    double beta0 = 0.0;     // used when epsilon-scaled: beta = beta0 sqrt(eps) / TR with eps = pR / (alpha0 K)
    double alpha0 = 0.0;
};

ModelFamily simple_law_family(const MolarMasses& M, const Vec& vR, ThermalDataPtr thermal, ReferenceState ref,
                              double TR, double pR, const SimpleLawScaling& scaling);

// Local mode: base volume law warped so that it becomes pressure-independent on [a, b] as m -> inf
// (slope 1/m on the band).
ModelFamily band_warp_family(const ConstitutiveModel& base, double a, double b);

inline constexpr double classification_tolerance = 1e-9;
inline constexpr double constraint_tolerance = 1e-10;

// V^inf(T, p0, rho).
double constraint_value(const ModelFamily& family, double T, const Vec& rho);
// rho / V^inf(T, p0, rho), which lies on the constraint surface.
Vec project_to_constraint(const ModelFamily& family, double T, const Vec& rho);
// bar v_i = (v^inf + D v^inf [e^i - x]) / M_i at (T, p0, x).
Vec limit_specific_volumes(const ModelFamily& family, double T, const Vec& x);

struct LimitValue {
    bool finite = false;
    double value = infinity;
};

LimitValue limit_free_energy_global(const ModelFamily& family, double T, const Vec& rho);

struct LocalLimitValue {
    double value = 0.0;
    int branch = 0;         // -1: pi < a, 0: on the constraint, +1: pi > b
    double pressure = 0.0;  // pi solving V^inf(T, pi, rho) = 1 off the constraint, p0 on it
    bool necessary_condition = true;  // D^2 k + pi D^2 V^inf(p0) PSD for pi in {a, (a+b)/2, b}
};

LocalLimitValue limit_free_energy_local(const ModelFamily& family, double T, const Vec& rho);

// Finite-valued limit energy of either mode (+inf off the global constraint).
double limit_free_energy(const ModelFamily& family, double T, const Vec& rho);

Vec limit_chemical_potentials(const ModelFamily& family, double T, const Vec& rho, double p);

struct SubgradientReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_relative = 0.0;  // most negative (lhs - rhs) / magnitude
};

// Samples f^inf(r) >= f^inf(rho) + mu(p) . (r - rho) over random feasible r.
SubgradientReport check_subgradient(const ModelFamily& family, double T, const Vec& rho, double p,
                                    std::size_t samples, std::uint64_t seed, double spread = 0.3,
                                    double tolerance = 1e-10);

struct ProbeState {
    double T = 0.0;
    Vec rho;
};

// On-constraint probe at composition x, and the same scaled by `factor`.
ProbeState constraint_probe(const ModelFamily& family, double T, const Vec& x, double factor = 1.0);

struct ProbeRecord {
    ProbeState probe;
    double constraint = 0.0;  // V^inf(T, p0, rho)
    bool on_constraint = false;
    double limit_value = infinity;  // f^inf
    double limit_pressure = 0.0;    // local mode: pressure of the limit branch
    double k_limit = 0.0;           // mechanically neutral part of the limit model
    std::vector<double> f, p, v_T, v_p;
    std::vector<std::string> failures;
    std::string classification;     // "converges", "diverges" or "undetermined"
    double fitted_slope = 0.0;      // least squares over the last four indices of log|f^m - ref| vs log index
    double extrapolated = 0.0;      // Richardson extrapolation assuming an O(1/index) error
    double final_constraint_residual = 0.0;  // |V^inf(T, p^m, rho) - 1| at the last index
};

struct LimitReport {
    std::string family;
    std::string mode;
    std::string index_name;
    std::vector<double> schedule;
    std::vector<ProbeRecord> probes;
};

LimitReport family_sweep(const ModelFamily& family, const std::vector<ProbeState>& probes,
                         std::vector<double> schedule = {});

std::string to_json(const LimitReport& r);
std::string to_csv(const LimitReport& r);

struct MuellerSweep {
    std::vector<double> schedule;
    std::vector<ThermoStateTPX> states;
    std::vector<std::vector<double>> margin;  // [index][state]
    std::vector<double> v_T_trend, v_p_trend; // max |v_T|, max |v_p| per index
    int first_negative_index = -1;
    bool flag = false;        // margin negative somewhere
    bool trend_flag = false;  // v_p shrinks by 1e-3 while v_T keeps half of its size
};

MuellerSweep mueller_sweep(const ModelFamily& family, const std::vector<ThermoStateTPX>& states,
                           std::vector<double> schedule = {});

struct LinearityVerdict {
    bool linear = true;
    double max_relative_curvature = 0.0;  // |D^2 v^inf tangential| / |v^inf|
    Vec worst_x;
    double worst_T = 0.0;
    Vec bar_v;  // specific limit volumes at the first sample
    PressureSweepResult failure;  // only meaningful when !linear
};

LinearityVerdict linearity_diagnostic(const ModelFamily& family, double T, const std::vector<Vec>& sample_x,
                                      const std::vector<double>& p_probe, const PressureSweepOptions& sweep = {});

struct EpiLowerBound {
    double min_excess = infinity;  // min over fan directions of f^m(rho^m) - f^inf(rho), last index
    bool pass = true;
};

// rho^m = rho + d (index_0 / index_m)^(1/2) along 8 random directions d. A finite limit passes when
// the deficit f^inf - f^m at the last index is within tolerance or decays like the step.
EpiLowerBound epi_lower_bound(const ModelFamily& family, double T, const Vec& rho, std::vector<double> schedule,
                              std::uint64_t seed, double tolerance);

}  // namespace helmix
