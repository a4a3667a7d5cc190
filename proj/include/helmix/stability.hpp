#pragma once

#include <string>
#include <vector>

#include "helmix/constitutive.hpp"
#include "helmix/potentials.hpp"

namespace helmix {

// Hessian of f in the (T, p, x) chart split as A + B + C:
//   A_ij = v/(M_i M_j) int_{p0}^{p} D^2 v [e^i - x][e^j - x] dp'
//   B    = lambda xi xi^T,  lambda = -v / v_p,  xi_i = (v + D v [e^i - x]) / M_i
//   C_ij = v/(M_i M_j) D^2 Phi [e^i - x][e^j - x]
struct HessianDecomposition {
    Mat A, B, C;
    double lambda = 0.0;
    Vec xi;
    bool incompressible = false;  // v_p = 0: lambda = +inf and B is left at zero
    Mat total() const { return A + B + C; }
};

HessianDecomposition hessian_decomposition(const ConstitutiveModel& model, const ThermoStateTPX& s);

struct MuellerMargin {
    double margin = 0.0;         // -(v_T)^2 - (M c_p / T) v_p, molar units
    double margin_via_cv = 0.0;  // -(M c_v / T) v_p, the same quantity through c_p - c_v
    double du_dp = 0.0;          // molar du/dp at fixed T, x: -T v_T - p v_p
};

MuellerMargin mueller_margin(const ConstitutiveModel& model, const ThermoStateTPX& s);

// C/T - int_{p0}^{p} v_TT dp' + v_T^2 / v_p; positive exactly when d^2f/dT^2 < 0.
double compat_margin(const ConstitutiveModel& model, const ThermoStateTPX& s);

enum class Definiteness { positive, marginal, negative };
const char* to_string(Definiteness d);

// lambda_min > 1e-10 max(1, lambda_max) is positive, |lambda_min| below that bar is marginal.
Definiteness classify_eigenvalues(double lambda_min, double lambda_max);

struct StabilitySample {
    double T = 0.0, p = 0.0;
    Vec x;
    double lambda_min = 0.0, lambda_max = 0.0;
    double lambda_min_xi_perp = 0.0;
    double d2f_dT2 = 0.0;
    double mueller = 0.0;
    double compat = 0.0;
    bool appendix_ok = false;  // dp/dv < 0 and c_p > c_v > 0
    Definiteness hessian_class = Definiteness::negative;
    bool ok = false;           // evaluation succeeded
    std::string error;
};

struct StabilityReport {
    std::string model_label;
    std::vector<StabilitySample> samples;
    std::size_t positive = 0, marginal = 0, negative = 0, concave_violations = 0, errors = 0;
    std::size_t mueller_violations = 0, appendix_violations = 0;
    std::string verdict;  // "stable", "marginal" or "unstable"

    // Indices of the samples with the smallest lambda_min, largest d2f/dT2 and smallest Mueller margin.
    std::vector<std::size_t> worst(std::size_t count) const;
};

StabilityReport stability_report(const ConstitutiveModel& model, const SampleRegion& region);

std::string to_json(const StabilityReport& r);
// Flat table of the worst offenders.
std::string to_csv(const StabilityReport& r, std::size_t worst_count = 20);

struct PressureSweepOptions {
    double max_offset = 1e13;  // Pa; both p0 + d and p0 - d are scanned for d up to this value
    double min_offset = 1.0;   // Pa
    std::size_t points = 241;  // logarithmic grid per side
};

struct PressureSweepResult {
    bool pass = true;
    double failure_pressure = 0.0;  // p at the first loss of definiteness, valid when !pass
    double failure_offset = 0.0;    // |p - p0|
    double lambda_min_reference = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;  // grid pressures outside the model domain
};

// Smallest |p - p0| at which A + C restricted to {xi}^perp stops being positive definite.
PressureSweepResult pressure_sweep_definiteness(const ConstitutiveModel& model, double T, const Composition& x,
                                                const PressureSweepOptions& opt = {});

// A + C restricted to {xi}^perp at one pressure (empty for a single species).
Mat xi_perp_operator(const ConstitutiveModel& model, double T, double p, const Composition& x);

}  // namespace helmix
