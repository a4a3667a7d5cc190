#pragma once

#include <functional>
#include <vector>

#include "helmix/constitutive.hpp"
#include "helmix/eos.hpp"

namespace helmix {

// Molar thermal function Phi(T, x) = H(x) - T S(x) - int_{T0}^{T} int_{T0}^{theta} C/theta' dtheta' dtheta
// built from the caloric data at the reference pressure, with its x-jet and T-derivatives.
struct ThermalPart {
    ScalarJet phi;         // J/mol
    double phi_T = 0.0;    // -(int C/theta + S)
    double phi_TT = 0.0;   // -C/T
    double C = 0.0;        // molar heat capacity at (T, p0, x)
    double int_c = 0.0;    // int_{T0}^{T} C dtheta
    double int_c_over_t = 0.0;
    double S = 0.0;        // molar reference entropy
    double H = 0.0;        // molar reference enthalpy
};

ThermalPart thermal_part(const ConstitutiveModel& model, double T, const Vec& x);

struct MechanicallyNeutralPart {
    double k = 0.0;  // Pa
    Vec grad;        // J/kg
    Mat hess;
    double k_T = 0.0;
    double k_TT = 0.0;
};

MechanicallyNeutralPart mechanically_neutral_k(const ConstitutiveModel& model, double T, const Vec& rho);

// The additive pieces f = k + p0 V(T, p0, rho) + Vbar(T, p, rho) - p.
struct FreeEnergyParts {
    double k = 0.0;
    double p0_V0 = 0.0;
    double Vbar = 0.0;
    double p = 0.0;
    double f = 0.0;
    double mechanical() const { return Vbar - p; }
};

struct PotentialBundle {
    double T = 0.0;
    Vec rho;
    double p = 0.0;       // Pa
    double f = 0.0;       // Pa
    Vec mu;               // J/kg
    Mat hessian;          // Pa (m^3/kg)^2
    double s = 0.0;       // J/(kg K)
    double u = 0.0;       // J/kg
    double h = 0.0;       // J/kg
    double g = 0.0;       // J/kg
    double c_p = 0.0;     // J/(kg K)
    double c_v = 0.0;     // J/(kg K)
    double d2f_dT2 = 0.0; // Pa/K^2
    double v = 0.0;       // m^3/mol
};

FreeEnergyParts free_energy_parts(const ConstitutiveModel& model, double T, const Vec& rho,
                                  const SolverOptions& opt = {});
double free_energy(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt = {});
Vec chemical_potentials(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt = {});
// Throws IllPosedError at an incompressible point; the message carries lambda = -V/V_p.
Mat hessian(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt = {});
double d2f_dT2(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt = {});

PotentialBundle evaluate_bundle(const ConstitutiveModel& model, double T, const Vec& rho,
                                const SolverOptions& opt = {});
// Same bundle at a state given in the (T, p, x) chart; no pressure solve is needed.
PotentialBundle evaluate_bundle(const ConstitutiveModel& model, const ThermoStateTPX& s);

struct StateFunctions {
    double g = 0.0;  // J/kg
    double h = 0.0;  // J/kg
    double s = 0.0;  // J/(kg K)
    double u = 0.0;  // J/kg
    double v = 0.0;  // m^3/mol
};

StateFunctions state_functions(const ConstitutiveModel& model, const ThermoStateTPX& s);

struct HeatCapacities {
    double c_p = 0.0;
    double c_v = 0.0;
    double difference = 0.0;  // c_p - c_v
};

HeatCapacities heat_capacities(const ConstitutiveModel& model, const ThermoStateTPX& s);

// Sampling check of positive homogeneity for a user-supplied mechanically neutral part.
struct HomogeneityReport {
    bool pass = true;
    double max_scaling_error = 0.0;  // |k(lambda rho) - lambda k(rho)| / scale
    double max_euler_error = 0.0;    // |rho . grad k - k| / scale, gradient by central differences
    std::size_t samples = 0;
};

HomogeneityReport check_homogeneity(const std::function<double(double, const Vec&)>& k, double T,
                                    const std::vector<Vec>& rhos, double tolerance = 1e-8);

}  // namespace helmix
