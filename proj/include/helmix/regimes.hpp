#pragma once

#include <cstddef>

#include "helmix/core.hpp"

namespace helmix {

// Reference scales of a low-Mach analysis. Defaults describe liquid water near 20 C
// with L0 = 1 m and t0 = 1 s.
struct ReferenceScales {
    double L0 = 1.0;               // m
    double t0 = 1.0;               // s
    double T_R = 293.0;            // K
    double p_R = 1e5;              // Pa
    double v_S = 1.0 / 55400.0;    // solvent molar volume, m^3/mol
    double M_S = 0.0180153;        // solvent molar mass, kg/mol
    double eta = 1e-3;             // Pa s
    double kappa = 0.6;            // W/(K m)
    double c_p = 4.18e3;           // J/(kg K)
    double b = 9.81;               // m/s^2
    double beta = 2.07e-4;         // 1/K
    double K = 2.18e9;             // Pa

    double v0() const { return L0 / t0; }
    void validate() const;  // throws ConfigError unless every scale is positive (beta may be zero)
};

struct CharacteristicNumbers {
    double Ma2, Re, Fr2, Fo;
};

CharacteristicNumbers characteristic_numbers(const ReferenceScales& s);

struct EpsilonScaling {
    double epsilon;
    double beta0;   // beta T_R / sqrt(eps)
    double alpha0;  // p_R / (K eps)
};

EpsilonScaling epsilon_scaling(const ReferenceScales& s, double epsilon);

struct InequalityResult {
    double lhs;     // beta0^2
    double rhs;
    double margin;  // rhs - lhs
};

// Leading-order stability inequality of the scaled system at temperature T and
// composition x. The brackets run over every species except the solvent; the
// solvent defaults to the last species.
InequalityResult leading_order_inequality(const ReferenceScales& s, double epsilon, double T, const Vec& x,
                                          const Vec& M, const Vec& vR, int solvent = -1);

struct DivergenceResult {
    double div = 0.0;            // leading-order div v0 (0 when dilute)
    double formula_value = 0.0;  // value of the bracket formula regardless of dilution
    bool dilute = false;         // every solute fraction <= sqrt(eps)
};

DivergenceResult divergence_leading_order(const Vec& x0, const Vec& x0_rate, const Vec& M, const Vec& vR,
                                          double epsilon, int solvent = -1);

// Expanded volume through order eps:
// v = sum vR_i x_i (1 + beta0 theta sqrt(eps) + (beta0^2 theta^2 - alpha0 pi) eps),
// theta = T/T_R - 1 and pi = p/p_R - 1.
double expanded_volume(const ReferenceScales& s, double epsilon, double T, double p, const Vec& x, const Vec& vR);

struct BoussinesqReport {
    EpsilonScaling scaling;
    CharacteristicNumbers numbers;
    double buoyancy = 0.0;      // coefficient of -(T0 - 1) in the momentum balance
    double viscous = 0.0;       // 1/Re
    double heat = 0.0;          // Fo
    double fr2_over_ma = 0.0;   // reported only
    double volume_sqrt_eps = 0.0;  // coefficient of theta at order sqrt(eps)
    double volume_eps_theta2 = 0.0;
    double volume_eps_pi = 0.0;
};

BoussinesqReport boussinesq_report(const ReferenceScales& s, double epsilon);

}  // namespace helmix
