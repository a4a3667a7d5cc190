#pragma once

#include <vector>

#include "helmix/constitutive.hpp"

namespace helmix {

struct VolumePotentialEval {
    double V;        // dimensionless
    double V_p;      // 1/Pa
    Vec V_rho;       // m^3/kg
    Mat V_rho_rho;   // m^6/kg^2
    double Vbar;     // Pa, int_{p0}^{pi} V dp'
    Vec Vbar_rho;    // Pa m^3/kg
};

VolumePotentialEval eval_V(const ConstitutiveModel& model, double T, double pi, const Vec& rho);

struct SolverOptions {
    double tolerance = 1e-10;             // on |V - 1|
    int max_iterations = 200;
    double incompressible_guard = 1e-14;  // on |dV/dp| * max(1, |p0|)
};

struct PressureSolution {
    double p;
    double residual;
    int iterations;
    double bracket_lo;
    double bracket_hi;
};

PressureSolution solve_pressure(const ConstitutiveModel& model, double T, const Vec& rho,
                                const SolverOptions& opt = {});

struct MonotonicityReport {
    bool pass = true;
    double min_abs_slope = infinity;  // min |dV/dp| over the samples, 1/Pa
    std::size_t samples = 0;
    std::vector<Diagnostic> violations;
};

MonotonicityReport check_monotonicity(const ConstitutiveModel& model, const SampleRegion& region);

}  // namespace helmix
