#pragma once

#include <vector>

#include "helmix/core.hpp"

namespace helmix {

// Binary water/ethanol mixture with a clustering reaction kappa_A W + kappa_S E <-> C.
// Each species has a pressure-independent molar volume; the excess volume comes only
// from the equilibrium extent of the reaction.
struct MixingModel {
    double v_W = 0.0;  // m^3/mol
    double v_E = 0.0;
    double v_C = 0.0;
    double dg = 0.0;   // reaction Gibbs energy, J/mol
    double T = 298.0;
    double pR = 1e5;
    double R = gas_constant;
    double kappa_A = 1.0;
    double kappa_S = 1.0;

    double delta_v() const { return kappa_A * v_W + kappa_S * v_E - v_C; }
    void validate() const;
};

double equilibrium_constant(const MixingModel& m, double p);

// Extent per initial mole for the 1:1 reaction. Uses the cancellation-free root
// 2c / (1 + sqrt(1 - 4c)) with c = x(1-x)/(1+K).
double reaction_extent_closed(double x, double K);

// Bracketed solve of kappa_A ln y_W + kappa_S ln y_E - ln y_C = ln K.
double reaction_extent_general(double x, double K, double kappa_A, double kappa_S);

// (x - g)(1 - x - g) - K g (1 - g).
double mass_action_residual(double x, double K, double gamma);

double reaction_extent(const MixingModel& m, double x, double p);
double excess_volume(const MixingModel& m, double x, double p);

struct ExcessVolumeRow {
    double x;
    double gamma;
    double v_E;  // m^3/mol
};

// Uniform x grid on [0, 1] with `points` nodes.
std::vector<ExcessVolumeRow> excess_volume_profile(const MixingModel& m, double p, std::size_t points);

}  // namespace helmix
