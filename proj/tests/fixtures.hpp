#pragma once

#include <memory>

#include "helmix/constitutive.hpp"
#include "helmix/limits.hpp"

namespace fixtures {

using helmix::ConstitutiveModel;
using helmix::MolarMasses;
using helmix::ReferenceState;
using helmix::Vec;
using helmix::Mat;

inline MolarMasses water_ethanol() { return MolarMasses{0.0180153, 0.04607}; }
inline Vec water_ethanol_v00() { return (Vec(2) << 1.807e-5, 5.868e-5).finished(); }
inline MolarMasses water() { return MolarMasses{0.0180153}; }

inline helmix::ThermalDataPtr liquid_thermal(const MolarMasses& M, bool ideal) {
    const auto n = static_cast<Eigen::Index>(M.size());
    const Vec cp = (Vec(2) << 4180.0, 2440.0).finished().head(n);
    const Vec s = (Vec(2) << 3880.0, 3490.0).finished().head(n);
    const Vec h = (Vec(2) << -1.5e7, -5.9e6).finished().head(n);
    return helmix::SpeciesThermal::from_specific(M, cp, s, h, ideal);
}

inline ConstitutiveModel volume_additive(double K = 2.18e9) {
    const auto M = water_ethanol();
    return helmix::make_volume_additive(M, K, water_ethanol_v00(), liquid_thermal(M, true), ReferenceState{});
}

inline ConstitutiveModel simple_law(double beta = 2.07e-4, double K = 2.18e9) {
    const auto M = water_ethanol();
    return helmix::make_simple_law(M, water_ethanol_v00(), beta, K, 293.0, 1e5, liquid_thermal(M, true),
                                   ReferenceState{});
}

inline helmix::Section16Shape section16_shape() {
    helmix::Section16Shape sh;
    sh.a_lin = (Vec(2) << 1.0, 1.1).finished();
    sh.a_quad = (Mat(2, 2) << 0.0, 0.05, 0.05, 0.0).finished();
    sh.t1 = -2e-4;
    sh.t2 = 1e-7;
    sh.T_ref = 298.15;
    return sh;
}

inline ConstitutiveModel section16(double K = 2.0e9) {
    const auto M = water_ethanol();
    return helmix::make_section16(M, K, 3.0e4, section16_shape(), liquid_thermal(M, true), ReferenceState{});
}

inline ConstitutiveModel ideal_gas() {
    const MolarMasses M{0.028014, 0.031998};
    const Vec z = (Vec(2) << 2.5, 2.5).finished();
    const Vec h = (Vec(2) << 3.0e5, 2.7e5).finished();
    const Vec s = (Vec(2) << 6.8e3, 6.4e3).finished();
    return helmix::make_ideal_gas_mixture(M, z, h, s, ReferenceState{});
}

}  // namespace fixtures
