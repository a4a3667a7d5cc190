#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

#include "helmix/errors.hpp"

namespace helmix {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double gas_constant = 8.314462618;  // J/(mol K)
inline constexpr double x_floor = 1e-12;
inline constexpr double simplex_tolerance = 1e-12;

class MolarMasses {
public:
    explicit MolarMasses(Vec values);
    MolarMasses(std::initializer_list<double> values);

    std::size_t size() const { return static_cast<std::size_t>(m_.size()); }
    double operator[](std::size_t i) const { return m_[static_cast<Eigen::Index>(i)]; }
    const Vec& values() const { return m_; }

private:
    Vec m_;
};

// Mole fractions on the unit simplex. Construction renormalizes a sum within
// simplex_tolerance of one and rejects anything further away.
class Composition {
public:
    explicit Composition(Vec x);
    Composition(std::initializer_list<double> x);

    std::size_t size() const { return static_cast<std::size_t>(x_.size()); }
    double operator[](std::size_t i) const { return x_[static_cast<Eigen::Index>(i)]; }
    const Vec& values() const { return x_; }
    bool interior() const { return interior_; }

private:
    Vec x_;
    bool interior_ = false;
};

struct ThermoStateTPX {
    double T;
    double p;
    Composition x;
};

struct ThermoStateTRho {
    double T;
    Vec rho;
};

struct MoleData {
    Vec n_i;        // mol/m^3
    double n;       // mol/m^3
    Composition x;
    bool boundary;  // some x_i <= x_floor
    double molar_volume() const { return 1.0 / n; }
};

// Value, gradient and Hessian of a scalar function of the composition
// (derivatives of any smooth extension off the simplex).
struct ScalarJet {
    double value = 0.0;
    Vec grad;
    Mat hess;

    static ScalarJet zero(std::size_t n);
    ScalarJet& operator+=(const ScalarJet& o);
    ScalarJet& operator-=(const ScalarJet& o);
    ScalarJet& operator*=(double s);
};

ScalarJet operator+(ScalarJet a, const ScalarJet& b);
ScalarJet operator-(ScalarJet a, const ScalarJet& b);
ScalarJet operator*(double s, ScalarJet a);
ScalarJet operator*(ScalarJet a, double s);
double magnitude(const ScalarJet& a);

MoleData mole_data_from_densities(const Vec& rho, const MolarMasses& M);

double mean_molar_mass(const Composition& x, const MolarMasses& M);
double mean_molar_mass(const Vec& x, const MolarMasses& M);

// Densities from a composition and a molar volume: rho_i = M_i x_i / v.
Vec densities_from_molar_volume(const Composition& x, const MolarMasses& M, double v);

// D phi . [e^i - x] for every i.
Vec tangential_gradient(const Vec& grad, const Vec& x);

// D^2 phi [e^i - x][e^j - x] for every pair (i, j).
Mat tangential_hessian(const Mat& hess, const Vec& x);

// For h(rho) = n(rho) * phi(x(rho)), positively homogeneous of degree one:
//   dh/drho_i            = (phi + d^tau_i phi) / M_i
//   d^2h/drho_i drho_j   = D^2 phi[e^i - x][e^j - x] / (M_i M_j n)
Vec homogeneous_gradient(const ScalarJet& phi, const Vec& x, const MolarMasses& M);
Mat homogeneous_hessian(const ScalarJet& phi, const Vec& x, double n, const MolarMasses& M);

// Jet of a composition function by central differences along the simplex directions
// e^i - x; the returned gradient and Hessian are already tangential. Requires interior x.
ScalarJet simplex_fd_jet(const std::function<double(const Vec&)>& f, const Vec& x);

// Interior lattice on the simplex with `per_edge` points along each edge direction:
// all x = k / (per_edge + 1) with integer k_i >= 1 and sum k_i = per_edge + 1.
std::vector<Vec> simplex_lattice(std::size_t species, std::size_t per_edge);

// Orthonormal basis (columns) of the orthogonal complement of a nonzero vector,
// taken from a Householder reflection.
Mat orthogonal_complement(const Vec& v);

// Basis of the simplex tangent space {t : sum t_i = 0}.
Mat simplex_tangent_basis(std::size_t species);

}  // namespace helmix
