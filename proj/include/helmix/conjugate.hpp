#pragma once

#include <functional>
#include <vector>

#include "helmix/constitutive.hpp"
#include "helmix/limits.hpp"

namespace helmix {

// One evaluation of a convex function with its gradient and Hessian.
struct SampleValue {
    bool finite = false;  // false outside the effective domain
    double f = 0.0;
    Vec grad;
    Mat hess;
};

using Sampler = std::function<SampleValue(const Vec&)>;

struct Box {
    Vec lower, upper;
};

struct ConjugateResult {
    double g = 0.0;
    Vec argmax;
    bool on_boundary = false;  // maximizer sits on the box: the box is too small for this mu
    bool converged = false;
    int iterations = 0;
};

// g(mu) = max over the box of mu . rho - f(rho). The function is tabulated once on a
// uniform grid (per_axis^N points, N <= 3); each query starts from the grid argmax and
// refines by damped Newton ascent.
class ConvexConjugate {
public:
    ConvexConjugate(Sampler f, Box box, std::size_t per_axis = 33, int newton_steps = 50);

    ConjugateResult operator()(const Vec& mu) const;
    const Box& box() const { return box_; }
    const Sampler& function() const { return f_; }

private:
    Sampler f_;
    Box box_;
    int newton_steps_;
    std::vector<Vec> points_;
    std::vector<double> values_;
};

// Sampler of g built from a conjugate: gradient rho*(mu), Hessian H_f(rho*)^{-1}.
Sampler conjugate_sampler(const ConvexConjugate& conj);

// sup { mu . rho - f(rho) : normal . rho = 1 }, by Newton iteration on the plane.
ConjugateResult constrained_conjugate(const Sampler& f, const Vec& normal, const Vec& mu, int newton_steps = 100);

Sampler free_energy_sampler(const ConstitutiveModel& model, double T);
// Mechanically neutral part of the family's limit model, finite for positive densities.
Sampler limit_k_sampler(const ModelFamily& family, double T);

struct DualPdeStats {
    double max_abs = 0.0;
    double rms = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;  // grad g left the density domain or the pressure range
    std::vector<double> residuals;
};

// r(mu) = V(T, g(mu), grad g(mu)) - 1 with grad g by central differences of g.
DualPdeStats dual_pde_residual(const ConstitutiveModel& model, double T, const std::function<double(const Vec&)>& g,
                               const std::vector<Vec>& mu_samples);

}  // namespace helmix
