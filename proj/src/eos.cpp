#include "helmix/eos.hpp"

#include <algorithm>
#include <cmath>

#include "helmix/format.hpp"

namespace helmix {

VolumePotentialEval eval_V(const ConstitutiveModel& model, double T, double pi, const Vec& rho) {
    const MoleData md = mole_data_from_densities(rho, model.molar_masses());
    const Vec& x = md.x.values();
    const VolumeLaw& law = model.volume();
    law.require_domain(T, pi, x);
    const VolumeJet j = law.evaluate(T, pi, x);
    const VolumeIntegral I = law.integrate(T, model.reference().p0, pi, x);

    const MolarMasses& M = model.molar_masses();
    VolumePotentialEval e;
    e.V = md.n * j.v;
    e.V_p = md.n * j.v_p;
    e.V_rho = homogeneous_gradient(ScalarJet{j.v, j.grad_x, j.hess_x}, x, M);
    e.V_rho_rho = homogeneous_hessian(ScalarJet{j.v, j.grad_x, j.hess_x}, x, md.n, M);
    e.Vbar = md.n * I.v;
    e.Vbar_rho = homogeneous_gradient(ScalarJet{I.v, I.grad_x, I.hess_x}, x, M);
    return e;
}

namespace {

struct Residual {
    double F;   // V - 1
    double Fp;  // dV/dp
};

}  // namespace

PressureSolution solve_pressure(const ConstitutiveModel& model, double T, const Vec& rho, const SolverOptions& opt) {
    const MoleData md = mole_data_from_densities(rho, model.molar_masses());
    const Vec& x = md.x.values();
    const VolumeLaw& law = model.volume();
    const auto [tl, tu] = law.temperature_bounds();
    if (!(T > tl && T < tu)) throw DomainError("temperature " + format_double(T) + " K outside the volume-law range");
    const PressureBounds bounds = law.pressure_bounds(T, x);
    if (!(bounds.lower < bounds.upper)) throw DomainError("empty pressure range for this composition");

    const double p_scale = std::max(1.0, std::abs(model.reference().p0));
    auto eval = [&](double p) {
        const auto [v, vp] = law.volume_and_slope(T, p, x);
        const Residual r{md.n * v - 1.0, md.n * vp};
        if (r.Fp > 0.0)
            throw ModelInvalidError("volume increases with pressure at p = " + format_double(p) +
                                    " Pa: the thermal equation of state cannot be inverted");
        return r;
    };

    double start = model.reference().p0;
    if (!(start > bounds.lower && start < bounds.upper)) {
        if (std::isfinite(bounds.lower) && std::isfinite(bounds.upper))
            start = 0.5 * (bounds.lower + bounds.upper);
        else if (std::isfinite(bounds.lower))
            start = bounds.lower + std::max(1.0, std::abs(bounds.lower));
        else
            start = bounds.upper - std::max(1.0, std::abs(bounds.upper));
    }

    int iterations = 0;
    Residual r0 = eval(start);
    double guard_max = std::abs(r0.Fp);
    if (std::abs(r0.F) <= opt.tolerance && std::abs(r0.Fp) * p_scale >= opt.incompressible_guard)
        return PressureSolution{start, std::abs(r0.F), 0, start, start};

    // Bracket expansion away from the start, exploiting the monotone decrease of V.
    const bool upward = r0.F > 0.0;
    const double limit = upward ? bounds.upper : bounds.lower;
    double step = (r0.Fp != 0.0) ? std::abs(r0.F / r0.Fp) : 0.0;
    step = std::max(step, 1e-6 * p_scale);
    double inner = start;
    Residual r_inner = r0;
    double outer = start;
    Residual r_outer = r0;
    bool bracketed = false;
    for (int k = 0; k < 200 && !bracketed; ++k) {
        ++iterations;
        double trial;
        if (std::isfinite(limit)) {
            const double newton = upward ? inner + 2.0 * step : inner - 2.0 * step;
            const double halfway = inner + 0.5 * (limit - inner);
            trial = upward ? std::min(newton, halfway) : std::max(newton, halfway);
            if (trial == inner) break;
        } else {
            trial = upward ? inner + step : inner - step;
            step *= 4.0;
        }
        const Residual rt = eval(trial);
        guard_max = std::max(guard_max, std::abs(rt.Fp));
        if ((upward && rt.F <= 0.0) || (!upward && rt.F >= 0.0)) {
            outer = trial;
            r_outer = rt;
            bracketed = true;
        } else {
            inner = trial;
            r_inner = rt;
            if (std::isfinite(limit)) step *= 4.0;
        }
    }
    if (!bracketed) {
        if (guard_max * p_scale < opt.incompressible_guard)
            throw IllPosedError("pressure is not determined by the densities: |dV/dp| stays below the guard");
        throw DomainError("no pressure in (" + format_double(bounds.lower) + ", " + format_double(bounds.upper) +
                          ") Pa satisfies V(T, p, rho) = 1: state lies outside the model");
    }
    if (std::abs(r_outer.F) <= opt.tolerance && r_outer.F == 0.0) {
        return PressureSolution{outer, 0.0, iterations, std::min(inner, outer), std::max(inner, outer)};
    }

    // lo has V > 1, hi has V < 1.
    double lo = upward ? inner : outer, hi = upward ? outer : inner;
    Residual rlo = upward ? r_inner : r_outer, rhi = upward ? r_outer : r_inner;
    const double bracket_lo = std::min(lo, hi), bracket_hi = std::max(lo, hi);

    double p = std::abs(rlo.F) < std::abs(rhi.F) ? lo : hi;
    Residual r = std::abs(rlo.F) < std::abs(rhi.F) ? rlo : rhi;
    int polish = 0;
    for (int it = 0; it < opt.max_iterations; ++it) {
        ++iterations;
        double next;
        const bool newton_ok = r.Fp < 0.0 && std::isfinite(r.F / r.Fp);
        next = newton_ok ? p - r.F / r.Fp : 0.5 * (lo + hi);
        const double a = std::min(lo, hi), b = std::max(lo, hi);
        if (!(next > a && next < b)) next = 0.5 * (lo + hi);
        const Residual rn = eval(next);
        guard_max = std::max(guard_max, std::abs(rn.Fp));
        if (rn.F > 0.0) {
            lo = next;
            rlo = rn;
        } else {
            hi = next;
            rhi = rn;
        }
        const bool improved = std::abs(rn.F) <= std::abs(r.F);
        if (improved || !newton_ok) {
            p = next;
            r = rn;
        }
        if (std::abs(r.F) <= opt.tolerance) {
            // A couple of extra Newton steps take the residual to rounding level.
            if (++polish > 2 || r.F == 0.0 || !improved) break;
        }
        if (std::nextafter(std::min(lo, hi), infinity) >= std::max(lo, hi)) break;
    }
    if (std::abs(r.Fp) * p_scale < opt.incompressible_guard)
        throw IllPosedError("incompressible point: |dV/dp| = " + format_double(std::abs(r.Fp)) +
                            " 1/Pa is below the guard, the pressure is not a function of the densities");
    if (!(std::abs(r.F) <= opt.tolerance))
        throw DomainError("pressure iteration did not reach |V - 1| <= " + format_double(opt.tolerance) +
                          " (residual " + format_double(std::abs(r.F)) + ")");
    return PressureSolution{p, std::abs(r.F), iterations, bracket_lo, bracket_hi};
}

MonotonicityReport check_monotonicity(const ConstitutiveModel& model, const SampleRegion& region) {
    MonotonicityReport rep;
    const double p_scale = std::max(1.0, std::abs(model.reference().p0));
    for (const ThermoStateTPX& s : region.states(model.species())) {
        const Vec& x = s.x.values();
        if (!model.volume().in_domain(s.T, s.p, x)) continue;
        double v, vp;
        try {
            std::tie(v, vp) = model.volume().volume_and_slope(s.T, s.p, x);
        } catch (const Error& e) {
            rep.violations.push_back({Severity::violation, "evaluation", e.what(), s.T, s.p, x});
            rep.pass = false;
            continue;
        }
        ++rep.samples;
        // In the (T, p, x) chart n = 1 / v, hence dV/dp = v_p / v.
        const double Vp = vp / v;
        rep.min_abs_slope = std::min(rep.min_abs_slope, std::abs(Vp));
        if (Vp >= 0.0 || std::abs(Vp) * p_scale < 1e-14) {
            rep.pass = false;
            rep.violations.push_back({Severity::violation, Vp > 0.0 ? "increasing" : "flat",
                                      "dV/dp = " + format_double(Vp) + " 1/Pa", s.T, s.p, x});
        }
    }
    return rep;
}

}  // namespace helmix
