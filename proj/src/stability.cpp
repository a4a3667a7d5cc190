#include "helmix/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "helmix/format.hpp"

namespace helmix {

namespace {

Mat mass_scaled(const Mat& tangential, double v, const MolarMasses& M) {
    const Vec inv_m = M.values().cwiseInverse();
    return v * (inv_m.asDiagonal() * tangential * inv_m.asDiagonal());
}

bool is_incompressible(double v, double v_p, const ConstitutiveModel& model) {
    return std::abs(v_p / v) * std::max(1.0, std::abs(model.reference().p0)) < SolverOptions{}.incompressible_guard;
}

std::pair<double, double> extreme_eigenvalues(const Mat& H) {
    if (H.rows() == 0) return {infinity, -infinity};
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

Mat restrict_to(const Mat& H, const Vec& xi) {
    const Mat P = orthogonal_complement(xi);
    Mat R = P.transpose() * H * P;
    return 0.5 * (R + R.transpose());
}

}  // namespace

HessianDecomposition hessian_decomposition(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    const Vec& x = s.x.values();
    if (!s.x.interior()) throw DomainError("Hessian decomposition needs an interior composition");
    const VolumeLaw& law = model.volume();
    const double p0 = model.reference().p0;
    law.require_domain(s.T, s.p, x);
    law.require_domain(s.T, p0, x);
    const MolarMasses& M = model.molar_masses();

    const VolumeJet j = law.evaluate(s.T, s.p, x);
    const VolumeIntegral I = law.integrate(s.T, p0, s.p, x);
    const ThermalPart th = thermal_part(model, s.T, x);

    HessianDecomposition d;
    d.A = mass_scaled(tangential_hessian(I.hess_x, x), j.v, M);
    d.C = mass_scaled(tangential_hessian(th.phi.hess, x), j.v, M);
    d.xi = (tangential_gradient(j.grad_x, x).array() + j.v).matrix().cwiseQuotient(M.values());
    const Eigen::Index n = x.size();
    if (is_incompressible(j.v, j.v_p, model)) {
        d.incompressible = true;
        d.lambda = infinity;
        d.B = Mat::Zero(n, n);
    } else {
        d.lambda = -j.v / j.v_p;
        d.B = d.lambda * d.xi * d.xi.transpose();
    }
    return d;
}

MuellerMargin mueller_margin(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    const Vec& x = s.x.values();
    const VolumeLaw& law = model.volume();
    law.require_domain(s.T, s.p, x);
    const VolumeJet j = law.evaluate(s.T, s.p, x);
    const double Mx = mean_molar_mass(x, model.molar_masses());
    const ThermalPart th = thermal_part(model, s.T, x);
    const VolumeIntegral I = law.integrate(s.T, model.reference().p0, s.p, x);
    const double C_full = th.C - s.T * I.v_TT;

    MuellerMargin m;
    m.margin = -j.v_T * j.v_T - (C_full / s.T) * j.v_p;
    m.du_dp = -s.T * j.v_T - s.p * j.v_p;
    try {
        const HeatCapacities hc = heat_capacities(model, s);
        m.margin_via_cv = -(Mx * hc.c_v / s.T) * j.v_p;
    } catch (const IllPosedError&) {
        m.margin_via_cv = -infinity;
    }
    return m;
}

double compat_margin(const ConstitutiveModel& model, const ThermoStateTPX& s) {
    const Vec& x = s.x.values();
    const VolumeLaw& law = model.volume();
    law.require_domain(s.T, s.p, x);
    const VolumeJet j = law.evaluate(s.T, s.p, x);
    const ThermalPart th = thermal_part(model, s.T, x);
    const VolumeIntegral I = law.integrate(s.T, model.reference().p0, s.p, x);
    double tail = 0.0;
    if (j.v_T != 0.0) tail = (j.v_p == 0.0) ? -infinity : j.v_T * j.v_T / j.v_p;
    return th.C / s.T - I.v_TT + tail;
}

const char* to_string(Definiteness d) {
    switch (d) {
        case Definiteness::positive: return "positive";
        case Definiteness::marginal: return "marginal";
        case Definiteness::negative: return "negative";
    }
    return "unknown";
}

Definiteness classify_eigenvalues(double lambda_min, double lambda_max) {
    const double bar = 1e-10 * std::max(1.0, std::abs(lambda_max));
    if (lambda_min > bar) return Definiteness::positive;
    if (lambda_min >= -bar) return Definiteness::marginal;
    return Definiteness::negative;
}

std::vector<std::size_t> StabilityReport::worst(std::size_t count) const {
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].ok) ok.push_back(i);
    std::vector<std::size_t> out;
    std::set<std::size_t> seen;
    auto take = [&](auto less) {
        std::vector<std::size_t> idx = ok;
        std::stable_sort(idx.begin(), idx.end(), less);
        for (std::size_t k = 0; k < std::min(count, idx.size()); ++k)
            if (seen.insert(idx[k]).second) out.push_back(idx[k]);
    };
    take([&](std::size_t a, std::size_t b) { return samples[a].lambda_min < samples[b].lambda_min; });
    take([&](std::size_t a, std::size_t b) { return samples[a].d2f_dT2 > samples[b].d2f_dT2; });
    take([&](std::size_t a, std::size_t b) { return samples[a].mueller < samples[b].mueller; });
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!samples[i].ok && out.size() < 3 * count && seen.insert(i).second) out.push_back(i);
    return out;
}

StabilityReport stability_report(const ConstitutiveModel& model, const SampleRegion& region) {
    StabilityReport rep;
    rep.model_label = model.label();
    for (const ThermoStateTPX& s : region.states(model.species())) {
        StabilitySample r;
        r.T = s.T;
        r.p = s.p;
        r.x = s.x.values();
        try {
            const PotentialBundle b = evaluate_bundle(model, s);
            std::tie(r.lambda_min, r.lambda_max) = extreme_eigenvalues(b.hessian);
            const VolumePartials vp = volume_partials(model, s);
            const Vec xi = (vp.tangential_grad.array() + vp.v).matrix().cwiseQuotient(model.molar_masses().values());
            r.lambda_min_xi_perp = model.species() > 1 ? extreme_eigenvalues(restrict_to(b.hessian, xi)).first : infinity;
            r.d2f_dT2 = b.d2f_dT2;
            r.mueller = mueller_margin(model, s).margin;
            r.compat = compat_margin(model, s);
            r.appendix_ok = vp.v_p < 0.0 && b.c_p >= b.c_v * (1.0 - 1e-12) && b.c_v > 0.0;
            r.hessian_class = classify_eigenvalues(r.lambda_min, r.lambda_max);
            r.ok = true;
        } catch (const Error& e) {
            r.error = e.what();
        }
        if (!r.ok) {
            ++rep.errors;
        } else {
            switch (r.hessian_class) {
                case Definiteness::positive: ++rep.positive; break;
                case Definiteness::marginal: ++rep.marginal; break;
                case Definiteness::negative: ++rep.negative; break;
            }
            if (!(r.d2f_dT2 < 0.0)) ++rep.concave_violations;
            if (!(r.mueller >= 0.0)) ++rep.mueller_violations;
            if (!r.appendix_ok) ++rep.appendix_violations;
        }
        rep.samples.push_back(std::move(r));
    }
    if (rep.negative > 0 || rep.concave_violations > 0)
        rep.verdict = "unstable";
    else if (rep.errors > 0)
        rep.verdict = "incomplete";
    else if (rep.marginal > 0)
        rep.verdict = "marginal";
    else
        rep.verdict = "stable";
    return rep;
}

namespace {

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

nlohmann::json vec_json(const Vec& x) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(number(x[i]));
    return a;
}

}  // namespace

std::string to_json(const StabilityReport& r) {
    nlohmann::ordered_json j;
    j["model"] = r.model_label;
    j["verdict"] = r.verdict;
    j["counts"] = {{"samples", r.samples.size()},     {"positive", r.positive},
                   {"marginal", r.marginal},          {"negative", r.negative},
                   {"concavity_violations", r.concave_violations},
                   {"mueller_violations", r.mueller_violations},
                   {"appendix_violations", r.appendix_violations},
                   {"errors", r.errors}};
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const StabilitySample& s : r.samples) {
        nlohmann::ordered_json e;
        e["T_K"] = number(s.T);
        e["p_Pa"] = number(s.p);
        e["x"] = vec_json(s.x);
        if (s.ok) {
            e["lambda_min"] = number(s.lambda_min);
            e["lambda_max"] = number(s.lambda_max);
            e["lambda_min_xi_perp"] = number(s.lambda_min_xi_perp);
            e["hessian"] = to_string(s.hessian_class);
            e["d2f_dT2"] = number(s.d2f_dT2);
            e["mueller_margin"] = number(s.mueller);
            e["compat_margin"] = number(s.compat);
            e["appendix_ok"] = s.appendix_ok;
        } else {
            e["error"] = s.error;
        }
        arr.push_back(std::move(e));
    }
    j["samples"] = std::move(arr);
    return j.dump(2);
}

std::string to_csv(const StabilityReport& r, std::size_t worst_count) {
    std::ostringstream os;
    const std::size_t N = r.samples.empty() ? 0 : static_cast<std::size_t>(r.samples.front().x.size());
    os << "T_K,p_Pa";
    for (std::size_t i = 0; i < N; ++i) os << ",x" << (i + 1) << "_1";
    os << ",lambda_min_Pa_m6_per_kg2,lambda_min_xi_perp_Pa_m6_per_kg2,d2f_dT2_Pa_per_K2,"
          "mueller_margin_m6_per_mol2_K,compat_margin_J_per_mol_K2,hessian_1,appendix_ok_1,status_1\n";
    for (std::size_t i : r.worst(worst_count)) {
        const StabilitySample& s = r.samples[i];
        os << format_double(s.T) << ',' << format_double(s.p);
        for (Eigen::Index k = 0; k < s.x.size(); ++k) os << ',' << format_double(s.x[k]);
        if (s.ok) {
            os << ',' << format_double(s.lambda_min) << ',' << format_double(s.lambda_min_xi_perp) << ','
               << format_double(s.d2f_dT2) << ',' << format_double(s.mueller) << ',' << format_double(s.compat)
               << ',' << to_string(s.hessian_class) << ',' << (s.appendix_ok ? 1 : 0) << ",ok\n";
        } else {
            os << ",nan,nan,nan,nan,nan,,0,error\n";
        }
    }
    return os.str();
}

Mat xi_perp_operator(const ConstitutiveModel& model, double T, double p, const Composition& x) {
    const HessianDecomposition d = hessian_decomposition(model, ThermoStateTPX{T, p, x});
    if (model.species() < 2) return Mat(0, 0);
    return restrict_to(d.A + d.C, d.xi);
}

PressureSweepResult pressure_sweep_definiteness(const ConstitutiveModel& model, double T, const Composition& x,
                                                const PressureSweepOptions& opt) {
    PressureSweepResult res;
    const double p0 = model.reference().p0;
    if (model.species() < 2) {
        res.lambda_min_reference = infinity;
        return res;
    }
    auto lam = [&](double p) { return extreme_eigenvalues(xi_perp_operator(model, T, p, x)).first; };
    res.lambda_min_reference = lam(p0);
    ++res.evaluated;
    if (!(res.lambda_min_reference > 0.0)) {
        res.pass = false;
        res.failure_pressure = p0;
        res.failure_offset = 0.0;
        return res;
    }
    const std::size_t n = std::max<std::size_t>(opt.points, 2);
    const double ratio = std::log(opt.max_offset / opt.min_offset);
    double best = infinity;
    for (int sign : {+1, -1}) {
        double prev = 0.0;  // offset with positive definiteness
        for (std::size_t k = 0; k < n; ++k) {
            const double d = opt.min_offset * std::exp(ratio * static_cast<double>(k) / static_cast<double>(n - 1));
            if (d >= best) break;
            const double p = p0 + sign * d;
            if (!model.volume().in_domain(T, p, x.values())) {
                ++res.skipped;
                break;  // the domain is an interval around p0; nothing beyond is reachable
            }
            double l;
            try {
                l = lam(p);
            } catch (const Error&) {
                ++res.skipped;
                break;
            }
            ++res.evaluated;
            if (l > 0.0) {
                prev = d;
                continue;
            }
            // Bisect the crossing between the last definite offset and d.
            double lo = prev, hi = d;
            for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double lm = lam(p0 + sign * mid);
                ++res.evaluated;
                (lm > 0.0 ? lo : hi) = mid;
            }
            if (hi < best) {
                best = hi;
                res.pass = false;
                res.failure_offset = hi;
                res.failure_pressure = p0 + sign * hi;
            }
            break;
        }
    }
    return res;
}

}  // namespace helmix
