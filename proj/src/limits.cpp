#include "helmix/limits.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include "helmix/format.hpp"

namespace helmix {

const char* to_string(LimitMode m) { return m == LimitMode::global ? "global" : "local"; }

ModelFamily::ModelFamily(std::string name, LimitMode mode, Generator generator, ConstitutiveModel limit,
                         std::vector<double> default_schedule, std::string index_name)
    : name_(std::move(name)),
      mode_(mode),
      generator_(std::move(generator)),
      limit_(std::move(limit)),
      schedule_(std::move(default_schedule)),
      index_name_(std::move(index_name)) {
    if (!generator_) throw ConfigError("model family '" + name_ + "' has no generator");
}

ModelFamily& ModelFamily::set_thresholds(double a, double b) {
    const double p0 = limit_.reference().p0;
    if (!(a < p0 && p0 < b))
        throw ConfigError("local thresholds must satisfy a < p0 < b (a = " + format_double(a) +
                          ", b = " + format_double(b) + ")");
    a_ = a;
    b_ = b;
    return *this;
}

std::vector<double> geometric_schedule(int lo_exp, int hi_exp, double scale) {
    std::vector<double> out;
    for (int e = lo_exp; e <= hi_exp; ++e) out.push_back(std::pow(10.0, e) * scale);
    return out;
}

ModelFamily volume_additive_family(const MolarMasses& M, const Vec& v00, ThermalDataPtr thermal, ReferenceState ref,
                                   double pivot, double pR, const Mat& quadratic) {
    const Mat Q = quadratic.size() == 0 ? Mat::Zero(v00.size(), v00.size()) : quadratic;
    auto make = [=](double K) {
        return ConstitutiveModel(M, std::make_shared<VolumeAdditiveLaw>(K, pivot, v00, Q), thermal, ref,
                                 "volume_additive(K=" + format_double(K) + ")");
    };
    const bool linear = Q.cwiseAbs().maxCoeff() == 0.0;
    return ModelFamily(linear ? "volume_additive" : "volume_quadratic", LimitMode::global, make, make(infinity),
                       geometric_schedule(2, 9, pR), "K");
}

ModelFamily simple_law_family(const MolarMasses& M, const Vec& vR, ThermalDataPtr thermal, ReferenceState ref,
                              double TR, double pR, const SimpleLawScaling& sc) {
    if (sc.epsilon_scaled && !(sc.alpha0 > 0.0)) throw ConfigError("epsilon scaling needs alpha0 > 0");
    auto beta_of = [=](double K) {
        if (!sc.epsilon_scaled) return sc.beta;
        if (std::isinf(K)) return 0.0;
        return sc.beta0 * std::sqrt(pR / (sc.alpha0 * K)) / TR;
    };
    auto make = [=](double K) {
        return ConstitutiveModel(M, std::make_shared<SimpleLawVolume>(vR, beta_of(K), K, TR, pR), thermal, ref,
                                 "simple_law(K=" + format_double(K) + ")");
    };
    return ModelFamily(sc.epsilon_scaled ? "simple_law_scaled" : "simple_law_fixed_beta", LimitMode::global, make,
                       make(infinity), geometric_schedule(2, 9, pR), "K");
}

ModelFamily band_warp_family(const ConstitutiveModel& base, double a, double b) {
    const double p0 = base.reference().p0;
    VolumeLawPtr vol = base.volume_ptr();
    auto make = [=](double m) {
        const double eps = std::isinf(m) ? 0.0 : 1.0 / m;
        return base.with_volume(std::make_shared<BandWarpLaw>(vol, a, b, eps, p0),
                                "band_warp(m=" + format_double(m) + ")");
    };
    ModelFamily fam("band_warp", LimitMode::local, make, make(infinity), geometric_schedule(1, 9, 1.0), "m");
    fam.set_thresholds(a, b);
    return fam;
}

namespace {

struct LimitState {
    MoleData md;
    VolumeJet jet0;  // limit volume at (T, p0, x)
};

LimitState limit_state(const ModelFamily& family, double T, const Vec& rho) {
    const ConstitutiveModel& lim = family.limit();
    MoleData md = mole_data_from_densities(rho, lim.molar_masses());
    const double p0 = lim.reference().p0;
    lim.volume().require_domain(T, p0, md.x.values());
    VolumeJet j = lim.volume().evaluate(T, p0, md.x.values());
    return LimitState{std::move(md), std::move(j)};
}

Vec xi_of(const VolumeJet& j, const Vec& x, const MolarMasses& M) {
    return (tangential_gradient(j.grad_x, x).array() + j.v).matrix().cwiseQuotient(M.values());
}

void require_linear(const ModelFamily& family, const LimitState& st) {
    const Vec& x = st.md.x.values();
    const double curv = tangential_hessian(st.jet0.hess_x, x).cwiseAbs().maxCoeff() / std::abs(st.jet0.v);
    if (curv > 1e-8)
        throw AssumptionViolation("limit volume of family '" + family.name() +
                                  "' is not linear in the composition (relative curvature " + format_double(curv) +
                                  "); a global incompressible limit does not exist");
}

double min_eigenvalue(const Mat& H) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_abs_eigenvalue(const Mat& H) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Root of n v(T, pi, x) = 1 beyond `edge` in direction `dir` (+1 upward, -1 downward).
double branch_root(const VolumeLaw& law, double T, const Vec& x, double n, double edge, int dir) {
    const PressureBounds bnd = law.pressure_bounds(T, x);
    const double limit = dir > 0 ? bnd.upper : bnd.lower;
    auto F = [&](double p) { return n * law.volume(T, p, x) - 1.0; };
    const double sgn0 = F(edge) > 0.0 ? 1.0 : -1.0;
    double inner = edge;
    double d = std::max(1.0, 1e-6 * std::abs(edge));
    double outer = edge;
    bool found = false;
    for (int k = 0; k < 400; ++k) {
        double trial = inner + dir * d;
        if (std::isfinite(limit)) {
            const double half = inner + 0.5 * (limit - inner);
            trial = dir > 0 ? std::min(trial, half) : std::max(trial, half);
            if (trial == inner) break;
        }
        const double ft = F(trial);
        if ((ft > 0.0 ? 1.0 : -1.0) != sgn0 || ft == 0.0) {
            outer = trial;
            found = true;
            break;
        }
        inner = trial;
        d *= 4.0;
    }
    if (!found)
        throw AssumptionViolation("no pressure beyond the threshold " + format_double(edge) +
                                  " Pa satisfies V(T, p, rho) = 1 for the limit volume");
    double lo = std::min(inner, outer), hi = std::max(inner, outer);
    std::uintmax_t iters = 300;
    const auto r = boost::math::tools::toms748_solve(F, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    const double p1 = r.first, p2 = r.second;
    return std::abs(F(p1)) <= std::abs(F(p2)) ? p1 : p2;
}

}  // namespace

double constraint_value(const ModelFamily& family, double T, const Vec& rho) {
    const LimitState st = limit_state(family, T, rho);
    return st.md.n * st.jet0.v;
}

Vec project_to_constraint(const ModelFamily& family, double T, const Vec& rho) {
    return rho / constraint_value(family, T, rho);
}

Vec limit_specific_volumes(const ModelFamily& family, double T, const Vec& x) {
    const ConstitutiveModel& lim = family.limit();
    const double p0 = lim.reference().p0;
    lim.volume().require_domain(T, p0, x);
    return xi_of(lim.volume().evaluate(T, p0, x), x, lim.molar_masses());
}

LimitValue limit_free_energy_global(const ModelFamily& family, double T, const Vec& rho) {
    if (family.mode() != LimitMode::global)
        throw AssumptionViolation("family '" + family.name() + "' is not in global mode");
    const LimitState st = limit_state(family, T, rho);
    require_linear(family, st);
    const double s = st.md.n * st.jet0.v;
    if (std::abs(s - 1.0) > constraint_tolerance) return LimitValue{false, infinity};
    return LimitValue{true, mechanically_neutral_k(family.limit(), T, rho).k};
}

LocalLimitValue limit_free_energy_local(const ModelFamily& family, double T, const Vec& rho) {
    if (family.mode() != LimitMode::local)
        throw AssumptionViolation("family '" + family.name() + "' is not in local mode");
    const ConstitutiveModel& lim = family.limit();
    const double p0 = lim.reference().p0;
    const double a = family.lower_threshold(), b = family.upper_threshold();
    const LimitState st = limit_state(family, T, rho);
    const Vec& x = st.md.x.values();
    const MechanicallyNeutralPart k = mechanically_neutral_k(lim, T, rho);

    LocalLimitValue out;
    // Necessary condition D^2 k + pi D^2 V^inf(p0) >= 0 on the band.
    const Mat Vhess = homogeneous_hessian(ScalarJet{st.jet0.v, st.jet0.grad_x, st.jet0.hess_x}, x, st.md.n,
                                          lim.molar_masses());
    for (double pi : {a, 0.5 * (a + b), b}) {
        const Mat H = k.hess + pi * Vhess;
        const double scale = std::max(1.0, max_abs_eigenvalue(H));
        if (min_eigenvalue(0.5 * (H + H.transpose())) < -1e-10 * scale) out.necessary_condition = false;
    }

    const double V0 = st.md.n * st.jet0.v;
    if (std::abs(V0 - 1.0) <= classification_tolerance) {
        out.value = k.k;
        out.branch = 0;
        out.pressure = p0;
        return out;
    }
    out.branch = V0 > 1.0 ? +1 : -1;
    out.pressure = branch_root(lim.volume(), T, x, st.md.n, V0 > 1.0 ? b : a, out.branch);
    const VolumeIntegral I = lim.volume().integrate(T, p0, out.pressure, x);
    out.value = k.k + p0 * V0 + st.md.n * I.v - out.pressure;
    return out;
}

double limit_free_energy(const ModelFamily& family, double T, const Vec& rho) {
    if (family.mode() == LimitMode::global) return limit_free_energy_global(family, T, rho).value;
    return limit_free_energy_local(family, T, rho).value;
}

Vec limit_chemical_potentials(const ModelFamily& family, double T, const Vec& rho, double p) {
    const LimitState st = limit_state(family, T, rho);
    const double V0 = st.md.n * st.jet0.v;
    if (family.mode() == LimitMode::global) {
        require_linear(family, st);
        if (std::abs(V0 - 1.0) > constraint_tolerance)
            throw DomainError("state is off the constraint surface (V = " + format_double(V0) +
                              "); the limit energy has no subgradient there");
    } else {
        if (std::abs(V0 - 1.0) > classification_tolerance)
            throw DomainError("state is off the constraint surface (V = " + format_double(V0) +
                              "); the limit chemical potentials are the ordinary gradient there");
        if (p < family.lower_threshold() || p > family.upper_threshold())
            throw NotASubgradientError("pressure parameter " + format_double(p) + " Pa lies outside the band [" +
                                       format_double(family.lower_threshold()) + ", " +
                                       format_double(family.upper_threshold()) + "]");
    }
    const MechanicallyNeutralPart k = mechanically_neutral_k(family.limit(), T, rho);
    return p * xi_of(st.jet0, st.md.x.values(), family.limit().molar_masses()) + k.grad;
}

SubgradientReport check_subgradient(const ModelFamily& family, double T, const Vec& rho, double p,
                                    std::size_t samples, std::uint64_t seed, double spread, double tolerance) {
    SubgradientReport rep;
    const Vec mu = limit_chemical_potentials(family, T, rho, p);
    const double f0 = limit_free_energy(family, T, rho);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Eigen::Index N = rho.size();
    Mat B;
    if (family.mode() == LimitMode::global)
        B = orthogonal_complement(limit_specific_volumes(family, T, mole_data_from_densities(rho, family.limit().molar_masses()).x.values()));
    std::size_t attempts = 0;
    while (rep.samples < samples && attempts++ < 100 * samples + 100) {
        Vec r(N);
        if (family.mode() == LimitMode::global) {
            if (B.cols() == 0) return rep;  // single species: the feasible set is one point
            Vec z(B.cols());
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = U(rng);
            r = rho + spread * rho.norm() * (B * z) / std::max(1.0, z.norm());
        } else {
            for (Eigen::Index i = 0; i < N; ++i) r[i] = rho[i] * (1.0 + spread * U(rng));
        }
        if ((r.array() <= 0.0).any()) continue;
        double fr;
        try {
            fr = limit_free_energy(family, T, r);
        } catch (const DomainError&) {
            continue;
        }
        ++rep.samples;
        const Vec dr = r - rho;
        const double lin = mu.dot(dr);
        const double mag = std::abs(fr) + std::abs(f0) + mu.cwiseProduct(dr).cwiseAbs().sum();
        const double rel = (fr - f0 - lin) / mag;
        rep.worst_relative = std::min(rep.worst_relative, rel);
        if (rel < -tolerance) ++rep.violations;
    }
    return rep;
}

ProbeState constraint_probe(const ModelFamily& family, double T, const Vec& x, double factor) {
    const Composition c(x);
    const ConstitutiveModel& lim = family.limit();
    const double v = lim.volume().volume(T, lim.reference().p0, c.values());
    return ProbeState{T, factor * densities_from_molar_volume(c, lim.molar_masses(), v)};
}

namespace {

double ls_slope(const std::vector<double>& X, const std::vector<double>& Y) {
    const double n = static_cast<double>(X.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sx += X[i];
        sy += Y[i];
        sxx += X[i] * X[i];
        sxy += X[i] * Y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

LimitReport family_sweep(const ModelFamily& family, const std::vector<ProbeState>& probes,
                         std::vector<double> schedule) {
    if (schedule.empty()) schedule = family.default_schedule();
    LimitReport rep;
    rep.family = family.name();
    rep.mode = to_string(family.mode());
    rep.index_name = family.index_name();
    rep.schedule = schedule;

    std::vector<ConstitutiveModel> members;
    members.reserve(schedule.size());
    for (double idx : schedule) members.push_back(family.member(idx));

    for (const ProbeState& probe : probes) {
        ProbeRecord rec;
        rec.probe = probe;
        const MoleData md = mole_data_from_densities(probe.rho, family.limit().molar_masses());
        const Vec& x = md.x.values();
        rec.constraint = constraint_value(family, probe.T, probe.rho);
        rec.on_constraint = std::abs(rec.constraint - 1.0) <= classification_tolerance;
        rec.k_limit = mechanically_neutral_k(family.limit(), probe.T, probe.rho).k;
        if (family.mode() == LimitMode::global) {
            rec.limit_value = rec.on_constraint ? rec.k_limit : infinity;
            rec.limit_pressure = family.reference().p0;
        } else {
            const LocalLimitValue lv = limit_free_energy_local(family, probe.T, probe.rho);
            rec.limit_value = lv.value;
            rec.limit_pressure = lv.pressure;
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t m = 0; m < members.size(); ++m) {
            try {
                const FreeEnergyParts parts = free_energy_parts(members[m], probe.T, probe.rho);
                const VolumeJet j = members[m].volume().evaluate(probe.T, parts.p, x);
                rec.f.push_back(parts.f);
                rec.p.push_back(parts.p);
                rec.v_T.push_back(j.v_T);
                rec.v_p.push_back(j.v_p);
            } catch (const Error& e) {
                rec.f.push_back(nan);
                rec.p.push_back(nan);
                rec.v_T.push_back(nan);
                rec.v_p.push_back(nan);
                rec.failures.push_back(format_double(schedule[m]) + ": " + e.what());
            }
        }
        if (!rec.p.empty() && std::isfinite(rec.p.back())) {
            const ConstitutiveModel& lim = family.limit();
            if (lim.volume().in_domain(probe.T, rec.p.back(), x))
                rec.final_constraint_residual = std::abs(md.n * lim.volume().volume(probe.T, rec.p.back(), x) - 1.0);
            else
                rec.final_constraint_residual = infinity;
        }

        const double ref = std::isfinite(rec.limit_value) ? rec.limit_value : rec.k_limit;
        std::vector<double> X, Y;
        bool exact = true;
        for (std::size_t m = 0; m < schedule.size(); ++m) {
            if (!std::isfinite(rec.f[m])) continue;
            const double gap = std::abs(rec.f[m] - ref);
            if (gap > 1e-13 * std::max(1.0, std::abs(ref))) exact = false;
            if (gap > 0.0) {
                X.push_back(std::log(schedule[m]));
                Y.push_back(std::log(gap));
            }
        }
        if (X.size() > 4) {
            X.erase(X.begin(), X.end() - 4);
            Y.erase(Y.begin(), Y.end() - 4);
        }
        rec.fitted_slope = X.size() >= 2 ? ls_slope(X, Y) : 0.0;
        if (std::isfinite(rec.limit_value) && exact)
            rec.classification = "converges";
        else if (std::isfinite(rec.limit_value) && X.size() >= 2 && rec.fitted_slope < -0.1)
            rec.classification = "converges";
        else if (!std::isfinite(rec.limit_value) && X.size() >= 2 && rec.fitted_slope > 0.1)
            rec.classification = "diverges";
        else
            rec.classification = "undetermined";

        std::vector<std::size_t> ok;
        for (std::size_t m = 0; m < schedule.size(); ++m)
            if (std::isfinite(rec.f[m])) ok.push_back(m);
        if (ok.size() >= 2) {
            const std::size_t i1 = ok[ok.size() - 2], i2 = ok.back();
            rec.extrapolated =
                (schedule[i2] * rec.f[i2] - schedule[i1] * rec.f[i1]) / (schedule[i2] - schedule[i1]);
        } else {
            rec.extrapolated = ok.empty() ? nan : rec.f[ok.back()];
        }
        rep.probes.push_back(std::move(rec));
    }
    return rep;
}

namespace {

nlohmann::ordered_json num(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

nlohmann::ordered_json num_array(const std::vector<double>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (double d : v) a.push_back(num(d));
    return a;
}

nlohmann::ordered_json num_array(const Vec& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
    return a;
}

}  // namespace

std::string to_json(const LimitReport& r) {
    nlohmann::ordered_json j;
    j["family"] = r.family;
    j["mode"] = r.mode;
    j["index_name"] = r.index_name;
    j["schedule"] = num_array(r.schedule);
    nlohmann::ordered_json probes = nlohmann::ordered_json::array();
    for (const ProbeRecord& p : r.probes) {
        nlohmann::ordered_json e;
        e["T_K"] = num(p.probe.T);
        e["rho_kg_per_m3"] = num_array(p.probe.rho);
        e["constraint_value"] = num(p.constraint);
        e["on_constraint"] = p.on_constraint;
        e["limit_value_Pa"] = num(p.limit_value);
        e["limit_pressure_Pa"] = num(p.limit_pressure);
        e["k_limit_Pa"] = num(p.k_limit);
        e["classification"] = p.classification;
        e["fitted_slope"] = num(p.fitted_slope);
        e["extrapolated_Pa"] = num(p.extrapolated);
        e["final_constraint_residual"] = num(p.final_constraint_residual);
        e["f_Pa"] = num_array(p.f);
        e["p_Pa"] = num_array(p.p);
        e["v_T"] = num_array(p.v_T);
        e["v_p"] = num_array(p.v_p);
        e["failures"] = p.failures;
        probes.push_back(std::move(e));
    }
    j["probes"] = std::move(probes);
    return j.dump(2);
}

std::string to_csv(const LimitReport& r) {
    std::ostringstream os;
    os << "probe_1,on_constraint_1,index_" << r.index_name
       << "_1,f_Pa,p_Pa,gap_Pa,v_T_m3_per_mol_K,v_p_m3_per_mol_Pa\n";
    for (std::size_t i = 0; i < r.probes.size(); ++i) {
        const ProbeRecord& p = r.probes[i];
        const double ref = std::isfinite(p.limit_value) ? p.limit_value : p.k_limit;
        for (std::size_t m = 0; m < r.schedule.size(); ++m) {
            os << i << ',' << (p.on_constraint ? 1 : 0) << ',' << format_double(r.schedule[m]) << ','
               << format_double(p.f[m]) << ',' << format_double(p.p[m]) << ',' << format_double(p.f[m] - ref)
               << ',' << format_double(p.v_T[m]) << ',' << format_double(p.v_p[m]) << '\n';
        }
    }
    return os.str();
}

MuellerSweep mueller_sweep(const ModelFamily& family, const std::vector<ThermoStateTPX>& states,
                           std::vector<double> schedule) {
    if (schedule.empty()) schedule = family.default_schedule();
    MuellerSweep out;
    out.schedule = schedule;
    out.states = states;
    for (std::size_t m = 0; m < schedule.size(); ++m) {
        const ConstitutiveModel member = family.member(schedule[m]);
        std::vector<double> row;
        double vt = 0.0, vp = 0.0;
        for (const ThermoStateTPX& s : states) {
            const VolumeJet j = member.volume().evaluate(s.T, s.p, s.x.values());
            vt = std::max(vt, std::abs(j.v_T));
            vp = std::max(vp, std::abs(j.v_p));
            const double margin = mueller_margin(member, s).margin;
            row.push_back(margin);
            if (!(margin >= 0.0)) {
                out.flag = true;
                if (out.first_negative_index < 0) out.first_negative_index = static_cast<int>(m);
            }
        }
        out.margin.push_back(std::move(row));
        out.v_T_trend.push_back(vt);
        out.v_p_trend.push_back(vp);
    }
    if (out.v_p_trend.size() >= 2 && out.v_p_trend.front() > 0.0 && out.v_T_trend.front() > 0.0) {
        const double p_ratio = out.v_p_trend.back() / out.v_p_trend.front();
        const double t_ratio = out.v_T_trend.back() / out.v_T_trend.front();
        out.trend_flag = p_ratio < 1e-3 && t_ratio > 0.5;
    }
    return out;
}

LinearityVerdict linearity_diagnostic(const ModelFamily& family, double T, const std::vector<Vec>& sample_x,
                                      const std::vector<double>& p_probe, const PressureSweepOptions& sweep) {
    LinearityVerdict v;
    const ConstitutiveModel& lim = family.limit();
    const VolumeLaw& law = lim.volume();
    v.worst_T = T;
    for (const Vec& xr : sample_x) {
        const Composition c(xr);
        const Vec& x = c.values();
        for (double p : p_probe) {
            if (!law.in_domain(T, p, x)) continue;
            const VolumeJet j = law.evaluate(T, p, x);
            const double curv = tangential_hessian(j.hess_x, x).cwiseAbs().maxCoeff() / std::abs(j.v);
            if (curv > v.max_relative_curvature || v.worst_x.size() == 0) {
                v.max_relative_curvature = std::max(curv, v.max_relative_curvature);
                v.worst_x = x;
            }
        }
    }
    if (!sample_x.empty()) v.bar_v = limit_specific_volumes(family, T, Composition(sample_x.front()).values());
    v.linear = v.max_relative_curvature <= 1e-8;
    if (!v.linear) v.failure = pressure_sweep_definiteness(lim, T, Composition(v.worst_x), sweep);
    return v;
}

EpiLowerBound epi_lower_bound(const ModelFamily& family, double T, const Vec& rho, std::vector<double> schedule,
                              std::uint64_t seed, double tolerance) {
    if (schedule.empty()) schedule = family.default_schedule();
    EpiLowerBound out;
    const double f_inf = limit_free_energy(family, T, rho);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> G(0.0, 1.0);
    const double i0 = schedule.front();
    for (int fan = 0; fan < 8; ++fan) {
        Vec d(rho.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = G(rng);
        d *= 1e-2 * rho.norm() / d.norm();
        std::vector<double> fs;
        for (double idx : schedule) {
            const Vec r = rho + d * std::sqrt(i0 / idx);
            fs.push_back(free_energy(family.member(idx), T, r));
        }
        if (std::isfinite(f_inf)) {
            // A deficit that is first order in the step must shrink with it.
            const double excess = fs.back() - f_inf;
            const double first_deficit = std::max(0.0, f_inf - fs.front());
            const double allowed = tolerance * std::max(1.0, std::abs(f_inf)) +
                                   1.5 * first_deficit * std::sqrt(i0 / schedule.back());
            out.min_excess = std::min(out.min_excess, excess);
            if (-excess > allowed) out.pass = false;
        } else {
            for (std::size_t k = fs.size() >= 3 ? fs.size() - 3 : 0; k + 1 < fs.size(); ++k)
                if (!(fs[k + 1] > fs[k])) out.pass = false;
        }
    }
    return out;
}

}  // namespace helmix
