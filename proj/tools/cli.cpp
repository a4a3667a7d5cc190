#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "helmix/eos.hpp"
#include "helmix/format.hpp"
#include "helmix/limits.hpp"
#include "helmix/mixing.hpp"
#include "helmix/model_io.hpp"
#include "helmix/potentials.hpp"
#include "helmix/regimes.hpp"
#include "helmix/stability.hpp"

namespace helmix::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
    std::string model;
    std::string out = ".";
    std::string format = "json";
    std::uint64_t seed = 0;
    bool dump_config = false;
    std::vector<std::string> overrides;
};

struct Artifact {
    std::string name;  // file name without directory
    std::string body;
    bool csv = false;
};

struct Outcome {
    std::vector<Artifact> files;
    int code = ok;
};

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

std::string csv_header_block(const std::string& command, const Config& cfg, std::uint64_t seed) {
    std::ostringstream s;
    s << "# helmix " << HELMIX_VERSION << '\n'
      << "# command: " << command << '\n'
      << "# config_hash: " << hex64(cfg.hash()) << '\n'
      << "# seed: " << seed << '\n';
    return s.str();
}

json json_header(const std::string& command, const Config& cfg, std::uint64_t seed) {
    json h;
    h["version"] = HELMIX_VERSION;
    h["command"] = command;
    h["config_hash"] = hex64(cfg.hash());
    h["seed"] = seed;
    return h;
}

void write_atomic(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write '" + tmp.string() + "'");
        f << text;
        f.flush();
        if (!f) throw ConfigError("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string num(double v) { return format_double(v); }

std::string join_csv(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
    return line + '\n';
}

std::string csv_quote(const std::string& s) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json mat_json(const Mat& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
    return a;
}

// ---------------------------------------------------------------------------

Outcome cmd_eval(const Config& cfg, const Options& o) {
    const ConstitutiveModel model = model_from_config(cfg);
    const std::size_t N = model.species();
    const auto states = states_from_config(cfg, N);
    std::vector<PotentialBundle> rows;
    rows.reserve(states.size());
    for (const auto& s : states) rows.push_back(evaluate_bundle(model, s));

    Outcome out;
    if (o.format == "csv") {
        std::vector<std::string> head = {"T_K", "p_Pa"};
        for (std::size_t i = 0; i < N; ++i) head.push_back("x" + std::to_string(i + 1) + "_1");
        for (std::size_t i = 0; i < N; ++i) head.push_back("rho" + std::to_string(i + 1) + "_kg_m3");
        head.push_back("f_Pa");
        for (std::size_t i = 0; i < N; ++i) head.push_back("mu" + std::to_string(i + 1) + "_J_kg");
        for (const char* c : {"s_J_kgK", "u_J_kg", "h_J_kg", "g_J_kg", "c_p_J_kgK", "c_v_J_kgK", "d2f_dT2_Pa_K2",
                              "v_m3_mol"})
            head.push_back(c);
        std::string body = join_csv(head);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& b = rows[r];
            std::vector<std::string> cells = {num(b.T), num(b.p)};
            for (std::size_t i = 0; i < N; ++i) cells.push_back(num(states[r].x[i]));
            for (Eigen::Index i = 0; i < b.rho.size(); ++i) cells.push_back(num(b.rho[i]));
            cells.push_back(num(b.f));
            for (Eigen::Index i = 0; i < b.mu.size(); ++i) cells.push_back(num(b.mu[i]));
            for (double v : {b.s, b.u, b.h, b.g, b.c_p, b.c_v, b.d2f_dT2, b.v}) cells.push_back(num(v));
            body += join_csv(cells);
        }
        out.files.push_back({"eval.csv", body, true});
    } else {
        json arr = json::array();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& b = rows[r];
            json j;
            j["T_K"] = b.T;
            j["p_Pa"] = b.p;
            j["x"] = vec_json(states[r].x.values());
            j["rho_kg_m3"] = vec_json(b.rho);
            j["f_Pa"] = b.f;
            j["mu_J_kg"] = vec_json(b.mu);
            j["hessian_Pa_m6_kg2"] = mat_json(b.hessian);
            j["s_J_kgK"] = b.s;
            j["u_J_kg"] = b.u;
            j["h_J_kg"] = b.h;
            j["g_J_kg"] = b.g;
            j["c_p_J_kgK"] = b.c_p;
            j["c_v_J_kgK"] = b.c_v;
            j["d2f_dT2_Pa_K2"] = b.d2f_dT2;
            j["v_m3_mol"] = b.v;
            arr.push_back(j);
        }
        json body;
        body["model"] = model.label();
        body["states"] = arr;
        out.files.push_back({"eval.json", body.dump(2), false});
    }
    return out;
}

Outcome cmd_consistency(const Config& cfg, const Options& o) {
    const ConstitutiveModel model = model_from_config(cfg);
    const SampleRegion region = region_from_config(cfg);
    const std::size_t worst = cfg.get_size("consistency", "worst", 20);
    const StabilityReport rep = stability_report(model, region);
    Outcome out;
    if (o.format == "csv")
        out.files.push_back({"consistency.csv", to_csv(rep, worst), true});
    else
        out.files.push_back({"consistency.json", to_json(rep), false});
    if (rep.verdict == "unstable") out.code = assumption_violation;
    return out;
}

Outcome cmd_limit_sweep(const Config& cfg, const Options& o) {
    const ModelFamily family = family_from_config(cfg);
    const auto probes = probes_from_config(cfg, family);
    const Vec sched = cfg.get_vector("family", "schedule", Vec());
    std::vector<double> schedule(sched.data(), sched.data() + sched.size());
    const LimitReport rep = family_sweep(family, probes, schedule);

    Outcome out;
    const std::string trend = to_csv(rep);
    if (o.format == "csv") {
        out.files.push_back({"limit-sweep.csv", trend, true});
        return out;
    }
    json body = json::parse(to_json(rep));
    const std::size_t samples = cfg.get_size("probes", "subgradient_samples", 200);
    const double p = cfg.get_double("probes", "p", family.reference().p0);
    json sub = json::array();
    for (std::size_t i = 0; i < rep.probes.size(); ++i) {
        const ProbeRecord& r = rep.probes[i];
        if (!r.on_constraint) continue;
        json j;
        j["probe"] = i;
        try {
            const SubgradientReport s = check_subgradient(family, r.probe.T, r.probe.rho, p, samples, o.seed + i);
            j["samples"] = s.samples;
            j["violations"] = s.violations;
            j["worst_relative"] = s.worst_relative;
        } catch (const Error& e) {
            j["error"] = e.what();
        }
        sub.push_back(j);
    }
    body["subgradient"] = sub;
    out.files.push_back({"limit-sweep.json", body.dump(2), false});
    out.files.push_back({"limit-sweep_trend.csv", trend, true});
    return out;
}

Outcome cmd_excess_volume(const Config& cfg, const Options& o) {
    const MixingModel m = mixing_from_config(cfg);
    const Vec pressures = cfg.get_vector("mixing", "p", Vec::Constant(1, m.pR));
    const std::size_t points = cfg.get_size("mixing", "points", 101);
    Outcome out;
    if (o.format == "csv") {
        std::string body = join_csv({"p_Pa", "x_1", "gamma_1", "v_E_m3_mol"});
        for (Eigen::Index k = 0; k < pressures.size(); ++k)
            for (const auto& r : excess_volume_profile(m, pressures[k], points))
                body += join_csv({num(pressures[k]), num(r.x), num(r.gamma), num(r.v_E)});
        out.files.push_back({"excess-volume.csv", body, true});
    } else {
        json body;
        body["delta_v_m3_mol"] = m.delta_v();
        json curves = json::array();
        for (Eigen::Index k = 0; k < pressures.size(); ++k) {
            json c;
            c["p_Pa"] = pressures[k];
            c["K_1"] = equilibrium_constant(m, pressures[k]);
            json rows = json::array();
            for (const auto& r : excess_volume_profile(m, pressures[k], points))
                rows.push_back({{"x_1", r.x}, {"gamma_1", r.gamma}, {"v_E_m3_mol", r.v_E}});
            c["rows"] = rows;
            curves.push_back(c);
        }
        body["curves"] = curves;
        out.files.push_back({"excess-volume.json", body.dump(2), false});
    }
    return out;
}

Outcome cmd_regime(const Config& cfg, const Options& o) {
    const ReferenceScales s = scales_from_config(cfg);
    const double eps = cfg.get_double("regime", "epsilon", 1e-4);
    const Vec M = cfg.get_vector("regime", "M", Vec::Constant(1, s.M_S));
    const Vec vR = cfg.get_vector("regime", "vR", Vec::Constant(1, s.v_S));
    const Vec x = cfg.get_vector("regime", "x", Vec::Constant(M.size(), 1.0 / static_cast<double>(M.size())));
    const int solvent = static_cast<int>(cfg.get_double("regime", "solvent", -1));
    const double T = cfg.get_double("regime", "T", s.T_R);
    const double T_lo = cfg.get_double("regime", "sweep_T_min", 0.8 * s.T_R);
    const double T_hi = cfg.get_double("regime", "sweep_T_max", 1.2 * s.T_R);
    const std::size_t n_sweep = cfg.get_size("regime", "sweep_points", 41);
    if (n_sweep < 2) throw ConfigError("regime.sweep_points must be at least 2");

    std::vector<std::pair<double, InequalityResult>> sweep;
    for (std::size_t i = 0; i < n_sweep; ++i) {
        const double Ti = T_lo + (T_hi - T_lo) * static_cast<double>(i) / static_cast<double>(n_sweep - 1);
        sweep.emplace_back(Ti, leading_order_inequality(s, eps, Ti, x, M, vR, solvent));
    }
    Outcome out;
    if (o.format == "csv") {
        std::string body = join_csv({"T_K", "lhs_1", "rhs_1", "margin_1"});
        for (const auto& [Ti, r] : sweep) body += join_csv({num(Ti), num(r.lhs), num(r.rhs), num(r.margin)});
        out.files.push_back({"regime.csv", body, true});
        return out;
    }
    const CharacteristicNumbers c = characteristic_numbers(s);
    const InequalityResult ineq = leading_order_inequality(s, eps, T, x, M, vR, solvent);
    const BoussinesqReport br = boussinesq_report(s, eps);
    json body;
    body["characteristic_numbers"] = {{"Ma2", c.Ma2}, {"Re", c.Re}, {"Fr2", c.Fr2}, {"Fo", c.Fo}};
    body["scaling"] = {{"epsilon", eps}, {"beta0", br.scaling.beta0}, {"alpha0", br.scaling.alpha0}};
    body["inequality"] = {{"T_K", T}, {"lhs", ineq.lhs}, {"rhs", ineq.rhs}, {"margin", ineq.margin}};
    body["boussinesq"] = {{"buoyancy", br.buoyancy},
                          {"viscous", br.viscous},
                          {"heat", br.heat},
                          {"Fr2_over_Ma", br.fr2_over_ma},
                          {"pressure_p2", "Lagrange multiplier of the divergence constraint"},
                          {"volume_sqrt_eps_theta", br.volume_sqrt_eps},
                          {"volume_eps_theta2", br.volume_eps_theta2},
                          {"volume_eps_pi", br.volume_eps_pi}};
    if (cfg.has("regime", "x_rate")) {
        const Vec rate = cfg.get_vector("regime", "x_rate", Vec());
        const DivergenceResult d = divergence_leading_order(x, rate, M, vR, eps, solvent);
        body["divergence"] = {{"div_v0", d.div}, {"formula_value", d.formula_value}, {"dilute", d.dilute}};
    }
    json rows = json::array();
    for (const auto& [Ti, r] : sweep) rows.push_back({{"T_K", Ti}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"margin", r.margin}});
    body["sweep_T"] = rows;
    out.files.push_back({"regime.json", body.dump(2), false});
    return out;
}

Outcome cmd_validate(const Config& cfg, const Options& o) {
    const ConstitutiveModel model = model_from_config(cfg);
    const SampleRegion region = region_from_config(cfg);
    const auto diags = validate_model(model, region);
    Outcome out;
    if (o.format == "csv") {
        std::string body = join_csv({"severity", "code", "T_K", "p_Pa", "x_1", "message"});
        for (const auto& d : diags)
            body += join_csv({to_string(d.severity), d.code, num(d.T), num(d.p), csv_quote(format_vector(d.x)),
                              csv_quote(d.message)});
        out.files.push_back({"validate.csv", body, true});
    } else {
        json body;
        body["model"] = model.label();
        body["violation"] = has_violation(diags);
        json arr = json::array();
        for (const auto& d : diags)
            arr.push_back({{"severity", to_string(d.severity)},
                           {"code", d.code},
                           {"T_K", d.T},
                           {"p_Pa", d.p},
                           {"x", vec_json(d.x)},
                           {"message", d.message}});
        body["diagnostics"] = arr;
        out.files.push_back({"validate.json", body.dump(2), false});
    }
    if (has_violation(diags)) out.code = assumption_violation;
    return out;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::config: return config_error;
        case ErrorKind::assumption: return assumption_violation;
        default: return domain_error;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"helmix: free energies, consistency audits and incompressible limits"};
    app.set_version_flag("--version", std::string(HELMIX_VERSION));
    app.require_subcommand(1);
    Options o;

    using Handler = Outcome (*)(const Config&, const Options&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
        {"eval", "potential bundle at the configured states", cmd_eval},
        {"consistency", "stability report over the sample region", cmd_consistency},
        {"limit-sweep", "incompressible-limit sweep of a model family", cmd_limit_sweep},
        {"excess-volume", "excess volume of the clustering mixture model", cmd_excess_volume},
        {"regime", "low-Mach scaling report", cmd_regime},
        {"validate", "model diagnostics over the sample region", cmd_validate},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--model", o.model, "configuration file");
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        sub->add_option("--seed", o.seed, "seed for sampling oracles")->capture_default_str();
        sub->add_flag("--dump-config", o.dump_config, "print the resolved configuration");
        sub->add_option("--set", o.overrides, "override section.key=value (repeatable)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : config_error;
    }

    std::size_t which = 0;
    while (which < subs.size() && !subs[which]->parsed()) ++which;
    const std::string command = std::get<0>(commands[which]);

    try {
        Config cfg = o.model.empty() ? Config() : Config::from_file(o.model);
        for (const auto& s : o.overrides) cfg.apply_override(s);
        const Outcome res = std::get<2>(commands[which])(cfg, o);
        const fs::path dir(o.out);
        for (const Artifact& a : res.files) {
            std::string text;
            if (a.csv) {
                text = csv_header_block(command, cfg, o.seed) + a.body;
            } else {
                json root;
                root["header"] = json_header(command, cfg, o.seed);
                root["body"] = json::parse(a.body);
                text = root.dump(2) + '\n';
            }
            write_atomic(dir / a.name, text);
            out << "wrote " << (dir / a.name).string() << '\n';
        }
        if (o.dump_config) out << cfg.dump();
        if (res.code == assumption_violation) err << "helmix: " << command << ": assumption violated, see output\n";
        return res.code;
    } catch (const Error& e) {
        err << "helmix: " << command << ": " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const fs::filesystem_error& e) {
        err << "helmix: " << e.what() << '\n';
        return config_error;
    }
}

}  // namespace helmix::cli
