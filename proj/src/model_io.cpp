#include "helmix/model_io.hpp"

#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "helmix/format.hpp"
#include "helmix/tabulated.hpp"

namespace helmix {

namespace {

constexpr double water_molar_mass = 0.0180153;
constexpr double water_density = 997.05;

Config from_ptree(const boost::property_tree::ptree& tree) {
    Config c;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config: key '" + section + "' must live inside a [section]");
        for (const auto& [key, value] : body) c.set(section, key, value.get_value<std::string>());
    }
    return c;
}

std::string qualified(const std::string& section, const std::string& key) { return section + "." + key; }

double to_double(const std::string& section, const std::string& key, const std::string& text) {
    double v = 0.0;
    if (!parse_double(text, v)) throw ConfigError("config: " + qualified(section, key) + " is not a number: '" + text + "'");
    return v;
}

Vec parse_list(const std::string& section, const std::string& key, const std::string& text) {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(","));
    Vec v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_double(section, key, parts[i]);
    return v;
}

Vec filled(std::size_t n, double value) { return Vec::Constant(static_cast<Eigen::Index>(n), value); }

Vec require_length(const Vec& v, std::size_t n, const std::string& what) {
    if (static_cast<std::size_t>(v.size()) != n)
        throw ConfigError("config: " + what + " needs " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    return v;
}

Mat square_from(const Vec& flat, std::size_t n, const std::string& what) {
    if (flat.size() == 0) return Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (static_cast<std::size_t>(flat.size()) != n * n)
        throw ConfigError("config: " + what + " needs " + std::to_string(n * n) + " entries (row-major)");
    Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = flat[i * m.cols() + j];
    if (!m.isApprox(m.transpose(), 1e-12) && m.norm() > 0.0) throw ConfigError("config: " + what + " must be symmetric");
    return m;
}

MolarMasses masses(const Config& c) {
    const Vec M = c.get_vector("model", "M", Vec::Constant(1, water_molar_mass));
    if (M.size() == 0 || !(M.minCoeff() > 0.0)) throw ConfigError("config: model.M must hold positive molar masses");
    return MolarMasses(M);
}

ReferenceState reference(const Config& c) {
    ReferenceState r;
    r.T0 = c.get_double("model", "T0", r.T0);
    r.p0 = c.get_double("model", "p0", r.p0);
    if (!(r.T0 > 0.0)) throw ConfigError("config: model.T0 must be positive");
    return r;
}

ThermalDataPtr thermal(const Config& c, const MolarMasses& M) {
    const std::size_t N = M.size();
    const std::string kind = c.get_string("model", "thermal", "species");
    if (kind == "tabulated") {
        const std::string cp = c.get_string("model", "cp_table", "");
        const std::string ref = c.get_string("model", "ref_table", "");
        if (cp.empty() || ref.empty()) throw ConfigError("config: tabulated thermal data need model.cp_table and model.ref_table");
        return load_thermal_tables(cp, ref, M);
    }
    if (kind != "species") throw ConfigError("config: unknown model.thermal '" + kind + "'");
    const Vec cp = require_length(c.get_vector("model", "cp", filled(N, 4180.0)), N, "model.cp");
    const Vec s = require_length(c.get_vector("model", "s", filled(N, 0.0)), N, "model.s");
    const Vec h = require_length(c.get_vector("model", "h", filled(N, 0.0)), N, "model.h");
    const bool ideal = c.get_bool("model", "ideal_mixing", N > 1);
    return SpeciesThermal::from_specific(M, cp, s, h, ideal);
}

Vec default_v00(const MolarMasses& M) { return M.values() / water_density; }

}  // namespace

// ---------------------------------------------------------------------------

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    // Strip '#' comments (whole-line or trailing), which the INI reader does not know about.
    std::istringstream in(text);
    std::ostringstream cleaned;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        cleaned << line << '\n';
    }
    boost::property_tree::ptree tree;
    std::istringstream src(cleaned.str());
    try {
        boost::property_tree::ini_parser::read_ini(src, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return from_ptree(tree);
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError("config: override must look like section.key=value, got '" + assignment + "'");
    set(boost::algorithm::trim_copy(assignment.substr(0, dot)),
        boost::algorithm::trim_copy(assignment.substr(dot + 1, eq - dot - 1)),
        boost::algorithm::trim_copy(assignment.substr(eq + 1)));
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    if (section.empty() || key.empty()) throw ConfigError("config: empty section or key");
    values_[section][key] = boost::algorithm::trim_copy(value);
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const std::string* Config::find(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    if (s == values_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
    if (const auto* v = find(section, key)) return *v;
    values_[section][key] = fallback;
    return fallback;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    if (const auto* v = find(section, key)) return to_double(section, key, *v);
    values_[section][key] = format_double(fallback);
    return fallback;
}

std::size_t Config::get_size(const std::string& section, const std::string& key, std::size_t fallback) const {
    if (const auto* v = find(section, key)) {
        const double d = to_double(section, key, *v);
        if (!(d >= 0.0) || d != std::floor(d) || d > 1e15)
            throw ConfigError("config: " + qualified(section, key) + " must be a nonnegative integer");
        return static_cast<std::size_t>(d);
    }
    values_[section][key] = std::to_string(fallback);
    return fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (const auto* v = find(section, key)) {
        const std::string t = boost::algorithm::to_lower_copy(*v);
        if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
        if (t == "false" || t == "0" || t == "no" || t == "off") return false;
        throw ConfigError("config: " + qualified(section, key) + " is not a boolean: '" + *v + "'");
    }
    values_[section][key] = fallback ? "true" : "false";
    return fallback;
}

Vec Config::get_vector(const std::string& section, const std::string& key, const Vec& fallback) const {
    if (const auto* v = find(section, key)) return v->empty() ? Vec() : parse_list(section, key, *v);
    values_[section][key] = format_vector(fallback);
    return fallback;
}

std::vector<Vec> Config::get_vectors(const std::string& section, const std::string& key,
                                     const std::vector<Vec>& fallback) const {
    if (const auto* v = find(section, key)) {
        std::vector<std::string> groups;
        boost::split(groups, *v, boost::is_any_of(";"));
        std::vector<Vec> out;
        for (const auto& g : groups)
            if (!boost::algorithm::trim_copy(g).empty()) out.push_back(parse_list(section, key, g));
        return out;
    }
    std::string text;
    for (std::size_t i = 0; i < fallback.size(); ++i) text += (i ? "; " : "") + format_vector(fallback[i]);
    values_[section][key] = text;
    return fallback;
}

std::string Config::dump() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, body] : values_) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [key, value] : body) out << key << " = " << value << '\n';
    }
    return out.str();
}

std::uint64_t Config::hash() const { return fnv1a64(dump()); }

std::string format_vector(const Vec& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------

ConstitutiveModel model_from_config(const Config& c) {
    const std::string type = c.get_string("model", "type", "volume_additive");
    const MolarMasses M = masses(c);
    const std::size_t N = M.size();
    const ReferenceState ref = reference(c);

    if (type == "ideal_gas") {
        const Vec z = require_length(c.get_vector("model", "z", filled(N, 2.5)), N, "model.z");
        const Vec h = require_length(c.get_vector("model", "h", filled(N, 0.0)), N, "model.h");
        const Vec s = require_length(c.get_vector("model", "s", filled(N, 0.0)), N, "model.s");
        return make_ideal_gas_mixture(M, z, h, s, ref);
    }
    const ThermalDataPtr th = thermal(c, M);
    if (type == "volume_additive") {
        const double K = c.get_double("model", "K", 2.18e9);
        const Vec v00 = require_length(c.get_vector("model", "v00", default_v00(M)), N, "model.v00");
        const double pivot = c.get_double("model", "pivot", ref.p0);
        const Mat Q = square_from(c.get_vector("model", "quadratic", Vec()), N, "model.quadratic");
        auto law = std::make_shared<VolumeAdditiveLaw>(K, pivot, v00, Q);
        return ConstitutiveModel(M, law, th, ref, Q.norm() > 0.0 ? "volume_quadratic" : "volume_additive");
    }
    if (type == "simple_law") {
        const Vec vR = require_length(c.get_vector("model", "vR", default_v00(M)), N, "model.vR");
        return make_simple_law(M, vR, c.get_double("model", "beta", 2.07e-4), c.get_double("model", "K", 2.18e9),
                               c.get_double("model", "TR", 293.0), c.get_double("model", "pR", 1e5), th, ref);
    }
    if (type == "section16") {
        Section16Shape shape;
        shape.a_lin = require_length(c.get_vector("model", "a_lin", filled(N, 1.0)), N, "model.a_lin");
        shape.a_quad = square_from(c.get_vector("model", "a_quad", Vec()), N, "model.a_quad");
        shape.t1 = c.get_double("model", "t1", 0.0);
        shape.t2 = c.get_double("model", "t2", 0.0);
        shape.T_ref = c.get_double("model", "T_ref", ref.T0);
        return make_section16(M, c.get_double("model", "K", 2.18e9), c.get_double("model", "n0", 55400.0), shape, th,
                              ref);
    }
    if (type == "tabulated") {
        const std::string path = c.get_string("model", "volume_table", "");
        if (path.empty()) throw ConfigError("config: model.volume_table is required for tabulated models");
        return ConstitutiveModel(M, load_volume_table(path, N), th, ref, "tabulated");
    }
    throw ConfigError("config: unknown model.type '" + type + "'");
}

SampleRegion region_from_config(const Config& c) {
    SampleRegion r;
    r.T_min = c.get_double("region", "T_min", r.T_min);
    r.T_max = c.get_double("region", "T_max", r.T_max);
    r.T_count = c.get_size("region", "T_count", r.T_count);
    r.p_min = c.get_double("region", "p_min", r.p_min);
    r.p_max = c.get_double("region", "p_max", r.p_max);
    r.p_count = c.get_size("region", "p_count", r.p_count);
    r.p_log = c.get_bool("region", "p_log", r.p_log);
    r.x_per_edge = c.get_size("region", "x_per_edge", r.x_per_edge);
    if (r.T_count == 0 || r.p_count == 0 || r.x_per_edge == 0) throw ConfigError("config: region grids must be nonempty");
    if (!(r.T_min > 0.0) || r.T_max < r.T_min || r.p_max < r.p_min) throw ConfigError("config: invalid region bounds");
    return r;
}

std::vector<ThermoStateTPX> states_from_config(const Config& c, std::size_t species) {
    const Vec T = c.get_vector("states", "T", Vec::Constant(1, 298.15));
    const Vec p = c.get_vector("states", "p", Vec::Constant(1, 1e5));
    const std::vector<Vec> xs = c.get_vectors("states", "x", {filled(species, 1.0 / static_cast<double>(species))});
    if (T.size() == 0 || p.size() == 0 || xs.empty()) throw ConfigError("config: states lists must be nonempty");
    std::vector<ThermoStateTPX> out;
    for (const Vec& x : xs) {
        const Composition comp(require_length(x, species, "states.x"));
        for (Eigen::Index i = 0; i < T.size(); ++i)
            for (Eigen::Index j = 0; j < p.size(); ++j) out.push_back({T[i], p[j], comp});
    }
    return out;
}

ModelFamily family_from_config(const Config& c) {
    const std::string kind = c.get_string("family", "kind", "volume_additive");
    const MolarMasses M = masses(c);
    const std::size_t N = M.size();
    const ReferenceState ref = reference(c);
    if (kind == "volume_additive") {
        const Vec v00 = require_length(c.get_vector("model", "v00", default_v00(M)), N, "model.v00");
        const Mat Q = square_from(c.get_vector("family", "quadratic", Vec()), N, "family.quadratic");
        return volume_additive_family(M, v00, thermal(c, M), ref, c.get_double("family", "pivot", ref.p0),
                                      c.get_double("family", "pR", 1e5), Q);
    }
    if (kind == "simple_law") {
        const Vec vR = require_length(c.get_vector("model", "vR", default_v00(M)), N, "model.vR");
        SimpleLawScaling sc;
        sc.epsilon_scaled = c.get_bool("family", "epsilon_scaled", false);
        sc.beta = c.get_double("family", "beta", sc.beta);
        sc.beta0 = c.get_double("family", "beta0", 6.0651);
        sc.alpha0 = c.get_double("family", "alpha0", 0.4587);
        return simple_law_family(M, vR, thermal(c, M), ref, c.get_double("family", "TR", 293.0),
                                 c.get_double("family", "pR", 1e5), sc);
    }
    if (kind == "band_warp") {
        const ConstitutiveModel base = model_from_config(c);
        return band_warp_family(base, c.get_double("family", "a", 0.5 * ref.p0), c.get_double("family", "b", 4.0 * ref.p0));
    }
    throw ConfigError("config: unknown family.kind '" + kind + "'");
}

std::vector<ProbeState> probes_from_config(const Config& c, const ModelFamily& family) {
    const std::size_t N = family.species();
    const double T = c.get_double("probes", "T", family.reference().T0);
    const std::vector<Vec> xs = c.get_vectors("probes", "x", {filled(N, 1.0 / static_cast<double>(N))});
    const Vec factors = c.get_vector("probes", "factors", (Vec(2) << 1.0, 1.01).finished());
    if (xs.empty() || factors.size() == 0) throw ConfigError("config: probes need compositions and factors");
    std::vector<ProbeState> out;
    for (const Vec& x : xs)
        for (Eigen::Index i = 0; i < factors.size(); ++i)
            out.push_back(constraint_probe(family, T, require_length(x, N, "probes.x"), factors[i]));
    return out;
}

MixingModel mixing_from_config(const Config& c) {
    MixingModel m;
    m.v_W = c.get_double("mixing", "v_W", 1.807e-5);
    m.v_E = c.get_double("mixing", "v_E", 5.868e-5);
    m.v_C = c.get_double("mixing", "v_C", 7.5e-5);
    m.dg = c.get_double("mixing", "dg", -2000.0);
    m.T = c.get_double("mixing", "T", m.T);
    m.pR = c.get_double("mixing", "pR", m.pR);
    m.kappa_A = c.get_double("mixing", "kappa_A", 1.0);
    m.kappa_S = c.get_double("mixing", "kappa_S", 1.0);
    m.validate();
    return m;
}

ReferenceScales scales_from_config(const Config& c) {
    ReferenceScales s;
    s.L0 = c.get_double("regime", "L0", s.L0);
    s.t0 = c.get_double("regime", "t0", s.t0);
    s.T_R = c.get_double("regime", "T_R", s.T_R);
    s.p_R = c.get_double("regime", "p_R", s.p_R);
    s.v_S = c.get_double("regime", "v_S", s.v_S);
    s.M_S = c.get_double("regime", "M_S", s.M_S);
    s.eta = c.get_double("regime", "eta", s.eta);
    s.kappa = c.get_double("regime", "kappa", s.kappa);
    s.c_p = c.get_double("regime", "c_p", s.c_p);
    s.b = c.get_double("regime", "b", s.b);
    s.beta = c.get_double("regime", "beta", s.beta);
    s.K = c.get_double("regime", "K", s.K);
    s.validate();
    return s;
}

}  // namespace helmix
