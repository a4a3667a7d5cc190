#include "helmix/tabulated.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "helmix/format.hpp"

namespace helmix {

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n) throw ModelInvalidError("spline: need at least two knots with matching values");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs_[i] > xs_[i - 1])) throw ModelInvalidError("spline: knots must be strictly increasing");
    m_.assign(n, 0.0);
    if (n == 2) return;
    // Tridiagonal system for interior second derivatives (natural end conditions).
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = xs_[i] - xs_[i - 1], h1 = xs_[i + 1] - xs_[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double lower = xs_[i] - xs_[i - 1];
        const double f = lower / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
        if (i == 1) break;
    }
}

CubicSpline::Value CubicSpline::operator()(double x) const {
    std::size_t k = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    k = std::clamp<std::size_t>(k, 1, xs_.size() - 1) - 1;
    const double h = xs_[k + 1] - xs_[k];
    const double A = (xs_[k + 1] - x) / h, B = 1.0 - A;
    Value v;
    v.y = A * ys_[k] + B * ys_[k + 1] + ((A * A * A - A) * m_[k] + (B * B * B - B) * m_[k + 1]) * h * h / 6.0;
    v.dy = (ys_[k + 1] - ys_[k]) / h - (3.0 * A * A - 1.0) / 6.0 * h * m_[k] + (3.0 * B * B - 1.0) / 6.0 * h * m_[k + 1];
    v.d2y = A * m_[k] + B * m_[k + 1];
    return v;
}

CompositionNodes::CompositionNodes(std::size_t species, std::vector<Vec> nodes)
    : species_(species), nodes_(std::move(nodes)) {
    if (species == 0) throw ModelInvalidError("composition nodes: no species");
    for (const Vec& n : nodes_)
        if (static_cast<std::size_t>(n.size()) != species)
            throw ModelInvalidError("composition nodes: node length differs from species count");
    if (species == 1) {
        if (nodes_.size() != 1) throw ModelInvalidError("composition nodes: a single species has one node");
        return;
    }
    if (species == 2) {
        if (nodes_.size() < 2) throw ModelInvalidError("composition nodes: binary tables need at least two x_1 nodes");
        std::sort(nodes_.begin(), nodes_.end(), [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i][0] > nodes_[i - 1][0])) throw ModelInvalidError("composition nodes: repeated x_1 node");
        return;
    }
    if (nodes_.size() != species)
        throw ModelInvalidError("composition nodes: tables with three or more species must list the pure vertices");
    std::vector<Vec> ordered(species);
    for (const Vec& n : nodes_) {
        Eigen::Index idx;
        if (std::abs(n.maxCoeff(&idx) - 1.0) > 1e-12 || std::abs(n.sum() - 1.0) > 1e-12)
            throw ModelInvalidError("composition nodes: node is not a pure-species vertex");
        ordered[static_cast<std::size_t>(idx)] = n;
    }
    for (const Vec& n : ordered)
        if (n.size() == 0) throw ModelInvalidError("composition nodes: missing vertex");
    nodes_ = std::move(ordered);
}

std::size_t CompositionNodes::locate(const Vec& x) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if ((nodes_[i] - x).cwiseAbs().maxCoeff() <= 1e-12) return i;
    return nodes_.size();
}

CompositionNodes::Weights CompositionNodes::weights(const Vec& x) const {
    Weights out;
    const auto n = static_cast<Eigen::Index>(species_);
    if (species_ == 1) {
        out.w.push_back({0, 1.0});
        out.dw.push_back({0, Vec::Zero(1)});
        return out;
    }
    if (species_ == 2) {
        const double x1 = x[0];
        if (x1 < nodes_.front()[0] - 1e-14 || x1 > nodes_.back()[0] + 1e-14)
            throw DomainError("composition x_1 = " + format_double(x1) + " lies outside the tabulated range");
        std::size_t k = 0;
        while (k + 2 < nodes_.size() && x1 > nodes_[k + 1][0]) ++k;
        const double d = nodes_[k + 1][0] - nodes_[k][0];
        const double t = (x1 - nodes_[k][0]) / d;
        Vec g = Vec::Zero(n);
        g[0] = 1.0 / d;
        out.w = {{k, 1.0 - t}, {k + 1, t}};
        out.dw = {{k, -g}, {k + 1, g}};
        return out;
    }
    for (std::size_t i = 0; i < species_; ++i) {
        out.w.push_back({i, x[static_cast<Eigen::Index>(i)]});
        out.dw.push_back({i, Vec::Unit(n, static_cast<Eigen::Index>(i))});
    }
    return out;
}

TabulatedVolumeLaw::TabulatedVolumeLaw(std::size_t species, std::vector<double> T_grid, std::vector<double> p_grid,
                                       std::vector<Vec> x_nodes,
                                       std::vector<std::vector<std::vector<double>>> values)
    : VolumeLaw(species), T_(std::move(T_grid)), p_(std::move(p_grid)) {
    if (T_.size() < 2 || p_.size() < 2) throw ModelInvalidError("tabulated volume: need at least two T and two p values");
    nodes_ = CompositionNodes(species, x_nodes);
    if (values.size() != x_nodes.size()) throw ModelInvalidError("tabulated volume: one value block per node required");
    values_.resize(nodes_.size());
    for (std::size_t i = 0; i < x_nodes.size(); ++i) {
        const std::size_t k = nodes_.locate(x_nodes[i]);
        if (k == nodes_.size()) throw ModelInvalidError("tabulated volume: node lookup failed");
        values_[k] = std::move(values[i]);
    }
    p_splines_.resize(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (values_[k].size() != T_.size()) throw ModelInvalidError("tabulated volume: T block size mismatch");
        for (std::size_t iT = 0; iT < T_.size(); ++iT) {
            if (values_[k][iT].size() != p_.size()) throw ModelInvalidError("tabulated volume: p block size mismatch");
            p_splines_[k].emplace_back(p_, values_[k][iT]);
        }
    }
}

TabulatedVolumeLaw::NodeEval TabulatedVolumeLaw::eval_node(std::size_t node, double T, double p) const {
    std::vector<double> val(T_.size()), slope(T_.size());
    for (std::size_t iT = 0; iT < T_.size(); ++iT) {
        const auto s = p_splines_[node][iT](p);
        val[iT] = s.y;
        slope[iT] = s.dy;
    }
    const auto vt = CubicSpline(T_, val)(T);
    const auto sp = CubicSpline(T_, slope)(T);
    return NodeEval{vt.y, sp.y, vt.dy, vt.d2y};
}

VolumeJet TabulatedVolumeLaw::evaluate(double T, double p, const Vec& x) const {
    require_domain(T, p, x);
    const auto wts = nodes_.weights(x);
    VolumeJet j;
    j.grad_x = Vec::Zero(x.size());
    j.hess_x = Mat::Zero(x.size(), x.size());
    for (std::size_t i = 0; i < wts.w.size(); ++i) {
        const auto [k, w] = wts.w[i];
        const NodeEval e = eval_node(k, T, p);
        j.v += w * e.v;
        j.v_p += w * e.v_p;
        j.v_T += w * e.v_T;
        j.v_TT += w * e.v_TT;
        j.grad_x += wts.dw[i].second * e.v;
    }
    return j;
}

TabulatedThermal::TabulatedThermal(MolarMasses M, std::vector<double> T_grid, std::vector<Vec> x_nodes,
                                   std::vector<std::vector<double>> cp, std::vector<double> s00,
                                   std::vector<double> h00)
    : ThermalData(M.size()), M_(std::move(M)), T_(std::move(T_grid)) {
    if (T_.size() < 2) throw ModelInvalidError("tabulated thermal: need at least two temperatures");
    nodes_ = CompositionNodes(species(), x_nodes);
    if (cp.size() != x_nodes.size() || s00.size() != x_nodes.size() || h00.size() != x_nodes.size())
        throw ModelInvalidError("tabulated thermal: one entry per composition node required");
    cp_.resize(nodes_.size());
    s_.resize(nodes_.size());
    h_.resize(nodes_.size());
    for (std::size_t i = 0; i < x_nodes.size(); ++i) {
        const std::size_t k = nodes_.locate(x_nodes[i]);
        if (k == nodes_.size()) throw ModelInvalidError("tabulated thermal: node lookup failed");
        if (cp[i].size() != T_.size()) throw ModelInvalidError("tabulated thermal: cp block size mismatch");
        cp_[k] = cp[i];
        s_[k] = s00[i];
        h_[k] = h00[i];
    }
    for (const auto& c : cp_) cp_splines_.emplace_back(T_, c);
}

ScalarJet TabulatedThermal::molar_from_nodes(const Vec& x, const std::vector<double>& node_values) const {
    const auto wts = nodes_.weights(x);
    double c = 0.0;
    Vec dc = Vec::Zero(x.size());
    for (std::size_t i = 0; i < wts.w.size(); ++i) {
        c += wts.w[i].second * node_values[wts.w[i].first];
        dc += wts.dw[i].second * node_values[wts.w[i].first];
    }
    const Vec& m = M_.values();
    const double Mx = m.dot(x);
    ScalarJet j;
    j.value = Mx * c;
    j.grad = m * c + Mx * dc;
    j.hess = m * dc.transpose() + dc * m.transpose();
    return j;
}

ScalarJet TabulatedThermal::molar_heat_capacity(double T, const Vec& x) const {
    if (!(T >= T_.front() && T <= T_.back()))
        throw DomainError("temperature " + format_double(T) + " K lies outside the tabulated heat-capacity range");
    std::vector<double> at(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) at[k] = cp_splines_[k](T).y;
    return molar_from_nodes(x, at);
}

ScalarJet TabulatedThermal::molar_entropy(const Vec& x) const { return molar_from_nodes(x, s_); }
ScalarJet TabulatedThermal::molar_enthalpy(const Vec& x) const { return molar_from_nodes(x, h_); }

// ---------------------------------------------------------------------------
// CSV I/O

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open table '" + path + "'");
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (t.header.empty()) {
            for (auto& c : cells) {
                c.erase(0, c.find_first_not_of(" \t"));
                c.erase(c.find_last_not_of(" \t") + 1);
            }
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                              " columns");
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (!parse_double(cells[i], row[i]))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": '" + cells[i] + "' is not a number");
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw ConfigError("table '" + path + "' has no header row");
    return t;
}

namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::size_t index_of(const std::vector<double>& grid, double v) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), v) - grid.begin());
}

std::size_t node_index(std::vector<Vec>& nodes, const Vec& x) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == x) return i;
    nodes.push_back(x);
    return nodes.size() - 1;
}

}  // namespace

std::shared_ptr<TabulatedVolumeLaw> load_volume_table(const std::string& path, std::size_t species) {
    const CsvTable t = read_csv_table(path);
    const std::size_t cols = species + 3;
    if (t.header.size() != cols)
        throw ConfigError(path + ": expected columns T, p, x_1..x_" + std::to_string(species) + ", value");
    std::vector<double> Ts, ps;
    for (const auto& r : t.rows) {
        Ts.push_back(r[0]);
        ps.push_back(r[1]);
    }
    Ts = unique_sorted(Ts);
    ps = unique_sorted(ps);
    std::vector<Vec> nodes;
    std::vector<std::vector<std::vector<double>>> values;
    std::vector<std::vector<std::vector<bool>>> seen;
    for (const auto& r : t.rows) {
        Vec x(static_cast<Eigen::Index>(species));
        for (std::size_t i = 0; i < species; ++i) x[static_cast<Eigen::Index>(i)] = r[2 + i];
        const std::size_t k = node_index(nodes, x);
        if (k == values.size()) {
            values.emplace_back(Ts.size(), std::vector<double>(ps.size(), 0.0));
            seen.emplace_back(Ts.size(), std::vector<bool>(ps.size(), false));
        }
        const std::size_t iT = index_of(Ts, r[0]), ip = index_of(ps, r[1]);
        if (seen[k][iT][ip]) throw ConfigError(path + ": duplicate grid point");
        seen[k][iT][ip] = true;
        values[k][iT][ip] = r[species + 2];
    }
    for (const auto& a : seen)
        for (const auto& b : a)
            for (bool c : b)
                if (!c) throw ConfigError(path + ": the table is not a complete tensor grid");
    return std::make_shared<TabulatedVolumeLaw>(species, Ts, ps, nodes, values);
}

void write_volume_table(const std::string& path, const TabulatedVolumeLaw& law) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write table '" + path + "'");
    out << "T,p";
    for (std::size_t i = 0; i < law.species(); ++i) out << ",x_" << (i + 1);
    out << ",value\n";
    const auto& nodes = law.nodes().nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k)
        for (std::size_t iT = 0; iT < law.T_grid().size(); ++iT)
            for (std::size_t ip = 0; ip < law.p_grid().size(); ++ip) {
                out << format_double(law.T_grid()[iT]) << ',' << format_double(law.p_grid()[ip]);
                for (Eigen::Index i = 0; i < nodes[k].size(); ++i) out << ',' << format_double(nodes[k][i]);
                out << ',' << format_double(law.values()[k][iT][ip]) << '\n';
            }
}

std::shared_ptr<TabulatedThermal> load_thermal_tables(const std::string& cp_path, const std::string& ref_path,
                                                      const MolarMasses& M) {
    const std::size_t N = M.size();
    const CsvTable cp = read_csv_table(cp_path);
    if (cp.header.size() != N + 2) throw ConfigError(cp_path + ": expected columns T, x_1..x_N, value");
    std::vector<double> Ts;
    for (const auto& r : cp.rows) Ts.push_back(r[0]);
    Ts = unique_sorted(Ts);
    std::vector<Vec> nodes;
    std::vector<std::vector<double>> cps;
    for (const auto& r : cp.rows) {
        Vec x(static_cast<Eigen::Index>(N));
        for (std::size_t i = 0; i < N; ++i) x[static_cast<Eigen::Index>(i)] = r[1 + i];
        const std::size_t k = node_index(nodes, x);
        if (k == cps.size()) cps.emplace_back(Ts.size(), std::nan(""));
        cps[k][index_of(Ts, r[0])] = r[N + 1];
    }
    for (const auto& c : cps)
        for (double v : c)
            if (std::isnan(v)) throw ConfigError(cp_path + ": incomplete heat-capacity grid");

    const CsvTable ref = read_csv_table(ref_path);
    if (ref.header.size() != N + 2) throw ConfigError(ref_path + ": expected columns x_1..x_N, s00, h00");
    std::vector<double> s(nodes.size(), std::nan("")), h(nodes.size(), std::nan(""));
    for (const auto& r : ref.rows) {
        Vec x(static_cast<Eigen::Index>(N));
        for (std::size_t i = 0; i < N; ++i) x[static_cast<Eigen::Index>(i)] = r[i];
        std::size_t k = nodes.size();
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i] == x) k = i;
        if (k == nodes.size()) throw ConfigError(ref_path + ": composition node absent from the heat-capacity table");
        s[k] = r[N];
        h[k] = r[N + 1];
    }
    for (std::size_t k = 0; k < nodes.size(); ++k)
        if (std::isnan(s[k]) || std::isnan(h[k])) throw ConfigError(ref_path + ": missing reference node");
    return std::make_shared<TabulatedThermal>(M, Ts, nodes, cps, s, h);
}

}  // namespace helmix
