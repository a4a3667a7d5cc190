#pragma once

#include <string>
#include <vector>

#include "helmix/constitutive.hpp"

namespace helmix {

// Natural cubic spline through (xs, ys); xs strictly increasing, at least two knots.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> xs, std::vector<double> ys);

    struct Value {
        double y, dy, d2y;
    };
    Value operator()(double x) const;
    double front() const { return xs_.front(); }
    double back() const { return xs_.back(); }

private:
    std::vector<double> xs_, ys_, m_;  // m_: second derivatives at knots
};

// Piecewise-linear interpolation weights over composition nodes. Binary mixtures
// accept any increasing set of x_1 nodes; larger systems use the pure-species vertices.
class CompositionNodes {
public:
    CompositionNodes() = default;
    CompositionNodes(std::size_t species, std::vector<Vec> nodes);

    struct Weights {
        std::vector<std::pair<std::size_t, double>> w;  // node index, weight
        std::vector<std::pair<std::size_t, Vec>> dw;    // node index, gradient of weight wrt x
    };
    Weights weights(const Vec& x) const;
    std::size_t size() const { return nodes_.size(); }
    const std::vector<Vec>& nodes() const { return nodes_; }
    std::size_t locate(const Vec& x) const;  // node index matching x exactly, or size()

private:
    std::size_t species_ = 0;
    std::vector<Vec> nodes_;
};

// Molar volume on a tensor grid T x p x composition nodes; cubic in (T, p), linear in x.
// Queries outside the grid raise DomainError.
class TabulatedVolumeLaw final : public VolumeLaw {
public:
    // values[node][iT][ip]
    TabulatedVolumeLaw(std::size_t species, std::vector<double> T_grid, std::vector<double> p_grid,
                       std::vector<Vec> x_nodes, std::vector<std::vector<std::vector<double>>> values);

    std::string family() const override { return "tabulated"; }
    PressureBounds pressure_bounds(double, const Vec&) const override { return {p_.front(), p_.back()}; }
    std::pair<double, double> temperature_bounds() const override { return {T_.front(), T_.back()}; }
    VolumeJet evaluate(double T, double p, const Vec& x) const override;
    bool analytic_partials() const override { return false; }

    const std::vector<double>& T_grid() const { return T_; }
    const std::vector<double>& p_grid() const { return p_; }
    const CompositionNodes& nodes() const { return nodes_; }
    const std::vector<std::vector<std::vector<double>>>& values() const { return values_; }

private:
    struct NodeEval {
        double v, v_p, v_T, v_TT;
    };
    NodeEval eval_node(std::size_t node, double T, double p) const;

    std::vector<double> T_, p_;
    CompositionNodes nodes_;
    std::vector<std::vector<std::vector<double>>> values_;
    std::vector<std::vector<CubicSpline>> p_splines_;  // [node][iT]
};

// Specific heat c_p(T, x) at the reference pressure on a grid T x composition nodes,
// reference entropy/enthalpy on the composition nodes. All specific (per kg).
class TabulatedThermal final : public ThermalData {
public:
    TabulatedThermal(MolarMasses M, std::vector<double> T_grid, std::vector<Vec> x_nodes,
                     std::vector<std::vector<double>> cp, std::vector<double> s00, std::vector<double> h00);

    std::string family() const override { return "tabulated"; }
    ScalarJet molar_heat_capacity(double T, const Vec& x) const override;
    ScalarJet molar_entropy(const Vec& x) const override;
    ScalarJet molar_enthalpy(const Vec& x) const override;
    std::pair<double, double> temperature_range() const override { return {T_.front(), T_.back()}; }

    const std::vector<double>& T_grid() const { return T_; }
    const CompositionNodes& nodes() const { return nodes_; }
    const std::vector<std::vector<double>>& cp() const { return cp_; }
    const std::vector<double>& s00() const { return s_; }
    const std::vector<double>& h00() const { return h_; }

private:
    ScalarJet molar_from_nodes(const Vec& x, const std::vector<double>& node_values) const;

    MolarMasses M_;
    std::vector<double> T_;
    CompositionNodes nodes_;
    std::vector<std::vector<double>> cp_;  // [node][iT]
    std::vector<double> s_, h_;
    std::vector<CubicSpline> cp_splines_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv_table(const std::string& path);

// Columns: T, p, x_1..x_N, value
std::shared_ptr<TabulatedVolumeLaw> load_volume_table(const std::string& path, std::size_t species);
void write_volume_table(const std::string& path, const TabulatedVolumeLaw& law);

// cp file columns: T, x_1..x_N, value; reference file columns: x_1..x_N, s00, h00
std::shared_ptr<TabulatedThermal> load_thermal_tables(const std::string& cp_path, const std::string& ref_path,
                                                      const MolarMasses& M);

}  // namespace helmix
