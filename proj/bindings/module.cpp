#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "helmix/eos.hpp"
#include "helmix/limits.hpp"
#include "helmix/mixing.hpp"
#include "helmix/model_io.hpp"
#include "helmix/potentials.hpp"
#include "helmix/regimes.hpp"
#include "helmix/stability.hpp"

namespace py = pybind11;
using namespace helmix;

namespace {

Config config_from(const std::string& text, const std::vector<std::string>& overrides) {
    Config c = Config::from_string(text);
    for (const auto& o : overrides) c.apply_override(o);
    return c;
}

ThermoStateTPX state(double T, double p, const Vec& x) { return ThermoStateTPX{T, p, Composition(x)}; }

py::dict bundle_dict(const PotentialBundle& b) {
    py::dict d;
    d["T"] = b.T;
    d["rho"] = b.rho;
    d["p"] = b.p;
    d["f"] = b.f;
    d["mu"] = b.mu;
    d["hessian"] = b.hessian;
    d["s"] = b.s;
    d["u"] = b.u;
    d["h"] = b.h;
    d["g"] = b.g;
    d["c_p"] = b.c_p;
    d["c_v"] = b.c_v;
    d["d2f_dT2"] = b.d2f_dT2;
    d["v"] = b.v;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Helmholtz free energies of compressible mixtures and their incompressible limits";
    m.attr("__version__") = HELMIX_VERSION;
    m.attr("gas_constant") = gas_constant;

    auto base = py::register_exception<Error>(m, "HelmixError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<IllPosedError>(m, "IllPosedError", base.ptr());
    py::register_exception<ModelInvalidError>(m, "ModelInvalidError", base.ptr());
    py::register_exception<AssumptionViolation>(m, "AssumptionViolation", base.ptr());
    py::register_exception<NotASubgradientError>(m, "NotASubgradientError", base.ptr());

    py::class_<ConstitutiveModel>(m, "Model")
        .def_static(
            "from_config", [](const std::string& text, const std::vector<std::string>& overrides) {
                return model_from_config(config_from(text, overrides));
            },
            py::arg("text"), py::arg("overrides") = std::vector<std::string>{})
        .def_property_readonly("species", &ConstitutiveModel::species)
        .def_property_readonly("label", &ConstitutiveModel::label)
        .def_property_readonly("molar_masses", [](const ConstitutiveModel& c) { return c.molar_masses().values(); })
        .def_property_readonly("T0", [](const ConstitutiveModel& c) { return c.reference().T0; })
        .def_property_readonly("p0", [](const ConstitutiveModel& c) { return c.reference().p0; });

    m.def(
        "volume_additive",
        [](const Vec& M, double K, const Vec& v00, const Vec& cp, const Vec& s, const Vec& h, bool ideal) {
            const MolarMasses mm(M);
            return make_volume_additive(mm, K, v00, SpeciesThermal::from_specific(mm, cp, s, h, ideal), ReferenceState{});
        },
        py::arg("M"), py::arg("K"), py::arg("v00"), py::arg("cp"), py::arg("s"), py::arg("h"), py::arg("ideal_mixing") = true);

    m.def("free_energy", [](const ConstitutiveModel& c, double T, const Vec& rho) { return free_energy(c, T, rho); },
          py::arg("model"), py::arg("T"), py::arg("rho"));
    m.def("chemical_potentials",
          [](const ConstitutiveModel& c, double T, const Vec& rho) { return chemical_potentials(c, T, rho); },
          py::arg("model"), py::arg("T"), py::arg("rho"));
    m.def("hessian", [](const ConstitutiveModel& c, double T, const Vec& rho) { return hessian(c, T, rho); },
          py::arg("model"), py::arg("T"), py::arg("rho"));
    m.def("pressure", [](const ConstitutiveModel& c, double T, const Vec& rho) { return solve_pressure(c, T, rho).p; },
          py::arg("model"), py::arg("T"), py::arg("rho"));
    m.def("densities", [](const ConstitutiveModel& c, double T, double p, const Vec& x) {
        return densities_from_tpx(state(T, p, x), c);
    }, py::arg("model"), py::arg("T"), py::arg("p"), py::arg("x"));
    m.def("evaluate", [](const ConstitutiveModel& c, double T, double p, const Vec& x) {
        return bundle_dict(evaluate_bundle(c, state(T, p, x)));
    }, py::arg("model"), py::arg("T"), py::arg("p"), py::arg("x"));

    m.def("mueller_margin", [](const ConstitutiveModel& c, double T, double p, const Vec& x) {
        return mueller_margin(c, state(T, p, x)).margin;
    }, py::arg("model"), py::arg("T"), py::arg("p"), py::arg("x"));
    m.def("stability_report", [](const ConstitutiveModel& c, const std::string& region_text) {
        const Config cfg = Config::from_string(region_text);
        return py::module_::import("json").attr("loads")(to_json(stability_report(c, region_from_config(cfg))));
    }, py::arg("model"), py::arg("region") = "");

    py::class_<MixingModel>(m, "MixingModel")
        .def(py::init([](double v_W, double v_E, double v_C, double dg, double T, double pR) {
                 MixingModel mm;
                 mm.v_W = v_W;
                 mm.v_E = v_E;
                 mm.v_C = v_C;
                 mm.dg = dg;
                 mm.T = T;
                 mm.pR = pR;
                 mm.validate();
                 return mm;
             }),
             py::arg("v_W"), py::arg("v_E"), py::arg("v_C"), py::arg("dg") = 0.0, py::arg("T") = 298.0,
             py::arg("pR") = 1e5)
        .def_readwrite("kappa_A", &MixingModel::kappa_A)
        .def_readwrite("kappa_S", &MixingModel::kappa_S)
        .def_property_readonly("delta_v", &MixingModel::delta_v);
    m.def("equilibrium_constant", &equilibrium_constant, py::arg("model"), py::arg("p"));
    m.def("reaction_extent", &reaction_extent, py::arg("model"), py::arg("x"), py::arg("p"));
    m.def("excess_volume", &excess_volume, py::arg("model"), py::arg("x"), py::arg("p"));

    m.def("epsilon_scaling", [](double epsilon, double T_R, double p_R, double beta, double K) {
        ReferenceScales s;
        s.T_R = T_R;
        s.p_R = p_R;
        s.beta = beta;
        s.K = K;
        const EpsilonScaling e = epsilon_scaling(s, epsilon);
        return py::make_tuple(e.beta0, e.alpha0);
    }, py::arg("epsilon"), py::arg("T_R") = 293.0, py::arg("p_R") = 1e5, py::arg("beta") = 2.07e-4, py::arg("K") = 2.18e9);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"helmix"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
