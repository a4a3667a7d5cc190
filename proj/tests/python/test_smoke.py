import json
import math

import numpy as np
import pytest

import helmix

WATER_ETHANOL = """
[model]
type = volume_additive
M = 0.0180153, 0.04607
v00 = 1.807e-5, 5.868e-5
"""


@pytest.fixture
def model():
    return helmix.Model.from_config(WATER_ETHANOL)


def test_model_properties(model):
    assert model.species == 2
    np.testing.assert_allclose(model.molar_masses, [0.0180153, 0.04607])
    assert model.p0 == 1e5


def test_pressure_round_trip(model):
    rho = helmix.densities(model, 300.0, 2e7, np.array([0.3, 0.7]))
    assert helmix.pressure(model, 300.0, rho) == pytest.approx(2e7, rel=1e-9)


def test_gibbs_duhem(model):
    b = helmix.evaluate(model, 310.0, 5e6, np.array([0.4, 0.6]))
    assert -b["f"] + b["rho"] @ b["mu"] == pytest.approx(b["p"], rel=1e-9)
    assert np.all(np.linalg.eigvalsh(b["hessian"]) > 0.0)


def test_mu_is_gradient(model):
    rho = helmix.densities(model, 300.0, 1e6, np.array([0.5, 0.5]))
    mu = helmix.chemical_potentials(model, 300.0, rho)
    for i in range(2):
        h = 1e-6 * rho[i]
        up, dn = rho.copy(), rho.copy()
        up[i] += h
        dn[i] -= h
        fd = (helmix.free_energy(model, 300.0, up) - helmix.free_energy(model, 300.0, dn)) / (2 * h)
        assert fd == pytest.approx(mu[i], rel=1e-6)


def test_errors_are_typed(model):
    with pytest.raises(helmix.ConfigError):
        helmix.Model.from_config("[model]\ntype = unknown\n")
    with pytest.raises(helmix.HelmixError):
        helmix.evaluate(model, -5.0, 1e5, np.array([0.5, 0.5]))


def test_stability_report(model):
    rep = helmix.stability_report(model, "[region]\nT_count = 2\np_count = 2\nx_per_edge = 3\n")
    assert rep["verdict"] == "stable"


def test_mixing_symmetric_case():
    m = helmix.MixingModel(1.807e-5, 5.868e-5, 7.5e-5, dg=0.0)
    p = 1e5
    assert helmix.equilibrium_constant(m, p) == pytest.approx(1.0)
    assert helmix.reaction_extent(m, 0.5, p) == pytest.approx((1 - math.sqrt(0.5)) / 2)
    assert helmix.excess_volume(m, 0.5, p) == pytest.approx(-m.delta_v * (1 - math.sqrt(0.5)) / 2)


def test_epsilon_scaling():
    beta0, alpha0 = helmix.epsilon_scaling(1e-4)
    assert beta0 == pytest.approx(6.0651, rel=1e-4)
    assert alpha0 == pytest.approx(0.4587, rel=1e-3)


def test_cli_roundtrip(tmp_path):
    cfg = tmp_path / "m.ini"
    cfg.write_text(WATER_ETHANOL)
    code, out, err = helmix.run_cli(["regime", "--model", str(cfg), "--out", str(tmp_path)])
    assert code == 0, err
    doc = json.loads((tmp_path / "regime.json").read_text())
    assert doc["header"]["command"] == "regime"
