import math

import numpy as np
import pytest

import fuchswave as fw


def test_classify_four_zero():
    r = fw.classify(4.0, 0.0)
    assert r["mu_plus"] == pytest.approx(-1.0)
    assert r["mu_minus"] == pytest.approx(-4.0)
    assert r["regime"] == "real_large_muplus"


def test_lambda_pure():
    m = fw.CoefficientModel.pure(4.0, 0.0)
    assert fw.lambda_(m, 9.0) == pytest.approx(100.0)


def test_free_rotation():
    m = fw.CoefficientModel.pure(0.0, 0.0)
    E = np.asarray(fw.fundamental(m, fw.ZoneConfig(1.0), 2.0, 0.0, 3.0, tol=1e-12))
    c, s = math.cos(6.0), math.sin(6.0)
    assert np.allclose(E, [[c, 1j * s], [1j * s, c]], atol=1e-9)


def test_fit_and_rates():
    t = np.geomspace(1.0, 1e5, 100)
    exp, ok = fw.fit_decay(list(t), list(2.0 / t**2), -2.0, time_shift=0.0)
    assert ok and exp == pytest.approx(-2.0, abs=1e-8)
    rate, order = fw.lp_lq_rate(fw.CoefficientModel.pure(2.0, 0.75), 1.2, 3)
    assert rate == pytest.approx(-5.0 / 3.0)
    assert order == pytest.approx(2.0)


def test_errors_are_raised():
    with pytest.raises(fw.FuchswaveError):
        fw.lp_lq_rate(fw.CoefficientModel.pure(2.0, 0.75), 1.0, 3)


def test_run_experiment_dict():
    res = fw.run_experiment({"schema": 1, "experiment": "classify",
                             "model": {"family": "pure_scale_invariant", "b0": 3, "m0": 0}})
    assert res["outputs"]["mu_minus"][0] == pytest.approx(-3.0)
    assert len(res["config_hash"]) == 16


def test_cli(tmp_path):
    code, out, _ = fw.run_cli(["classify", "--b0", "4", "--m0", "0", "--out", str(tmp_path)])
    assert code == 0
    assert "mu_minus=-4" in out
