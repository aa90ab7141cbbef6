#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for phase diagrams and cuts at fixed V."""

import json

import numpy as np
import pytest

from ising_qca import util
from ising_qca.configuration import RunConfig
from ising_qca.meanfield import analytic_fixed_point
from ising_qca.model import ModelParams
from ising_qca.phase_diagram import cmd_phase_diagram, ferromagnetic_interval, phase_cut

# The mean-field ferromagnet at V = 3, q = 2 spans Omega = (3 -+ sqrt(8)) / 2.
LOWER = (3.0 - np.sqrt(8.0)) / 2.0
UPPER = (3.0 + np.sqrt(8.0)) / 2.0


def test_boundaries():
    assert LOWER == pytest.approx(0.0858, abs=1e-4)
    assert UPPER == pytest.approx(2.9142, abs=1e-4)


def test_phase_cut():
    cut = phase_cut(3.0, (0.5, 4.5), 5, dt_ode=0.01)
    assert cut.abs_mx.shape == (5, 1)
    assert cut.v.tolist() == [3.0]
    assert cut.metadata["cut_v"] == 3.0
    for i, omega in enumerate(cut.omega[:2]):
        exact = analytic_fixed_point(ModelParams(omega=float(omega), v=3.0))
        assert cut.abs_mx[i, 0] == pytest.approx(exact.mx, abs=1e-6)
    assert cut.abs_mx[4, 0] == 0.0
    assert ferromagnetic_interval(cut) == (0.5, 2.5)


def test_paramagnetic_cut():
    cut = phase_cut(0.5, (0.5, 4.5), 3, dt_ode=0.01)
    assert ferromagnetic_interval(cut) is None


def test_phase_cut_bad_closure():
    with pytest.raises(ValueError, match="Unknown closure"):
        phase_cut(3.0, (0.5, 4.5), 3, closure="exact")


def test_cmd_phase_diagram(tmp_path, capsys):
    config = RunConfig(
        {
            "phase-diagram": {
                "omega-min": 0.5,
                "omega-max": 4.5,
                "v-min": 0.5,
                "v-max": 3.0,
                "points": 3,
                "dt-ode": 0.01,
                "t-max": 50.0,
            }
        }
    )
    output = tmp_path / "phase_diagram.csv"
    grid = cmd_phase_diagram(config, output)
    assert grid.abs_mx.shape == (3, 3)

    rows = util.read_csv(output, ["omega", "v", "abs_mx"])
    assert len(rows) == 9
    assert (rows[0]["omega"], rows[0]["v"]) == ("0.5", "0.5")
    data = json.loads(util.metadata_path(output).read_text())
    assert data["closure"] == "mf"
    assert data["shape"] == [3, 3]
    assert util.config_path(output).exists()
    assert "unconverged" in capsys.readouterr().out


def test_cmd_phase_cut(tmp_path, capsys):
    config = RunConfig({"phase-diagram": {"points": 3, "dt-ode": 0.01}})
    config.update({"phase-diagram": {"omega-min": 0.5, "omega-max": 4.5}})
    output = tmp_path / "cut.csv"
    grid = cmd_phase_diagram(config, output, cut_v=3.0)
    assert grid.abs_mx.shape == (3, 1)
    rows = util.read_csv(output, ["omega", "v", "abs_mx"])
    assert [row["v"] for row in rows] == ["3", "3", "3"]
    assert "FM interval" in capsys.readouterr().out


def test_cmd_phase_diagram_nn(tmp_path):
    config = RunConfig(
        {
            "phase-diagram": {
                "closure": "nn",
                "omega-min": 0.5,
                "omega-max": 2.0,
                "v-min": 0.0,
                "v-max": 1.0,
                "points": 2,
                "dt-ode": 0.01,
                "t-max": 20.0,
            }
        }
    )
    output = tmp_path / "nn.csv"
    cmd_phase_diagram(config, output)
    rows = util.read_csv(output, ["omega", "v", "abs_mx", "closure"])
    assert len(rows) == 4
    assert {row["closure"] for row in rows} == {"nn"}


@pytest.mark.slow
def test_cut_boundaries_at_v3():
    """Every point two cells away from the boundaries has the analytic phase."""
    cut = phase_cut(3.0, (0.0, 4.0), 200, dt_ode=5e-3)
    cell = cut.omega[1] - cut.omega[0]
    expected = (cut.omega > LOWER) & (cut.omega < UPPER)
    far = (np.abs(cut.omega - LOWER) > 2 * cell) & (
        np.abs(cut.omega - UPPER) > 2 * cell
    )
    found = cut.ferromagnetic()[:, 0]
    assert np.array_equal(found[far], expected[far])

    low, high = ferromagnetic_interval(cut)
    assert low == pytest.approx(LOWER, abs=2 * cell)
    assert high == pytest.approx(UPPER, abs=2 * cell)
