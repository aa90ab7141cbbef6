#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Fixtures for testing the `ising-qca` package."""
from pathlib import Path

import pytest

import ising_qca
from ising_qca import configuration

path = Path(__file__).resolve().parent
data_path = path / "data"


@pytest.fixture()
def run_conf():
    """Create a configuration initialized with ising-qca.toml."""
    return ising_qca.Configuration(data_path / "ising-qca.toml")


@pytest.fixture()
def conf():
    """Create a simple configuration for scratch."""
    text = """\
# This is a simple prolog.

[TEST]
# This is a test section.

value1 = 53
value2 = 54
"""
    conf = ising_qca.Configuration()
    conf.from_string(text)
    return conf


@pytest.fixture(autouse=True)
def no_user_configuration(tmp_path, monkeypatch):
    """Keep the user's own configuration file out of the tests."""
    monkeypatch.setattr(
        configuration, "user_config_file", lambda: tmp_path / "no-such-file.toml"
    )
    monkeypatch.setenv("ISING_QCA_WORKERS", "1")


@pytest.fixture()
def reference_params():
    """The bimodal model on a small layer."""
    return ising_qca.ModelParams(
        omega=3.0, v=15.0, kappa=1.0, dt=0.1, n_sites=4, depth=5
    )


@pytest.fixture()
def reference_jump():
    return ising_qca.JumpParams(0.5, -0.5)


@pytest.fixture()
def trajectory_file():
    return data_path / "trajectories.csv"
