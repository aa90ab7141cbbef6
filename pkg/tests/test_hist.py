#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the magnetization histograms."""

import json

import numpy as np
import pytest

from ising_qca import util
from ising_qca.configuration import RunConfig
from ising_qca.exceptions import ConfigurationError
from ising_qca.hist import (
    bimodality,
    cmd_hist,
    coarsen,
    histogram,
    histogram_report,
    local_maxima,
    read_layer,
)


def test_histogram_bins():
    centers, counts = histogram([0.0012, 0.0013, 0.5, -0.6])
    assert centers.size == 200
    assert counts.sum() == 4
    assert counts[0] == 1
    assert counts[-1] == 1
    assert counts[100] == 2
    assert centers[0] == pytest.approx(-0.4975)


def test_histogram_bad_width():
    with pytest.raises(ValueError, match="does not divide"):
        histogram([0.1], 0.03)
    with pytest.raises(ValueError, match="must be positive"):
        histogram([0.1], 0.0)


def test_coarsen():
    centers, counts = histogram([0.01, 0.02, 0.15], 0.01)
    merged_centers, merged = coarsen(centers, counts, 10)
    assert merged.size == 10
    assert merged[5] == 2
    assert merged[6] == 1
    assert merged_centers[5] == pytest.approx(0.05)
    with pytest.raises(ValueError):
        coarsen(centers, counts, 3)


def test_local_maxima():
    assert local_maxima([0, 1, 1, 0, 2, 0]) == [1, 4]
    assert local_maxima([3, 3, 3]) == [1]
    assert local_maxima([2, 1, 0]) == [0]
    assert local_maxima([0, 0]) == []
    assert local_maxima([1, 2, 2, 3]) == [3]


def test_bimodality():
    centers = np.array([-0.3, -0.2, -0.1, 0.0, 0.1, 0.2])
    counts = np.array([0, 5, 1, 0, 3, 0])
    result = bimodality(centers, counts)
    assert result.maxima == [(-0.2, 5), (0.1, 3)]
    assert result.peaks == [(-0.2, 5), (0.1, 3)]
    assert result.valley == (0.0, 0)
    assert result.is_bimodal
    assert len(result.table()) == 3


def test_same_sign_peaks_are_not_bimodal():
    centers = np.array([0.1, 0.2, 0.3, 0.4])
    counts = np.array([2, 0, 3, 0])
    result = bimodality(centers, counts)
    assert len(result.maxima) == 2
    assert not result.is_bimodal


def test_single_value():
    report = histogram_report([0.1234] * 5)
    assert np.count_nonzero(report.counts) == 1
    assert report.counts.max() == 5
    assert len(report.fine.maxima) == 1
    assert report.fine.valley is None
    assert not report.is_bimodal


def test_flat_histogram():
    centers, _ = histogram([], 0.01)
    report = histogram_report(centers, 0.01, 10)
    assert np.all(report.counts == 1)
    assert len(report.coarse.maxima) == 1
    assert not report.is_bimodal


def test_read_layer(trajectory_file):
    values = read_layer(trajectory_file, 2)
    assert values.tolist() == [0.2451, 0.2352, -0.2451, -0.2352]
    with pytest.raises(ConfigurationError, match="Layer 7 is not"):
        read_layer(trajectory_file, 7)


def test_read_layer_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("sample_id,layer,mx\n0,0,0.1\n1,zero,0.2\n")
    with pytest.raises(ConfigurationError, match="malformed"):
        read_layer(path, 0)


def test_coarsening_reveals_two_classes(trajectory_file):
    report = histogram_report(read_layer(trajectory_file, 1), 0.01, 10)
    assert len(report.fine.maxima) == 4
    assert not report.fine.is_bimodal
    assert len(report.coarse.maxima) == 2
    assert report.is_bimodal
    summary = report.summary()
    assert summary["bimodal"]
    assert summary["coarsen"] == 10


def test_cmd_hist(trajectory_file, tmp_path, capsys):
    config = RunConfig({"histogram": {"layer": 2, "bin-width": 0.01}})
    output = tmp_path / "trajectories.hist.csv"
    report = cmd_hist(trajectory_file, config, output)
    assert report.is_bimodal

    rows = util.read_csv(output, ["bin_center", "count"])
    assert len(rows) == 100
    assert sum(int(row["count"]) for row in rows) == 4

    data = json.loads(util.metadata_path(output).read_text())
    assert data["layer"] == 2
    assert data["n_values"] == 4
    assert data["bimodal"] is True
    assert "bimodal" in capsys.readouterr().out
