"""Coefficient file format and JSON document round trips."""

import numpy as np
import pytest

from spharcp.errors import ParseError
from spharcp.io import (
    COEFF_HEADER,
    read_coefficients,
    read_truth,
    truth_to_scenario,
    write_coefficients,
    write_truth,
)
from spharcp.simulate import scenario_table1, simulate

from conftest import random_series


class TestCoefficientFile:
    def test_round_trip_is_byte_identical(self, tmp_path):
        series = random_series(n=6, L=2, seed=1)
        meta = {"scenario": "custom", "seed": 1, "n": 6, "L": 2}
        path_a = tmp_path / "a.csv"
        path_b = tmp_path / "b.csv"
        write_coefficients(path_a, series, meta)
        parsed, parsed_meta = read_coefficients(path_a)
        write_coefficients(path_b, parsed, parsed_meta)
        assert path_a.read_bytes() == path_b.read_bytes()

    def test_values_round_trip_exactly(self, tmp_path):
        series = random_series(n=5, L=3, seed=2)
        path = tmp_path / "c.csv"
        write_coefficients(path, series)
        parsed, meta = read_coefficients(path)
        assert meta is None
        assert np.array_equal(parsed.data, series.data)

    def test_row_count(self, tmp_path):
        series = random_series(n=5, L=1, seed=3)
        path = tmp_path / "d.csv"
        write_coefficients(path, series)
        rows = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
        assert rows[0] == COEFF_HEADER
        assert len(rows) - 1 == 5 * 1 * 1

    def test_accepts_external_file_without_config(self, tmp_path):
        path = tmp_path / "ext.csv"
        path.write_text("t,ell,m,value\n1,0,0,1.5\n2,0,0,-0.25\n")
        series, meta = read_coefficients(path)
        assert meta is None
        assert series.n == 2 and series.L == 1
        assert series.value(1, 0, 0) == 1.5

    def test_malformed_row_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,ell,m,value\n1,0,0,1.5\n2,0,zero,0.5\n")
        with pytest.raises(ParseError, match="line 3"):
            read_coefficients(path)

    def test_truncated_grid_rejected(self, tmp_path):
        path = tmp_path / "trunc.csv"
        path.write_text("t,ell,m,value\n1,1,-1,0.1\n1,1,0,0.2\n1,1,1,0.3\n")
        # L = 2 implies 4 slots per timestamp; the (1, 0, 0) row is missing
        with pytest.raises(ParseError):
            read_coefficients(path)

    def test_duplicate_slot_rejected(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("t,ell,m,value\n1,0,0,0.1\n1,0,0,0.2\n")
        with pytest.raises(ParseError, match="duplicate"):
            read_coefficients(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "nohdr.csv"
        path.write_text("1,0,0,0.1\n")
        with pytest.raises(ParseError, match="header"):
            read_coefficients(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            read_coefficients(tmp_path / "nope.csv")

    def test_out_of_range_index(self, tmp_path):
        path = tmp_path / "oor.csv"
        path.write_text("t,ell,m,value\n1,0,1,0.1\n")
        with pytest.raises(ParseError, match="line 2"):
            read_coefficients(path)


class TestTruthDocument:
    def test_truth_round_trip_rebuilds_scenario(self, tmp_path):
        spec = scenario_table1("balanced", q=8, d=2, seed=11)
        path = tmp_path / "truth.json"
        write_truth(path, spec, scenario_meta={"scenario": "table1-balanced"})
        doc = read_truth(path)
        rebuilt = truth_to_scenario(doc)
        assert rebuilt.partition.change_points == spec.partition.change_points
        assert np.array_equal(
            rebuilt.segments[0].coeffs.phi, spec.segments[0].coeffs.phi
        )
        assert np.array_equal(
            rebuilt.segments[1].noise_spectrum, spec.segments[1].noise_spectrum
        )
        # the rebuilt scenario simulates to the identical series
        assert np.array_equal(simulate(rebuilt).data, simulate(spec).data)

    def test_wrong_kind_rejected(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text('{"kind": "other"}')
        with pytest.raises(ParseError):
            read_truth(path)
