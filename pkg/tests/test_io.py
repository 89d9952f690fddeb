"""Table serialization: schema stability, round trips, determinism."""

import json

import pytest

from ringladder.errors import DomainError
from ringladder.io import (
    CSV_COLUMNS,
    boundary_report_to_dict,
    odd_even_report_to_dict,
    read_table,
    read_table_csv,
    read_table_json,
    table_to_csv,
    table_to_json,
    write_json_doc,
    write_table_csv,
    write_table_json,
)
from ringladder.sweep import (
    BoundaryReport,
    RunOptions,
    SweepConfig,
    SweepRecord,
    SweepTable,
    odd_even_report,
    run_sweep,
)

AWKWARD = [
    SweepRecord(theta_over_pi=-0.75, L=4, bond="rung", level=0, n_up=8,
                energy=-4.242640687119285, discord=0.0, classical_corr=0.0,
                mutual_info=0.0, concurrence=0.0, entropy_ab=0.0,
                degenerate=True),
    SweepRecord(theta_over_pi=0.07, L=6, bond="leg", level=1, n_up=6,
                energy=-7.0132460188627725, discord=0.12345678901234567,
                classical_corr=0.9876543210987654, mutual_info=1.5e-17,
                concurrence=0.3333333333333333, entropy_ab=0.6931471805599453,
                degenerate=False),
    SweepRecord(theta_over_pi=0.07, L=6, bond="rung", level=0, n_up=6,
                energy=-7.25, discord=1.0, classical_corr=1.0,
                mutual_info=2.0, concurrence=1.0, entropy_ab=0.0,
                degenerate=False),
]


def awkward_table():
    table = SweepTable(bonds=("rung", "leg"), levels=2)
    for rec in AWKWARD:
        table.add(rec)
    table.mark_invalid(0.25, 6, "convergence failure: synthetic")
    return table


class TestCsv:
    def test_header_is_the_stable_schema(self):
        text = table_to_csv(awkward_table())
        assert text.splitlines()[0] == (
            "theta_over_pi,L,bond,level,n_up,energy,discord,classical_corr,"
            "mutual_info,concurrence,entropy_ab,degenerate_flag"
        )
        assert CSV_COLUMNS[0] == "theta_over_pi"
        assert CSV_COLUMNS[-1] == "degenerate_flag"

    def test_rows_sorted_by_theta_size_bond_level(self):
        lines = table_to_csv(awkward_table()).splitlines()[1:]
        firsts = [line.split(",")[:4] for line in lines]
        assert firsts[0][:2] == ["-0.75", "4"]
        assert firsts[1][2:] == ["rung", "0"]
        assert firsts[2][2:] == ["leg", "1"]

    def test_round_trip_preserves_every_double(self, tmp_path):
        path = str(tmp_path / "table.csv")
        table = awkward_table()
        write_table_csv(table, path)
        back = read_table_csv(path)
        assert back.records == table.records

    def test_round_trip_is_byte_identical(self, tmp_path):
        path = str(tmp_path / "table.csv")
        table = awkward_table()
        write_table_csv(table, path)
        text_once = open(path).read()
        write_table_csv(read_table_csv(path), path)
        assert open(path).read() == text_once

    def test_foreign_header_is_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("theta,L\n0.0,4\n")
        with pytest.raises(DomainError):
            read_table_csv(str(path))

    def test_ragged_row_is_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(",".join(CSV_COLUMNS) + "\n0.0,4,rung\n")
        with pytest.raises(DomainError):
            read_table_csv(str(path))


class TestJson:
    def test_round_trip_with_invalid_cells(self, tmp_path):
        path = str(tmp_path / "table.json")
        table = awkward_table()
        write_table_json(table, path)
        back = read_table_json(path)
        assert back.records == table.records
        assert back.invalid == table.invalid

    def test_document_shape(self):
        doc = json.loads(table_to_json(awkward_table()))
        assert doc["columns"] == list(CSV_COLUMNS)
        assert doc["records"][0]["degenerate_flag"] is True
        assert doc["invalid"][0]["reason"].startswith("convergence")

    def test_read_table_dispatches_on_extension(self, tmp_path):
        table = awkward_table()
        csv_path = str(tmp_path / "t.csv")
        json_path = str(tmp_path / "t.json")
        write_table_csv(table, csv_path)
        write_table_json(table, json_path)
        assert read_table(csv_path).records == table.records
        assert read_table(json_path).records == table.records


class TestReportDocs:
    def test_boundary_report_dict_is_json_ready(self):
        report = BoundaryReport(
            L=8, delta=1e-4, bond="rung", grid_step=0.01,
            theta3_hat=0.07, theta5_hat=0.39, theta4_hat=0.25,
            jump_intervals=((-0.5, -0.49),), extremum_by_size={6: 0.25, 8: 0.25},
        )
        doc = boundary_report_to_dict(report)
        json.dumps(doc)
        assert doc["theta3_hat"] == 0.07
        assert doc["jump_intervals"] == [[-0.5, -0.49]]
        assert doc["extremum_by_size"] == {"6": 0.25, "8": 0.25}
        assert "above" in doc["bound_direction"]

    def test_odd_even_report_dict_is_json_ready(self):
        table = SweepTable()
        for level, (e, q) in enumerate([(-3.0, 0.5), (-2.5, 0.4)]):
            table.add(SweepRecord(
                theta_over_pi=0.2, L=6, bond="rung", level=level, n_up=6,
                energy=e, discord=q, classical_corr=0.1, mutual_info=0.6,
                concurrence=0.0, entropy_ab=1.0, degenerate=False,
            ))
        doc = odd_even_report_to_dict(odd_even_report(table, 0.2, (6,)))
        json.dumps(doc)
        assert doc["rows"][0]["L"] == 6
        assert doc["alternating"] is False

    def test_write_json_doc(self, tmp_path):
        path = str(tmp_path / "report.json")
        write_json_doc({"a": 1}, path)
        assert json.load(open(path)) == {"a": 1}


class TestDeterminism:
    def test_repeat_sweep_serializes_byte_identically(self):
        config = SweepConfig(theta_grid=(0.0, 0.3), L_list=(4,), levels=2)
        first = table_to_csv(run_sweep(config))
        second = table_to_csv(run_sweep(config))
        assert first == second

    def test_cold_and_cached_runs_serialize_identically(self, tmp_path):
        config = SweepConfig(theta_grid=(0.1,), L_list=(4,), levels=2)
        options = RunOptions(cache_dir=str(tmp_path / "cache"))
        cold = table_to_csv(run_sweep(config, options))
        warm = table_to_csv(run_sweep(config, options))
        assert cold == warm
