"""File formats and the command-line interface."""

from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from l1select import (
    FileFormatError,
    lower_bound_pair,
    lower_bound_tournament,
    random_instance,
    read_empirical,
    read_family,
    read_mass_vector,
    write_empirical,
    write_family,
    write_mass_vector,
)
from l1select.cli import main


class TestFamilyFiles:
    def test_round_trip_is_bit_exact(self, tmp_path):
        """Serialized floats use the shortest round-trip representation, so
        even the ninth-based tournament masses survive a write/read cycle
        unchanged."""
        family = lower_bound_tournament(1e-3).family
        path = tmp_path / "family.json"
        write_family(path, family)
        loaded = read_family(path)
        assert loaded.names == family.names
        assert loaded.support.atoms == family.support.atoms
        assert_array_equal(loaded.matrix, family.matrix)

    def test_random_round_trip(self, tmp_path):
        family = random_instance(11, 6, 7, noise=0.1).family
        path = tmp_path / "family.json"
        write_family(path, family)
        assert_array_equal(read_family(path).matrix, family.matrix)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileFormatError, match="not found"):
            read_family(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(FileFormatError, match="not valid JSON"):
            read_family(path)

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(FileFormatError, match="JSON object"):
            read_family(path)

    @pytest.mark.parametrize(
        "payload, message",
        [
            ({"candidates": []}, "missing required key 'support'"),
            ({"support": ["a"]}, "missing required key 'candidates'"),
            ({"support": [1], "candidates": []}, "atom labels"),
            ({"support": ["a"], "candidates": {}}, "must be a list"),
            ({"support": ["a"], "candidates": ["x"]}, "must be an object"),
            ({"support": ["a"], "candidates": [{"mass": [1.0]}]}, "missing required key 'name'"),
            ({"support": ["a"], "candidates": [{"name": 3, "mass": [1.0]}]}, "names must be strings"),
            ({"support": ["a"], "candidates": [{"name": "f", "mass": ["x"]}]}, "list of numbers"),
        ],
    )
    def test_schema_violations(self, tmp_path, payload, message):
        path = tmp_path / "family.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(FileFormatError, match=message):
            read_family(path)

    def test_inconsistent_lengths_are_wrapped(self, tmp_path):
        payload = {
            "support": ["a", "b"],
            "candidates": [{"name": "f", "mass": [0.5, 0.25, 0.25]}],
        }
        path = tmp_path / "family.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(FileFormatError):
            read_family(path)


class TestEmpiricalFiles:
    def test_mass_round_trip(self, tmp_path, pair_instance):
        path = tmp_path / "empirical.json"
        write_empirical(path, pair_instance.empirical)
        loaded = read_empirical(path, pair_instance.family.support)
        assert_array_equal(loaded.mass, pair_instance.empirical.mass)
        assert loaded.sample_count is None

    def test_samples_are_aggregated(self, tmp_path, pair_instance):
        path = tmp_path / "empirical.json"
        samples = ["A1"] * 2 + ["A2"] * 1 + ["A1"] * 1
        path.write_text(json.dumps({"samples": samples}), encoding="utf-8")
        support = pair_instance.family.support
        assert support.atoms == ("A1", "A2", "A3", "A4")
        loaded = read_empirical(path, support)
        assert_array_equal(loaded.mass, [0.75, 0.25, 0.0, 0.0])
        assert loaded.sample_count == 4

    @pytest.mark.parametrize(
        "payload, message",
        [
            ({}, "exactly one"),
            ({"mass": [1.0], "samples": ["a1"]}, "exactly one"),
            ({"samples": []}, "nonempty list"),
            ({"samples": [1, 2]}, "atom labels"),
            ({"samples": ["zz"]}, "unknown atom labels"),
            ({"mass": [0.5, 0.4, 0.0, 0.0]}, "."),
        ],
    )
    def test_invalid_files(self, tmp_path, pair_instance, payload, message):
        path = tmp_path / "empirical.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(FileFormatError, match=message):
            read_empirical(path, pair_instance.family.support)

    def test_mass_vector_round_trip(self, tmp_path):
        truth = lower_bound_pair(1e-3).truth
        path = tmp_path / "truth.json"
        write_mass_vector(path, truth)
        assert_array_equal(read_mass_vector(path), truth)


@pytest.fixture()
def pair_files(tmp_path, pair_instance):
    fam = tmp_path / "family.json"
    emp = tmp_path / "empirical.json"
    write_family(fam, pair_instance.family)
    write_empirical(emp, pair_instance.empirical)
    return str(fam), str(emp)


class TestSelectCommand:
    def test_efficient_on_the_pair_construction(self, pair_files, capsys):
        fam, emp = pair_files
        assert main(["select", "--family", fam, "--empirical", emp, "--algorithm", "efficient"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["algorithm"] == "efficient"
        assert report["selected_index"] == 0
        assert report["selected_name"] == "f1"
        assert report["h_products"] == 1
        assert report["trace"] == [{"pair": [0, 1], "outcome": "draw", "removed": 1}]

    def test_every_deterministic_algorithm_runs(self, pair_files, capsys):
        fam, emp = pair_files
        for algorithm in ("tournament", "mindist", "modified", "minloss", "efficient"):
            assert main(
                ["select", "--family", fam, "--empirical", emp, "--algorithm", algorithm]
            ) == 0
            report = json.loads(capsys.readouterr().out)
            assert report["algorithm"] == algorithm
            assert report["selected_index"] in (0, 1)

    def test_randomized_reports_mixture_and_seed(self, pair_files, capsys):
        fam, emp = pair_files
        code = main(
            ["select", "--family", fam, "--empirical", emp, "--algorithm", "randomized", "--seed", "5"]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["seed"] == 5
        assert report["mixture"] == pytest.approx([0.5, 0.5])
        assert report["term_evaluations"] == 2
        assert report["h_products"] == 0

    def test_randomized_rejects_larger_families(self, tmp_path, tournament_instance, capsys):
        fam = tmp_path / "family.json"
        emp = tmp_path / "empirical.json"
        write_family(fam, tournament_instance.family)
        write_empirical(emp, tournament_instance.empirical)
        code = main(
            ["select", "--family", str(fam), "--empirical", str(emp), "--algorithm", "randomized"]
        )
        assert code == 3
        assert "exactly 2 candidates" in capsys.readouterr().err

    def test_samples_form_empirical(self, tmp_path, pair_instance, capsys):
        fam = tmp_path / "family.json"
        emp = tmp_path / "empirical.json"
        write_family(fam, pair_instance.family)
        emp.write_text(json.dumps({"samples": ["A1", "A2", "A1", "A2"]}), encoding="utf-8")
        assert main(["select", "--family", str(fam), "--empirical", str(emp), "--algorithm", "mindist"]) == 0
        assert json.loads(capsys.readouterr().out)["term_evaluations"] == 4

    def test_missing_family_file_exits_two(self, tmp_path, pair_files, capsys):
        _, emp = pair_files
        code = main(
            ["select", "--family", str(tmp_path / "no.json"), "--empirical", emp, "--algorithm", "mindist"]
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_empirical_exits_two(self, tmp_path, pair_files):
        fam, _ = pair_files
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        assert main(["select", "--family", fam, "--empirical", str(bad), "--algorithm", "mindist"]) == 2


class TestVerifyCommand:
    def _run(self, capsys, *extra):
        code = main(["verify", "--trials", "25", "--seed", "3", *extra])
        return code, json.loads(capsys.readouterr().out)

    def test_small_sweep_passes(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, summary = self._run(capsys)
        assert code == 0
        assert summary["status"] == "ok"
        assert summary["counterexample"] is None
        assert summary["elimination_invariant"]["failures"] == 0
        assert summary["win_equivalence"]["failures"] == 0
        assert summary["quadruple"]["failures"] == 0
        assert summary["quadruple"]["min_value"] >= -1e-12
        assert all(v["failures"] == 0 for v in summary["bounds"].values())
        assert all(summary["reference_checks"].values())

    def test_output_is_deterministic(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        _, first = self._run(capsys)
        _, second = self._run(capsys)
        assert first == second

    def test_threads_do_not_change_the_output(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        _, serial = self._run(capsys)
        monkeypatch.setenv("THREADS", "4")
        _, threaded = self._run(capsys)
        assert serial == threaded

    def test_restricted_delta_mode_switches_the_right_selectors(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, summary = self._run(capsys, "--delta-mode", "restricted")
        assert code == 0
        modes = {name: entry["delta_mode"] for name, entry in summary["bounds"].items()}
        assert modes == {
            "tournament": "full",
            "mindist": "full",
            "modified": "restricted",
            "minloss": "restricted",
            "efficient": "restricted",
        }

    def test_vc_gap_is_reported(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        _, summary = self._run(capsys)
        vc = summary["vc_gap"]
        assert vc["vc_full"] == vc["vc_full_second_implementation"]
        assert vc["vc_restricted_max"] < vc["vc_full"]
        assert vc["gap_confirmed"] is True

    def test_draw_removal_flip_passes_or_documents_a_counterexample(
        self, capsys, tmp_path, monkeypatch
    ):
        """With the elimination procedure's draw handling reversed, the sweep
        either still passes or dumps the first failing instance; the summary
        records which happened."""
        monkeypatch.chdir(tmp_path)
        code, summary = self._run(capsys, "--flip-draw-removal")
        assert summary["draw_flip_mode"] is True
        if summary["status"] == "ok":
            assert code == 0
            assert summary["counterexample"] is None
        else:
            assert code == 1
            dump = tmp_path / "counterexample.json"
            assert summary["counterexample"] == str(dump)
            record = json.loads(dump.read_text(encoding="utf-8"))
            assert {"label", "candidates", "empirical_mass", "failure"} <= set(record)

    def test_invalid_parameters_exit_three(self, capsys):
        assert main(["verify", "--trials", "0"]) == 3
        assert main(["verify", "--trials", "5", "--max-omega", "0"]) == 3
        capsys.readouterr()


class TestBenchCommand:
    def test_exact_cost_columns(self, capsys):
        assert main(["bench", "--sizes", "2,4,8", "--omega", "5"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        costs = {
            (int(r["family_size"]), r["algorithm"]): (
                int(r["h_products"]),
                int(r["term_evaluations"]),
            )
            for r in rows
        }
        for m in (2, 4, 8):
            assert costs[(m, "tournament")][0] == m * (m - 1) // 2
            assert costs[(m, "mindist")][1] == m * m * (m - 1)
            assert costs[(m, "modified")][1] == m * (m - 1)
            assert costs[(m, "minloss")][0] == m * (m - 1) // 2
            assert costs[(m, "efficient")][0] == m - 1
        assert costs[(2, "randomized")] == (0, 2)
        assert (4, "randomized") not in costs

    def test_csv_output_file(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(["bench", "--sizes", "3", "--out", str(out)]) == 0
        rows = list(csv.DictReader(out.open()))
        assert {r["algorithm"] for r in rows} == {
            "tournament", "mindist", "modified", "minloss", "efficient",
        }
        assert all(int(r["wall_time_ns"]) >= 0 for r in rows)

    @pytest.mark.parametrize("sizes", ["", "2,x", "0", "-3"])
    def test_bad_sizes_exit_three(self, sizes, capsys):
        assert main(["bench", "--sizes", sizes]) == 3
        capsys.readouterr()


class TestGenCommand:
    def test_pair_example_round_trips(self, tmp_path, capsys):
        out = tmp_path / "pair"
        assert main(["gen", "--example", "three", "--eps", "0.01", "--out", str(out)]) == 0
        files = json.loads(capsys.readouterr().out)["files"]
        inst = lower_bound_pair(0.01)
        family = read_family(files["family"])
        assert_array_equal(family.matrix, inst.family.matrix)
        assert_array_equal(read_empirical(files["empirical"], family.support).mass, inst.empirical.mass)
        assert_array_equal(read_mass_vector(files["truth"]), inst.truth)

    def test_tournament_example(self, tmp_path, capsys):
        out = tmp_path / "nine"
        assert main(["gen", "--example", "nine", "--eps", "0.001", "--out", str(out)]) == 0
        files = json.loads(capsys.readouterr().out)["files"]
        assert read_family(files["family"]).names == ("f1", "f2", "f3", "f3p")

    def test_vcdim_example_writes_family_only(self, tmp_path, capsys):
        out = tmp_path / "vc"
        assert main(["gen", "--example", "vcdim", "--n", "3", "--out", str(out)]) == 0
        files = json.loads(capsys.readouterr().out)["files"]
        assert set(files) == {"family"}
        assert read_family(files["family"]).size == 16

    def test_random_example(self, tmp_path, capsys):
        out = tmp_path / "rnd"
        code = main(
            ["gen", "--example", "random", "--seed", "7", "--k", "3", "--m", "4", "--noise", "0.1", "--out", str(out)]
        )
        assert code == 0
        files = json.loads(capsys.readouterr().out)["files"]
        inst = random_instance(7, 3, 4, 0.1)
        assert_array_equal(read_family(files["family"]).matrix, inst.family.matrix)

    @pytest.mark.parametrize(
        "argv",
        [
            ["gen", "--example", "three", "--out", "x"],
            ["gen", "--example", "nine", "--out", "x"],
            ["gen", "--example", "vcdim", "--out", "x"],
            ["gen", "--example", "three", "--eps", "0.5", "--out", "x"],
        ],
    )
    def test_missing_or_bad_parameters_exit_three(self, tmp_path, monkeypatch, argv, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(argv) == 3
        capsys.readouterr()

    def test_generated_files_feed_select(self, tmp_path, capsys):
        out = tmp_path / "pipe"
        assert main(["gen", "--example", "three", "--eps", "0.02", "--out", str(out)]) == 0
        files = json.loads(capsys.readouterr().out)["files"]
        code = main(
            ["select", "--family", files["family"], "--empirical", files["empirical"], "--algorithm", "tournament"]
        )
        assert code == 0
        assert json.loads(capsys.readouterr().out)["h_products"] == 1
