import json

import pytest

from teamcheck.cli import main

K3_STRUCTURE = "domain 3\nrel E/2 : (0,1) (1,0) (1,2) (2,1) (0,2) (2,0)\n"
CLIQUE_FORMULA = "E(x,y) & x!=y & inc(y;x) & inc(x;y)"
K3_FULL_TEAM = "\n".join(
    f"x={a} y={b}" for a in range(3) for b in range(3) if a != b
) + "\n"

STAR_GRAPH = "p 5 4\ne 0 1\ne 0 2\ne 0 3\ne 0 4\n"


@pytest.fixture
def k3_files(tmp_path):
    structure = tmp_path / "k3.structure"
    structure.write_text(K3_STRUCTURE)
    team = tmp_path / "team.txt"
    team.write_text(K3_FULL_TEAM)
    return structure, team


class TestCheck:
    def test_satisfiable_team(self, k3_files, capsys):
        structure, team = k3_files
        code = main([
            "check", "--structure", str(structure), "--formula", CLIQUE_FORMULA,
            "--team", str(team),
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "SAT"
        assert "fragment=FO(inc)" in out

    def test_empty_team_is_satisfying(self, k3_files, tmp_path, capsys):
        structure, _ = k3_files
        team = tmp_path / "empty.txt"
        team.write_text("")
        code = main([
            "check", "--structure", str(structure), "--formula", CLIQUE_FORMULA,
            "--team", str(team),
        ])
        assert code == 0
        assert capsys.readouterr().out.splitlines()[0] == "SAT"

    def test_missing_free_variable_is_input_error(self, k3_files, tmp_path, capsys):
        structure, _ = k3_files
        team = tmp_path / "partial.txt"
        team.write_text("x=0\n")
        code = main([
            "check", "--structure", str(structure), "--formula", CLIQUE_FORMULA,
            "--team", str(team),
        ])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_unsat_exit_code(self, k3_files, tmp_path, capsys):
        structure, _ = k3_files
        team = tmp_path / "one.txt"
        team.write_text("x=0 y=1\n")
        code = main([
            "check", "--structure", str(structure), "--formula", CLIQUE_FORMULA,
            "--team", str(team),
        ])
        assert code == 1
        assert capsys.readouterr().out.splitlines()[0] == "UNSAT"

    def test_parse_error_reports_position(self, k3_files, capsys):
        structure, team = k3_files
        code = main([
            "check", "--structure", str(structure), "--formula", "E(x,y) &",
            "--team", str(team),
        ])
        assert code == 2
        assert "line 1" in capsys.readouterr().err

    def test_json_output(self, k3_files, capsys):
        structure, team = k3_files
        code = main([
            "check", "--structure", str(structure), "--formula", CLIQUE_FORMULA,
            "--team", str(team), "--json",
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "SAT"
        assert payload["path"] == "inclusion-fixpoint"


class TestSolve:
    def test_witness_lines(self, tmp_path, capsys):
        structure = tmp_path / "star.structure"
        edges = [(0, i) for i in range(1, 5)]
        pairs = " ".join(f"({a},{b}) ({b},{a})" for a, b in edges)
        structure.write_text(f"domain 5\nrel E/2 : {pairs}\n")
        code = main([
            "solve", "--structure", str(structure),
            "--formula", "forall x exists y (inc(y;z) & (E(x,y) | x=y))",
            "-k", "1",
        ])
        out = capsys.readouterr().out.splitlines()
        assert code == 0
        assert out[0] == "SAT"
        assert out[1] == "z=0"

    def test_sentence_with_k_two_is_unsat(self, tmp_path, capsys):
        structure = tmp_path / "s.structure"
        structure.write_text("domain 2\nrel E/2 : (0,0) (1,1)\n")
        code = main([
            "solve", "--structure", str(structure), "--formula", "forall x E(x,x)",
            "-k", "2",
        ])
        assert code == 1
        assert capsys.readouterr().out.splitlines()[0] == "UNSAT"

    def test_fast_path_flag_accepted(self, tmp_path, capsys):
        structure = tmp_path / "s.structure"
        structure.write_text("domain 2\nrel E/2 : (0,1)\n")
        for mode in ("auto", "off"):
            code = main([
                "solve", "--structure", str(structure), "--formula", "E(x,y)",
                "-k", "1", "--fast-path", mode,
            ])
            assert code == 0
        outs = capsys.readouterr().out
        assert outs.count("SAT") == 2


class TestReduce:
    def test_clique_reduction_outputs(self, tmp_path, capsys):
        graph = tmp_path / "k3.graph"
        graph.write_text("p 3 3\ne 0 1\ne 1 2\ne 0 2\n")
        out_prefix = tmp_path / "instance"
        code = main([
            "reduce", "clique", "--input", str(graph), "-k", "3",
            "--out", str(out_prefix), "--json",
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["k_out"] == 6
        assert payload["formula"] == "E(x,y) & x!=y & inc(y;x) & inc(x;y)"
        assert (tmp_path / "instance.structure").exists()
        assert (tmp_path / "instance.formula").read_text().strip() == payload["formula"]
        assert (tmp_path / "instance.k").read_text().strip() == "6"

    def test_wsat_reduction_round_trips_through_solve(self, tmp_path, capsys):
        source = tmp_path / "formula.prop"
        source.write_text("x1 & x2\n")
        out_prefix = tmp_path / "wsat"
        code = main([
            "reduce", "wsat", "--input", str(source), "-k", "1", "--out", str(out_prefix),
        ])
        assert code == 0
        capsys.readouterr()
        code = main([
            "solve", "--structure", str(tmp_path / "wsat.structure"),
            "--formula-file", str(tmp_path / "wsat.formula"),
            "-k", (tmp_path / "wsat.k").read_text().strip(),
        ])
        # weight one cannot satisfy the conjunction, so the reduced instance is UNSAT
        assert code == 1

    def test_indset_reduction_solves_sat(self, tmp_path, capsys):
        graph = tmp_path / "p3.graph"
        graph.write_text("p 3 2\ne 0 1\ne 1 2\n")
        out_prefix = tmp_path / "indset"
        code = main([
            "reduce", "indset", "--input", str(graph), "-k", "2", "--out", str(out_prefix),
        ])
        assert code == 0
        capsys.readouterr()
        code = main([
            "solve", "--structure", str(tmp_path / "indset.structure"),
            "--formula-file", str(tmp_path / "indset.formula"),
            "-k", "2",
        ])
        assert code == 0

    def test_bad_input_is_exit_two(self, tmp_path, capsys):
        graph = tmp_path / "bad.graph"
        graph.write_text("e 0 1\n")
        code = main([
            "reduce", "clique", "--input", str(graph), "-k", "2", "--out", str(tmp_path / "x"),
        ])
        assert code == 2


class TestVerify:
    def test_closure_suite_small(self, tmp_path, capsys):
        report_path = tmp_path / "closure.txt"
        code = main([
            "verify", "closure", "--seed", "5", "--cases", "10", "--out", str(report_path),
        ])
        assert code == 0
        text = report_path.read_text()
        assert "summary: suite=closure" in text
        assert "fail=0" in text

    def test_circuit_suite_small_json(self, capsys):
        code = main(["verify", "circuit", "--seed", "5", "--cases", "20", "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["summary"]["fail"] == 0

    def test_clique_experiment_reports_discrepancies_without_failing(self, tmp_path, capsys):
        report_path = tmp_path / "clique.json"
        code = main([
            "verify", "clique-experiment", "--vertices", "4", "--out", str(report_path), "--json",
        ])
        assert code == 0
        payload = json.loads(report_path.read_text())
        assert payload["summary"]["fail"] == 0
        assert payload["summary"]["discrepancies"] >= 1  # four-vertex paths already pad teams

    def test_jobs_flag_produces_same_report(self, capsys):
        code = main(["verify", "circuit", "--seed", "8", "--cases", "12", "--json"])
        assert code == 0
        serial = json.loads(capsys.readouterr().out)
        code = main(["verify", "circuit", "--seed", "8", "--cases", "12", "--jobs", "2", "--json"])
        assert code == 0
        parallel = json.loads(capsys.readouterr().out)
        assert serial["cases"] == parallel["cases"]


class TestBench:
    def test_header_only_on_empty_ranges(self, capsys):
        code = main(["bench", "domset", "--seed", "3"])
        assert code == 0
        assert capsys.readouterr().out.strip() == "family,n,k,path,seconds,verdict"

    def test_domset_rows_and_determinism(self, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        for path in (first, second):
            code = main([
                "bench", "domset", "--n-range", "4:5", "--k-range", "1:2",
                "--seed", "3", "--out", str(path),
            ])
            assert code == 0
        strip = lambda text: [",".join(r.split(",")[:4] + r.split(",")[5:]) for r in text.splitlines()]
        assert strip(first.read_text()) == strip(second.read_text())
        assert len(first.read_text().splitlines()) == 5
