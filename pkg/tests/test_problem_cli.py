import io
import json
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from probbounds.cli import main
from probbounds.formula import parse_expression
from probbounds.problem import ProblemError, load_problem, parse_problem, parse_rational

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
F = Fraction


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, text, name="p.pkb"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestProblemFile:
    def test_rationals(self):
        assert parse_rational("0.4") == F(2, 5)
        assert parse_rational("3/10") == F(3, 10)
        assert parse_rational("1") == 1
        with pytest.raises(ValueError):
            parse_rational("1e-3")
        with pytest.raises(ValueError):
            parse_rational("abc")

    def test_full_grammar(self):
        prob = parse_problem(
            "vars A B C  # three events\n"
            "assume P(A) = 0.4\n"
            "assume P(B) >= 1/2\n"
            "assume P(A & C) <= 0.3\n"
            "assume P(A -> B) in [0.6, 0.9]\n"
            "query P(A & B)\n"
            "option degree 3\n"
            "option budgets 8,32\n"
            "option mode relaxed\n"
        )
        assert prob.variables == ["A", "B", "C"]
        kinds = [a.kind for a, _ in prob.assertions]
        assert kinds == ["equal", "at_least", "at_most", "interval"]
        assert prob.assertions[3][0].lower == F(3, 5) and prob.assertions[3][0].upper == F(9, 10)
        assert prob.queries[0].expr == parse_expression("A & B")
        cfg = prob.config()
        assert cfg.degree == 3 and cfg.budgets == (8, 32) and cfg.mode == "relaxed"
        assert prob.config(degree=2).degree == 2
        assert prob.point_probabilities() == {"A": F(2, 5)}

    @pytest.mark.parametrize(
        "text,line,col",
        [
            ("vars A B\nassume P(A & & B) = 1/2\n", 2, 14),
            ("vars A B\nassume P(A & Z) = 1/2\n", 2, 14),
            ("vars A\nassume P(A) == 1\n", 2, 1),
            ("vars A\nfrobnicate\n", 2, 1),
            ("vars A A\n", 1, 8),
            ("vars A\noption colour blue\n", 2, 1),
        ],
    )
    def test_errors_have_positions(self, text, line, col):
        with pytest.raises(ProblemError) as info:
            parse_problem(text, "x.pkb")
        assert info.value.line == line and info.value.column == col
        assert str(info.value).startswith(f"x.pkb:{line}:{col}: ")

    def test_out_of_range_probability(self):
        with pytest.raises(ProblemError):
            parse_problem("vars A\nassume P(A) = 3/2\n")

    def test_corpus_parses(self):
        for path in sorted(CORPUS.glob("*.pkb")):
            prob = load_problem(path)
            assert prob.queries


class TestCli:
    def test_frechet(self):
        code, out, _ = run("bound", CORPUS / "frechet.pkb")
        assert code == 0
        assert out.splitlines()[0] == "P(A & B) in [1/5, 2/5]  (= [0.2, 0.4])"

    def test_disjoint_check(self):
        code, out, _ = run("check", CORPUS / "disjoint3.pkb")
        assert code == 1
        assert out.startswith("inconsistent")
        assert "* [atoms sum to 1]" in out

    def test_disjoint_bound(self):
        code, out, _ = run("bound", CORPUS / "disjoint3.pkb")
        assert code == 1 and "infeasible" in out

    def test_check_consistent_json(self):
        code, out, _ = run("check", CORPUS / "frechet.pkb", "--json")
        doc = json.loads(out)
        assert code == 0 and doc["status"] == "consistent"
        total = sum(F(v["exact"]) for v in doc["witness"].values())
        assert total == 1

    def test_fuzzy(self):
        code, out, _ = run("fuzzy", CORPUS / "frechet.pkb")
        assert code == 0
        assert out.splitlines()[0] == "P(A & B) ~ 2/5  (= 0.4)"

    def test_fuzzy_needs_points(self, tmp_path):
        p = write(tmp_path, "vars A B\nassume P(A) = 1/2\nquery P(A & B)\n")
        code, _, err = run("fuzzy", p)
        assert code == 2 and "B" in err

    def test_facets(self):
        code, out, _ = run("facets", "--n", 3, "--degree", 2)
        lines = out.splitlines()
        assert code == 0 and lines[0] == "N=3 degree=2 count=16" and len(lines) == 17

    def test_facets_guard(self):
        code, _, err = run("facets", "--n", 6, "--degree", 2)
        assert code == 3 and "guard" in err

    def test_matrices(self):
        code, out, _ = run("matrices", "--n", 1)
        assert code == 0
        assert out.splitlines() == [
            "N=1 variables=x1 rows=2",
            "C[1,0] columns=1",
            "  0 {} 11",
            "C[1,1] columns=2",
            "  1 x1 10",
            "  1 ~x1 01",
        ]
        _, direct, _ = run("matrices", "--n", 3)
        _, rec, _ = run("matrices", "--n", 3, "--method", "recursive")
        assert direct == rec

    def test_verify_ineq(self, tmp_path):
        p = write(tmp_path, "# facets\n1 - P(A) - P(B) + P(A&B) >= 0\nP(A&B) >= 0\n", "ok.txt")
        code, out, _ = run("verify-ineq", p, "--n", 2)
        assert code == 0 and out.splitlines()[0].startswith("2: valid (3 tight atoms)")
        bad = write(tmp_path, "1 - P(A) - P(B) >= 0\n", "bad.txt")
        code, out, _ = run("verify-ineq", bad, "--n", 2)
        assert code == 1 and "INVALID at atom A&B (value -1)" in out

    def test_input_errors(self, tmp_path):
        assert run("bound", tmp_path / "missing.pkb")[0] == 2
        assert run("bound", CORPUS / "frechet.pkb", "--bogus")[0] == 2
        assert run("bound", CORPUS / "frechet.pkb", "--exact", "--degree", 2)[0] == 2
        p = write(tmp_path, "vars A\nassume P(A) = 1/2\n")
        code, _, err = run("bound", p)
        assert code == 2 and "no query" in err
        p = write(tmp_path, "vars A\nassume P(A & B) = 1/2\n", "q.pkb")
        code, _, err = run("bound", p)
        assert code == 2 and "q.pkb:2:" in err

    def test_relaxed_flags(self):
        code, out, _ = run("bound", CORPUS / "frechet.pkb", "--degree", 2, "--budget", "0,4")
        assert code == 0
        assert "relaxed degree=2" in out.splitlines()[0]

    def test_json_round_trip(self):
        code, out, _ = run("bound", CORPUS / "triple.pkb", "--json")
        doc = json.loads(out)
        q = doc["queries"][0]
        assert q["status"] == "feasible" and q["mode"] == {"name": "exact"}
        lo, hi = (F(v["exact"]) for v in q["interval"])
        assert (lo, hi) == (0, F(1, 4))
        assert all(float(F(v["exact"])) == v["decimal"] for v in q["interval"])
        assert set(q["stats"]) >= {"pivots", "rows", "elapsed"}

    def test_json_relaxed_steps(self):
        code, out, _ = run("bound", CORPUS / "relaxed6.pkb", "--json")
        q = json.loads(out)["queries"][0]
        assert q["mode"]["name"] == "relaxed"
        assert [s["mode"]["budget"] for s in q["steps"]][0] == 0

    def test_json_infeasible(self):
        code, out, _ = run("bound", CORPUS / "disjoint3.pkb", "--json")
        q = json.loads(out)["queries"][0]
        assert code == 1 and q["status"] == "infeasible" and q["certificate"]

    def test_byte_identical(self):
        for name in ["frechet.pkb", "rules.pkb", "relaxed6.pkb"]:
            a = run("bound", CORPUS / name)[1]
            b = run("bound", CORPUS / name)[1]
            assert a == b

    def test_json_identical_apart_from_elapsed(self):
        def strip(text):
            doc = json.loads(text)
            for q in doc["queries"]:
                for item in [q, *q["steps"]]:
                    item["stats"].pop("elapsed", None)
            return doc

        a = run("bound", CORPUS / "relaxed6.pkb", "--json")[1]
        b = run("bound", CORPUS / "relaxed6.pkb", "--json")[1]
        assert strip(a) == strip(b)

    @pytest.mark.parametrize("name", sorted(p.name for p in CORPUS.glob("*.pkb")))
    def test_corpus_under_ten_seconds(self, name):
        start = time.perf_counter()
        code, _, _ = run("bound", CORPUS / name)
        assert time.perf_counter() - start < 10
        assert code == (1 if name == "disjoint3.pkb" else 0)

    def test_module_entry(self):
        proc = subprocess.run(
            [sys.executable, "-m", "probbounds", "bound", str(CORPUS / "frechet.pkb")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0 and "[1/5, 2/5]" in proc.stdout
