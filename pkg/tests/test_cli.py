import io
import subprocess
import sys
from pathlib import Path

import pytest

from countq.cli import TSV_COLUMNS, RunConfig, main

DATA = Path(__file__).resolve().parent.parent / "data"


def run_cli(*args):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in args], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestGap:
    def test_constant(self):
        code, out, _ = run_cli("gap", DATA / "const1_m3.pred")
        assert code == 0 and out == "A=8 R=0 gap=4\n"

    def test_xor(self):
        code, out, _ = run_cli("gap", DATA / "xor_m2.pred")
        assert code == 0 and "gap=0" in out

    def test_input_bits(self):
        assert run_cli("gap", DATA / "gated_x.pred", "01")[1] == "A=4 R=0 gap=2\n"
        assert run_cli("gap", DATA / "gated_x.pred", "10")[1] == "A=2 R=2 gap=0\n"

    def test_malformed(self):
        code, _, err = run_cli("gap", DATA / "broken.pred")
        assert code == 2 and "line 3" in err

    def test_missing_file(self, tmp_path):
        code, _, err = run_cli("gap", tmp_path / "nope.pred")
        assert code == 2 and "cannot read" in err

    def test_wrong_x_length(self):
        assert run_cli("gap", DATA / "gated_x.pred", "1")[0] == 2

    def test_tsv(self):
        code, out, _ = run_cli("gap", "--tsv", DATA / "and_m3.pred")
        header, row = out.splitlines()
        assert header.split("\t") == list(TSV_COLUMNS["gap"])
        assert row.split("\t")[3:] == ["3", "1", "7", "-3"]


class TestSimulate:
    def test_constant_sqrt2(self):
        code, out, _ = run_cli("simulate", DATA / "const1_m1.pred")
        assert code == 0
        assert "amplitude = (0 - 1*sqrt2)/2^1 (≈ -0.7071067811)" in out
        assert "prob = (1 + 0*sqrt2)/2^1 (≈ 0.5000000000)" in out
        assert "crosscheck: A=2 R=0 gap=1 ok" in out

    def test_xor_rational(self):
        code, out, _ = run_cli("simulate", "--variant", "rational", DATA / "xor_m2.pred")
        assert code == 0
        assert "amplitude = 0 (" in out and "prob = 0 (" in out

    def test_rational_constant_digits(self):
        out = run_cli("simulate", "--variant", "rational", "--digits", "6", DATA / "const1_m1.pred")[1]
        assert "amplitude = 288/625 (≈ 0.460800)" in out

    def test_cap(self):
        code, _, err = run_cli("simulate", "--max-witness-bits", "2", DATA / "const1_m3.pred")
        assert code == 2 and "cap" in err

    def test_term_cap(self):
        code, _, err = run_cli("simulate", "--max-terms", "3", DATA / "const1_m3.pred")
        assert code == 2 and "terms" in err

    def test_no_crosscheck(self):
        out = run_cli("simulate", "--no-crosscheck", DATA / "xor_m2.pred")[1]
        assert "crosscheck: skipped" in out

    def test_trace_lines(self):
        out = run_cli("simulate", "--trace", DATA / "and_m3.pred")[1]
        lines = [ln for ln in out.splitlines() if ln.startswith("layer ")]
        assert len(lines) == 3 + 1 + 4
        assert lines[0] == "layer 0: 2 terms, norm=1"
        assert all(ln.endswith("norm=1") for ln in lines)

    def test_dump(self):
        out = run_cli("simulate", "--trace", "--dump", "--digits", "4", DATA / "const1_m1.pred")[1]
        assert "|01⟩ = (1 + 0*sqrt2)/2^0 (≈ 1.0000)" in out

    def test_threads_byte_identical(self):
        a = run_cli("simulate", "--trace", "--dump", DATA / "and_m3.pred")[1]
        b = run_cli("simulate", "--trace", "--dump", "--threads", "4", DATA / "and_m3.pred")[1]
        assert a == b

    def test_tsv(self):
        out = run_cli("simulate", "--tsv", "--variant", "rational", DATA / "const1_m1.pred")[1]
        header, row = out.splitlines()
        rec = dict(zip(header.split("\t"), row.split("\t")))
        assert list(rec) == list(TSV_COLUMNS["simulate"])
        assert rec["amplitude"] == "288/625" and rec["gap"] == "1" and rec["crosscheck"] == "ok"


class TestQap:
    def test_possible(self):
        code, out, _ = run_cli("qap", DATA / "rotation.circ")
        assert code == 0 and "possible" in out and "16/25" in out

    def test_impossible(self):
        assert run_cli("qap", DATA / "mirror.circ")[0] == 1

    def test_gni_isomorphic(self):
        assert run_cli("qap", DATA / "gni_path_path.sqrt2.circ")[0] == 1
        assert run_cli("qap", DATA / "gni_path_path.rational.circ")[0] == 1

    def test_gni_non_isomorphic(self):
        assert run_cli("qap", DATA / "gni_tri_path.sqrt2.circ")[0] == 0
        assert run_cli("qap", DATA / "gni_tri_path.rational.circ")[0] == 0

    def test_non_unitary(self):
        code, _, err = run_cli("qap", DATA / "nonunitary.circ")
        assert code == 2 and "not unitary" in err

    def test_transcendental(self, tmp_path):
        p = write(tmp_path, "t.circ", "field rational\nqubits 1\ng1 0 pi 0 0 1\naccept 1\n")
        code, _, err = run_cli("qap", p)
        assert code == 2 and "transcendental" in err

    def test_trace_prints_decomposition(self):
        out = run_cli("qap", "--trace", DATA / "rotation.circ")[1]
        assert "probability = (1/25^1) * sum f_j alpha_j" in out
        assert "|1⟩ = (1/5^1) * [4]" in out

    def test_tsv(self):
        out = run_cli("qap", "--tsv", DATA / "mirror.circ")[1]
        header, row = out.splitlines()
        rec = dict(zip(header.split("\t"), row.split("\t")))
        assert rec["decision"] == "impossible" and rec["layers"] == "2"


class TestGni:
    def test_triangle_vs_path(self):
        code, out, _ = run_cli("gni", DATA / "triangle.graph", DATA / "path3.graph")
        assert code == 0
        assert out.startswith("NON-ISOMORPHIC (amplitude ≠ 0)\n")
        assert "0 isomorphisms, 6 automorphisms (non-isomorphic)" in out

    @pytest.mark.parametrize("variant", ["sqrt2", "rational"])
    def test_relabelled_cycles(self, variant):
        code, out, _ = run_cli("gni", "--variant", variant, DATA / "cycle4_a.graph", DATA / "cycle4_b.graph")
        assert code == 0 and out.startswith("ISOMORPHIC (amplitude = 0)\n")

    def test_different_sizes(self):
        out = run_cli("gni", DATA / "path3.graph", DATA / "path4.graph")[1]
        assert out.startswith("NON-ISOMORPHIC")

    def test_vertex_cap(self):
        code, _, err = run_cli("gni", "--max-vertices", "3", DATA / "path4.graph", DATA / "cycle4_a.graph")
        assert code == 2 and "vertices" in err

    def test_disagreement_exits_3(self, monkeypatch):
        import countq.cli as cli

        monkeypatch.setattr(cli, "count_isomorphisms", lambda g1, g2: 0)
        code, _, err = run_cli("gni", DATA / "cycle4_a.graph", DATA / "cycle4_b.graph")
        assert code == 3 and "invariant" in err


class TestConfig:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("COUNTQ_DIGITS", "3")
        out = run_cli("simulate", DATA / "const1_m1.pred")[1]
        assert "(≈ -0.707)" in out

    def test_flag_beats_env(self, monkeypatch):
        monkeypatch.setenv("COUNTQ_DIGITS", "3")
        out = run_cli("simulate", "--digits", "5", DATA / "const1_m1.pred")[1]
        assert "(≈ -0.70710)" in out

    def test_env_variant(self, monkeypatch):
        monkeypatch.setenv("COUNTQ_VARIANT", "rational")
        assert "variant = rational" in run_cli("simulate", DATA / "const1_m1.pred")[1]

    def test_bad_env(self, monkeypatch):
        monkeypatch.setenv("COUNTQ_THREADS", "many")
        assert run_cli("gap", DATA / "xor_m2.pred")[0] == 2

    @pytest.mark.parametrize("args", [[], ["frobnicate"], ["gap"], ["gap", "--digits", "0", "x.pred"]])
    def test_usage_errors(self, args):
        assert run_cli(*args)[0] == 2

    def test_run_config_validation(self):
        with pytest.raises(ValueError):
            RunConfig(command="gap", max_terms=0)
        with pytest.raises(ValueError):
            RunConfig(command="dance")


def test_selftest_quick():
    code, out, _ = run_cli("selftest", "--quick")
    assert code == 0
    assert out.strip().endswith("all checks passed")
    assert "FAIL" not in out


def test_selftest_failure_exits_3(monkeypatch):
    import countq.selftest as st

    def broken(quick):
        raise AssertionError("nope")

    monkeypatch.setitem(st.CHECKS, "broken-property", broken)
    code, out, _ = run_cli("selftest", "--quick")
    assert code == 3 and "FAILED: broken-property" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "countq", "gap", str(DATA / "const1_m3.pred")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "A=8 R=0 gap=4\n"
    proc = subprocess.run([sys.executable, "-m", "countq", "qap", str(DATA / "mirror.circ")], capture_output=True, text=True)
    assert proc.returncode == 1
