import json
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tubehomog import (Coupled, DecoupledThreshold, Pencil, PencilParams, RegimeLimits, ScaledLaplacian, ScalingLaw,
                       Spectrum,
                       box_dirichlet_spectrum, convergence_study, homogenized_spectrum, pencil_spectrum)
from tubehomog.cli import main
from tubehomog.report import export_report, from_dict, to_csv

UNIT = box_dirichlet_spectrum([1, 1], 30)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestRoundTrip:
    @pytest.mark.parametrize("obj", [
        RegimeLimits(p=0.0, q=1.0, r=math.inf, D=math.inf),
        RegimeLimits(p=0.0, q=0.0, r=0.0, D=0.2, Q=math.inf),
        Pencil(p=1.0, q=1.0, omega=2 * math.pi),
        DecoupledThreshold(q=2.0),
        ScaledLaplacian(c=0.25),
        Coupled(V=0.1),
    ])
    def test_small_types(self, obj):
        text = export_report(obj)
        assert from_dict(json.loads(text)) == obj

    def test_spectrum(self):
        s = homogenized_spectrum(DecoupledThreshold(q=1.0), UNIT, 10)
        assert from_dict(json.loads(export_report(s))) == s

    def test_pencil_spectrum(self):
        ps = pencil_spectrum(UNIT, PencilParams(1.0, 1.0, 2 * math.pi), n_max=2)
        back = from_dict(json.loads(export_report(ps)))
        assert export_report(back) == export_report(ps)
        assert back.intervals == ps.intervals

    def test_convergence_report(self):
        rep = convergence_study(ScalingLaw.power(2, Fraction(2), 0, d0=0.5), [0.25])
        back = from_dict(json.loads(export_report(rep)))
        assert back == rep


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.floats(0.01, 1e6), min_size=0, max_size=15, unique=True),
       acc=st.lists(st.floats(0.01, 1e6), max_size=3))
def test_spectrum_round_trip_property(values, acc):
    v = np.sort(np.array(values, dtype=float))
    s = Spectrum(v, np.arange(1, len(v) + 1), ("base",) * len(v), np.array(acc, dtype=float))
    data = export_report(s)
    assert from_dict(json.loads(data)) == s
    assert export_report(from_dict(json.loads(data))) == data


class TestEncoding:
    def test_identical_bytes(self):
        s = homogenized_spectrum(Coupled(V=1.0), UNIT, 12)
        assert export_report(s) == export_report(s)
        assert export_report(s, "csv") == export_report(s, "csv")

    def test_inf_is_string(self):
        d = json.loads(export_report(RegimeLimits(p=0.0, q=1.0, r=math.inf, D=math.inf)))
        assert d["r"] == "inf" and d["D"] == "inf"
        assert b"Infinity" not in export_report(RegimeLimits(p=0.0, q=1.0, r=math.inf, D=math.inf))

    def test_accumulation_points_always_present(self):
        d = json.loads(export_report(homogenized_spectrum(Coupled(V=0.0), UNIT, 4)))
        assert d["accumulation_points"] == []
        assert d["schema_version"] == 1

    def test_sorted_keys_and_shortest_floats(self):
        text = export_report(Pencil(p=0.1, q=1.0, omega=2 * math.pi)).decode()
        keys = [line.split(":")[0].strip() for line in text.splitlines() if ":" in line]
        assert keys == sorted(keys)
        assert '"p": 0.1' in text

    def test_csv_layouts(self):
        s = homogenized_spectrum(DecoupledThreshold(q=1.0), UNIT, 4, n_max=2)
        lines = to_csv(s).splitlines()
        assert lines[0] == "value,multiplicity,tag"
        assert lines[-1].endswith(",0,accumulation")
        ps = pencil_spectrum(UNIT, PencilParams(1.0, 1.0, 2 * math.pi), n_max=1, per_interval_cap=3)
        assert to_csv(ps).splitlines()[0] == "n,value,multiplicity,branch,sources,near_pole"
        assert to_csv(ps).splitlines()[1].split(",")[3] == "tan"

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            export_report({"x": float("nan")})

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            export_report(Coupled(V=0.0), "xml")


class TestCLI:
    def test_classify_point_C(self, capsys):
        code, out, _ = run(["classify", "--n", "3", "--alpha", "3/2", "--beta", "0", "--d0", "1", "--q0", "1"], capsys)
        assert code == 0
        d = json.loads(out)
        assert (d["regime"], d["p"], d["q"], d["phase"]) == ("pencil", 1.0, 1.0, "C")
        assert d["schema_version"] == 1

    def test_classify_inf_encoded(self, capsys):
        code, out, _ = run(["classify", "--n", "3", "--alpha", "2", "--beta", "0"], capsys)
        d = json.loads(out)
        assert d["regime"] == "decoupled" and d["r"] == 0.0
        code, out, _ = run(["classify", "--n", "3", "--alpha", "6/5", "--beta", "1"], capsys)
        assert json.loads(out)["r"] == "inf"

    def test_malformed_rational(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["classify", "--n", "3", "--alpha", "1..5", "--beta", "0"])
        assert exc.value.code == 2
        assert "--alpha" in capsys.readouterr().err

    def test_missing_flag_named(self, capsys):
        code, _, err = run(["classify", "--n", "3", "--alpha", "2"], capsys)
        assert code == 2 and "--beta" in err

    def test_inadmissible_exit_2(self, capsys):
        code, _, err = run(["classify", "--n", "3", "--alpha", "1", "--beta", "0"], capsys)
        assert code == 2 and "alpha > 1" in err

    def test_coupled_zero_is_doubled_base(self, capsys):
        code, out, _ = run(["spectrum", "--regime", "coupled", "--v", "0", "--count", "20", "--format", "csv"], capsys)
        assert code == 0
        base = box_dirichlet_spectrum([1, 1], 20)
        assert out == to_csv(base.with_multiplicity_factor(2).truncated(20))

    def test_spectrum_auto(self, capsys):
        code, out, _ = run(["spectrum", "--n", "3", "--alpha", "2", "--beta", "0", "--count", "6"], capsys)
        d = json.loads(out)
        assert code == 0 and len(d["accumulation_points"]) == 3

    def test_spectrum_requires_regime_flags(self, capsys):
        code, _, err = run(["spectrum", "--regime", "decoupled"], capsys)
        assert code == 2 and "--q" in err

    def test_pencil_command(self, capsys, tmp_path):
        target = tmp_path / "p.json"
        code, _, _ = run(["pencil", "--p", "1", "--q", "1", "--count", "10", "--output", str(target)], capsys)
        d = json.loads(target.read_text())
        assert code == 0
        assert d["intervals"][0]["roots"][0]["branch"] == "tan"
        assert d["intervals"][0]["roots"][0]["value"] == pytest.approx(3.538354994313674589, rel=1e-13)

    def test_pencil_near_pole_roots_flagged(self, capsys):
        code, out, _ = run(["pencil", "--p", "1", "--q", "1", "--count", "200", "--pole-guard", "0.2"], capsys)
        roots = [r for b in json.loads(out)["intervals"] for r in b["roots"]]
        assert code == 0
        assert any(r["near_pole"] for r in roots) and not all(r["near_pole"] for r in roots)

    def test_verify_small(self, capsys):
        code, out, _ = run(["verify", "--alpha", "2", "--beta", "0", "--d0", "0.5", "--eps", "1/4,1/8"], capsys)
        d = json.loads(out)
        assert code == 0
        assert d["regime"] == "pencil" and len(d["rows"]) == 2
        e = [r["rel_errors"][0] for r in d["rows"]]
        assert e[1] < e[0]

    def test_verify_convergence_failure_exit_3(self, capsys):
        code, _, _ = run(["verify", "--alpha", "2", "--beta", "0", "--d0", "0.5", "--eps", "1/4", "--tol", "1e-30"],
                         capsys)
        assert code == 3

    def test_verify_rejects_N3(self, capsys):
        code, _, err = run(["verify", "--n", "3", "--alpha", "2", "--beta", "0"], capsys)
        assert code == 2 and "--n" in err

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "tubehomog", "classify", "--n", "2", "--a", "5", "--beta", "0"],
                              capture_output=True, text=True, check=True)
        d = json.loads(proc.stdout)
        assert d["regime"] == "decoupled" and d["D"] == pytest.approx(0.2)
