import json
import math

import numpy as np
import pytest

from hillgap.cli import main
from hillgap.eigensolver import eigenvalues
from hillgap.operator import build_T
from hillgap.seqspace import FourierSequence, Parity

PI2 = math.pi**2


def write_potential(path, coeffs):
    payload = {"parity": "even", "coeffs": [[k, v.real, v.imag] for k, v in coeffs.items()]}
    path.write_text(json.dumps(payload))
    return str(path)


def read_csv(path):
    header = None
    rows = []
    footer = None
    for line in path.read_text().splitlines():
        if line.startswith("# footer:"):
            footer = json.loads(line[len("# footer:"):])
        elif line.startswith("#"):
            continue
        elif header is None:
            header = line.split(",")
        else:
            rows.append(dict(zip(header, line.split(","))))
    return header, rows, footer


@pytest.fixture
def zero_potential(tmp_path):
    return write_potential(tmp_path / "zero.json", {})


@pytest.fixture
def trig_potential(tmp_path):
    return write_potential(
        tmp_path / "trig.json", {2: complex(1.0), -2: complex(1.0)}
    )


class TestSpectrumCommand:
    def test_zero_potential_pi_squared_17_digits(self, tmp_path, zero_potential):
        out = tmp_path / "spec.csv"
        code = main([
            "spectrum", "--m", "1", "--K", "16", "--n-max", "4",
            "--potential", zero_potential, "--out", str(out),
        ])
        assert code == 0
        header, rows, footer = read_csv(out)
        assert header == [
            "n", "re_lo", "im_lo", "re_hi", "im_hi",
            "re_tau", "im_tau", "re_gamma", "im_gamma", "converged",
        ]
        row1 = rows[0]
        assert row1["n"] == "1"
        assert row1["re_lo"] == f"{PI2:.17g}"
        assert row1["re_hi"] == f"{PI2:.17g}"
        assert row1["converged"] == "true"

    def test_byte_identical_reruns(self, tmp_path, trig_potential, monkeypatch):
        out = tmp_path / "s.csv"
        args = ["spectrum", "--m", "1", "--K", "32", "--n-max", "6",
                "--potential", trig_potential, "--out", str(out)]
        assert main(args) == 0
        first = out.read_bytes()
        assert main(args) == 0
        assert out.read_bytes() == first
        monkeypatch.setenv("HILLGAP_THREADS", "3")
        assert main(args) == 0
        assert out.read_bytes() == first

    def test_malformed_potential_exit_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"parity": "even", "coeffs": [[2, 0.5, 0.0], [3, 1.0, 0.0]]}))
        out = tmp_path / "x.csv"
        code = main(["spectrum", "--m", "1", "--K", "16", "--n-max", "4",
                     "--potential", str(bad), "--out", str(out)])
        assert code == 3
        err = capsys.readouterr().err
        assert "coeffs[1]" in err and "3" in err

    def test_unreadable_potential_exit_3(self, tmp_path):
        code = main(["spectrum", "--m", "1", "--K", "16", "--n-max", "4",
                     "--potential", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o.csv")])
        assert code == 3

    def test_json_format_mirror(self, tmp_path, zero_potential):
        out_csv = tmp_path / "a.csv"
        out_json = tmp_path / "a.json"
        base = ["spectrum", "--m", "1", "--K", "16", "--n-max", "4",
                "--potential", zero_potential]
        assert main(base + ["--out", str(out_csv), "--format", "csv"]) == 0
        assert main(base + ["--out", str(out_json), "--format", "json"]) == 0
        _, csv_rows, _ = read_csv(out_csv)
        doc = json.loads(out_json.read_text())
        assert doc["columns"][1] == "re_lo"
        assert doc["rows"][0][1] == csv_rows[0]["re_lo"]  # identical strings


class TestConfigHandling:
    def test_alpha_out_of_range_exit_2(self, tmp_path, zero_potential):
        code = main(["asymptotics", "--m", "1", "--alpha", "1.5", "--K", "16",
                     "--n-max", "4", "--potential", zero_potential,
                     "--out", str(tmp_path / "o.csv")])
        assert code == 2

    def test_k_too_small_exit_2(self, tmp_path, zero_potential):
        code = main(["spectrum", "--m", "1", "--K", "8", "--n-max", "4",
                     "--potential", zero_potential, "--out", str(tmp_path / "o.csv")])
        assert code == 2

    def test_missing_potential_exit_2(self, tmp_path):
        code = main(["spectrum", "--m", "1", "--K", "16", "--n-max", "4",
                     "--out", str(tmp_path / "o.csv")])
        assert code == 2

    def test_print_config_precedence(self, tmp_path, capsys):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"m": 2, "n_max": 5}))
        code = main(["spectrum", "--config", str(cfg_file), "--K", "64",
                     "--potential", "p.json", "--out", "o.csv", "--print-config"])
        assert code == 0
        cfg = json.loads(capsys.readouterr().out)
        assert cfg["m"] == 2 and cfg["n_max"] == 5 and cfg["K"] == 64
        code = main(["spectrum", "--config", str(cfg_file), "--m", "3", "--K", "64",
                     "--potential", "p.json", "--out", "o.csv", "--print-config"])
        assert code == 0
        cfg = json.loads(capsys.readouterr().out)
        assert cfg["m"] == 3  # flag overrides file

    def test_bad_quad_nodes_exit_2(self, tmp_path, zero_potential):
        code = main(["riesz-check", "--m", "1", "--quad-nodes", "48",
                     "--potential", zero_potential, "--out", str(tmp_path / "o.csv")])
        assert code == 2


class TestAsymptoticsCommand:
    def test_zero_potential_all_zero_remainders(self, tmp_path, zero_potential):
        out = tmp_path / "asym.csv"
        code = main(["asymptotics", "--m", "1", "--alpha", "0", "--K", "32",
                     "--n-max", "8", "--potential", zero_potential, "--out", str(out)])
        assert code == 0
        _, rows, footer = read_csv(out)
        assert all(float(r["rem_tau"]) == 0.0 for r in rows)
        assert all(float(r["rem_gamma"]) == 0.0 for r in rows)
        assert footer["bounded_flags"]["tau"] is True

    def test_trig_slopes_in_footer(self, tmp_path, trig_potential):
        out = tmp_path / "asym.csv"
        code = main(["asymptotics", "--m", "1", "--alpha", "0", "--K", "96",
                     "--n-max", "24", "--potential", trig_potential, "--out", str(out)])
        assert code == 0
        _, rows, footer = read_csv(out)
        assert float(footer["fitted_slope_tau"]) <= -0.9
        assert footer["target_exponents"]["tau"] == f"{0.95:.17g}"


class TestLocalizeCommand:
    def test_zero_potential(self, tmp_path, zero_potential):
        out = tmp_path / "loc.csv"
        code = main(["localize", "--m", "1", "--alpha", "0", "--K", "32", "--n-max", "8",
                     "--R", "1", "--C", "1.1",
                     "--potential", zero_potential, "--out", str(out)])
        assert code == 0
        _, rows, footer = read_csv(out)
        assert footer["n0_empirical"] == 0
        assert footer["cone_count"] == 0
        assert all(r["holds"] == "true" for r in rows)


class TestLemmasCommand:
    def test_small_sweep_exit_0(self, tmp_path):
        out = tmp_path / "lem.csv"
        code = main(["lemmas", "--K", "32", "--n-max", "24", "--out", str(out)])
        assert code == 0
        _, rows, footer = read_csv(out)
        assert footer["failed"] is False
        skips = [r for r in rows if r["holds"] == "skip"]
        assert skips and all("precondition" in r["reason"] for r in skips)
        assert any(r["check"] == "elementary_c" for r in rows)
        assert any(r["check"] == "ext_hs" for r in rows)
        assert any(r["check"] == "vert_raw" for r in rows)

    def test_corrupt_bound_exit_5(self, tmp_path):
        out = tmp_path / "lem.csv"
        code = main(["lemmas", "--K", "32", "--n-max", "12",
                     "--debug-bound-scale", "0.01", "--out", str(out)])
        assert code == 5
        _, rows, footer = read_csv(out)
        assert footer["failed"] is True


class TestRieszCheckCommand:
    def test_zero_potential(self, tmp_path, zero_potential):
        out = tmp_path / "rz.csv"
        code = main(["riesz-check", "--m", "1", "--K", "32", "--n-max", "4",
                     "--potential", zero_potential, "--out", str(out)])
        assert code == 0
        _, rows, footer = read_csv(out)
        assert footer["all_hold"] is True
        for r in rows:
            assert abs(float(r["re_tr_p"]) - 2.0) <= 1e-9
            assert float(r["l_diff"]) <= 1e-8

    def test_trig_agreement(self, tmp_path, trig_potential):
        out = tmp_path / "rz.csv"
        code = main(["riesz-check", "--m", "1", "--K", "64", "--n-max", "8",
                     "--potential", trig_potential, "--out", str(out)])
        assert code == 0
        _, rows, footer = read_csv(out)
        assert footer["all_hold"] is True
        for r in rows:
            assert float(r["tau_diff"]) <= 1e-8 * (1 + 400 * PI2)

    def test_deliberate_collision_exit_6(self, tmp_path, capsys):
        # tune the coupling so the n = 2 pair lands on its own contour
        K, n = 32, 2
        c = (2 * n - 1) ** 2 * PI2
        rho = float(2 * n - 1)

        def edge_distance(a):
            v = FourierSequence.make(Parity.EVEN, {6: a, -6: a})
            eigs = eigenvalues(build_T(v, 1, K), validate=False).values
            i = int(np.argmin(np.abs(eigs - (c + rho))))
            return abs(eigs[i] - c) - rho

        lo, hi = 2.0, 4.0
        assert edge_distance(lo) < 0 < edge_distance(hi)
        for _ in range(60):
            mid = (lo + hi) / 2
            if edge_distance(mid) < 0:
                lo = mid
            else:
                hi = mid
        a_star = (lo + hi) / 2
        assert abs(edge_distance(a_star)) < 1e-6 * rho

        pot = write_potential(tmp_path / "coll.json", {6: complex(a_star), -6: complex(a_star)})
        out = tmp_path / "rz.csv"
        code = main(["riesz-check", "--m", "1", "--K", str(K), "--n-max", "4",
                     "--potential", pot, "--out", str(out)])
        assert code == 6
        assert "contour collision" in capsys.readouterr().err


class TestAlpha1Command:
    def test_report(self, tmp_path):
        rng = np.random.default_rng(4)
        coeffs = {}
        for k in range(1, 65):
            coeffs[2 * k] = (2 * k) ** 0.4 * np.exp(2j * np.pi * rng.random())
            coeffs[-2 * k] = (2 * k) ** 0.4 * np.exp(2j * np.pi * rng.random())
        pot = write_potential(tmp_path / "rough.json", coeffs)
        out = tmp_path / "a1.csv"
        code = main(["alpha1", "--m", "1", "--K", "64", "--n-max", "16",
                     "--potential", pot, "--out", str(out)])
        assert code == 0
        _, rows, footer = read_csv(out)
        assert float(footer["fitted_slope"]) < 0
        assert int(footer["n0_below_one"]) <= 16
