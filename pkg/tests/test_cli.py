import json

import mpmath as mp

from dehnscan.cli import main
from tests.conftest import fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestCLI:
    def test_solve(self, capsys):
        code, doc = run(capsys, "solve", fixture_path("m004.json"), "--digits", "40")
        assert code == 0
        assert doc["name"] == "m004"
        assert len(doc["shapes"]) == 2
        re0 = mp.mpf(doc["shapes"][0][0].strip("()").split(" ")[0])
        assert abs(re0 - mp.mpf("0.5")) < mp.mpf("1e-30")

    def test_fill(self, capsys):
        code, doc = run(capsys, "fill", fixture_path("m004.json"),
                        "--slope", "5,1", "--digits", "40")
        assert code == 0
        assert doc["slopes"] == [[5, 1]]
        assert len(doc["t"]) == 1

    def test_fill_two_cusps(self, capsys):
        code, doc = run(capsys, "fill", fixture_path("whitehead.json"),
                        "--slope", "6,1;7,2", "--digits", "40")
        assert code == 0
        assert len(doc["t"]) == 2

    def test_nz(self, capsys):
        code, doc = run(capsys, "nz", fixture_path("m004.json"),
                        "--order", "4", "--digits", "40")
        assert code == 0
        assert "2,0" in doc["phi"]

    def test_sgi(self, capsys):
        code, doc = run(capsys, "sgi", fixture_path("whitehead.json"),
                        "--order", "4", "--digits", "40")
        assert code == 0
        assert isinstance(doc["sgi"], bool)
        assert "m22" in doc and "tol" in doc

    def test_siegel(self, capsys):
        code, doc = run(capsys, "siegel", "--forms=-1,2,-3,5")
        assert code == 0
        assert len(doc["vectors"]) == 3

    def test_relation(self, capsys):
        code, doc = run(capsys, "relation",
                        "--values", "1;1.41421356237309504880168872420969807856967187537694;"
                                    "1.41421356237309504880168872420969807856967187537694",
                        "--bound", "5", "--digits", "40")
        assert code == 0
        assert doc["kind"] == "relation"
        assert doc["coefficients"] == [0, 1, -1]

    def test_quadratic(self, capsys):
        with mp.workdps(140):
            val = "0," + mp.nstr(2 * mp.sqrt(3), 120)
        code, doc = run(capsys, "quadratic", "--value", val, "--digits", "80")
        assert code == 0
        assert doc["kind"] == "quadratic"
        assert doc["coefficients"] == [12, 0, 1]

    def test_ranklemma41(self, capsys):
        code, doc = run(capsys, "ranklemma41", "--rows", "1,2,1,2;3,1,3,1",
                        "--pairs", "2,1;-2,-1")
        assert code == 0
        assert doc == {"rank": 1, "classification": "NegatedPair",
                       "matrix_form": "equal-columns"}

    def test_ranklemma41_custom_tau(self, capsys):
        code, doc = run(capsys, "ranklemma41", "--rows", "1,2,1,2;3,1,3,1",
                        "--pairs", "2,1;-2,-1", "--tau-poly", "x^4 - x - 1")
        assert code == 0
        assert doc["classification"] == "NegatedPair"

    def test_scan_exit_zero_on_clean(self, capsys, tmp_path):
        csv = tmp_path / "scan.csv"
        code, doc = run(capsys, "scan", fixture_path("m004.json"),
                        "--max", "8", "--digits", "40", "--tol", "1e-20",
                        "--csv", str(csv))
        assert code == 0
        assert doc["collisions"] == []
        assert csv.read_text().startswith("p,q,re_t")

    def test_scan_or_mode_exit_zero_explained(self, capsys):
        code, doc = run(capsys, "scan", fixture_path("m004.json"),
                        "--max", "8", "--digits", "40", "--tol", "1e-20",
                        "--mode", "or")
        assert code == 0
        assert doc["collisions"] and all(c["explained"] for c in doc["collisions"])

    def test_scan2(self, capsys):
        code, doc = run(capsys, "scan2", fixture_path("whitehead.json"),
                        "--max", "8", "--digits", "40", "--tol", "1e-20",
                        "--bound", "10", "--symmetric", "--sample", "4")
        assert code == 0

    def test_error_reported_as_json(self, capsys):
        code = main(["quadratic", "--value", "1.5", "--digits", "20"])
        err = capsys.readouterr().err
        assert code == 2
        assert json.loads(err)["error"] == "PrecisionExhausted"
