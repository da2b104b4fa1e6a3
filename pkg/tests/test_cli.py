import unittest
import sys
import os
import io
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

import yaml

# Ensure src is in path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.cli import main
from src.harness.core.verification import Verdict, VerificationReport

CONFIG = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'experiments.yaml'))


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


class TestCli(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp, name)

    def generate_small(self, seed=7):
        return run_cli("generate", "--n", 120, "--layer", "4:0.3", "--layer", "3:0.3", "--seed", seed,
                       "--out", self.path("g.tsv"), "--truth", self.path("gt.yaml"), "--quiet")

    def test_generate_is_reproducible(self):
        code, out, _ = self.generate_small()
        self.assertEqual(code, 0)
        self.assertIn("seed=7", out)
        with open(self.path("g.tsv")) as f:
            first = f.read()
        self.generate_small()
        with open(self.path("g.tsv")) as f:
            self.assertEqual(f.read(), first)
        with open(self.path("gt.yaml")) as f:
            self.assertEqual(yaml.safe_load(f)["n"], 120)

    def test_detect_weaken_nmi_modularity(self):
        self.generate_small()
        code, _, _ = run_cli("detect", self.path("g.tsv"), "--out", self.path("p.part"), "--seed", 1)
        self.assertEqual(code, 0)
        code, out, _ = run_cli("nmi", self.path("p.part"), self.path("p.part"))
        self.assertEqual((code, out.strip()), (0, "1.000000"))
        code, out, _ = run_cli("modularity", self.path("g.tsv"), self.path("p.part"), "--per-community")
        self.assertEqual(code, 0)
        self.assertIn("Q_i", out)
        code, _, _ = run_cli("weaken", self.path("g.tsv"), self.path("p.part"), "--method", "reduce-weight",
                             "--rule", "thm3", "--out", self.path("w.tsv"))
        self.assertEqual(code, 0)
        self.assertTrue(os.path.exists(self.path("w.tsv")))

    def test_detect_accepts_negative_seed(self):
        self.generate_small()
        code, _, _ = run_cli("detect", self.path("g.tsv"), "--out", self.path("neg.part"), "--seed", -1)
        self.assertEqual(code, 0)
        run_cli("detect", self.path("g.tsv"), "--out", self.path("wrapped.part"), "--seed", 2 ** 64 - 1)
        code, out, _ = run_cli("nmi", self.path("neg.part"), self.path("wrapped.part"))
        self.assertEqual(out.strip(), "1.000000")

    def test_hicode_with_truth(self):
        self.generate_small()
        out_dir = self.path("hicode")
        code, out, _ = run_cli("hicode", self.path("g.tsv"), "--layers", 2, "--rounds", 1, "--truth",
                               self.path("gt.yaml"), "--out-dir", out_dir, "--seed", 3)
        self.assertEqual(code, 0)
        self.assertTrue(os.path.exists(os.path.join(out_dir, "layer_1.part")))
        with open(os.path.join(out_dir, "history.yaml")) as f:
            history = yaml.safe_load(f)
        self.assertEqual(history["seed"], 3)
        self.assertIsNotNone(history["history"][0]["nmi_to_ground_truth"])

    def test_hicode_preset(self):
        self.generate_small()
        code, out, _ = run_cli("hicode", self.path("g.tsv"), "--config", CONFIG, "--hicode-preset", "remove-edge",
                               "--rounds", 1, "--out-dir", self.path("h"))
        self.assertEqual(code, 0)
        self.assertIn("method=remove", out)

    def test_verify_exit_codes(self):
        code, out, _ = run_cli("verify", "--claim", "thm1", "--n", 120, "--layer", "4:0.3", "--layer", "3:0.3",
                               "--trials", 20, "--seed", 7, "--quiet", "--report", self.path("r.yaml"))
        self.assertEqual(code, 0)
        self.assertIn("seed=7", out)
        self.assertIn("thm1", out)
        with open(self.path("r.yaml")) as f:
            self.assertEqual(yaml.safe_load(f)["reports"][0]["verdict"], "pass")

    def test_failed_claim_exits_one(self):
        failed = VerificationReport("thm1", 20, 12, Verdict.FAIL, required_rate=1.0)
        with mock.patch("src.cli.verify_claim", return_value=failed):
            code, out, _ = run_cli("verify", "--claim", "thm1", "--n", 120, "--layer", "4:0.3", "--layer", "3:0.3")
        self.assertEqual(code, 1)
        self.assertIn("fail", out)

    def test_failed_estimated_claim_is_informational(self):
        failed = VerificationReport("thm1:estimated", 20, 12, Verdict.FAIL, required_rate=1.0)
        with mock.patch("src.cli.verify_claim", return_value=failed):
            code, _, _ = run_cli("verify", "--claim", "thm1", "--estimates", "--n", 120, "--layer", "4:0.3",
                                 "--layer", "3:0.3")
        self.assertEqual(code, 0)

    def test_verify_preset_small_theorem2(self):
        code, out, _ = run_cli("verify", "--claim", "thm2", "--preset", "tiny-12", "--config", CONFIG)
        self.assertEqual(code, 0)
        self.assertIn("pass", out)

    def test_landscape_and_plot(self):
        self.generate_small()
        out_dir = self.path("land")
        code, out, _ = run_cli("landscape", "--graph", self.path("g.tsv"), "--truth", self.path("gt.yaml"),
                               "--stages", 0, "--out-dir", out_dir, "--quiet")
        self.assertEqual(code, 0)
        self.assertTrue(os.path.exists(os.path.join(out_dir, "landscape_static.csv")))
        code, out, _ = run_cli("plot", "--in-dir", out_dir)
        self.assertEqual(code, 0)
        svg = os.path.join(out_dir, "landscape_static.svg")
        with open(svg) as f:
            first = f.read()
        self.assertIn("<svg", first)
        run_cli("plot", "--in-dir", out_dir)
        with open(svg) as f:
            self.assertEqual(f.read(), first)

    def test_errors_exit_two(self):
        code, _, err = run_cli("nmi", self.path("missing.part"), self.path("missing.part"))
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error:"))
        with open(self.path("bad.tsv"), "w") as f:
            f.write("0\tx\n")
        code, _, err = run_cli("detect", self.path("bad.tsv"), "--out", self.path("p.part"))
        self.assertEqual(code, 2)
        self.assertIn("bad.tsv:1", err)
        code, _, _ = run_cli("generate", "--n", 100, "--layer", "3:0.1", "--out", self.path("g.tsv"))
        self.assertEqual(code, 2)
        code, _, _ = run_cli("frobnicate")
        self.assertEqual(code, 2)
        code, _, err = run_cli("verify", "--preset", "nope", "--config", CONFIG)
        self.assertEqual(code, 2)


if __name__ == '__main__':
    unittest.main()
