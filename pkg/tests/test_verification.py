import unittest
import sys
import os
from unittest import mock

import numpy as np
import yaml

# Ensure src is in path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.errors import ParameterError
from src.core.graph import Graph, Partition
from src.core.sbm import GroundTruth, LayerExpectation, LayerSpec, Placement, SbmParams, expected_stats, generate
from src.core.weaken import ReduceFactorRule, WeakenMethod, remove_edge
from src.harness.core.verification import (Verdict, check_lemma3, classify_edges, format_report, reports_to_yaml,
                                           sweep_lemma2, verify_claim, verify_lemma1, verify_lemma2,
                                           verify_lemma3, verify_theorem, verify_theorem2)

LAYERS_600 = (LayerSpec(15, 0.1), LayerSpec(12, 0.12))
RANDOM_600 = SbmParams(600, LAYERS_600, placement=Placement.RANDOM_BALANCED)
INTERLEAVED_600 = SbmParams(600, LAYERS_600, placement=Placement.INTERLEAVED)
HAND_TRUTH = GroundTruth((Partition([0, 0, 1, 1]), Partition([0, 1, 0, 1])))


class TestEdgeClasses(unittest.TestCase):
    def test_hand_graph(self):
        g = Graph(4, [(0, 1)])
        classes = classify_edges(g, HAND_TRUTH)
        self.assertEqual(classes.sizes(), {"s1": 1, "s2": 0, "s12": 0, "cross": 0})
        report = check_lemma3(g, HAND_TRUTH)
        self.assertIs(report.verdict, Verdict.PASS)
        self.assertEqual(report.observed["layer1_internal"], 1.0)
        self.assertEqual(report.observed["layer1_outgoing"], 0.0)

    def test_generated_graph_has_no_cross_edges(self):
        g, truth = generate(SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.3)), seed=1))
        classes = classify_edges(g, truth)
        self.assertEqual(len(classes.cross), 0)
        self.assertEqual(sum(classes.sizes().values()), g.edge_count)

    def test_identities_after_removal(self):
        g, truth = generate(SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.3)), seed=1))
        residual = remove_edge(g, truth.layers[0])
        report = check_lemma3(residual, truth)
        self.assertIs(report.verdict, Verdict.PASS)
        self.assertEqual(report.observed["classes"]["s1"], 0)
        self.assertEqual(report.observed["classes"]["s12"], 0)

    def test_needs_two_layers(self):
        with self.assertRaises(ParameterError):
            classify_edges(Graph(4, []), GroundTruth((Partition([0, 0, 1, 1]),)))


class TestLemma2(unittest.TestCase):
    def test_examples(self):
        self.assertTrue(verify_lemma2(100, 50, 100, 0, 10))
        self.assertTrue(verify_lemma2(100, 50, 100, 50, 10))
        self.assertTrue(verify_lemma2(100, 50, 60, 30, 10))

    def test_sweep(self):
        report = sweep_lemma2(2000, seed=3)
        self.assertIs(report.verdict, Verdict.PASS)
        self.assertEqual(report.passes, 2000)
        self.assertGreater(report.observed["premise_true"], 0)

    def test_rejects_nonpositive_counts(self):
        with self.assertRaises(ParameterError):
            verify_lemma2(0, 5, 1, 1, 3)


class TestLemma3(unittest.TestCase):
    def test_fifty_random_instances(self):
        report = verify_lemma3(RANDOM_600, 50, seed=0)
        self.assertIs(report.verdict, Verdict.PASS)
        self.assertEqual(report.passes, 50)
        self.assertEqual(report.observed["max_deviation"], 0.0)


class TestLemma1(unittest.TestCase):
    def test_600_node_modularities(self):
        report = verify_lemma1(INTERLEAVED_600, 100, seed=0)
        self.assertIs(report.verdict, Verdict.PASS, report.notes)
        q1 = report.observed["layer1"]["modularity"]
        q2 = report.observed["layer2"]["modularity"]
        self.assertTrue(0.538 <= q2 <= 0.558, q2)
        self.assertTrue(0.361 <= q1 <= 0.381, q1)

    def test_small_model_expected_counts(self):
        params = SbmParams(200, (LayerSpec(4, 0.12), LayerSpec(5, 0.10)), placement=Placement.STRIPED)
        report = verify_lemma1(params, 100, seed=1)
        self.assertIs(report.verdict, Verdict.PASS, report.notes)
        self.assertAlmostEqual(report.expected["layer1"]["internal"], 172.0)
        self.assertAlmostEqual(report.expected["layer1"]["outgoing"], 150.0)
        self.assertLess(abs(report.observed["layer1"]["internal"] - 172.0), 5.0)

    def test_closed_form_checked_for_even_placements(self):
        report = verify_lemma1(INTERLEAVED_600, 100, seed=0)
        for tag in ("layer1", "layer2"):
            closed = report.expected[tag]["closed_form"]
            with self.subTest(layer=tag):
                self.assertLess(abs(report.observed[tag]["internal"] - closed["internal"]), 0.01 * closed["internal"])
                self.assertLess(abs(report.observed[tag]["modularity"] - closed["modularity"]), 0.003)

    def test_closed_form_miss_fails_only_for_even_placements(self):
        layers = (LayerSpec(4, 0.12), LayerSpec(5, 0.10))
        striped = SbmParams(200, layers, placement=Placement.STRIPED)
        shuffled = SbmParams(200, layers, placement=Placement.RANDOM_BALANCED)
        skewed = [LayerExpectation(150.0, 150.0), expected_stats(striped)[1]]
        with mock.patch("src.harness.core.verification.expected_stats", return_value=skewed):
            missed = verify_lemma1(striped, 50, seed=1)
            ignored = verify_lemma1(shuffled, 50, seed=1)
        self.assertIs(missed.verdict, Verdict.FAIL)
        self.assertTrue(any("closed form" in note for note in missed.notes))
        self.assertIs(ignored.verdict, Verdict.PASS, ignored.notes)

    def test_empty_second_layer(self):
        params = SbmParams(60, (LayerSpec(3, 0.3), LayerSpec(4, 0.0)), placement=Placement.STRIPED)
        report = verify_lemma1(params, 30, seed=2)
        self.assertEqual(report.observed["layer1"]["outgoing"], 0.0)


class TestTheorems(unittest.TestCase):
    def test_remove_edge(self):
        report = verify_theorem(RANDOM_600, WeakenMethod.REMOVE_EDGE, trials=20, seed=7)
        self.assertEqual(report.claim, "thm1")
        self.assertIs(report.verdict, Verdict.PASS)
        self.assertEqual(report.passes, 20)
        for key in ("weaken1_measure2", "weaken2_measure1"):
            self.assertEqual(report.observed[key]["max_residual_outgoing"], 0.0)

    def test_reduce_weight(self):
        for rule in (ReduceFactorRule.BACKGROUND_RATIO, ReduceFactorRule.THM3):
            report = verify_theorem(RANDOM_600, WeakenMethod.REDUCE_WEIGHT, rule, trials=20, seed=7)
            with self.subTest(rule=rule.value):
                self.assertEqual(report.claim, "thm4")
                self.assertEqual(report.passes, 20)

    def test_reduce_edge(self):
        report = verify_theorem(RANDOM_600, WeakenMethod.REDUCE_EDGE, ReduceFactorRule.THM3,
                                trials=100, seed=7)
        self.assertEqual(report.claim, "thm3")
        self.assertGreaterEqual(report.passes, 95)
        self.assertIs(report.verdict, Verdict.PASS)

    def test_forced_identity_is_degenerate(self):
        report = verify_theorem(INTERLEAVED_600, WeakenMethod.REDUCE_WEIGHT, trials=20, seed=1, keep=1.0)
        self.assertIs(report.verdict, Verdict.DEGENERATE)
        self.assertTrue(report.ok)

    def test_too_few_trials(self):
        with self.assertRaises(ParameterError):
            verify_theorem(INTERLEAVED_600, WeakenMethod.REMOVE_EDGE, trials=5)

    def test_detected_layers_are_informational(self):
        params = SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.3)))
        report = verify_theorem(params, WeakenMethod.REMOVE_EDGE, trials=20, seed=2, use_estimates=True)
        self.assertEqual(report.claim, "thm1:estimated")
        self.assertTrue(report.informational)
        self.assertTrue(report.ok)
        self.assertTrue(any("detected" in note for note in report.notes))

    def test_jobs_do_not_change_results(self):
        params = SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.3)))
        a = verify_theorem(params, WeakenMethod.REDUCE_EDGE, trials=20, seed=2, jobs=1)
        b = verify_theorem(params, WeakenMethod.REDUCE_EDGE, trials=20, seed=2, jobs=4)
        self.assertEqual(a.as_dict(), b.as_dict())


class TestTheorem2(unittest.TestCase):
    def test_exhaustive_small_instance(self):
        params = SbmParams(12, (LayerSpec(3, 1.0), LayerSpec(2, 1.0)), seed=0, placement=Placement.STRIPED)
        g, truth = generate(params)
        report = verify_theorem2(g, truth)
        self.assertIs(report.verdict, Verdict.PASS)
        self.assertEqual(report.observed["mode"], "exhaustive")
        self.assertEqual(report.trials, 2 ** 11 - 1)

    def test_hypothesis_unmet(self):
        # layer-2 community {0, 1} keeps every residual edge
        g = Graph(4, [(0, 1)])
        truth = GroundTruth((Partition([0, 1, 0, 1]), Partition([0, 0, 1, 1])))
        report = verify_theorem2(g, truth)
        self.assertIs(report.verdict, Verdict.HYPOTHESIS_UNMET)

    def test_sampled_mode(self):
        g, truth = generate(INTERLEAVED_600.with_seed(3))
        report = verify_theorem2(g, truth, samples=500, seed=3)
        self.assertEqual(report.observed["mode"], "sampled")
        self.assertIs(report.verdict, Verdict.PASS)


class TestReporting(unittest.TestCase):
    def test_claim_dispatch_and_rendering(self):
        params = SbmParams(60, (LayerSpec(3, 0.3), LayerSpec(4, 0.3)), placement=Placement.STRIPED)
        reports = [verify_claim("lemma3", params, 5, seed=0), verify_claim("lemma2", params, 10, seed=0)]
        table = format_report(reports)
        self.assertIn("lemma3", table)
        doc = yaml.safe_load(reports_to_yaml(reports, params, seed=0))
        self.assertEqual(doc["seed"], 0)
        self.assertEqual([r["claim"] for r in doc["reports"]], ["lemma3", "lemma2"])
        with self.assertRaises(ParameterError):
            verify_claim("lemma9", params, 5)


if __name__ == '__main__':
    unittest.main()
