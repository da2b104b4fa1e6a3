import unittest
import sys
import os

import numpy as np

# Ensure src is in path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.errors import ParameterError, UndefinedModularityError
from src.core.graph import Graph
from src.core.hicode import HicodeConfig, identify, refine, run
from src.core.louvain import LouvainConfig, detect
from src.core.sbm import LayerSpec, Placement, SbmParams, generate
from src.core.seeding import STREAM_TRIAL, derive_seed
from src.core.weaken import WeakenMethod, weaken_layers

TWO_TRIANGLES = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
INTERLEAVED_600 = SbmParams(600, (LayerSpec(15, 0.1), LayerSpec(12, 0.12)), placement=Placement.INTERLEAVED)


class TestHicodeSmall(unittest.TestCase):
    def test_config_validation(self):
        with self.assertRaises(ParameterError):
            HicodeConfig(num_layers=0)
        with self.assertRaises(ParameterError):
            HicodeConfig(num_layers=2, convergence_nmi=0.0)

    def test_single_layer_is_one_detector_run(self):
        cfg = HicodeConfig(num_layers=1, seed=4)
        result = run(TWO_TRIANGLES, cfg)
        self.assertEqual(len(result.layers), 1)
        self.assertEqual(result.rounds_run, 0)
        self.assertFalse(result.truncated)
        self.assertEqual(sorted(map(sorted, result.layers[0].communities())), [[0, 1, 2], [3, 4, 5]])

    def test_truncates_when_graph_runs_out(self):
        cfg = HicodeConfig(num_layers=2, method=WeakenMethod.REMOVE_EDGE)
        found = identify(TWO_TRIANGLES, cfg)
        self.assertTrue(found.truncated)
        self.assertEqual(len(found.layers), 1)
        self.assertTrue(run(TWO_TRIANGLES, cfg).truncated)

    def test_edgeless_graph_rejected(self):
        with self.assertRaises(UndefinedModularityError):
            run(Graph(4, []), HicodeConfig(num_layers=2))

    def test_deterministic_and_original_untouched(self):
        g, _ = generate(SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.35)), seed=3))
        before = (g.sources.copy(), g.targets.copy(), g.weights.copy())
        cfg = HicodeConfig(num_layers=2, refine_rounds=2, seed=8)
        a = run(g, cfg)
        b = run(g, cfg)
        self.assertEqual(a.layers, b.layers)
        self.assertEqual([r.as_dict() for r in a.history], [r.as_dict() for r in b.history])
        np.testing.assert_array_equal(g.sources, before[0])
        np.testing.assert_array_equal(g.weights, before[2])

    def test_stage_hook_labels(self):
        g, _ = generate(SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.35)), seed=3))
        labels = []
        result = run(g, HicodeConfig(num_layers=2, refine_rounds=2, convergence_nmi=1.0, seed=1),
                     on_stage=lambda label, residual, found: labels.append(label))
        expected = ["t0-1", "t0-2"] + [f"t{r}-{l}" for r in range(1, result.rounds_run + 1) for l in (1, 2)]
        self.assertEqual(labels, expected)

    def test_refine_with_one_layer_is_noop(self):
        p = detect(TWO_TRIANGLES, LouvainConfig())
        result = refine(TWO_TRIANGLES, [p], HicodeConfig(num_layers=1))
        self.assertEqual(result.layers, [p])
        self.assertEqual(result.rounds_run, 0)

    def test_refinement_weakens_every_other_layer(self):
        g, truth = generate(SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.3), LayerSpec(5, 0.3)), seed=6))
        seen = {}
        refine(g, list(truth.layers), HicodeConfig(num_layers=3, method=WeakenMethod.REMOVE_EDGE, refine_rounds=1),
               on_stage=lambda label, residual, found: seen.setdefault(label, (residual, found)))
        first = seen["t1-1"][1]
        self.assertEqual(seen["t1-1"][0], weaken_layers(g, truth.layers[1:], WeakenMethod.REMOVE_EDGE))
        self.assertEqual(seen["t1-2"][0], weaken_layers(g, [first, truth.layers[2]], WeakenMethod.REMOVE_EDGE))

    def test_history_records_ground_truth_match(self):
        g, truth = generate(SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.35)), seed=3))
        result = run(g, HicodeConfig(num_layers=2, refine_rounds=1, seed=2), truth)
        for record in result.history:
            self.assertIsNotNone(record.nmi_to_ground_truth)
            self.assertIn(record.matched_truth_layer, (0, 1))
            if record.round == 0:
                self.assertIsNone(record.nmi_to_previous)
            else:
                self.assertIsNotNone(record.nmi_to_previous)


class TestHicodeSimulation(unittest.TestCase):
    """Two-layer block model with a dominant and a hidden layer, ten seeds."""

    @classmethod
    def setUpClass(cls):
        cls.identified = []
        cls.refined = []
        for i in range(10):
            seed = derive_seed(0, STREAM_TRIAL, i)
            g, truth = generate(INTERLEAVED_600.with_seed(seed))
            cfg = HicodeConfig(num_layers=2, method=WeakenMethod.REDUCE_EDGE, refine_rounds=2,
                               convergence_nmi=1.0, seed=seed)
            result = run(g, cfg, truth)
            cls.identified.append(cls._best(result, 0))
            cls.refined.append(cls._best(result, result.rounds_run))

    @staticmethod
    def _best(result, round_index):
        scores = [0.0, 0.0]
        for record in result.records_for_round(round_index):
            j = record.matched_truth_layer
            scores[j] = max(scores[j], record.nmi_to_ground_truth)
        return scores

    def test_identification_recovers_both_layers(self):
        median = np.median(np.array(self.identified), axis=0)
        self.assertGreaterEqual(median[0], 0.85)
        self.assertGreaterEqual(median[1], 0.85)

    def test_refinement_improves_both_layers(self):
        median = np.median(np.array(self.refined), axis=0)
        self.assertGreaterEqual(median[0], 0.93)
        self.assertGreaterEqual(median[1], 0.93)


if __name__ == '__main__':
    unittest.main()
