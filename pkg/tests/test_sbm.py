import unittest
import sys
import os

import numpy as np

# Ensure src is in path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.errors import ParameterError
from src.core.sbm import (LayerSpec, Placement, SbmParams, conditional_stats, expected_stats, generate,
                          intersection_matrix, plant_layers, realized_stats, resolve_placement)

LAYERS_600 = (LayerSpec(15, 0.1), LayerSpec(12, 0.12))


class TestParams(unittest.TestCase):
    def test_layer_spec_parse(self):
        self.assertEqual(LayerSpec.parse("15:0.1"), LayerSpec(15, 0.1))
        with self.assertRaises(ParameterError):
            LayerSpec.parse("15")
        with self.assertRaises(ParameterError):
            LayerSpec.parse("15:1.5")
        with self.assertRaises(ParameterError):
            LayerSpec(1, 0.5)

    def test_divisibility(self):
        with self.assertRaises(ParameterError):
            SbmParams(100, (LayerSpec(3, 0.1),))
        # 600 is divisible by 15 and 12 but not by 180
        with self.assertRaises(ParameterError):
            SbmParams(600, LAYERS_600, placement=Placement.STRIPED)
        SbmParams(600, LAYERS_600, placement=Placement.INTERLEAVED)

    def test_striped_falls_back_to_random_balanced(self):
        with self.assertLogs("src.core.sbm", level="WARNING"):
            params = resolve_placement(600, LAYERS_600, 0, Placement.STRIPED)
        self.assertIs(params.placement, Placement.RANDOM_BALANCED)


class TestPlanting(unittest.TestCase):
    def test_striped_intersections_are_equal(self):
        truth = plant_layers(SbmParams(200, (LayerSpec(4, 0.1), LayerSpec(5, 0.1)), placement=Placement.STRIPED))
        np.testing.assert_array_equal(intersection_matrix(truth), np.full((4, 5), 10))

    def test_balanced_layers(self):
        for placement in Placement:
            n = 180 if placement is Placement.STRIPED else 600
            layers = (LayerSpec(15, 0.1), LayerSpec(12, 0.12)) if n == 600 else (LayerSpec(15, 0.1), LayerSpec(12, 0.1))
            truth = plant_layers(SbmParams(n, layers, seed=3, placement=placement))
            with self.subTest(placement=placement):
                for layer, spec in zip(truth.layers, layers):
                    self.assertTrue(np.all(layer.sizes() == n // spec.num_communities))


class TestGenerate(unittest.TestCase):
    def test_same_seed_same_graph(self):
        rng = np.random.default_rng(5)
        for case in range(1000):
            k1 = int(rng.integers(2, 5))
            k2 = int(rng.integers(2, 5))
            n = k1 * k2 * int(rng.integers(1, 3))
            placement = list(Placement)[case % 3]
            params = SbmParams(n, (LayerSpec(k1, float(rng.random())), LayerSpec(k2, float(rng.random()))),
                               seed=int(rng.integers(0, 2**31)), placement=placement)
            with self.subTest(case=case):
                g1, t1 = generate(params)
                g2, t2 = generate(params)
                self.assertEqual(g1, g2)
                for a, b in zip(t1.layers, t2.layers):
                    self.assertEqual(a, b)

    def test_different_seed_different_graph(self):
        params = SbmParams(120, (LayerSpec(4, 0.3), LayerSpec(3, 0.3)))
        self.assertNotEqual(generate(params.with_seed(1))[0], generate(params.with_seed(2))[0])

    def test_edges_only_inside_shared_communities(self):
        g, truth = generate(SbmParams(120, (LayerSpec(4, 0.5), LayerSpec(6, 0.5)), seed=9))
        a, b = truth.layers
        same = (a.labels[g.sources] == a.labels[g.targets]) | (b.labels[g.sources] == b.labels[g.targets])
        self.assertTrue(np.all(same))

    def test_probability_one_makes_complete_blocks(self):
        g, truth = generate(SbmParams(12, (LayerSpec(3, 1.0), LayerSpec(2, 0.0)), placement=Placement.STRIPED))
        off_diagonal = sum(1 for u, v, _ in g.edges() if u != v)
        self.assertEqual(off_diagonal, 3 * (4 * 3 // 2))


class TestExpectations(unittest.TestCase):
    def test_closed_form_modularities(self):
        params = SbmParams(600, LAYERS_600, placement=Placement.INTERLEAVED)
        e1, e2 = expected_stats(params)
        self.assertAlmostEqual(e1.modularity(15), 0.3711, places=4)
        self.assertAlmostEqual(e2.modularity(12), 0.5485, places=4)

    def test_conditional_matches_closed_form_when_striped(self):
        params = SbmParams(200, (LayerSpec(4, 0.12), LayerSpec(5, 0.10)), placement=Placement.STRIPED)
        truth = plant_layers(params)
        closed = expected_stats(params)
        cond = conditional_stats(params, truth)
        for l in (0, 1):
            np.testing.assert_allclose(cond[l][:, 0], closed[l].internal)
            np.testing.assert_allclose(cond[l][:, 1], closed[l].outgoing)

    def test_realized_stats_shape(self):
        params = SbmParams(60, (LayerSpec(3, 0.2), LayerSpec(4, 0.2)), seed=1)
        g, truth = generate(params)
        stats = realized_stats(g, truth)
        self.assertEqual(stats[0].shape, (3, 2))
        self.assertEqual(stats[1].shape, (4, 2))


if __name__ == '__main__':
    unittest.main()
