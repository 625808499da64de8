# test/test_protocols.py
"""
Unit tests for the protocol handlers. The oracle helpers below recompute every merge with
plain float arithmetic on Python lists, independently of learning/paramvec.py.
"""
import sys
import os

# Ensure project root is on the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import math
import random
import tracemalloc
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from learning.models import Dataset, Hyperparams, ModelSpec, build_model
from learning.paramvec import as_param_vector
from protocols import chisme, dfl, fedavg, gossip
from protocols.base import (ChismeState, DflState, FedAvgServerState, GossipState, UpdateMessage, WeightedUpdate,
                            experience_increment, live_vector_count)
from protocols.registry import GOSSIP, ISOLATED, SERVER, SYNCHRONOUS, ParadigmRegistry
from utils.exceptions import UsageError


# --- straight-line oracles ---
def oracle_scaled_sim(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0 or nb == 0:
        return 0.5
    return (max(-1.0, min(1.0, dot / (na * nb))) + 1.0) / 2.0


def oracle_chisme_merge(theta, checkpoint, mu, exp_map, self_id, sender, theta_k, mu_k):
    exp_map = dict(exp_map)
    exp_map[sender] = mu_k
    total = sum(exp_map.values())
    alpha = mu_k / total if total > 0 else 0.0
    d_own = [t - c for t, c in zip(theta, checkpoint)]
    d_remote = [t - c for t, c in zip(theta_k, checkpoint)]
    s_prime = oracle_scaled_sim(d_own, d_remote)
    omega = s_prime / (1.0 + s_prime)
    den = (1.0 - alpha) * (1.0 - omega) + alpha * omega
    eta = alpha * omega / den if den != 0 else 0.0
    new_theta = [(1.0 - eta) * t + eta * r for t, r in zip(theta, theta_k)]
    new_mu = (1.0 - eta) * mu + eta * mu_k
    exp_map[self_id] = new_mu
    return alpha, s_prime, omega, eta, new_theta, new_mu, exp_map


def oracle_gl_merge(theta, mu, theta_k, mu_k):
    total = mu + mu_k
    alpha = mu_k / total if total > 0 else 0.0
    return [(1.0 - alpha) * t + alpha * r for t, r in zip(theta, theta_k)], max(mu, mu_k)


def oracle_weighted_mean(vectors, weights):
    total = sum(weights)
    return [sum(w * v[j] for v, w in zip(vectors, weights)) / total for j in range(len(vectors[0]))]


def oracle_cossim_aggregate(checkpoint, own, own_size, received):
    d_own = [t - c for t, c in zip(own, checkpoint)]
    vectors, weights = [own], [float(own_size)]
    for theta_k, size_k in received:
        d_k = [t - c for t, c in zip(theta_k, checkpoint)]
        vectors.append(theta_k)
        weights.append(size_k * oracle_scaled_sim(d_own, d_k))
    return oracle_weighted_mean(vectors, weights)


def _chisme_state(client_id, theta, checkpoint, mu, exp_map=None):
    state = ChismeState(client_id=client_id, params=as_param_vector(theta, writable=True),
                        checkpoint=as_param_vector(checkpoint), experience=float(mu),
                        experience_map=dict(exp_map or {client_id: float(mu)}))
    return state


class TestInfluence(unittest.TestCase):

    def test_experience_influence_examples(self):
        self.assertEqual(chisme.experience_influence({0: 100.0, 1: 100.0}, 100.0), 0.5)
        self.assertEqual(chisme.experience_influence({0: 300.0, 1: 100.0}, 100.0), 0.25)
        self.assertEqual(chisme.experience_influence({0: 300.0, 1: 0.0}, 0.0), 0.0)
        self.assertEqual(chisme.experience_influence({0: 0.0, 1: 0.0}, 0.0), 0.0)

    def test_negative_experience(self):
        with self.assertRaises(UsageError):
            chisme.experience_influence({0: 1.0, 1: -1.0}, -1.0)

    def test_aligned_similarity_gives_alpha(self):
        for i in range(101):
            alpha = i / 100.0
            self.assertAlmostEqual(chisme.combined_influence(alpha, 1.0), alpha, delta=1e-12)

    def test_opposed_similarity_gives_zero(self):
        for i in range(101):
            self.assertEqual(chisme.combined_influence(i / 100.0, 0.0), 0.0)

    def test_hand_evaluation(self):
        self.assertAlmostEqual(chisme.combined_influence(0.5, 0.5), 1.0 / 3.0, delta=1e-12)

    def test_monotonic(self):
        etas = [chisme.combined_influence(0.3, s / 50.0) for s in range(1, 51)]
        self.assertTrue(all(a < b for a, b in zip(etas, etas[1:])))
        etas = [chisme.combined_influence(a / 50.0, 0.5) for a in range(0, 51)]
        self.assertTrue(all(a < b for a, b in zip(etas, etas[1:])))
        self.assertTrue(all(0.0 <= e <= 1.0 for e in etas))

    def test_out_of_range(self):
        with self.assertRaises(UsageError):
            chisme.combined_influence(1.2, 0.5)
        with self.assertRaises(UsageError):
            chisme.combined_influence(0.5, -0.1)


class TestChismeHandlers(unittest.TestCase):

    def setUp(self):
        self.spec = ModelSpec("linear-regression", 2, 1)
        self.model = build_model(self.spec)
        rng = np.random.default_rng(0)
        x = rng.standard_normal((12, 2))
        self.data = Dataset(x, x @ np.array([[1.0], [-2.0]]))
        self.hyper = Hyperparams(learning_rate=0.1, batch_size=4, epochs=2)

    def test_on_train(self):
        state = ChismeState.initial(0, np.zeros(3))
        state = chisme.chisme_on_train(state, self.model, self.data, self.hyper, seed=5)
        assert_array_equal(state.checkpoint, np.zeros(3))
        self.assertEqual(state.experience, 24.0)
        self.assertEqual(state.experience_map[0], 24.0)
        self.assertFalse(state.checkpoint.flags.writeable)
        self.assertTrue(state.params.flags.writeable)
        previous = state.params.copy()
        state = chisme.chisme_on_train(state, self.model, self.data, self.hyper, seed=6)
        assert_array_equal(state.checkpoint, previous)
        self.assertEqual(state.experience, 48.0)

    def test_literal_experience_mode(self):
        state = chisme.chisme_on_train(ChismeState.initial(0, np.zeros(3)), self.model, self.data,
                                       self.hyper, seed=5, experience_mode="literal")
        self.assertEqual(state.experience, 12.0)

    def test_on_train_deterministic(self):
        a = chisme.chisme_on_train(ChismeState.initial(0, np.zeros(3)), self.model, self.data, self.hyper, seed=9)
        b = chisme.chisme_on_train(ChismeState.initial(1, np.zeros(3)), self.model, self.data, self.hyper, seed=9)
        assert_array_equal(a.params, b.params)
        self.assertEqual(a.experience, b.experience)

    def test_message_is_a_copy(self):
        state = _chisme_state(0, [1.0, 2.0], [0.0, 0.0], 10.0)
        msg = chisme.chisme_build_message(state)
        state.params[0] = 99.0
        state.experience = 50.0
        assert_array_equal(msg.params, [1.0, 2.0])
        self.assertEqual(msg.experience, 10.0)
        self.assertFalse(msg.params.flags.writeable)

    def test_identical_message_is_fixed_point(self):
        state = _chisme_state(0, [1.0, -1.0, 0.5], [0.0, 0.0, 0.0], 20.0)
        msg = UpdateMessage(sender=1, params=np.array([1.0, -1.0, 0.5]), experience=20.0)
        state = chisme.chisme_on_receive(state, msg)
        assert_allclose(state.params, [1.0, -1.0, 0.5], atol=1e-15)
        self.assertAlmostEqual(state.last_merge.eta, state.last_merge.alpha, delta=1e-12)
        self.assertAlmostEqual(state.last_merge.alpha, 0.5, delta=1e-15)

    def test_opposite_direction_is_ignored(self):
        state = _chisme_state(0, [2.0, 3.0], [1.0, 1.0], 30.0)
        msg = UpdateMessage(sender=4, params=np.array([0.0, -1.0]), experience=70.0)
        state = chisme.chisme_on_receive(state, msg)
        assert_array_equal(state.params, [2.0, 3.0])
        self.assertEqual(state.experience, 30.0)
        self.assertEqual(state.experience_map, {0: 30.0, 4: 70.0})
        self.assertEqual(state.last_merge.eta, 0.0)

    def test_checkpoint_not_moved_by_receive(self):
        state = _chisme_state(0, [1.0, 0.0], [0.0, 0.0], 10.0)
        chisme.chisme_on_receive(state, UpdateMessage(sender=1, params=np.array([0.0, 1.0]), experience=10.0))
        assert_array_equal(state.checkpoint, [0.0, 0.0])

    def test_scripted_exchange_matches_oracle(self):
        # Two-parameter model; client 0 hears from client 1, then from client 2.
        theta, checkpoint, mu, exp_map = [1.0, 2.0], [0.0, 0.0], 30.0, {0: 30.0}
        state = _chisme_state(0, theta, checkpoint, mu, exp_map)
        for sender, theta_k, mu_k in ((1, [2.0, 1.0], 10.0), (2, [-0.5, 3.0], 45.0)):
            alpha, s_prime, omega, eta, theta, mu, exp_map = oracle_chisme_merge(
                theta, checkpoint, mu, exp_map, 0, sender, theta_k, mu_k)
            state = chisme.chisme_on_receive(state, UpdateMessage(sender, np.array(theta_k), mu_k))
            trace = state.last_merge
            self.assertAlmostEqual(trace.alpha, alpha, delta=1e-12)
            self.assertAlmostEqual(trace.scaled_similarity, s_prime, delta=1e-12)
            self.assertAlmostEqual(trace.omega, omega, delta=1e-12)
            self.assertAlmostEqual(trace.eta, eta, delta=1e-12)
            assert_allclose(state.params, theta, atol=1e-12, rtol=0)
            self.assertAlmostEqual(state.experience, mu, delta=1e-12)
            self.assertEqual(set(state.experience_map), set(exp_map))
        self.assertEqual(len(state.experience_map), 3)

    def test_randomized_oracle(self):
        rnd = random.Random(1234)
        for _ in range(1000):
            p = rnd.randint(1, 5)
            checkpoint = [rnd.uniform(-1, 1) for _ in range(p)]
            theta = [rnd.uniform(-1, 1) for _ in range(p)]
            theta_k = [rnd.uniform(-1, 1) for _ in range(p)]
            mu, mu_k = rnd.uniform(0, 100), rnd.uniform(0, 100)
            exp_map = {0: mu, 7: rnd.uniform(0, 100)}
            expected = oracle_chisme_merge(theta, checkpoint, mu, exp_map, 0, 3, theta_k, mu_k)
            state = chisme.chisme_on_receive(_chisme_state(0, theta, checkpoint, mu, exp_map),
                                             UpdateMessage(3, np.array(theta_k), mu_k))
            self.assertAlmostEqual(state.last_merge.eta, expected[3], delta=1e-12)
            assert_allclose(state.params, expected[4], atol=1e-12, rtol=0)
            self.assertAlmostEqual(state.experience, expected[5], delta=1e-9)

    def test_merge_is_convex(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            theta, checkpoint, theta_k = rng.standard_normal((3, 6))
            state = _chisme_state(0, theta, checkpoint, rng.uniform(1, 10))
            state = chisme.chisme_on_receive(state, UpdateMessage(1, theta_k, rng.uniform(0, 10)))
            low, high = np.minimum(theta, theta_k), np.maximum(theta, theta_k)
            self.assertTrue(np.all(state.params >= low - 1e-12))
            self.assertTrue(np.all(state.params <= high + 1e-12))

    def test_length_mismatch(self):
        state = _chisme_state(0, [1.0, 2.0], [0.0, 0.0], 1.0)
        with self.assertRaises(UsageError):
            chisme.chisme_on_receive(state, UpdateMessage(1, np.zeros(3), 1.0))

    def test_live_vectors(self):
        state = _chisme_state(0, [1.0, 2.0], [0.0, 0.0], 1.0)
        msg = UpdateMessage(1, np.array([0.5, 0.5]), 1.0)
        buffer_id = id(state.params)
        self.assertEqual(live_vector_count(state), 2)
        self.assertEqual(live_vector_count(state, [msg.params]), 3)
        state = chisme.chisme_on_receive(state, msg)
        self.assertEqual(id(state.params), buffer_id)
        self.assertEqual(live_vector_count(state), 2)

    def test_receive_allocates_no_full_vector(self):
        p = 100_000
        rng = np.random.default_rng(4)
        state = _chisme_state(0, rng.standard_normal(p), rng.standard_normal(p), 10.0)
        msg = UpdateMessage(1, rng.standard_normal(p), 10.0)
        full_vector_bytes = p * 8
        tracemalloc.start()
        try:
            chisme.chisme_on_receive(state, msg)
            _, peak = tracemalloc.get_traced_memory()
        finally:
            tracemalloc.stop()
        self.assertLess(peak, full_vector_bytes // 2)


class TestGossipHandlers(unittest.TestCase):

    def test_experience_ratio(self):
        state = GossipState(0, as_param_vector([0.0, 0.0], writable=True), 100.0)
        state = gossip.gl_on_receive(state, UpdateMessage(1, np.array([4.0, 8.0]), 300.0))
        assert_allclose(state.params, [3.0, 6.0], atol=1e-15)
        self.assertEqual(state.experience, 300.0)

    def test_zero_sender_experience(self):
        state = GossipState(0, as_param_vector([1.0, 1.0], writable=True), 50.0)
        state = gossip.gl_on_receive(state, UpdateMessage(1, np.array([4.0, 8.0]), 0.0))
        assert_array_equal(state.params, [1.0, 1.0])
        self.assertEqual(state.experience, 50.0)

    def test_both_zero_is_noop(self):
        state = GossipState.initial(0, np.array([1.0, 1.0]))
        state = gossip.gl_on_receive(state, UpdateMessage(1, np.array([4.0, 8.0]), 0.0))
        assert_array_equal(state.params, [1.0, 1.0])

    def test_equal_experience_midpoint(self):
        state = GossipState(0, as_param_vector([0.0, 2.0], writable=True), 7.0)
        state = gossip.gl_on_receive(state, UpdateMessage(1, np.array([2.0, 0.0]), 7.0))
        assert_allclose(state.params, [1.0, 1.0], atol=1e-15)

    def test_randomized_oracle(self):
        rnd = random.Random(4321)
        for _ in range(1000):
            p = rnd.randint(1, 6)
            theta = [rnd.uniform(-2, 2) for _ in range(p)]
            theta_k = [rnd.uniform(-2, 2) for _ in range(p)]
            mu, mu_k = rnd.uniform(0, 100), rnd.uniform(0, 100)
            expected_theta, expected_mu = oracle_gl_merge(theta, mu, theta_k, mu_k)
            state = GossipState(0, as_param_vector(theta, writable=True), mu)
            state = gossip.gl_on_receive(state, UpdateMessage(1, np.array(theta_k), mu_k))
            assert_allclose(state.params, expected_theta, atol=1e-12, rtol=0)
            self.assertEqual(state.experience, expected_mu)

    def test_on_train_and_message(self):
        model = build_model(ModelSpec("linear-regression", 1, 1))
        data = Dataset(np.array([[1.0], [2.0]]), np.array([[1.0], [2.0]]))
        state = gossip.gl_on_train(GossipState.initial(3, np.zeros(2)), model, data,
                                   Hyperparams(epochs=2), seed=0)
        self.assertEqual(state.experience, 4.0)
        msg = gossip.gl_build_message(state)
        self.assertEqual(msg.sender, 3)
        self.assertEqual(msg.experience, 4.0)
        assert_array_equal(msg.params, state.params)
        self.assertIsNot(msg.params, state.params)


class TestDflAggregation(unittest.TestCase):

    def test_equal_sizes_mean(self):
        out = dfl.dfl_aggregate(WeightedUpdate(np.array([0.0, 2.0]), 5), [WeightedUpdate(np.array([2.0, 0.0]), 5)])
        assert_allclose(out, [1.0, 1.0])

    def test_size_weights(self):
        out = dfl.dfl_aggregate(WeightedUpdate(np.array([0.0]), 1), [WeightedUpdate(np.array([4.0]), 3)])
        assert_allclose(out, [3.0])

    def test_empty_received(self):
        own = np.array([1.0, 2.0])
        assert_array_equal(dfl.dfl_aggregate(WeightedUpdate(own, 4), []), own)

    def test_zero_total_weight(self):
        with self.assertRaises(UsageError):
            dfl.dfl_aggregate(WeightedUpdate(np.zeros(2), 0), [WeightedUpdate(np.ones(2), 0)])

    def test_randomized_oracle(self):
        rnd = random.Random(2468)
        for _ in range(1000):
            p = rnd.randint(1, 6)
            own = [rnd.uniform(-2, 2) for _ in range(p)]
            own_size = rnd.randint(1, 100)
            received = [([rnd.uniform(-2, 2) for _ in range(p)], rnd.randint(1, 100))
                        for _ in range(rnd.randint(0, 5))]
            expected = oracle_weighted_mean([own] + [v for v, _ in received],
                                            [own_size] + [s for _, s in received])
            got = dfl.dfl_aggregate(WeightedUpdate(np.array(own), own_size),
                                    [WeightedUpdate(np.array(v), s) for v, s in received])
            assert_allclose(got, expected, atol=1e-12, rtol=0)

    def test_cossim_randomized_oracle(self):
        rnd = random.Random(1357)
        for _ in range(1000):
            p = rnd.randint(1, 6)
            checkpoint = [rnd.uniform(-1, 1) for _ in range(p)]
            own = [rnd.uniform(-2, 2) for _ in range(p)]
            own_size = rnd.randint(1, 100)
            received = [([rnd.uniform(-2, 2) for _ in range(p)], rnd.randint(1, 100))
                        for _ in range(rnd.randint(0, 5))]
            expected = oracle_cossim_aggregate(checkpoint, own, own_size, received)
            got = dfl.cossim_dfl_aggregate(np.array(checkpoint), WeightedUpdate(np.array(own), own_size),
                                           [WeightedUpdate(np.array(v), s) for v, s in received])
            assert_allclose(got, expected, atol=1e-12, rtol=0)

    def test_cossim_equals_dfl_when_aligned(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            checkpoint, direction = rng.standard_normal((2, 5))
            own = WeightedUpdate(checkpoint + direction, rng.integers(1, 50))
            received = [WeightedUpdate(checkpoint + rng.uniform(0.1, 3.0) * direction, rng.integers(1, 50))
                        for _ in range(rng.integers(1, 5))]
            assert_allclose(dfl.cossim_dfl_aggregate(checkpoint, own, received),
                            dfl.dfl_aggregate(own, received), atol=1e-12, rtol=0)

    def test_cossim_drops_opposed_update(self):
        checkpoint = np.zeros(3)
        own = WeightedUpdate(np.array([1.0, 2.0, 3.0]), 10)
        opposed = WeightedUpdate(np.array([-1.0, -2.0, -3.0]), 90)
        assert_allclose(dfl.cossim_dfl_aggregate(checkpoint, own, [opposed]), own.params, atol=1e-15)

    def test_cossim_matches_oracle(self):
        checkpoint = np.array([0.0, 0.0])
        own = WeightedUpdate(np.array([1.0, 0.0]), 10)
        other = WeightedUpdate(np.array([0.0, 1.0]), 30)
        # Orthogonal deltas: S' = 0.5, weights 10 and 15.
        assert_allclose(dfl.cossim_dfl_aggregate(checkpoint, own, [other]), [0.4, 0.6], atol=1e-15)

    def test_cossim_self_only_and_zero_weight(self):
        own = WeightedUpdate(np.array([1.0, 2.0]), 3)
        assert_array_equal(dfl.cossim_dfl_aggregate(np.zeros(2), own, []), own.params)
        empty_own = WeightedUpdate(np.array([1.0, 2.0]), 0)
        opposed = WeightedUpdate(np.array([-1.0, -2.0]), 5)
        assert_array_equal(dfl.cossim_dfl_aggregate(np.zeros(2), empty_own, [opposed]), empty_own.params)

    def test_round_lifecycle(self):
        state = DflState.initial(0, np.zeros(2), data_size=2)
        state.params = as_param_vector([2.0, 2.0], writable=True)
        msg = UpdateMessage(1, np.array([0.0, 0.0]), data_size=2)
        state = dfl.dfl_on_receive(state, msg, max_buffer=1)
        with self.assertRaises(UsageError):
            dfl.dfl_on_receive(state, msg, max_buffer=1)
        self.assertEqual(live_vector_count(state), 2)
        state = dfl.dfl_finish_round(state)
        assert_allclose(state.params, [1.0, 1.0])
        self.assertEqual(state.buffer, [])
        self.assertTrue(state.params.flags.writeable)

    def test_similarity_round_needs_checkpoint(self):
        state = DflState.initial(0, np.zeros(2), data_size=2)
        with self.assertRaises(UsageError):
            dfl.dfl_finish_round(state, similarity_weighted=True)

    def test_on_train_keeps_checkpoint(self):
        model = build_model(ModelSpec("linear-regression", 1, 1))
        data = Dataset(np.array([[1.0], [2.0]]), np.array([[1.0], [2.0]]))
        state = dfl.dfl_on_train(DflState.initial(0, np.zeros(2), 2), model, data, Hyperparams(), 0,
                                 keep_checkpoint=True)
        assert_array_equal(state.checkpoint, np.zeros(2))
        self.assertEqual(dfl.dfl_build_message(state).data_size, 2)


class TestFedAvg(unittest.TestCase):

    def test_single_client(self):
        out = fedavg.fedavg_server_aggregate([WeightedUpdate(np.array([1.0, 2.0]), 7)])
        assert_allclose(out, [1.0, 2.0])

    def test_size_weights(self):
        updates = [WeightedUpdate(np.array([1.0]), 10), WeightedUpdate(np.array([2.0]), 30),
                   WeightedUpdate(np.array([3.0]), 60)]
        assert_allclose(fedavg.fedavg_server_aggregate(updates), [0.1 + 0.6 + 1.8])

    def test_empty_round_keeps_global(self):
        self.assertIsNone(fedavg.fedavg_server_aggregate([]))
        server = FedAvgServerState(params=as_param_vector([5.0, 5.0]))
        self.assertFalse(fedavg.fedavg_server_finish_round(server))
        assert_array_equal(server.params, [5.0, 5.0])

    def test_round_trip_through_server(self):
        server = FedAvgServerState(params=as_param_vector([0.0, 0.0]))
        fedavg.fedavg_server_on_receive(server, UpdateMessage(0, np.array([2.0, 4.0]), data_size=1))
        fedavg.fedavg_server_on_receive(server, UpdateMessage(1, np.array([4.0, 8.0]), data_size=1))
        self.assertTrue(fedavg.fedavg_server_finish_round(server))
        self.assertEqual(server.buffer, [])
        client = DflState.initial(0, np.zeros(2), 1)
        client = fedavg.fedavg_client_on_receive(client, fedavg.fedavg_build_downlink(server))
        assert_allclose(client.params, [3.0, 6.0])
        self.assertTrue(client.params.flags.writeable)


class TestBase(unittest.TestCase):

    def test_experience_increment(self):
        self.assertEqual(experience_increment(40, 3, "epochs"), 120.0)
        self.assertEqual(experience_increment(40, 3, "literal"), 40.0)
        with self.assertRaises(UsageError):
            experience_increment(40, 3, "minutes")

    def test_message_validation(self):
        with self.assertRaises(UsageError):
            UpdateMessage(0, np.zeros(2), experience=-1.0)
        with self.assertRaises(UsageError):
            UpdateMessage(0, np.array([1.0, math.inf]))

    def test_message_copies_writable_params(self):
        source = np.array([1.0, 2.0])
        msg = UpdateMessage(0, source)
        source[0] = 7.0
        self.assertEqual(msg.params[0], 1.0)


class TestRegistry(unittest.TestCase):

    def setUp(self):
        self.reg = ParadigmRegistry()

    def test_builtin_paradigms(self):
        self.assertEqual(set(self.reg.names()), {"chisme", "gossip", "dfl", "cossimdfl", "fedavg", "local"})

    def test_families(self):
        self.assertEqual(self.reg.require("chisme").family, GOSSIP)
        self.assertEqual(self.reg.require("cossimdfl").family, SYNCHRONOUS)
        self.assertEqual(self.reg.require("fedavg").family, SERVER)
        self.assertEqual(self.reg.require("local").family, ISOLATED)
        self.assertTrue(self.reg.require("cossimdfl").similarity_weighted)

    def test_unknown(self):
        self.assertIsNone(self.reg.get_paradigm("flic"))
        with self.assertRaises(UsageError):
            self.reg.require("flic")


if __name__ == "__main__":
    unittest.main()
