# learning/datagen.py
"""
Synthetic heterogeneous client data.

- label_swap: Gaussian blobs shared by every client; each group relabels its samples with
  its own label transpositions, so groups disagree on P(y | x).
- regression: every group has its own ground-truth weights w_g = w_base + shift_g.
- natural: per-group feature offsets plus per-client label-prior skew, a softer, "naturally
  incongruent" setting.

Clients are assigned to groups round-robin (client i -> group i % n_groups).
"""
import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from learning.models import Dataset
from utils import streams
from utils.exceptions import ScenarioError, UsageError

SCENARIO_KINDS = ("label_swap", "regression", "natural")
BLOB_RADIUS = 3.0

SwapPair = Tuple[int, int]


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str = "label_swap"
    n_clients: int = 20
    n_groups: int = 2
    samples_mean: int = 40
    samples_spread: float = 0.5
    input_dim: int = 8
    n_classes: int = 4
    output_dim: int = 1
    swap_pairs: Optional[Tuple[Tuple[SwapPair, ...], ...]] = None   # per group; None -> default structure
    group_shift: float = 1.0
    noise: float = 0.1
    blob_std: float = 1.0                  # per-coordinate std of the class blobs
    eval_fraction: float = 0.25
    label_skew: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ScenarioError(f"unknown scenario kind '{self.kind}'")
        if self.n_clients < 1 or self.n_groups < 1:
            raise ScenarioError("n_clients and n_groups must be positive")
        if self.n_groups > self.n_clients:
            raise ScenarioError("n_groups cannot exceed n_clients")
        if self.samples_mean < 1:
            raise ScenarioError("samples_mean must be positive")
        if not (0.0 <= self.samples_spread < 1.0):
            raise ScenarioError("samples_spread must lie in [0, 1)")
        if not (0.0 < self.eval_fraction < 1.0):
            raise ScenarioError("eval_fraction must lie in (0, 1)")
        smallest = size_bounds(self.samples_mean, self.samples_spread)[0]
        if not split_is_valid(smallest, self.eval_fraction):
            raise ScenarioError(f"clients may get as few as {smallest} samples, which cannot be split into "
                                f"train and eval at eval_fraction={self.eval_fraction}")
        if self.input_dim < 1 or self.output_dim < 1:
            raise ScenarioError("input_dim and output_dim must be positive")
        if self.kind != "regression" and self.n_classes < 2:
            raise ScenarioError("classification scenarios need at least 2 classes")
        if self.kind == "label_swap" and self.input_dim < 2:
            raise ScenarioError("label_swap blobs live in the first two input dimensions")
        if self.group_shift < 0 or self.noise < 0 or self.label_skew <= 0 or self.blob_std <= 0:
            raise ScenarioError("group_shift and noise must be >= 0, label_skew and blob_std > 0")
        if self.swap_pairs is not None:
            normalized = tuple(tuple(tuple(int(c) for c in pair) for pair in group) for group in self.swap_pairs)
            object.__setattr__(self, "swap_pairs", normalized)

    @property
    def task(self) -> str:
        return "regression" if self.kind == "regression" else "classification"

    @property
    def model_output_dim(self) -> int:
        return self.output_dim if self.kind == "regression" else self.n_classes

    def group_of(self, client_id: int) -> int:
        return client_id % self.n_groups

    def resolved_swap_pairs(self) -> Tuple[Tuple[SwapPair, ...], ...]:
        """Explicit per-group swaps, or the default: group g swaps (2g, 2g + 1)."""
        if self.swap_pairs is not None:
            if len(self.swap_pairs) != self.n_groups:
                raise ScenarioError(f"swap_pairs lists {len(self.swap_pairs)} groups, expected {self.n_groups}")
            pairs = self.swap_pairs
        elif self.n_groups == 1:
            pairs = ((),)
        else:
            pairs = tuple(((2 * g, 2 * g + 1),) for g in range(self.n_groups))
        for group in pairs:
            for pair in group:
                _validate_pair(pair, self.n_classes)
        return pairs


@dataclass(frozen=True, eq=False)
class ClientDataset:
    client_id: int
    group_id: int
    train: Dataset
    eval: Dataset
    ground_truth: Optional[np.ndarray] = field(default=None)   # regression scenarios only


def _validate_pair(pair: Sequence[int], n_classes: int):
    if len(pair) != 2:
        raise ScenarioError(f"swap pair {tuple(pair)} must have exactly two labels")
    a, b = pair
    if a == b or not (0 <= a < n_classes) or not (0 <= b < n_classes):
        raise ScenarioError(f"invalid swap pair {tuple(pair)} for {n_classes} classes")


def swap_label_map(n_classes: int, pairs: Sequence[SwapPair]) -> np.ndarray:
    """Relabeling table obtained by applying each transposition in order."""
    mapping = np.arange(n_classes)
    for pair in pairs:
        _validate_pair(pair, n_classes)
        a, b = pair
        ia, ib = np.where(mapping == a)[0], np.where(mapping == b)[0]
        mapping[ia], mapping[ib] = b, a
    return mapping


def apply_label_swaps(labels: np.ndarray, pairs: Sequence[SwapPair], n_classes: int) -> np.ndarray:
    return swap_label_map(n_classes, pairs)[np.asarray(labels, dtype=np.int64)]


def blob_centers(n_classes: int, input_dim: int) -> np.ndarray:
    """Class c sits on a circle of radius 3 in the first two input dimensions."""
    angles = 2.0 * np.pi * np.arange(n_classes) / n_classes
    centers = np.zeros((n_classes, input_dim))
    centers[:, 0] = BLOB_RADIUS * np.cos(angles)
    centers[:, 1] = BLOB_RADIUS * np.sin(angles)
    return centers


def size_bounds(samples_mean: int, samples_spread: float) -> Tuple[int, int]:
    low = max(1, math.ceil(samples_mean * (1.0 - samples_spread) - 1e-9))
    high = max(low, math.floor(samples_mean * (1.0 + samples_spread) + 1e-9))
    return low, high


def client_sizes(config: ScenarioConfig) -> List[int]:
    """Per-client sample counts, uniform over samples_mean * [1 - spread, 1 + spread]."""
    low, high = size_bounds(config.samples_mean, config.samples_spread)
    rng = streams.stream(config.seed, "sizes")
    return [int(v) for v in rng.integers(low, high + 1, size=config.n_clients)]


def train_count(n: int, eval_fraction: float) -> int:
    return math.ceil(round((1.0 - eval_fraction) * n, 9))


def split_is_valid(n: int, eval_fraction: float) -> bool:
    """True when n samples leave both sides of the split non-empty."""
    return n >= 2 and 1 <= train_count(n, eval_fraction) < n


def split_train_eval(data: Dataset, eval_fraction: float, seed: int) -> Tuple[Dataset, Dataset]:
    """Disjoint split into ceil((1 - f) n) training samples and the remainder for evaluation."""
    if not (0.0 < eval_fraction < 1.0):
        raise UsageError("eval_fraction must lie in (0, 1)")
    n = data.size
    if n < 2:
        raise UsageError("need at least 2 samples to split")
    n_train = train_count(n, eval_fraction)
    if not split_is_valid(n, eval_fraction):
        raise UsageError(f"split of {n} samples at eval_fraction={eval_fraction} leaves an empty side")
    order = streams.stream(seed, "split").permutation(n)
    return data.subset(np.sort(order[:n_train])), data.subset(np.sort(order[n_train:]))


def _finish(config: ScenarioConfig, client_id: int, data: Dataset,
            ground_truth: Optional[np.ndarray] = None) -> ClientDataset:
    train, held_out = split_train_eval(data, config.eval_fraction, streams.derive_seed(config.seed, "split", client_id))
    return ClientDataset(client_id, config.group_of(client_id), train, held_out, ground_truth)


def _blob_samples(rng: np.random.Generator, centers: np.ndarray, labels: np.ndarray, std: float) -> np.ndarray:
    return centers[labels] + std * rng.standard_normal((labels.shape[0], centers.shape[1]))


def generate_label_swap_scenario(config: ScenarioConfig) -> List[ClientDataset]:
    if config.kind != "label_swap":
        raise ScenarioError(f"expected a label_swap config, got '{config.kind}'")
    pairs = config.resolved_swap_pairs()
    centers = blob_centers(config.n_classes, config.input_dim)
    clients = []
    for client_id, size in enumerate(client_sizes(config)):
        rng = streams.stream(config.seed, "samples", client_id)
        labels = rng.integers(0, config.n_classes, size=size)
        inputs = _blob_samples(rng, centers, labels, config.blob_std)
        targets = apply_label_swaps(labels, pairs[config.group_of(client_id)], config.n_classes)
        clients.append(_finish(config, client_id, Dataset(inputs, targets)))
    return clients


def group_weights(config: ScenarioConfig) -> List[np.ndarray]:
    """Ground-truth weights per group: w_base + shift_g with |shift_g| = group_shift."""
    rng = streams.stream(config.seed, "ground_truth")
    base = rng.standard_normal((config.input_dim, config.output_dim))
    weights = []
    for _ in range(config.n_groups):
        direction = rng.standard_normal(base.shape)
        direction /= np.linalg.norm(direction)
        weights.append(base + config.group_shift * direction)
    return weights


def generate_regression_scenario(config: ScenarioConfig) -> List[ClientDataset]:
    if config.kind != "regression":
        raise ScenarioError(f"expected a regression config, got '{config.kind}'")
    weights = group_weights(config)
    clients = []
    for client_id, size in enumerate(client_sizes(config)):
        rng = streams.stream(config.seed, "samples", client_id)
        w = weights[config.group_of(client_id)]
        inputs = rng.standard_normal((size, config.input_dim))
        targets = inputs @ w + config.noise * rng.standard_normal((size, config.output_dim))
        clients.append(_finish(config, client_id, Dataset(inputs, targets), ground_truth=w.copy()))
    return clients


def generate_natural_scenario(config: ScenarioConfig) -> List[ClientDataset]:
    if config.kind != "natural":
        raise ScenarioError(f"expected a natural config, got '{config.kind}'")
    centers = blob_centers(config.n_classes, max(2, config.input_dim))[:, :config.input_dim]
    style_rng = streams.stream(config.seed, "styles")
    styles = []
    for _ in range(config.n_groups):
        direction = style_rng.standard_normal(config.input_dim)
        styles.append(config.group_shift * direction / np.linalg.norm(direction))
    clients = []
    for client_id, size in enumerate(client_sizes(config)):
        rng = streams.stream(config.seed, "samples", client_id)
        prior = rng.dirichlet(np.full(config.n_classes, config.label_skew))
        labels = rng.choice(config.n_classes, size=size, p=prior)
        inputs = _blob_samples(rng, centers, labels, config.blob_std) + styles[config.group_of(client_id)]
        clients.append(_finish(config, client_id, Dataset(inputs, labels)))
    return clients


SCENARIO_GENERATORS: Dict[str, Callable[[ScenarioConfig], List[ClientDataset]]] = {
    "label_swap": generate_label_swap_scenario,
    "regression": generate_regression_scenario,
    "natural": generate_natural_scenario,
}


def generate_scenario(config: ScenarioConfig) -> List[ClientDataset]:
    return SCENARIO_GENERATORS[config.kind](config)


def scenario_digest(clients: Sequence[ClientDataset]) -> str:
    h = hashlib.md5()
    for client in clients:
        h.update(f"{client.client_id}:{client.group_id}:".encode("utf-8"))
        h.update(client.train.digest().encode("utf-8"))
        h.update(client.eval.digest().encode("utf-8"))
    return h.hexdigest()
