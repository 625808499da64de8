# learning/models.py
"""
Desk-scale trainable models: linear regression, softmax classifier and a one-hidden-layer
tanh MLP, trained with plain mini-batch SGD on flat parameter vectors.

Parameter layout (see learning/paramvec.py): layer by layer, weights (fan_in x fan_out,
row-major) before biases.
"""
import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Type

import numpy as np

from learning.paramvec import ParamVector, flatten_blocks, unflatten_blocks
from utils import streams
from utils.exceptions import TrainingError, UsageError

MODEL_KINDS = ("linear-regression", "softmax-classifier", "mlp-1hidden")
MLP_HEADS = ("softmax", "linear")


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    input_dim: int
    output_dim: int
    hidden_dim: int = 16
    head: str = "softmax"       # mlp-1hidden only

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise UsageError(f"unknown model kind '{self.kind}'")
        for name in ("input_dim", "output_dim", "hidden_dim"):
            if int(getattr(self, name)) < 1:
                raise UsageError(f"{name} must be a positive integer")
        if self.head not in MLP_HEADS:
            raise UsageError(f"unknown mlp head '{self.head}'")
        if self.kind == "softmax-classifier" and self.output_dim < 2:
            raise UsageError("softmax-classifier needs at least 2 classes")

    @property
    def task(self) -> str:
        if self.kind == "linear-regression":
            return "regression"
        if self.kind == "softmax-classifier":
            return "classification"
        return "classification" if self.head == "softmax" else "regression"

    @property
    def block_shapes(self) -> List[Tuple[int, ...]]:
        if self.kind == "mlp-1hidden":
            return [(self.input_dim, self.hidden_dim), (self.hidden_dim,),
                    (self.hidden_dim, self.output_dim), (self.output_dim,)]
        return [(self.input_dim, self.output_dim), (self.output_dim,)]

    @property
    def param_count(self) -> int:
        return int(sum(np.prod(shape) for shape in self.block_shapes))


@dataclass(frozen=True)
class Hyperparams:
    learning_rate: float = 0.1
    batch_size: int = 16
    epochs: int = 3             # beta

    def __post_init__(self):
        # A zero learning rate is accepted as the frozen-model limit; config files require > 0.
        if not self.learning_rate >= 0:
            raise UsageError("learning_rate must be non-negative")
        if self.batch_size < 1 or self.epochs < 1:
            raise UsageError("batch_size and epochs must be positive integers")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Integer targets are class indices; float targets are regression vectors (n, output_dim)."""
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype=np.float64, copy=True)
        if inputs.ndim == 1:
            inputs = inputs.reshape(-1, 1)
        targets = np.array(self.targets, copy=True)
        if np.issubdtype(targets.dtype, np.integer):
            targets = targets.astype(np.int64).ravel()
        else:
            targets = targets.astype(np.float64)
            if targets.ndim == 1:
                targets = targets.reshape(-1, 1)
        if inputs.shape[0] != targets.shape[0]:
            raise UsageError(f"dataset has {inputs.shape[0]} inputs but {targets.shape[0]} targets")
        inputs.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    @property
    def size(self) -> int:
        return int(self.inputs.shape[0])

    @property
    def is_classification(self) -> bool:
        return np.issubdtype(self.targets.dtype, np.integer)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.inputs[indices], self.targets[indices])

    def digest(self) -> str:
        h = hashlib.md5()
        h.update(np.ascontiguousarray(self.inputs).tobytes())
        h.update(np.ascontiguousarray(self.targets).tobytes())
        return h.hexdigest()

    def __len__(self) -> int:
        return self.size


class Model(ABC):
    """A model kind bound to a ModelSpec. Stateless: parameters travel as flat vectors."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec

    # --- layout ---
    def _views(self, params: np.ndarray) -> List[np.ndarray]:
        if params.shape != (self.spec.param_count,):
            raise UsageError(f"expected {self.spec.param_count} parameters, got {params.shape[0]}")
        return unflatten_blocks(params, self.spec.block_shapes)

    def init_params(self, seed: int) -> ParamVector:
        """Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weight blocks, zero biases."""
        rng = streams.stream(seed, "init")
        blocks = []
        for shape in self.spec.block_shapes:
            if len(shape) == 2:
                bound = 1.0 / np.sqrt(shape[0])
                blocks.append(rng.uniform(-bound, bound, size=shape))
            else:
                blocks.append(np.zeros(shape))
        return flatten_blocks(blocks)

    # --- losses ---
    def _head(self, z: np.ndarray, targets: np.ndarray, need_grad: bool) -> Tuple[float, Optional[np.ndarray]]:
        n = z.shape[0]
        if self.spec.task == "classification":
            shifted = z - z.max(axis=1, keepdims=True)
            log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
            log_probs = shifted - log_norm
            loss = float(-log_probs[np.arange(n), targets].mean())
            if not need_grad:
                return loss, None
            dz = np.exp(log_probs)
            dz[np.arange(n), targets] -= 1.0
            return loss, dz / n
        # Squared error summed over outputs, averaged over samples.
        residual = z - targets
        loss = float(np.sum(residual ** 2) / n)
        if not need_grad:
            return loss, None
        return loss, 2.0 * residual / n

    def _check_data(self, data: Dataset):
        if data.size == 0:
            raise UsageError("empty dataset")
        if data.inputs.shape[1] != self.spec.input_dim:
            raise UsageError(f"dataset input_dim {data.inputs.shape[1]} != model input_dim {self.spec.input_dim}")
        if self.spec.task == "classification":
            if not data.is_classification:
                raise UsageError("classifier needs integer class targets")
            if data.targets.min() < 0 or data.targets.max() >= self.spec.output_dim:
                raise UsageError("class index out of range for model output_dim")
        else:
            if data.is_classification or data.targets.shape[1] != self.spec.output_dim:
                raise UsageError("regression needs float targets of width output_dim")

    @abstractmethod
    def _forward(self, blocks: List[np.ndarray], x: np.ndarray) -> Tuple[np.ndarray, tuple]:
        """Return output pre-activations and a cache for `_backward`."""
        pass

    @abstractmethod
    def _backward(self, blocks: List[np.ndarray], cache: tuple, dz: np.ndarray) -> List[np.ndarray]:
        """Return gradient blocks in layout order."""
        pass

    def loss_and_gradient(self, params: ParamVector, inputs: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
        blocks = self._views(params)
        z, cache = self._forward(blocks, inputs)
        loss, dz = self._head(z, targets, need_grad=True)
        grads = self._backward(blocks, cache, dz)
        return loss, np.concatenate([g.ravel() for g in grads])

    def predict(self, params: ParamVector, inputs: np.ndarray) -> np.ndarray:
        z, _ = self._forward(self._views(params), np.asarray(inputs, dtype=np.float64))
        if self.spec.task == "classification":
            return np.argmax(z, axis=1)
        return z

    def evaluate(self, params: ParamVector, data: Dataset) -> float:
        """Mean per-sample loss (cross-entropy or squared error)."""
        self._check_data(data)
        z, _ = self._forward(self._views(params), data.inputs)
        loss, _ = self._head(z, data.targets, need_grad=False)
        return max(0.0, loss)

    def train(self, params: ParamVector, data: Dataset, hyper: Hyperparams, seed: int,
              writable: bool = False) -> ParamVector:
        """
        beta epochs of mini-batch SGD; the mini-batch order is reshuffled each epoch from (seed, epoch).
        The input vector is never mutated. With writable=True the caller receives the fresh working
        buffer itself, for client states that merge into their parameters in place.
        """
        self._check_data(data)
        work = np.array(params, dtype=np.float64, copy=True)
        self._views(work)
        n = data.size
        for epoch in range(hyper.epochs):
            order = streams.stream(seed, "epoch", epoch).permutation(n)
            for start in range(0, n, hyper.batch_size):
                idx = order[start:start + hyper.batch_size]
                _, grad = self.loss_and_gradient(work, data.inputs[idx], data.targets[idx])
                work -= hyper.learning_rate * grad
        if not np.all(np.isfinite(work)):
            raise TrainingError("training diverged to non-finite parameters; lower the learning rate")
        work.flags.writeable = writable
        return work


class AffineModel(Model):
    """z = x W + b; the head (squared error or softmax) comes from the model's task."""

    def _forward(self, blocks, x):
        weights, bias = blocks
        return x @ weights + bias, (x,)

    def _backward(self, blocks, cache, dz):
        (x,) = cache
        return [x.T @ dz, dz.sum(axis=0)]


class LinearRegression(AffineModel):
    pass


class SoftmaxClassifier(AffineModel):
    pass


class TanhMLP(Model):
    """One tanh hidden layer followed by a linear output layer."""

    def _forward(self, blocks, x):
        w1, b1, w2, b2 = blocks
        hidden = np.tanh(x @ w1 + b1)
        return hidden @ w2 + b2, (x, hidden)

    def _backward(self, blocks, cache, dz):
        _, _, w2, _ = blocks
        x, hidden = cache
        d_hidden = (dz @ w2.T) * (1.0 - hidden ** 2)
        return [x.T @ d_hidden, d_hidden.sum(axis=0), hidden.T @ dz, dz.sum(axis=0)]


MODEL_REGISTRY: Dict[str, Type[Model]] = {
    "linear-regression": LinearRegression,
    "softmax-classifier": SoftmaxClassifier,
    "mlp-1hidden": TanhMLP,
}


def build_model(spec: ModelSpec) -> Model:
    return MODEL_REGISTRY[spec.kind](spec)


def init_params(spec: ModelSpec, seed: int) -> ParamVector:
    return build_model(spec).init_params(seed)


def train(spec: ModelSpec, params: ParamVector, data: Dataset, hyper: Hyperparams, seed: int,
          writable: bool = False) -> ParamVector:
    return build_model(spec).train(params, data, hyper, seed, writable=writable)


def evaluate(spec: ModelSpec, params: ParamVector, data: Dataset) -> float:
    return build_model(spec).evaluate(params, data)
