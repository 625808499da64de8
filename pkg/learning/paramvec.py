# learning/paramvec.py
"""
Flat parameter-vector algebra used by every merge and similarity computation.

A ParamVector is a 1-D float64 numpy array. Vectors handed out by this module are
read-only copies; the only writable vectors are the working buffers owned by a
client state, which `interpolate_into` updates in place.

Flattening convention: blocks are concatenated layer by layer, weights before
biases, each block in row-major (C) order.
"""
import math
from typing import List, Sequence, Tuple

import numpy as np

import config
from utils.exceptions import UsageError

ParamVector = np.ndarray


def as_param_vector(values, writable: bool = False) -> ParamVector:
    """Copy `values` into a finite 1-D float64 vector."""
    vec = np.array(values, dtype=np.float64, copy=True)
    if vec.ndim != 1:
        raise UsageError(f"parameter vector must be 1-D, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise UsageError("parameter vector contains NaN or Inf")
    vec.flags.writeable = writable
    return vec


def _frozen(vec: np.ndarray) -> ParamVector:
    vec.flags.writeable = False
    return vec


def _require_same_length(a: np.ndarray, b: np.ndarray, what: str = "operands"):
    if a.shape != b.shape:
        raise UsageError(f"length mismatch between {what}: {a.shape[0]} vs {b.shape[0]}")


def _blocks(length: int, block: int):
    block = max(1, int(block))
    for start in range(0, length, block):
        yield slice(start, min(start + block, length))


def _accurate_dot(a: np.ndarray, b: np.ndarray) -> float:
    return math.fsum(np.multiply(a, b))


def delta(current: ParamVector, prior: ParamVector) -> ParamVector:
    """Elementwise current - prior."""
    _require_same_length(current, prior, "current and prior")
    return _frozen(np.subtract(current, prior))


def _cosine_from_sums(dot: float, norm_a_sq: float, norm_b_sq: float) -> float:
    if norm_a_sq <= 0.0 or norm_b_sq <= 0.0:
        # No direction to compare: neutral similarity.
        return 0.0
    s = dot / math.sqrt(norm_a_sq * norm_b_sq)
    return min(1.0, max(-1.0, s))


def cosine_similarity(a: ParamVector, b: ParamVector) -> float:
    """(a.b)/(|a||b|) clamped to [-1, 1]; 0 when either vector has zero norm."""
    _require_same_length(a, b)
    return _cosine_from_sums(_accurate_dot(a, b), _accurate_dot(a, a), _accurate_dot(b, b))


def scale_similarity(s: float) -> float:
    return (s + 1.0) / 2.0


def scaled_similarity(a: ParamVector, b: ParamVector) -> float:
    """Cosine similarity mapped affinely onto [0, 1]."""
    return scale_similarity(cosine_similarity(a, b))


def blockwise_delta_similarity(current: ParamVector, incoming: ParamVector, checkpoint: ParamVector,
                               block: int = None) -> float:
    """
    Scaled similarity S'(current - checkpoint, incoming - checkpoint) computed block by block,
    so no full-length delta vector is ever allocated.
    """
    _require_same_length(current, checkpoint, "current and checkpoint")
    _require_same_length(incoming, checkpoint, "incoming and checkpoint")
    block = block or config.VECTOR_BLOCK
    dots, norms_a, norms_b = [], [], []
    for s in _blocks(current.shape[0], block):
        d_local = current[s] - checkpoint[s]
        d_remote = incoming[s] - checkpoint[s]
        dots.append(_accurate_dot(d_local, d_remote))
        norms_a.append(_accurate_dot(d_local, d_local))
        norms_b.append(_accurate_dot(d_remote, d_remote))
    return scale_similarity(_cosine_from_sums(math.fsum(dots), math.fsum(norms_a), math.fsum(norms_b)))


def _check_weight(weight: float):
    if not (0.0 <= weight <= 1.0):
        raise UsageError(f"interpolation weight must lie in [0, 1], got {weight}")


def interpolate(local: ParamVector, remote: ParamVector, weight: float) -> ParamVector:
    """(1 - weight) * local + weight * remote."""
    _require_same_length(local, remote, "local and remote")
    _check_weight(weight)
    return _frozen((1.0 - weight) * local + weight * remote)


def interpolate_into(target: np.ndarray, remote: ParamVector, weight: float, block: int = None) -> np.ndarray:
    """In-place blockwise form of `interpolate`; `target` must be a writable owned buffer."""
    _require_same_length(target, remote, "target and remote")
    _check_weight(weight)
    if not target.flags.writeable:
        raise UsageError("interpolate_into needs a writable target buffer")
    if weight == 0.0:
        return target
    keep = 1.0 - weight
    for s in _blocks(target.shape[0], block or config.VECTOR_BLOCK):
        target[s] = keep * target[s] + weight * remote[s]
    return target


def weighted_average(vectors: Sequence[ParamVector], weights: Sequence[float]) -> ParamVector:
    """Sum_k (w_k / sum_j w_j) * v_k over non-negative weights."""
    if len(vectors) != len(weights):
        raise UsageError("weighted_average needs one weight per vector")
    if not vectors:
        raise UsageError("weighted_average of an empty set")
    if any(w < 0 for w in weights):
        raise UsageError("weights must be non-negative")
    total = math.fsum(weights)
    if total <= 0.0:
        raise UsageError("weighted_average with zero total weight")
    out = np.zeros_like(vectors[0], dtype=np.float64)
    for vec, w in zip(vectors, weights):
        _require_same_length(out, vec)
        if w == 0:
            continue
        out += (w / total) * vec
    return _frozen(out)


def flatten_blocks(blocks: Sequence[np.ndarray]) -> ParamVector:
    """Concatenate weight blocks in the documented order into one flat vector."""
    if not blocks:
        return _frozen(np.zeros(0))
    return as_param_vector(np.concatenate([np.asarray(b, dtype=np.float64).ravel() for b in blocks]))


def unflatten_blocks(vector: ParamVector, shapes: Sequence[Tuple[int, ...]]) -> List[np.ndarray]:
    """Split a flat vector back into block views of the given shapes."""
    expected = sum(int(np.prod(shape)) for shape in shapes)
    if vector.shape[0] != expected:
        raise UsageError(f"vector of length {vector.shape[0]} does not match layout of {expected}")
    views, offset = [], 0
    for shape in shapes:
        size = int(np.prod(shape))
        views.append(vector[offset:offset + size].reshape(shape))
        offset += size
    return views
