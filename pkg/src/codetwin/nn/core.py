"""Named parameter store, Adam updates, softmax cross-entropy, and a
finite-difference gradient checker.

Parameters live as float32 numpy arrays; losses accumulate in float64.  The
gradient checker runs the supplied loss function on a float64 copy of the
store so the central differences are not drowned by single-precision noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeMismatch


class ParamStore:
    """name -> tensor mapping with per-parameter Adam state.

    The Adam step counter ``t`` is shared across all parameters and
    increments once per adam_update call.
    """

    def __init__(self, dtype=np.float32):
        self.dtype = np.dtype(dtype)
        self.params: dict[str, np.ndarray] = {}
        self.adam_m: dict[str, np.ndarray] = {}
        self.adam_v: dict[str, np.ndarray] = {}
        self.t = 0

    def add(self, name: str, value: np.ndarray) -> None:
        if name in self.params:
            raise ValueError(f"duplicate parameter {name!r}")
        self.params[name] = np.asarray(value, dtype=self.dtype)
        self.adam_m[name] = np.zeros_like(self.params[name])
        self.adam_v[name] = np.zeros_like(self.params[name])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.params[name]

    def __contains__(self, name: str) -> bool:
        return name in self.params

    def names(self) -> list[str]:
        return sorted(self.params)

    def drop(self, name: str) -> None:
        del self.params[name]
        del self.adam_m[name]
        del self.adam_v[name]

    def copy(self, dtype=None) -> "ParamStore":
        """Deep copy of parameter values; Adam state starts fresh."""
        out = ParamStore(dtype or self.dtype)
        for name in self.names():
            out.add(name, self.params[name].astype(out.dtype))
        return out


def init_uniform(rng: np.random.Generator, shape, fan_in: int,
                 dtype=np.float32) -> np.ndarray:
    """Uniform(-r, r) with r = 1/sqrt(fan_in)."""
    r = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-r, r, size=shape).astype(dtype)


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def adam_update(store: ParamStore, grads: dict[str, np.ndarray],
                lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                eps: float = 1e-8) -> None:
    """Standard Adam with bias correction over the named gradients."""
    for name, grad in grads.items():
        if name not in store.params:
            raise ShapeMismatch(f"gradient for unknown parameter {name!r}")
        if grad.shape != store.params[name].shape:
            raise ShapeMismatch(
                f"{name}: gradient shape {grad.shape} != "
                f"parameter shape {store.params[name].shape}")
    store.t += 1
    t = store.t
    for name in sorted(grads):
        g = grads[name].astype(store.dtype, copy=False)
        m = store.adam_m[name]
        v = store.adam_v[name]
        m *= beta1
        m += (1 - beta1) * g
        v *= beta2
        v += (1 - beta2) * g * g
        m_hat = m / (1 - beta1 ** t)
        v_hat = v / (1 - beta2 ** t)
        store.params[name] -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(store.dtype)


def softmax_xent(logits: np.ndarray, target: int):
    """Negative log softmax probability of ``target``; returns (loss, dlogits).

    Stabilized by max subtraction; the loss is accumulated in float64.
    """
    V = logits.shape[0]
    if not 0 <= target < V:
        raise IndexError(f"target {target} out of range for {V} logits")
    z = logits.astype(np.float64)
    z -= z.max()
    ez = np.exp(z)
    p = ez / ez.sum()
    loss = -np.log(p[target])
    dlogits = p.astype(logits.dtype)
    dlogits[target] -= 1
    return loss, dlogits


def softmax_xent_rows(logits: np.ndarray, targets: np.ndarray):
    """Mean cross-entropy over rows; returns (mean loss, dlogits)."""
    T, V = logits.shape
    if np.any(targets < 0) or np.any(targets >= V):
        raise IndexError("target id out of range")
    z = logits.astype(np.float64)
    z -= z.max(axis=1, keepdims=True)
    ez = np.exp(z)
    p = ez / ez.sum(axis=1, keepdims=True)
    rows = np.arange(T)
    loss = -np.log(p[rows, targets]).mean()
    dlogits = p.astype(logits.dtype)
    dlogits[rows, targets] -= 1
    dlogits /= T
    return loss, dlogits


@dataclass
class GradCheckFailure:
    name: str
    index: tuple
    analytic: float
    numeric: float
    rel_error: float


@dataclass
class GradCheckReport:
    max_rel_error: float
    n_checked: int
    tol: float
    failures: list[GradCheckFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tol


def gradient_check(loss_fn, store: ParamStore, eps_fd: float = 1e-5,
                   tol: float = 1e-3, coords_per_tensor: int = 100,
                   rng: np.random.Generator | None = None) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    ``loss_fn(store) -> (loss, grads)`` must be deterministic.  The check
    runs on a float64 copy of the store; up to ``coords_per_tensor``
    coordinates are sampled per tensor.
    """
    rng = rng or np.random.default_rng(0)
    work = store.copy(dtype=np.float64)
    _, grads = loss_fn(work)
    max_rel = 0.0
    n_checked = 0
    failures = []
    for name in work.names():
        if name not in grads:
            continue
        tensor = work.params[name]
        size = tensor.size
        if size <= coords_per_tensor:
            flat_idx = np.arange(size)
        else:
            flat_idx = rng.choice(size, size=coords_per_tensor, replace=False)
        flat = tensor.reshape(-1)
        gflat = np.asarray(grads[name], dtype=np.float64).reshape(-1)
        for j in flat_idx:
            orig = flat[j]
            flat[j] = orig + eps_fd
            lo_plus, _ = loss_fn(work)
            flat[j] = orig - eps_fd
            lo_minus, _ = loss_fn(work)
            flat[j] = orig
            numeric = (lo_plus - lo_minus) / (2 * eps_fd)
            analytic = gflat[j]
            denom = max(abs(analytic), abs(numeric), 1e-6)
            rel = abs(analytic - numeric) / denom
            n_checked += 1
            if rel > max_rel:
                max_rel = rel
            if rel > tol:
                idx = np.unravel_index(j, tensor.shape)
                failures.append(GradCheckFailure(name, tuple(int(v) for v in idx),
                                                 float(analytic), float(numeric),
                                                 float(rel)))
    return GradCheckReport(max_rel_error=max_rel, n_checked=n_checked,
                           tol=tol, failures=failures)
