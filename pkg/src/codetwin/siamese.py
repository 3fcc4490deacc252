"""Siamese training of the shared-weight encoder on labeled pairs.

The two branches run the same encoder parameters; cosine similarity of the
two embeddings is pushed through a calibrated sigmoid and penalized with a
squared error against the pair label:

    l(s, y) = 1/2 * (y - sigmoid(w*s + b))**2

with w and b trained jointly with the network.  Checkpoint persistence
lives here too.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import encoder as enc
from .encoder import EncoderConfig
from .errors import (FormatError, InsufficientClasses, InsufficientSamples,
                     ShapeMismatch, VocabMismatch, ZeroVector)
from .nn import ParamStore, adam_update, sigmoid

CAL_W = "cal.w"
CAL_B = "cal.b"

_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class Calibration:
    w: float
    b: float


@dataclass(frozen=True)
class PairSample:
    ids_a: list[int]
    ids_b: list[int]
    y: int


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 40
    batch_size: int = 32
    pairs_per_epoch: int = 4000
    learning_rate: float = 1e-3
    seed: int = 0


def init_calibration(store: ParamStore, w: float = 1.0, b: float = 0.0) -> ParamStore:
    """Identity-like start: sigmoid(s) keeps cosine values in a useful range."""
    store.add(CAL_W, np.array([w], dtype=store.dtype))
    store.add(CAL_B, np.array([b], dtype=store.dtype))
    return store


def get_calibration(store: ParamStore) -> Calibration:
    return Calibration(float(store[CAL_W][0]), float(store[CAL_B][0]))


def cosine_similarity(v1: np.ndarray, v2: np.ndarray) -> float:
    n1 = float(np.linalg.norm(v1))
    n2 = float(np.linalg.norm(v2))
    if n1 < _NORM_FLOOR or n2 < _NORM_FLOOR:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float(np.dot(v1.astype(np.float64), v2.astype(np.float64)) / (n1 * n2))


def siamese_loss(s: float, y: int, cal: Calibration) -> float:
    p = sigmoid(cal.w * s + cal.b)
    return 0.5 * (y - p) ** 2


def pair_loss_and_grads(store: ParamStore, cfg: EncoderConfig, pair: PairSample):
    """Loss of one pair plus gradients w.r.t. all shared parameters.

    Gradients from both branches sum into the shared encoder weights.
    """
    h1, ctx1 = enc.encode_forward(store, cfg, pair.ids_a)
    h2, ctx2 = enc.encode_forward(store, cfg, pair.ids_b)
    v1 = h1.astype(np.float64)
    v2 = h2.astype(np.float64)
    n1 = float(np.linalg.norm(v1))
    n2 = float(np.linalg.norm(v2))
    if n1 < _NORM_FLOOR or n2 < _NORM_FLOOR:
        raise ZeroVector("embedding collapsed to the zero vector")
    s = float(np.dot(v1, v2) / (n1 * n2))

    w = float(store[CAL_W][0])
    b = float(store[CAL_B][0])
    p = sigmoid(w * s + b)
    loss = 0.5 * (pair.y - p) ** 2
    dz = (p - pair.y) * p * (1.0 - p)
    ds = dz * w
    dv1 = ds * (v2 / (n1 * n2) - s * v1 / (n1 * n1))
    dv2 = ds * (v1 / (n1 * n2) - s * v2 / (n2 * n2))

    dtype = store.dtype
    grads = enc.encode_backward(ctx1, dv1.astype(dtype))
    for name, g in enc.encode_backward(ctx2, dv2.astype(dtype)).items():
        grads[name] += g
    grads[CAL_W] = np.array([dz * s], dtype=dtype)
    grads[CAL_B] = np.array([dz], dtype=dtype)
    return float(loss), grads, s


def sample_pair_indices(corpus, n_pairs: int, rng: np.random.Generator):
    """Balanced pair index sampling over a labeled corpus.

    Returns tuples ((class_i, sol_i), (class_j, sol_j), y), positives first:
    ceil(n/2) same-class pairs, floor(n/2) cross-class pairs.
    """
    classes = corpus.classes
    if len(classes) < 2:
        raise InsufficientClasses("pair sampling needs at least two classes")
    n_pos = (n_pairs + 1) // 2
    n_neg = n_pairs // 2
    if n_pos > 0:
        for label, solutions in classes:
            if len(solutions) < 2:
                raise InsufficientSamples(
                    f"class {label!r} needs at least two solutions for positive pairs")
    out = []
    for _ in range(n_pos):
        k = int(rng.integers(len(classes)))
        i, j = rng.choice(len(classes[k][1]), size=2, replace=False)
        out.append(((k, int(i)), (k, int(j)), 1))
    for _ in range(n_neg):
        k1, k2 = rng.choice(len(classes), size=2, replace=False)
        i = int(rng.integers(len(classes[k1][1])))
        j = int(rng.integers(len(classes[k2][1])))
        out.append(((int(k1), i), (int(k2), j), 0))
    return out


def sample_pairs(corpus, n_pairs: int, rng: np.random.Generator,
                 to_ids) -> list[PairSample]:
    """Draw balanced PairSamples; ``to_ids`` maps an AST to its id sequence."""
    encoded = [[to_ids(ast) for _, ast in solutions]
               for _, solutions in corpus.classes]
    return [PairSample(encoded[ci][si], encoded[cj][sj], y)
            for (ci, si), (cj, sj), y in sample_pair_indices(corpus, n_pairs, rng)]


def train_epoch(store: ParamStore, cfg: EncoderConfig, tcfg: TrainConfig,
                pairs: list[PairSample], rng: np.random.Generator) -> float:
    """One pass over the pair list; returns the mean pair loss."""
    order = rng.permutation(len(pairs))
    total = 0.0
    for start in range(0, len(order), tcfg.batch_size):
        batch = order[start:start + tcfg.batch_size]
        acc: dict[str, np.ndarray] = {}
        for i in batch:
            loss, grads, _ = pair_loss_and_grads(store, cfg, pairs[i])
            total += loss
            for name, g in grads.items():
                if name in acc:
                    acc[name] += g
                else:
                    acc[name] = g
        for name in acc:
            acc[name] /= len(batch)
        adam_update(store, acc, lr=tcfg.learning_rate)
    return total / len(pairs)


# ---------------------------------------------------------------------------
# Checkpoint persistence


def vocab_fingerprint(vocab_path) -> str:
    with open(vocab_path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _fmt(x) -> str:
    # float32 -> float64 is exact and float64 repr round-trips, so decimal
    # text reproduces the stored bits exactly.
    return repr(float(x))


def save_checkpoint(store: ParamStore, cfg: EncoderConfig, vocab_path, path) -> None:
    cal = get_calibration(store) if CAL_W in store else Calibration(1.0, 0.0)
    lines = [
        "codetwin-checkpoint v1",
        f"config vocab_size={cfg.vocab_size} embed_dim={cfg.embed_dim} "
        f"hidden_dim={cfg.hidden_dim} max_len={cfg.max_len}",
        f"calibration w={_fmt(cal.w)} b={_fmt(cal.b)}",
        f"vocab_sha256 {vocab_fingerprint(vocab_path)}",
    ]
    for name in store.names():
        tensor = store[name]
        shape = "x".join(str(d) for d in tensor.shape)
        lines.append(f"tensor {name} {shape}")
        lines.append(" ".join(_fmt(x) for x in tensor.reshape(-1)))
    lines.append("end")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_checkpoint(path, vocab_path=None):
    """Restore (store, config); verifies the vocab fingerprint when given."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "codetwin-checkpoint v1":
        raise FormatError("missing codetwin-checkpoint v1 header")
    if len(lines) < 5 or lines[-1] != "end":
        raise FormatError("checkpoint truncated (missing 'end' marker)")
    try:
        cfg_fields = dict(kv.split("=") for kv in lines[1].split()[1:])
        cfg = EncoderConfig(vocab_size=int(cfg_fields["vocab_size"]),
                            embed_dim=int(cfg_fields["embed_dim"]),
                            hidden_dim=int(cfg_fields["hidden_dim"]),
                            max_len=int(cfg_fields["max_len"]))
        cal_fields = dict(kv.split("=") for kv in lines[2].split()[1:])
        float(cal_fields["w"]), float(cal_fields["b"])
        fingerprint = lines[3].split()[1]
    except (KeyError, ValueError, IndexError) as exc:
        raise FormatError(f"malformed checkpoint header: {exc}") from exc
    if vocab_path is not None and vocab_fingerprint(vocab_path) != fingerprint:
        raise VocabMismatch("checkpoint was trained against a different vocabulary")

    store = ParamStore()
    pos = 4
    while pos < len(lines) and lines[pos] != "end":
        parts = lines[pos].split()
        if len(parts) != 3 or parts[0] != "tensor" or pos + 1 >= len(lines):
            raise FormatError(f"line {pos + 1}: expected a tensor record")
        name = parts[1]
        shape = tuple(int(d) for d in parts[2].split("x"))
        values = np.array([float(v) for v in lines[pos + 1].split()],
                          dtype=np.float32)
        if values.size != int(np.prod(shape)):
            raise FormatError(f"tensor {name}: value count does not match shape")
        store.add(name, values.reshape(shape))
        pos += 2
    _check_checkpoint_shapes(store, cfg)
    return store, cfg


def _check_checkpoint_shapes(store: ParamStore, cfg: EncoderConfig) -> None:
    hd = cfg.hidden_dim
    expected = {
        enc.EMBED: (cfg.vocab_size, cfg.embed_dim),
        enc.WX: (4 * hd, cfg.embed_dim),
        enc.WH: (4 * hd, hd),
        enc.BIAS: (4 * hd,),
    }
    for name, shape in expected.items():
        if name not in store:
            raise ShapeMismatch(f"checkpoint is missing tensor {name!r}")
        if store[name].shape != shape:
            raise ShapeMismatch(
                f"{name}: shape {store[name].shape} inconsistent with config {shape}")
