"""Desk-scale transformer encoder with multi-task heads.

A standard bidirectional self-attention stack (pre-norm by default,
post-norm selectable in the config) with learned positional embeddings,
plus three linear heads: token prediction at masked positions, time-class
prediction from position 0, and binary replaced/not-replaced prediction
from concatenated span-boundary states. Joint loss is the unweighted sum
of the per-task mean cross-entropies.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Var
from .errors import ConfigError, SequenceTooLongError, SpanBoundsError

Params = dict[str, np.ndarray]


@dataclass(frozen=True)
class EncoderConfig:
    layers: int = 2
    hidden_dim: int = 128
    heads: int = 4
    ffn_dim: int = 256
    max_len: int = 128
    vocab_size: int = 0
    dd_classes: int = 0
    dropout: float = 0.0
    seed: int = 0
    pre_norm: bool = True
    dtype: str = "float32"

    def __post_init__(self):
        if self.hidden_dim % self.heads != 0:
            raise ConfigError(f"hidden_dim {self.hidden_dim} not divisible by heads {self.heads}")
        if self.max_len < 2:
            raise ConfigError("max_len must be >= 2")
        if self.max_len > 512:
            raise ConfigError("max_len is capped at 512")
        if self.dtype not in ("float32", "float64"):
            raise ConfigError(f"dtype must be float32 or float64, got {self.dtype}")

    @property
    def np_dtype(self):
        return np.float32 if self.dtype == "float32" else np.float64

    def to_json(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_json(data: dict) -> "EncoderConfig":
        return EncoderConfig(**data)


# full-scale preset kept for reference; tests use the small default
PRESETS = {
    "desk": EncoderConfig(),
    "base": EncoderConfig(layers=12, hidden_dim=768, heads=12, ffn_dim=3072, max_len=512),
}


def init_params(config: EncoderConfig) -> Params:
    """Deterministic random initialization from the config seed."""
    if config.vocab_size <= 0:
        raise ConfigError("vocab_size must be set before initializing parameters")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    dt = config.np_dtype
    std = 0.02
    h, f, v = config.hidden_dim, config.ffn_dim, config.vocab_size

    params: Params = {}

    def normal(name, shape):
        params[name] = rng.normal(0.0, std, size=shape).astype(dt)

    def zeros(name, shape):
        params[name] = np.zeros(shape, dtype=dt)

    def ones(name, shape):
        params[name] = np.ones(shape, dtype=dt)

    normal("tok_emb", (v, h))
    normal("pos_emb", (config.max_len, h))
    for l in range(config.layers):
        p = f"layer{l}."
        for m in ("wq", "wk", "wv", "wo"):
            normal(p + "attn." + m, (h, h))
            zeros(p + "attn.b" + m[-1], (h,))
        ones(p + "ln1.gamma", (h,))
        zeros(p + "ln1.beta", (h,))
        normal(p + "ffn.w1", (h, f))
        zeros(p + "ffn.b1", (f,))
        normal(p + "ffn.w2", (f, h))
        zeros(p + "ffn.b2", (h,))
        ones(p + "ln2.gamma", (h,))
        zeros(p + "ln2.beta", (h,))
    ones("final_ln.gamma", (h,))
    zeros("final_ln.beta", (h,))
    normal("mlm.w", (h, v))
    zeros("mlm.b", (v,))
    if config.dd_classes > 0:
        normal("dd.w", (h, config.dd_classes))
        zeros("dd.b", (config.dd_classes,))
    normal("repl.w", (2 * h, 2))
    zeros("repl.b", (2,))
    return params


def _attention(x: Var, pv: dict[str, Var], config: EncoderConfig) -> Var:
    n = x.shape[0]
    h, heads = config.hidden_dim, config.heads
    dh = h // heads

    def proj(w, b):
        return ad.add(ad.matmul(x, pv[w]), pv[b])

    def split_heads(t: Var) -> Var:
        return ad.swapaxes(ad.reshape(t, (n, heads, dh)), 0, 1)

    q = split_heads(proj("attn.wq", "attn.bq"))
    k = split_heads(proj("attn.wk", "attn.bk"))
    v = split_heads(proj("attn.wv", "attn.bv"))
    scores = ad.scale(ad.matmul(q, ad.swapaxes(k, 1, 2)), 1.0 / np.sqrt(dh))
    probs = ad.softmax(scores, axis=-1)
    ctx = ad.reshape(ad.swapaxes(ad.matmul(probs, v), 0, 1), (n, h))
    return ad.add(ad.matmul(ctx, pv["attn.wo"]), pv["attn.bo"])


def _ffn(x: Var, pv: dict[str, Var]) -> Var:
    hidden = ad.gelu(ad.add(ad.matmul(x, pv["ffn.w1"]), pv["ffn.b1"]))
    return ad.add(ad.matmul(hidden, pv["ffn.w2"]), pv["ffn.b2"])


def wrap_params(params: Params) -> dict[str, Var]:
    return {name: Var(arr) for name, arr in params.items()}


def encode_forward(
    input_ids: list[int] | np.ndarray,
    config: EncoderConfig,
    pvars: dict[str, Var],
    train: bool = False,
    dropout_rng: np.random.Generator | None = None,
) -> Var:
    """Hidden states (seq_len, hidden_dim) for one id sequence."""
    ids = np.asarray(input_ids, dtype=np.int64)
    n = ids.shape[0]
    if n > config.max_len:
        raise SequenceTooLongError(f"sequence of length {n} exceeds max_len {config.max_len}")
    if n and (ids.min() < 0 or ids.max() >= config.vocab_size):
        raise ConfigError("input id outside vocabulary")

    def maybe_dropout(v: Var) -> Var:
        if train and config.dropout > 0.0:
            if dropout_rng is None:
                raise ConfigError("training with dropout requires a dropout rng")
            return ad.dropout(v, config.dropout, dropout_rng)
        return v

    x = ad.add(ad.gather_rows(pvars["tok_emb"], ids), ad.gather_rows(pvars["pos_emb"], np.arange(n)))
    x = maybe_dropout(x)
    for l in range(config.layers):
        p = f"layer{l}."
        layer = {k[len(p):]: v for k, v in pvars.items() if k.startswith(p)}
        if config.pre_norm:
            a = _attention(ad.layer_norm(x, layer["ln1.gamma"], layer["ln1.beta"]), layer, config)
            x = ad.add(x, maybe_dropout(a))
            f = _ffn(ad.layer_norm(x, layer["ln2.gamma"], layer["ln2.beta"]), layer)
            x = ad.add(x, maybe_dropout(f))
        else:
            a = _attention(x, layer, config)
            x = ad.layer_norm(ad.add(x, maybe_dropout(a)), layer["ln1.gamma"], layer["ln1.beta"])
            f = _ffn(x, layer)
            x = ad.layer_norm(ad.add(x, maybe_dropout(f)), layer["ln2.gamma"], layer["ln2.beta"])
    if config.pre_norm and config.layers > 0:
        x = ad.layer_norm(x, pvars["final_ln.gamma"], pvars["final_ln.beta"])
    return x


def multitask_heads(
    hidden: Var,
    pvars: dict[str, Var],
    mlm_positions: list[int] | None = None,
    replacement_spans: list[tuple[int, int]] | None = None,
    with_dd: bool = False,
) -> dict[str, Var]:
    """Logits for the requested heads.

    ``replacement_spans`` are (first, last) token positions, inclusive, of
    each span; their states are concatenated as the boundary representation.
    A single-token span uses the same state twice.
    """
    n = hidden.shape[0]
    out: dict[str, Var] = {}
    if mlm_positions:
        pos = np.asarray(mlm_positions, dtype=np.int64)
        if pos.min() < 0 or pos.max() >= n:
            raise SpanBoundsError(f"mlm position outside sequence of length {n}")
        states = ad.gather_rows(hidden, pos)
        out["mlm"] = ad.add(ad.matmul(states, pvars["mlm.w"]), pvars["mlm.b"])
    if with_dd:
        cls_state = ad.gather_rows(hidden, np.asarray([0], dtype=np.int64))
        out["dd"] = ad.add(ad.matmul(cls_state, pvars["dd.w"]), pvars["dd.b"])
    if replacement_spans:
        firsts = np.asarray([s[0] for s in replacement_spans], dtype=np.int64)
        lasts = np.asarray([s[1] for s in replacement_spans], dtype=np.int64)
        if firsts.min() < 0 or lasts.max() >= n or (lasts < firsts).any():
            raise SpanBoundsError(f"replacement span outside sequence of length {n}")
        boundary = ad.concat([ad.gather_rows(hidden, firsts), ad.gather_rows(hidden, lasts)], axis=1)
        out["repl"] = ad.add(ad.matmul(boundary, pvars["repl.w"]), pvars["repl.b"])
    return out


def joint_loss(
    heads: dict[str, Var],
    mlm_targets: list[int] | None = None,
    dd_target: int | None = None,
    replacement_labels: list[int] | None = None,
) -> tuple[Var, dict[str, float]]:
    """Unweighted sum of per-task mean cross-entropies; absent tasks add 0."""
    parts: list[Var] = []
    logged: dict[str, float] = {}
    if mlm_targets:
        ce = ad.cross_entropy(heads["mlm"], np.asarray(mlm_targets))
        parts.append(ce)
        logged["mlm"] = float(ce.value)
    if dd_target is not None:
        ce = ad.cross_entropy(heads["dd"], np.asarray([dd_target]))
        parts.append(ce)
        logged["dd"] = float(ce.value)
    if replacement_labels:
        ce = ad.cross_entropy(heads["repl"], np.asarray(replacement_labels))
        parts.append(ce)
        logged["repl"] = float(ce.value)
    if not parts:
        zero = Var(np.asarray(0.0))
        return zero, {}
    total = parts[0] if len(parts) == 1 else ad.add_all(parts)
    logged["total"] = float(total.value)
    return total, logged


def collect_grads(pvars: dict[str, Var], dtype=None) -> Params:
    grads: Params = {}
    for name, var in pvars.items():
        g = var.grad if var.grad is not None else np.zeros_like(var.value)
        grads[name] = g.astype(dtype) if dtype is not None else g
    return grads
