"""Minimal reverse-mode automatic differentiation over numpy arrays.

Forward passes build a graph of ``Var`` nodes; ``backward`` walks it once in
reverse topological order with a fixed traversal, so gradient accumulation
order is deterministic. Only the operations the encoder needs are provided;
each op's adjoint is written out by hand and validated against central
finite differences in the test suite.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


class Var:
    """A graph node holding a value and, after backward, its gradient."""

    __slots__ = ("value", "grad", "parents", "backward_fn")

    def __init__(
        self,
        value: np.ndarray,
        parents: Sequence["Var"] = (),
        backward_fn: Callable[[np.ndarray], Sequence[np.ndarray | None]] | None = None,
    ):
        self.value = np.asarray(value)
        self.grad: np.ndarray | None = None
        self.parents = tuple(parents)
        self.backward_fn = backward_fn

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a: Var, b: Var) -> Var:
    out = a.value + b.value
    return Var(out, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def mul(a: Var, b: Var) -> Var:
    out = a.value * b.value
    return Var(
        out,
        (a, b),
        lambda g: (_unbroadcast(g * b.value, a.shape), _unbroadcast(g * a.value, b.shape)),
    )


def scale(a: Var, s: float) -> Var:
    return Var(a.value * s, (a,), lambda g: (g * s,))


def matmul(a: Var, b: Var) -> Var:
    out = a.value @ b.value

    def backward(g):
        ga = g @ np.swapaxes(b.value, -1, -2)
        gb = np.swapaxes(a.value, -1, -2) @ g
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return Var(out, (a, b), backward)


def swapaxes(a: Var, ax1: int, ax2: int) -> Var:
    return Var(np.swapaxes(a.value, ax1, ax2), (a,), lambda g: (np.swapaxes(g, ax1, ax2),))


def reshape(a: Var, shape: tuple[int, ...]) -> Var:
    old = a.value.shape
    return Var(a.value.reshape(shape), (a,), lambda g: (g.reshape(old),))


def gather_rows(table: Var, indices: np.ndarray) -> Var:
    """Row lookup (embeddings, position selection); scatter-add adjoint."""
    indices = np.asarray(indices)

    def backward(g):
        gt = np.zeros_like(table.value)
        np.add.at(gt, indices, g)
        return (gt,)

    return Var(table.value[indices], (table,), backward)


def concat(parts: Sequence[Var], axis: int = -1) -> Var:
    sizes = [p.value.shape[axis] for p in parts]
    out = np.concatenate([p.value for p in parts], axis=axis)

    def backward(g):
        return tuple(np.split(g, np.cumsum(sizes)[:-1], axis=axis))

    return Var(out, tuple(parts), backward)


def gelu(a: Var) -> Var:
    # tanh approximation and its exact derivative
    x = a.value
    c = np.sqrt(2.0 / np.pi).astype(x.dtype) if hasattr(x, "dtype") else np.sqrt(2.0 / np.pi)
    inner = c * (x + 0.044715 * x**3)
    t = np.tanh(inner)
    out = 0.5 * x * (1.0 + t)

    def backward(g):
        dinner = c * (1.0 + 3 * 0.044715 * x**2)
        dt = (1.0 - t**2) * dinner
        return (g * (0.5 * (1.0 + t) + 0.5 * x * dt),)

    return Var(out, (a,), backward)


def layer_norm(x: Var, gamma: Var, beta: Var, eps: float = 1e-5) -> Var:
    """Normalization over the last axis with learned scale and shift."""
    mu = x.value.mean(axis=-1, keepdims=True)
    xc = x.value - mu
    var = (xc**2).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    out = xhat * gamma.value + beta.value
    d = x.value.shape[-1]

    def backward(g):
        gg = g * gamma.value
        gx = inv * (
            gg
            - gg.mean(axis=-1, keepdims=True)
            - xhat * (gg * xhat).mean(axis=-1, keepdims=True)
        )
        ggamma = _unbroadcast(g * xhat, gamma.shape)
        gbeta = _unbroadcast(g, beta.shape)
        return gx, ggamma, gbeta

    return Var(out, (x, gamma, beta), backward)


def softmax(a: Var, axis: int = -1) -> Var:
    z = a.value - a.value.max(axis=axis, keepdims=True)
    e = np.exp(z)
    s = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        dot = (g * s).sum(axis=axis, keepdims=True)
        return (s * (g - dot),)

    return Var(s, (a,), backward)


def dropout(a: Var, rate: float, rng: np.random.Generator) -> Var:
    if rate <= 0.0:
        return a
    keep = (rng.random(a.value.shape) >= rate).astype(a.value.dtype) / (1.0 - rate)
    return Var(a.value * keep, (a,), lambda g: (g * keep,))


def cross_entropy(logits: Var, targets: np.ndarray) -> Var:
    """Mean cross-entropy of integer targets against logit rows."""
    targets = np.asarray(targets, dtype=np.int64)
    z = logits.value - logits.value.max(axis=-1, keepdims=True)
    logsumexp = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    logp = z - logsumexp
    k = targets.shape[0]
    loss = -logp[np.arange(k), targets].mean()

    def backward(g):
        probs = np.exp(logp)
        probs[np.arange(k), targets] -= 1.0
        return (g * probs / k,)

    return Var(np.asarray(loss, dtype=logits.value.dtype), (logits,), backward)


def add_all(parts: Sequence[Var]) -> Var:
    out = parts[0].value
    for p in parts[1:]:
        out = out + p.value
    return Var(out, tuple(parts), lambda g: tuple(g for _ in parts))


def backward(root: Var) -> None:
    """Accumulate gradients of ``root`` (a scalar) into every reachable Var."""
    topo: list[Var] = []
    seen: set[int] = set()
    stack: list[tuple[Var, bool]] = [(root, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))

    root.grad = np.ones_like(root.value)
    for node in reversed(topo):
        if node.backward_fn is None or node.grad is None:
            continue
        grads = node.backward_fn(node.grad)
        for parent, g in zip(node.parents, grads):
            if g is None:
                continue
            if parent.grad is None:
                parent.grad = g.copy() if isinstance(g, np.ndarray) else np.asarray(g)
            else:
                parent.grad = parent.grad + g
