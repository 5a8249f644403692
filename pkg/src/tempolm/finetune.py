"""Time-classification fine-tuning with grid search.

A softmax head over the position-0 state is appended to a pre-trained
encoder and the whole model is trained with cross-entropy. Hyperparameters
are selected by grid search on validation accuracy; ties resolve to the
earlier grid point, so selection is deterministic under a fixed seed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import autodiff as ad
from .checkpoint import EncoderCheckpoint
from .encoder import EncoderConfig, Params, collect_grads, encode_forward, wrap_params
from .errors import ConfigError
from .optim import AdamW
from .timescale import TimeLabel
from .vocab import Vocabulary


@dataclass(frozen=True)
class LabeledInstance:
    """A text with a gold time label; optionally a retrieved context."""

    text: str
    gold: TimeLabel
    context_timestamp: str | None = None
    context_text: str | None = None

    def full_text(self) -> str:
        if self.context_text is None:
            return self.text
        stamp = f" {self.context_timestamp}" if self.context_timestamp else ""
        return f"{self.text}{stamp} {self.context_text}"


DEFAULT_GRID: tuple[tuple[int, float, int], ...] = tuple(
    (bs, lr, ep) for bs, lr, ep in product((16, 32), (2e-5, 5e-5), (5, 10, 15))
)


def instance_ids(vocab: Vocabulary, text: str, max_len: int) -> list[int]:
    from .annotate import tokenize_raw

    ids = [vocab.cls_id]
    for tok in tokenize_raw(text):
        ids.extend(vocab.encode_word(tok.text))
    ids.append(vocab.sep_id)
    return ids[:max_len]


@dataclass
class FinetunedModel:
    config: EncoderConfig
    vocab: Vocabulary
    params: Params           # encoder weights plus cls.w / cls.b head
    n_classes: int
    selected: tuple[int, float, int] | None = None
    val_acc: float | None = None

    def predict_proba(self, text: str) -> np.ndarray:
        pvars = wrap_params(self.params)
        ids = instance_ids(self.vocab, text, self.config.max_len)
        hidden = encode_forward(ids, self.config, pvars)
        cls_state = ad.gather_rows(hidden, np.asarray([0]))
        logits = ad.add(ad.matmul(cls_state, pvars["cls.w"]), pvars["cls.b"]).value[0]
        z = logits - logits.max()
        e = np.exp(z)
        return e / e.sum()

    def predict(self, text: str) -> int:
        return int(np.argmax(self.predict_proba(text)))


def _finetune_rng(seed: int, tag: str) -> np.random.Generator:
    digest = hashlib.sha256(f"finetune|{seed}|{tag}".encode()).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "little")))


def _train_one(
    base_params: Params,
    config: EncoderConfig,
    vocab: Vocabulary,
    train_ids: list[list[int]],
    train_golds: list[int],
    n_classes: int,
    batch_size: int,
    lr: float,
    epochs: int,
    seed: int,
) -> Params:
    params = {k: v.copy() for k, v in base_params.items()}
    head_rng = _finetune_rng(seed, "head")
    params["cls.w"] = head_rng.normal(0.0, 0.02, size=(config.hidden_dim, n_classes)).astype(config.np_dtype)
    params["cls.b"] = np.zeros(n_classes, dtype=config.np_dtype)
    optimizer = AdamW(params, lr=lr, weight_decay=0.01)
    n = len(train_ids)
    for epoch in range(epochs):
        order = _finetune_rng(seed, f"order{epoch}").permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            grads = {k: np.zeros_like(v) for k, v in params.items()}
            losses = []
            for i in batch:
                pvars = wrap_params(params)
                hidden = encode_forward(train_ids[int(i)], config, pvars)
                cls_state = ad.gather_rows(hidden, np.asarray([0]))
                logits = ad.add(ad.matmul(cls_state, pvars["cls.w"]), pvars["cls.b"])
                loss = ad.cross_entropy(logits, np.asarray([train_golds[int(i)]]))
                ad.backward(loss)
                for name, g in collect_grads(pvars).items():
                    grads[name] += g
                losses.append(float(loss.value))
            for name in grads:
                grads[name] /= max(len(batch), 1)
            optimizer.step(grads)
    return params


def _accuracy(model: FinetunedModel, instances: list[LabeledInstance]) -> float:
    if not instances:
        return 0.0
    correct = sum(1 for inst in instances if model.predict(inst.full_text()) == inst.gold.index)
    return 100.0 * correct / len(instances)


def finetune_classifier(
    checkpoint: EncoderCheckpoint,
    train: list[LabeledInstance],
    val: list[LabeledInstance],
    n_classes: int,
    grid: tuple[tuple[int, float, int], ...] = DEFAULT_GRID,
    seed: int = 0,
) -> FinetunedModel:
    """Grid search (batch size, learning rate, epochs) on validation ACC."""
    if not train:
        raise ConfigError("fine-tuning requires a non-empty training set")
    if n_classes < 1:
        raise ConfigError("n_classes must be >= 1")
    config = checkpoint.config
    vocab = checkpoint.vocab
    train_ids = [instance_ids(vocab, inst.full_text(), config.max_len) for inst in train]
    train_golds = [inst.gold.index for inst in train]
    if any(g >= n_classes for g in train_golds):
        raise ConfigError("gold label outside the class range")

    best: FinetunedModel | None = None
    for combo_idx, (batch_size, lr, epochs) in enumerate(grid):
        params = _train_one(
            checkpoint.params, config, vocab, train_ids, train_golds,
            n_classes, batch_size, lr, epochs, seed,
        )
        model = FinetunedModel(config, vocab, params, n_classes, (batch_size, lr, epochs))
        model.val_acc = _accuracy(model, val)
        if best is None or model.val_acc > best.val_acc:
            best = model
    return best
