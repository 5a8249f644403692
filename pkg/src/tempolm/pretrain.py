"""Joint multi-task pre-training loop.

Examples are generated dynamically per epoch (fresh masking stream per
(document, epoch) pair), losses averaged over the effective batch, and
parameters updated with AdamW. Gradient accumulation walks micro-batches in
a fixed order so results do not depend on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .annotate import AnnotatedDocument
from .corpus import EntityCalendar
from .encoder import (
    EncoderConfig,
    Params,
    collect_grads,
    encode_forward,
    init_params,
    joint_loss,
    multitask_heads,
    wrap_params,
)
from .errors import ConfigError
from .lexicon import SignalLexicon
from .objectives import Objective, SamplingRates, TrainingExample, build_training_example
from .optim import AdamW
from .timescale import CorpusSpan


@dataclass
class PretrainSettings:
    objectives: frozenset[Objective]
    rates: SamplingRates = SamplingRates()
    seed: int = 0
    steps: int = 50
    batch_size: int = 8
    grad_accum: int = 1
    lr: float = 3e-5
    betas: tuple[float, float] = (0.9, 0.999)
    weight_decay: float = 0.01

    def __post_init__(self):
        if not self.objectives:
            raise ConfigError("pre-training requires a non-empty objective set")


@dataclass
class StepLog:
    step: int
    loss: float
    parts: dict[str, float] = field(default_factory=dict)


def example_loss(ex: TrainingExample, config: EncoderConfig, params: Params) -> tuple:
    """Forward pass and joint loss for one example; None when target-free."""
    positions = sorted(ex.mlm_targets)
    spans = [(d.sub_start, d.sub_end - 1) for d in ex.replacement_targets]
    labels = [d.label for d in ex.replacement_targets]
    if not positions and ex.dd_index is None and not spans:
        return None, None, None
    pvars = wrap_params(params)
    hidden = encode_forward(ex.input_ids, config, pvars)
    heads = multitask_heads(
        hidden, pvars,
        mlm_positions=positions or None,
        replacement_spans=spans or None,
        with_dd=ex.dd_index is not None,
    )
    loss, parts = joint_loss(
        heads,
        mlm_targets=[ex.mlm_targets[p] for p in positions] or None,
        dd_target=ex.dd_index,
        replacement_labels=labels or None,
    )
    return loss, parts, pvars


def _example_stream(
    docs: list[AnnotatedDocument],
    settings: PretrainSettings,
    vocab,
    span: CorpusSpan | None,
    calendar: EntityCalendar | None,
    lexicon: SignalLexicon | None,
    max_len: int,
):
    epoch = 0
    while True:
        order_rng = np.random.Generator(np.random.PCG64(hash_order(settings.seed, epoch)))
        for i in order_rng.permutation(len(docs)):
            yield build_training_example(
                docs[int(i)], settings.objectives, vocab,
                span=span, calendar=calendar, lexicon=lexicon,
                rates=settings.rates, seed=settings.seed, epoch=epoch,
                max_len=max_len,
            )
        epoch += 1


def hash_order(seed: int, epoch: int) -> int:
    import hashlib

    digest = hashlib.sha256(f"order|{seed}|{epoch}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def pretrain(
    docs: list[AnnotatedDocument],
    vocab,
    config: EncoderConfig,
    settings: PretrainSettings,
    span: CorpusSpan | None = None,
    calendar: EntityCalendar | None = None,
    lexicon: SignalLexicon | None = None,
    params: Params | None = None,
) -> tuple[Params, AdamW, list[StepLog]]:
    """Run ``settings.steps`` optimizer steps; returns params and loss log."""
    if not docs:
        raise ConfigError("pre-training requires a non-empty corpus")
    if params is None:
        params = init_params(config)
    optimizer = AdamW(params, lr=settings.lr, betas=settings.betas, weight_decay=settings.weight_decay)
    stream = _example_stream(docs, settings, vocab, span, calendar, lexicon, config.max_len)
    logs: list[StepLog] = []
    per_step = settings.batch_size * settings.grad_accum

    for step in range(settings.steps):
        grads: Params = {k: np.zeros_like(v) for k, v in params.items()}
        losses: list[float] = []
        parts_sum: dict[str, float] = {}
        used = 0
        while used < per_step:
            ex = next(stream)
            loss, parts, pvars = example_loss(ex, config, params)
            used += 1
            if loss is None:
                continue
            ad.backward(loss)
            for name, g in collect_grads(pvars).items():
                grads[name] += g
            losses.append(float(loss.value))
            for k, v in parts.items():
                parts_sum[k] = parts_sum.get(k, 0.0) + v
        n_eff = max(len(losses), 1)
        for name in grads:
            grads[name] /= n_eff
        optimizer.step(grads)
        logs.append(StepLog(
            step=step,
            loss=float(np.mean(losses)) if losses else 0.0,
            parts={k: v / n_eff for k, v in parts_sum.items()},
        ))
    return params, optimizer, logs
