"""Semantic change scoring between two period corpora.

A word's period representation is the mean over its occurrences of the mean
of its subword states; the change score is the cosine distance between the
two period representations. Scores are evaluated against gold shift indices
with the correlation metrics. Period adaptation uses plain uniform masking
(time-aware masking needs document-level temporal annotation that these
sentence corpora lack).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import autodiff as ad
from .annotate import tokenize_raw
from .encoder import EncoderConfig, Params, collect_grads, encode_forward, multitask_heads, wrap_params
from .errors import MissingOccurrencesError, ParseError
from .finetune import instance_ids
from .metrics import metric_pearson, metric_spearman
from .objectives import MaskAction, apply_mask_policy, example_rng
from .optim import AdamW
from .similarity import cosine_similarity
from .vocab import Vocabulary


def word_representation(
    params: Params,
    config: EncoderConfig,
    vocab: Vocabulary,
    word: str,
    sentences: list[str],
) -> np.ndarray:
    """Mean contextual state of a word over its occurrences (case-folded)."""
    states = []
    target = word.lower()
    for sentence in sentences:
        tokens = tokenize_raw(sentence)
        hits = [i for i, t in enumerate(tokens) if t.text.lower() == target]
        if not hits:
            continue
        ids = [vocab.cls_id]
        ranges = {}
        for i, tok in enumerate(tokens):
            piece = vocab.encode_word(tok.text)
            ranges[i] = (len(ids), len(ids) + len(piece))
            ids.extend(piece)
        ids.append(vocab.sep_id)
        if len(ids) > config.max_len:
            ids = ids[: config.max_len]
        hidden = encode_forward(ids, config, wrap_params(params)).value
        for i in hits:
            a, b = ranges[i]
            if b <= len(ids):
                states.append(hidden[a:b].mean(axis=0))
    if not states:
        raise MissingOccurrencesError(f"{word!r} does not occur in the period corpus")
    return np.mean(states, axis=0)


def semantic_change_score(
    params: Params,
    config: EncoderConfig,
    vocab: Vocabulary,
    word: str,
    sentences_t1: list[str],
    sentences_t2: list[str],
) -> float:
    """Cosine distance between the two period representations, in [0, 2]."""
    rep1 = word_representation(params, config, vocab, word, sentences_t1)
    rep2 = word_representation(params, config, vocab, word, sentences_t2)
    return 1.0 - cosine_similarity(rep1, rep2)


def evaluate_semantic_change(
    params: Params,
    config: EncoderConfig,
    vocab: Vocabulary,
    gold: dict[str, float],
    sentences_t1: list[str],
    sentences_t2: list[str],
) -> tuple[dict[str, float], float, float]:
    """Scores per word plus correlation of scores with the gold indices."""
    scores = {
        word: semantic_change_score(params, config, vocab, word, sentences_t1, sentences_t2)
        for word in sorted(gold)
    }
    words = sorted(gold)
    pearson = metric_pearson([scores[w] for w in words], [gold[w] for w in words])
    spearman = metric_spearman([scores[w] for w in words], [gold[w] for w in words])
    return scores, pearson, spearman


def read_gold_shifts(path: str | Path) -> dict[str, float]:
    """Load a ``word<TAB>shift_index`` gold file."""
    gold: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "\t" not in line:
                raise ParseError("expected word<TAB>shift_index", lineno)
            word, value = line.split("\t", 1)
            try:
                gold[word] = float(value)
            except ValueError:
                raise ParseError(f"bad shift index {value!r}", lineno) from None
    return gold


def adapt_mlm(
    params: Params,
    config: EncoderConfig,
    vocab: Vocabulary,
    sentences: list[str],
    lr: float = 1e-6,
    epochs: int = 1,
    seed: int = 0,
    mask_rate: float = 0.15,
) -> Params:
    """Continual plain-masking adaptation on a period corpus (in place)."""
    optimizer = AdamW(params, lr=lr, weight_decay=0.0)
    for epoch in range(epochs):
        for si, sentence in enumerate(sorted(sentences)):
            rng = example_rng(seed, f"adapt{si}", epoch)
            ids = instance_ids(vocab, sentence, config.max_len)
            content = list(range(1, len(ids) - 1))
            if not content:
                continue
            k = max(1, int(round(mask_rate * len(content))))
            picked = sorted(rng.choice(len(content), size=min(k, len(content)), replace=False).tolist())
            actions = {}
            for idx in picked:
                u = rng.random()
                action = MaskAction.MASK if u < 0.8 else (MaskAction.RANDOM_REPLACE if u < 0.9 else MaskAction.KEEP)
                actions[content[idx]] = action
            corrupted, targets = apply_mask_policy(ids, actions, vocab, rng)
            pvars = wrap_params(params)
            hidden = encode_forward(corrupted, config, pvars)
            positions = sorted(targets)
            heads = multitask_heads(hidden, pvars, mlm_positions=positions)
            loss = ad.cross_entropy(heads["mlm"], np.asarray([targets[p] for p in positions]))
            ad.backward(loss)
            optimizer.step(collect_grads(pvars))
    return params
