"""BM25 ranking over an ingested corpus, used to attach retrieved context.

Fixed k1 = 1.2 and b = 0.75. The retrieval use case: for an event
description, find the best-matching news article and append its timestamp
and text to the instance, producing the with-retrieved-document variant of
a time-estimation dataset.
"""

from __future__ import annotations

import math
import re
from collections import Counter

from .errors import ConfigError

_WORD_RE = re.compile(r"\w+")


def _terms(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


class BM25:
    def __init__(self, docs: list[str], k1: float = 1.2, b: float = 0.75):
        if not docs:
            raise ConfigError("BM25 needs a non-empty document collection")
        self.k1 = k1
        self.b = b
        self.term_freqs = [Counter(_terms(d)) for d in docs]
        self.doc_lens = [sum(tf.values()) for tf in self.term_freqs]
        self.n_docs = len(docs)
        self.avg_len = sum(self.doc_lens) / self.n_docs
        df: Counter = Counter()
        for tf in self.term_freqs:
            df.update(tf.keys())
        self.idf = {
            t: math.log((self.n_docs - n + 0.5) / (n + 0.5) + 1.0)
            for t, n in df.items()
        }

    def scores(self, query: str) -> list[float]:
        q = _terms(query)
        out = []
        for tf, dl in zip(self.term_freqs, self.doc_lens):
            norm = self.k1 * (1.0 - self.b + self.b * dl / self.avg_len) if self.avg_len else self.k1
            s = 0.0
            for term in q:
                f = tf.get(term)
                if not f:
                    continue
                s += self.idf.get(term, 0.0) * f * (self.k1 + 1.0) / (f + norm)
            out.append(s)
        return out

    def top_k(self, query: str, k: int = 1) -> list[tuple[int, float]]:
        """(doc index, score) pairs, best first; ties go to the lower index."""
        scored = self.scores(query)
        order = sorted(range(self.n_docs), key=lambda i: (-scored[i], i))
        return [(i, scored[i]) for i in order[:k]]


def attach_top_document(
    instances: list[dict],
    corpus_records: list[dict],
) -> list[dict]:
    """Add ``context_timestamp``/``context_text`` from the BM25 top-1 article."""
    ranker = BM25([rec["text"] for rec in corpus_records])
    out = []
    for inst in instances:
        top_idx, _ = ranker.top_k(inst["text"], k=1)[0]
        rec = dict(inst)
        rec["context_timestamp"] = corpus_records[top_idx]["timestamp"]
        rec["context_text"] = corpus_records[top_idx]["text"]
        out.append(rec)
    return out
