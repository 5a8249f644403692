"""The five training objectives, one document at a time.

Walks through time-aware masking (expression/signal spans first, ordinary
fill to 15%), the 80-10-10 corruption policy, document-dating labels,
month-set entity replacement, and signal replacement, all driven by one
seeded stream per (document, epoch).
"""

from tempolm import (
    CorpusSpan,
    Granularity,
    Objective,
    SamplingRates,
    TimePoint,
    annotate_document,
    build_entity_calendar,
    build_training_example,
    build_vocab,
)
from tempolm.objectives import SubwordView, example_rng, sample_etamlm
from tempolm.annotate import SpanKind

TEXT = (
    "Before 2006, Tupac Shakur was clear about his plans. "
    "During the 1990s, Mr. Smith played music in 1999. "
    "After 2001, Carol King sang with Bob Dylan on stage."
)

doc = annotate_document("demo", "2007-05-04", TEXT)
vocab = build_vocab([TEXT, "Antonin Scalia Dan Rather"], target_size=256)
calendar = build_entity_calendar([doc])
calendar.add("2007-05", "Antonin Scalia")
calendar.add("2007-05", "Dan Rather")
span = CorpusSpan(
    TimePoint(1987, 1, granularity=Granularity.MONTH),
    TimePoint(2007, 6, granularity=Granularity.MONTH),
)

print("=" * 72)
print("1. Time-aware masking: spans first, then the 15% ordinary fill")
print("=" * 72)
view = SubwordView.build(doc, vocab)
n_expr = len(doc.spans_of_kind(SpanKind.TEMPORAL_EXPRESSION))
n_sig = len(doc.spans_of_kind(SpanKind.TEMPORAL_SIGNAL))
print(f"|expressions| = {n_expr} -> choose ceil(0.3 * {n_expr}) = {-(-3 * n_expr // 10)}")
print(f"|signals|     = {n_sig} -> choose ceil(0.3 * {n_sig}) = {-(-3 * n_sig // 10)}")
decisions = sample_etamlm(view, SamplingRates(), example_rng(7, doc.id, 0))
budget = -(-15 * view.n_content // 100)
print(f"subword length {view.n_content}, budget ceil(0.15 n) = {budget}, "
      f"sampled = {len(decisions)}")
by_source = {}
for d in decisions:
    by_source.setdefault(d.source.value, []).append(d)
for source, ds in sorted(by_source.items()):
    actions = ", ".join(f"{d.position}:{d.action.value}" for d in ds[:6])
    print(f"  {source:12s} x{len(ds):2d}  [{actions}{' ...' if len(ds) > 6 else ''}]")

print()
print("=" * 72)
print("2. One example with all five objectives")
print("=" * 72)
example = build_training_example(
    doc,
    {Objective.ETAMLM, Objective.DD, Objective.TSER, Objective.TSEMLM, Objective.TRWR},
    vocab, span=span, calendar=calendar, seed=7, epoch=0,
)
print(f"input length {len(example.input_ids)} (CLS first: "
      f"{example.input_ids[0] == vocab.cls_id})")
print(f"document-dating target: month class {example.dd_index} "
      f"(2007-05 relative to 1987-01)")
print(f"masked positions: {sorted(example.mlm_targets)}")
for d in example.replacement_targets:
    status = f"replaced by {d.replacement_surface!r}" if d.label else "kept"
    print(f"  {d.source.value:8s} {d.surface!r:18s} -> {status} "
          f"(subwords [{d.sub_start}, {d.sub_end}))")

print()
print("=" * 72)
print("3. Determinism: same (seed, doc, epoch) -> byte-identical example")
print("=" * 72)
again = build_training_example(
    doc,
    {Objective.ETAMLM, Objective.DD, Objective.TSER, Objective.TSEMLM, Objective.TRWR},
    vocab, span=span, calendar=calendar, seed=7, epoch=0,
)
print("identical:", example.input_ids == again.input_ids
      and example.mlm_targets == again.mlm_targets)
fresh = build_training_example(
    doc, {Objective.ETAMLM}, vocab, span=span, calendar=calendar, seed=7, epoch=1,
)
print("new epoch re-samples the masking:",
      sorted(fresh.mlm_targets) != sorted(example.mlm_targets))
