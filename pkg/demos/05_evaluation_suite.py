"""The evaluation harness end to end on a toy model.

Fine-tunes a year classifier on a leakage dataset, reports ACC/MAE against
the random-guess baseline, runs zero-shot similarity ranking, estimates a
month (start, end) time scope, scores semantic change between two period
corpora, and attaches BM25-retrieved context to event descriptions.
"""

from tempolm import Granularity, Objective, annotate_document, build_entity_calendar, build_vocab
from tempolm.bm25 import attach_top_document
from tempolm.checkpoint import EncoderCheckpoint
from tempolm.corpus import derive_corpus_span, refine_corpus, split_dataset
from tempolm.datasets import record_to_instance
from tempolm.encoder import EncoderConfig
from tempolm.finetune import finetune_classifier
from tempolm.metrics import metric_acc, metric_mae, random_guess_baseline, two_tailed_ttest
from tempolm.pretrain import PretrainSettings, pretrain
from tempolm.semchange import semantic_change_score
from tempolm.similarity import estimate_time_scope, year_vocabulary, zero_shot_similarity
from tempolm.synth import generate_corpus, generate_event_instances
from tempolm.timescale import CorpusSpan, TimePoint

print("preparing a toy pre-trained model (a minute or so)...")
records = generate_corpus(160, start_year=1999, end_year=2002, month_of_year=1,
                          seed=5, datelines_per_year=5, compact_banks=True)
docs = list(refine_corpus(
    annotate_document(r["id"], r["timestamp"], r["text"]) for r in records
))
span = derive_corpus_span(docs)
calendar = build_entity_calendar(docs)
vocab = build_vocab([r["text"] for r in records], target_size=400)
config = EncoderConfig(
    layers=2, hidden_dim=64, heads=4, ffn_dim=128, max_len=64,
    vocab_size=vocab.size, dd_classes=span.class_count(Granularity.MONTH), seed=1,
)
settings = PretrainSettings(
    objectives=frozenset({Objective.ETAMLM, Objective.DD, Objective.TSER}),
    seed=3, steps=250, batch_size=16, lr=3e-3,
)
params, _, _ = pretrain(docs, vocab, config, settings, span=span, calendar=calendar)
checkpoint = EncoderCheckpoint(config=config, vocab=vocab, params=params, step=250)

print()
print("=" * 72)
print("1. Fine-tuned year classification vs the random-guess baseline")
print("=" * 72)
year_span = CorpusSpan(
    TimePoint(1999, granularity=Granularity.YEAR), TimePoint(2002, granularity=Granularity.YEAR)
)
events = generate_event_instances(120, start_year=1999, end_year=2002, seed=21)
instances = [record_to_instance(r, Granularity.YEAR, year_span) for r in events]
train, val, test = split_dataset(instances, seed=4)
model = finetune_classifier(checkpoint, train, val, n_classes=4, grid=((16, 1e-3, 6),), seed=2)
preds = [model.predict(inst.full_text()) for inst in test]
golds = [inst.gold.index for inst in test]
print(f"fine-tuned:   ACC {metric_acc(preds, golds):6.2f}  MAE {metric_mae(preds, golds):5.2f}")
rg = random_guess_baseline(4, golds, trials=1000, seed=0)
print(f"random guess: ACC {rg.acc:6.2f}  MAE {rg.mae:5.2f}  (1000 trials)")

print()
print("=" * 72)
print("2. Five-run averaging and the two-tailed Welch t-test")
print("=" * 72)
accs_a, accs_b = [], []
for offset in range(3):
    m = finetune_classifier(checkpoint, train, val, 4, grid=((16, 1e-3, 2),), seed=10 + offset)
    accs_a.append(metric_acc([m.predict(i.full_text()) for i in test], golds))
    m = finetune_classifier(checkpoint, train, val, 4, grid=((16, 2e-4, 1),), seed=10 + offset)
    accs_b.append(metric_acc([m.predict(i.full_text()) for i in test], golds))
t, p = two_tailed_ttest(accs_a, accs_b)
print(f"runs A {accs_a} vs runs B {accs_b}: t = {t:.2f}, p = {p:.4f}")

print()
print("=" * 72)
print("3. Zero-shot similarity over a year vocabulary")
print("=" * 72)
vocabulary = year_vocabulary(1999, 2002)
for ev in events[:3]:
    ranking = zero_shot_similarity(params, config, vocab, ev["text"], vocabulary)
    pretty = ", ".join(f"{tp.year}:{sim:.3f}" for tp, sim in ranking)
    print(f"  {ev['text']!r:48s} gold {ev['time']} -> {pretty}")

print()
print("=" * 72)
print("4. Month (start, end) time-scope estimation")
print("=" * 72)
monthly = generate_event_instances(100, start_year=1999, end_year=2002, seed=31, monthly=True)
m_instances = [
    record_to_instance(r, Granularity.MONTH,
                       CorpusSpan(TimePoint(1999, 1, granularity=Granularity.MONTH),
                                  TimePoint(2002, 12, granularity=Granularity.MONTH)))
    for r in monthly
]
m_train, m_val, m_test = split_dataset(m_instances, seed=5)
month_span = CorpusSpan(
    TimePoint(1999, 1, granularity=Granularity.MONTH),
    TimePoint(2002, 12, granularity=Granularity.MONTH),
)
month_model = finetune_classifier(checkpoint, m_train, m_val, n_classes=48,
                                  grid=((16, 1e-3, 4),), seed=2)
for inst in m_test[:3]:
    start, end = estimate_time_scope(month_model, inst.full_text(), month_span)
    print(f"  {inst.text!r:52s} -> scope ({start.render()}, {end.render()})")

print()
print("=" * 72)
print("5. Semantic change: identical contexts score 0, shifted contexts more")
print("=" * 72)
t1 = ["the plane was a flat surface for drawing", "the chairman presided over the board"]
t2 = ["the plane flew over the field", "the chairman presided over the board"]
for word in ("plane", "chairman"):
    score = semantic_change_score(params, config, vocab, word, t1, t2)
    print(f"  cos_dist({word!r}) = {score:.4f}")

print()
print("=" * 72)
print("6. BM25 context retrieval for with-document variants")
print("=" * 72)
enriched = attach_top_document(
    [{"text": events[0]["text"], "time": events[0]["time"]}],
    records,
)
print(f"  event: {enriched[0]['text']!r}")
print(f"  top-1 article ({enriched[0]['context_timestamp']}): "
      f"{enriched[0]['context_text'][:60]!r}...")
