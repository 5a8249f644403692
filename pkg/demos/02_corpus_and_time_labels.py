"""Corpus refinement, entity calendars, and calendar-time class labels.

Shows the sentence-level refinement filter, the month-keyed person-entity
calendar, the timestamp <-> class-index mapping at year/month/day
granularity, and the 80:10:10 dataset split.
"""

from tempolm import (
    CorpusSpan,
    Granularity,
    TimeLabel,
    TimePoint,
    annotate_document,
    build_entity_calendar,
    label_to_timepoint,
    refine_document,
    split_dataset,
    timestamp_to_label,
)

print("=" * 72)
print("1. Refinement keeps only sentences with explicit content time")
print("=" * 72)
doc = annotate_document(
    "demo", "2007-05-04",
    "Before 2006, Tupac Shakur quit. No dates in this one. In 1999 he returned.",
)
refined = refine_document(doc)
print(f"sentences before: {len(doc.sentence_bounds)}, after: {len(refined.sentence_bounds)}")
print("kept text:", " ".join(t.text for t in refined.tokens))

undated = annotate_document("undated", "2007-05-04", "Nothing temporal here at all.")
print("document with no temporal references ->", refine_document(undated))

print()
print("=" * 72)
print("2. Monthly person-entity calendar (the replacement pool)")
print("=" * 72)
docs = [
    annotate_document("a", "2007-05-04", "In 2006, Tupac Shakur met Mr. Smith."),
    annotate_document("b", "2007-05-20", "By 2007 Carol King joined."),
    annotate_document("c", "2007-06-02", "After 2001 Dan Rather left."),
]
calendar = build_entity_calendar(docs)
for month, names in sorted(calendar.to_json().items()):
    print(f"  {month}: {names}")

print()
print("=" * 72)
print("3. Calendar time <-> class index, at three granularities")
print("=" * 72)
news_span = CorpusSpan(
    TimePoint(1987, 1, granularity=Granularity.MONTH),
    TimePoint(2007, 6, granularity=Granularity.MONTH),
)
day_span = CorpusSpan(
    TimePoint(1987, 1, 1, granularity=Granularity.DAY),
    TimePoint(2007, 6, 19, granularity=Granularity.DAY),
)
print("month classes over 1987-01..2007-06:   ", news_span.class_count(Granularity.MONTH))
print("day classes over 1987-01-01..2007-06-19:", day_span.class_count(Granularity.DAY))

stamp = TimePoint.parse("2007-05-04")
label = timestamp_to_label(stamp, Granularity.MONTH, news_span)
print(f"2007-05-04 -> month class {label.index} "
      f"(back to {label_to_timepoint(label, news_span).render()})")
print("round trip over all", news_span.class_count(Granularity.MONTH), "month indices:",
      all(
          timestamp_to_label(label_to_timepoint(TimeLabel(Granularity.MONTH, i), news_span),
                             Granularity.MONTH, news_span).index == i
          for i in range(news_span.class_count(Granularity.MONTH))
      ))

print()
print("=" * 72)
print("4. Deterministic 80:10:10 split")
print("=" * 72)
train, val, test = split_dataset(list(range(100)), seed=7)
print(f"sizes: {len(train)}/{len(val)}/{len(test)}")
train7, val7, test7 = split_dataset(list(range(7)), seed=7)
print(f"n=7 floors to: {len(train7)}/{len(val7)}/{len(test7)}")
