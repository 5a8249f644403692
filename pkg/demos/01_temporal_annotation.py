"""Temporal annotation walkthrough.

Tokenize a news-style paragraph, tag temporal expressions, temporal
signals, and person entities, and show how sentence splitting and the
signal lexicon shape the result.
"""

from tempolm import SignalLexicon, SpanKind, annotate_document, tokenize_raw
from tempolm.annotate import split_sentences

TEXT = (
    "Before 2006, Mr. Smith was a clear voice in rap music. "
    "His career took off during the 1990s, when Tupac Shakur topped the charts. "
    "On May 4, 2007 he returned to the stage. "
    "Nothing about this sentence mentions a date."
)

print("=" * 72)
print("1. Tokenization (offsets index into the original text)")
print("=" * 72)
tokens = tokenize_raw(TEXT)
print([t.text for t in tokens][:14], "...")
print(f"{len(tokens)} tokens; first token covers chars "
      f"[{tokens[0].char_start}, {tokens[0].char_end})")

print()
print("=" * 72)
print("2. Sentence splitting (abbreviation-aware: 'Mr.' does not split)")
print("=" * 72)
for start, end in split_sentences(tokens):
    print(f"  tokens [{start:3d}, {end:3d}):",
          " ".join(t.text for t in tokens[start:end])[:60], "...")

print()
print("=" * 72)
print("3. Full annotation: expressions, signals, persons")
print("=" * 72)
doc = annotate_document("demo-1", "2007-05-04", TEXT)
for kind in SpanKind:
    print(f"\n{kind.value} spans:")
    for span in doc.spans_of_kind(kind):
        extra = ""
        if span.relation:
            extra = f"  relation={span.relation.value}"
        if span.normalized:
            extra = f"  normalized={span.normalized.render()} ({span.normalized.granularity.value})"
        print(f"  {span.surface!r:24s} tokens [{span.token_start}, {span.token_end}){extra}")

print()
print("=" * 72)
print("4. The signal lexicon is a data file you can replace")
print("=" * 72)
lexicon = SignalLexicon.default()
for phrase in ("before", "prior to", "after", "during", "in"):
    print(f"  {phrase!r:12s} -> {lexicon.classify(phrase).value}")
print("\nBare prepositions like 'in' are tagged only right before a")
print("temporal expression, so ordinary uses ('in the house') stay clean.")
