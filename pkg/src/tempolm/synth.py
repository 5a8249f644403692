"""Deterministic synthetic news-style corpora for desk-scale runs.

Real news archives cannot ship with the package, so the training sanity
checks, the demos, and the statistics suites run on generated articles:
short dated sentences with embedded years, month names, temporal signals,
and person names drawn from small banks. Generation is a pure function of
the seed.
"""

from __future__ import annotations

import numpy as np

FIRST_NAMES = (
    "Alice", "Brian", "Carla", "David", "Elena", "Frank", "Grace", "Hugo",
    "Irene", "Jonas", "Karen", "Louis", "Marta", "Nolan", "Olga", "Peter",
    "Quinn", "Rosa", "Samuel", "Tessa",
)
LAST_NAMES = (
    "Abbott", "Barnes", "Chavez", "Dillon", "Ellis", "Foster", "Guzman",
    "Harris", "Ibarra", "Jensen", "Keller", "Lowell", "Marsh", "Norton",
    "Osborn", "Pratt",
)
NOUNS = ("treaty", "summit", "election", "merger", "strike", "festival", "launch", "inquiry")
VERBS = ("announced", "opened", "disputed", "celebrated", "reviewed", "concluded")
MONTH_NAMES = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)


_FULL_BANKS = (NOUNS, VERBS, FIRST_NAMES, LAST_NAMES)
# repetitive variant: low token entropy, so short training runs converge fast
_COMPACT_BANKS = (NOUNS[:4], VERBS[:3], FIRST_NAMES[:8], LAST_NAMES[:6])


def _person(rng: np.random.Generator, banks) -> str:
    _, _, first, last = banks
    return f"{first[int(rng.integers(len(first)))]} {last[int(rng.integers(len(last)))]}"


def _sentence(rng: np.random.Generator, year: int, month: int, dated: bool, banks) -> str:
    nouns, verbs, _, _ = banks
    noun = nouns[int(rng.integers(len(nouns)))]
    verb = verbs[int(rng.integers(len(verbs)))]
    person = _person(rng, banks)
    if not dated:
        return f"The {noun} was {verb} by {person} without fanfare."
    style = int(rng.integers(4))
    if style == 0:
        return f"In {year}, {person} {verb} the {noun}."
    if style == 1:
        return f"Before {year}, the {noun} of {MONTH_NAMES[month - 1]} {year} drew {person}."
    if style == 2:
        return f"{person} {verb} the {noun} during {MONTH_NAMES[month - 1]} {year}."
    return f"The {noun} was {verb} by {person} in {year}."


def generate_corpus(
    n_docs: int,
    start_year: int = 1987,
    end_year: int = 2007,
    seed: int = 0,
    sentences_per_doc: int = 3,
    undated_sentence_rate: float = 0.0,
    month_of_year: int | None = None,
    datelines_per_year: int = 0,
    compact_banks: bool = False,
) -> list[dict]:
    """Raw ingestion records with years cycling over the given range.

    ``month_of_year`` pins every timestamp to one calendar month (useful
    when each year should map to a single month class); otherwise months
    cycle deterministically. ``datelines_per_year`` adds very short
    date-line articles ("1994 ."), which keep bare time mentions inside
    the training distribution. ``compact_banks`` draws from much smaller
    word banks, giving a highly repetitive corpus.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    banks = _COMPACT_BANKS if compact_banks else _FULL_BANKS
    years = list(range(start_year, end_year + 1))
    records = []
    for i in range(n_docs):
        year = years[i % len(years)]
        month = month_of_year if month_of_year is not None else (i // len(years)) % 12 + 1
        day = int(rng.integers(1, 28))
        sentences = []
        for _ in range(sentences_per_doc):
            dated = rng.random() >= undated_sentence_rate
            sentences.append(_sentence(rng, year, month, dated, banks))
        records.append({
            "id": f"syn-{i:05d}",
            "timestamp": f"{year:04d}-{month:02d}-{day:02d}",
            "text": " ".join(sentences),
        })
    dateline_styles = ("{year} .", "In {year} .", "{month_name} {year} .")
    for year in years:
        month = month_of_year if month_of_year is not None else 1
        for j in range(datelines_per_year):
            style = dateline_styles[j % len(dateline_styles)]
            records.append({
                "id": f"syn-date-{year}-{j}",
                "timestamp": f"{year:04d}-{month:02d}-01",
                "text": style.format(year=year, month_name=MONTH_NAMES[month - 1]),
            })
    return records


def generate_event_instances(
    n_events: int,
    start_year: int = 1987,
    end_year: int = 2007,
    seed: int = 100,
    monthly: bool = False,
) -> list[dict]:
    """Event descriptions whose gold time appears verbatim in the text."""
    rng = np.random.Generator(np.random.PCG64(seed))
    years = list(range(start_year, end_year + 1))
    records = []
    for i in range(n_events):
        year = years[i % len(years)]
        noun = NOUNS[int(rng.integers(len(NOUNS)))]
        verb = VERBS[int(rng.integers(len(VERBS)))]
        if monthly:
            month = (i // len(years)) % 12 + 1
            records.append({
                "text": f"The {noun} was {verb} during {MONTH_NAMES[month - 1]} {year}.",
                "time": f"{year:04d}-{month:02d}",
            })
        else:
            records.append({
                "text": f"The {noun} was {verb} in {year}.",
                "time": f"{year:04d}",
            })
    return records
