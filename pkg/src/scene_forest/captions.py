"""Rule-based parser turning spatial captions into support triplets.

The accepted grammar is closed: the only relations are "on" and "on top of",
clauses join with "and" / ";" / ".", and plural subjects ("X and Y are on Z")
are distributed. Matching is case-insensitive; determiners and adjectives
before a known label are ignored (the head noun is the last token of each
noun phrase).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import AmbiguousReference, MalformedSentence, UnknownObject
from .model import ObjectInstance, SpatialPredicate, SpatialTriplet, canonicalize_id

_VERB_RE = re.compile(r"\b(is|are)\b", re.IGNORECASE)
_PRED_RE = re.compile(r"\s*on(\s+top\s+of)?\b", re.IGNORECASE)
_AND_RE = re.compile(r"\band\b", re.IGNORECASE)
_SENTENCE_RE = re.compile(r"[^.;]+")

_DETERMINERS = {"the", "a", "an"}
_ORDINAL_WORDS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
    "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10,
}


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    span: tuple[int, int]
    message: str


def grammar_productions() -> list[str]:
    """The closed set of sentence patterns the parser accepts."""
    return [
        "<NP> is on <NP>",
        "<NP> is on top of <NP>",
        "<NP> and <NP> are on <NP>",
        "<NP> and <NP> are on top of <NP>",
        'sentence conjunction with "and", ";" or "."',
    ]


def resolve_reference(phrase: str, registry: list[ObjectInstance]) -> str:
    """Resolve a noun phrase to the unique matching registry id.

    The head noun is the last token after stripping determiners and
    punctuation. An exact id match wins; otherwise the label must match a
    single object, or carry an ordinal disambiguator ("the second cup").
    """
    tokens = [t for t in re.split(r"[\s,]+", phrase.strip().lower()) if t]
    tokens = [t.strip(".,;:!?\"'") for t in tokens]
    tokens = [t for t in tokens if t]
    while tokens and tokens[0] in _DETERMINERS:
        tokens.pop(0)
    ordinal = None
    if tokens and tokens[0] in _ORDINAL_WORDS:
        ordinal = _ORDINAL_WORDS[tokens.pop(0)]
    if not tokens:
        raise UnknownObject(f"empty reference in {phrase!r}")
    head = tokens[-1]

    by_id = {o.id: o for o in registry}
    if head in by_id:
        return head
    candidates = sorted(o.id for o in registry if o.label.lower() == head)
    if not candidates:
        raise UnknownObject(f"no object matches {head!r}")
    if ordinal is not None:
        try:
            canonical = canonicalize_id(head, ordinal)
        except Exception:
            canonical = None
        if canonical in candidates:
            return canonical
        if ordinal <= len(candidates):
            return candidates[ordinal - 1]
        raise UnknownObject(f"no {ordinal}-th object labeled {head!r}")
    if len(candidates) > 1:
        raise AmbiguousReference(
            f"{head!r} matches {len(candidates)} objects: {', '.join(candidates)}"
        )
    return candidates[0]


def _parse_clauses(sentence: str, base: int):
    """Yield (subject_phrases, predicate, object_phrase, span) per clause."""
    verbs = list(_VERB_RE.finditer(sentence))
    if not verbs:
        raise MalformedSentence(
            f"no supported relation in {sentence.strip()!r}",
            span=(base, base + len(sentence)),
        )
    clause_start = 0
    for i, verb in enumerate(verbs):
        subject_text = sentence[clause_start:verb.start()]
        pred = _PRED_RE.match(sentence, verb.end())
        if not pred:
            raise MalformedSentence(
                f"expected 'on' or 'on top of' after {verb.group(0)!r}",
                span=(base + verb.start(), base + verb.end()),
            )
        predicate = (
            SpatialPredicate.ON_TOP_OF if pred.group(1) else SpatialPredicate.ON
        )
        region_end = verbs[i + 1].start() if i + 1 < len(verbs) else len(sentence)
        region = sentence[pred.end():region_end]
        if i + 1 < len(verbs):
            # Object NPs never contain "and"; the first one starts the next clause.
            cut = _AND_RE.search(region)
            if not cut:
                raise MalformedSentence(
                    "missing clause boundary before next relation",
                    span=(base + pred.end(), base + region_end),
                )
            object_text = region[:cut.start()]
            clause_start = pred.end() + cut.end()
        else:
            object_text = region
        if verb.group(0).lower() == "are":
            subjects = [
                piece
                for part in _AND_RE.split(subject_text)
                for piece in part.split(",")
            ]
        else:
            subjects = [subject_text]
        subjects = [s.strip() for s in subjects if s.strip()]
        object_text = object_text.strip()
        if not subjects or not object_text:
            raise MalformedSentence(
                f"incomplete relation in {sentence.strip()!r}",
                span=(base + verb.start(), base + verb.end()),
            )
        span = (base + verb.start(), base + min(region_end, len(sentence)))
        yield subjects, predicate, object_text, span


def parse_caption_with_diagnostics(
    caption: str, registry: list[ObjectInstance]
) -> tuple[list[SpatialTriplet], list[ParseDiagnostic]]:
    """Parse a caption into triplets, collecting warning diagnostics.

    Duplicate relations within one caption are deduplicated with a warning.
    Errors (unknown object, ambiguous reference, malformed sentence) raise.
    """
    text = caption
    if not text.strip():
        raise MalformedSentence("caption is empty", span=(0, len(text)))
    triplets: list[SpatialTriplet] = []
    diagnostics: list[ParseDiagnostic] = []
    seen: set[tuple[str, str]] = set()
    for sentence_match in _SENTENCE_RE.finditer(text):
        sentence = sentence_match.group(0)
        if not sentence.strip():
            continue
        base = sentence_match.start()
        for subjects, predicate, object_text, span in _parse_clauses(sentence, base):
            support = resolve_reference(object_text, registry)
            for subject_phrase in subjects:
                subject = resolve_reference(subject_phrase, registry)
                if subject == support:
                    raise MalformedSentence(
                        f"{subject!r} cannot rest on itself", span=span
                    )
                key = (subject, support)
                if key in seen:
                    diagnostics.append(
                        ParseDiagnostic(
                            severity="warning",
                            span=span,
                            message=f"duplicate relation {subject} -> {support}",
                        )
                    )
                    continue
                seen.add(key)
                triplets.append(
                    SpatialTriplet(subject=subject, predicate=predicate, support=support)
                )
    return triplets, diagnostics


def parse_caption(caption: str, registry: list[ObjectInstance]) -> list[SpatialTriplet]:
    """Parse a caption into support triplets, in textual order."""
    triplets, _ = parse_caption_with_diagnostics(caption, registry)
    return triplets
