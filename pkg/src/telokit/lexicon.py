"""Per-language lexicalization layer: synsets, senses and lexical gaps.

Each synset binds a non-empty ordered word list and a gloss to exactly one
concept GID; a lexical gap marks a concept that a language cannot name but
still describes with a gloss. For one (language, concept) pair at most one
of {synset, gap} exists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .concepts import ConceptCore
from .errors import (
    EmptyGloss,
    EmptyWordList,
    SynsetExists,
    UnknownConcept,
    UnknownLanguage,
)

_ISO3 = re.compile(r"^[a-z]{3}$")

FUZZY_THRESHOLD = 0.6
PREFIX_BONUS = 0.1


class LanguageKind:
    NATURAL = "NATURAL"
    DOMAIN = "DOMAIN"


@dataclass(frozen=True)
class LanguageId:
    iso3: str
    kind: str = LanguageKind.NATURAL
    prefix: str = ""

    def __post_init__(self):
        if not _ISO3.match(self.iso3):
            raise ValueError(f"iso3 code must match [a-z]{{3}}, got {self.iso3!r}")
        if self.kind == LanguageKind.DOMAIN and not self.prefix:
            raise ValueError("domain language requires a namespace prefix")
        if self.kind == LanguageKind.NATURAL and self.prefix:
            raise ValueError("natural language carries no prefix")

    @property
    def key(self) -> str:
        """Stable identifier, also used as the per-language file stem."""
        if self.kind == LanguageKind.DOMAIN:
            return f"{self.iso3}-{self.prefix}"
        return self.iso3

    @classmethod
    def natural(cls, iso3: str) -> "LanguageId":
        return cls(iso3=iso3)

    @classmethod
    def domain(cls, iso3: str, prefix: str) -> "LanguageId":
        return cls(iso3=iso3, kind=LanguageKind.DOMAIN, prefix=prefix)

    @classmethod
    def from_key(cls, key: str) -> "LanguageId":
        if "-" in key:
            iso3, prefix = key.split("-", 1)
            return cls.domain(iso3, prefix)
        return cls.natural(key)


@dataclass(frozen=True)
class Synset:
    local_id: int
    language: LanguageId
    words: tuple[str, ...]
    gloss: str
    examples: tuple[str, ...]
    concept: int

    def sense_rank(self, word: str) -> int | None:
        """1-based rank of a word within this synset, None if absent."""
        lowered = word.casefold()
        for i, w in enumerate(self.words, start=1):
            if w.casefold() == lowered:
                return i
        return None


@dataclass(frozen=True)
class LexicalGap:
    language: LanguageId
    concept: int
    gloss: str


@dataclass(frozen=True)
class LookupHit:
    gid: int
    entry: Synset | LexicalGap
    score: float

    @property
    def is_gap(self) -> bool:
        return isinstance(self.entry, LexicalGap)


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def word_score(query: str, word: str, fuzzy: bool) -> float:
    """Match score in [0, 1]; 0 means no match.

    Exact casefolded equality scores 1.0. With fuzzy enabled, normalized
    Levenshtein similarity with a prefix bonus (capped below 1.0) is used,
    cut off below FUZZY_THRESHOLD.
    """
    q = query.casefold()
    w = word.casefold()
    if q == w:
        return 1.0
    if not fuzzy:
        return 0.0
    sim = 1.0 - levenshtein(q, w) / max(len(q), len(w))
    if w.startswith(q) or q.startswith(w):
        sim = min(sim + PREFIX_BONUS, 0.99)
    return sim if sim >= FUZZY_THRESHOLD else 0.0


class Lexicon:
    """All language cores of one store, keyed by LanguageId."""

    def __init__(self, core: ConceptCore):
        self._core = core
        self._languages: dict[str, LanguageId] = {}
        # per language: concept gid -> Synset / LexicalGap
        self._synsets: dict[str, dict[int, Synset]] = {}
        self._gaps: dict[str, dict[int, LexicalGap]] = {}
        self._next_local: dict[str, int] = {}

    # -- languages -----------------------------------------------------------

    def add_language(self, language: LanguageId) -> LanguageId:
        key = language.key
        if key not in self._languages:
            self._languages[key] = language
            self._synsets[key] = {}
            self._gaps[key] = {}
            self._next_local[key] = 1
        return self._languages[key]

    def languages(self) -> list[LanguageId]:
        return [self._languages[k] for k in sorted(self._languages)]

    def has_language(self, language: LanguageId) -> bool:
        return language.key in self._languages

    def _lang_key(self, language: LanguageId) -> str:
        key = language.key
        if key not in self._languages:
            raise UnknownLanguage(key)
        return key

    # -- synsets and gaps ----------------------------------------------------

    def upsert_synset(self, language: LanguageId, concept: int, words: list[str],
                      gloss: str = "", examples: list[str] | None = None) -> Synset:
        key = self._lang_key(language)
        if concept not in self._core:
            raise UnknownConcept(concept)
        if not words or not all(w.strip() for w in words):
            raise EmptyWordList(f"synset for concept {concept} needs at least one word")
        existing = self._synsets[key].get(concept)
        if existing is not None:
            local_id = existing.local_id  # stable across replacement
        else:
            local_id = self._next_local[key]
            self._next_local[key] += 1
        synset = Synset(
            local_id=local_id,
            language=self._languages[key],
            words=tuple(words),
            gloss=gloss,
            examples=tuple(examples or ()),
            concept=concept,
        )
        self._synsets[key][concept] = synset
        self._gaps[key].pop(concept, None)  # synset and gap are mutually exclusive
        return synset

    def mark_lexical_gap(self, language: LanguageId, concept: int, gloss: str) -> LexicalGap:
        key = self._lang_key(language)
        if concept not in self._core:
            raise UnknownConcept(concept)
        if concept in self._synsets[key]:
            raise SynsetExists(key, concept)
        if not gloss.strip():
            raise EmptyGloss(f"lexical gap for concept {concept} needs a gloss")
        gap = LexicalGap(self._languages[key], concept, gloss)
        self._gaps[key][concept] = gap
        return gap

    def entry_for(self, language: LanguageId, concept: int) -> Synset | LexicalGap | None:
        key = self._lang_key(language)
        return self._synsets[key].get(concept) or self._gaps[key].get(concept)

    def synsets(self, language: LanguageId) -> list[Synset]:
        key = self._lang_key(language)
        return [self._synsets[key][gid] for gid in sorted(self._synsets[key])]

    def gaps(self, language: LanguageId) -> list[LexicalGap]:
        key = self._lang_key(language)
        return [self._gaps[key][gid] for gid in sorted(self._gaps[key])]

    def lexicalized_gids(self) -> set[int]:
        gids: set[int] = set()
        for per_lang in self._synsets.values():
            gids.update(per_lang)
        return gids

    def find_word(self, language: LanguageId, word: str) -> list[int]:
        """GIDs whose synset in this language contains the word (case-insensitive)."""
        key = self._lang_key(language)
        lowered = word.casefold()
        return sorted(
            gid for gid, s in self._synsets[key].items()
            if any(w.casefold() == lowered for w in s.words)
        )

    # -- lookup ---------------------------------------------------------------

    def lookup(self, language: LanguageId, lemma: str, fuzzy: bool = False) -> list[LookupHit]:
        """Rank concepts whose words (in any language) match the lemma.

        The hit entry is the queried language's synset when it has one, its
        lexical gap when it only describes the concept, and otherwise the
        synset in which the match occurred. Results are ordered by score
        descending, then gid ascending.
        """
        key = self._lang_key(language)
        best: dict[int, tuple[float, Synset]] = {}
        for lang_key in sorted(self._synsets):
            for gid in sorted(self._synsets[lang_key]):
                synset = self._synsets[lang_key][gid]
                score = max(word_score(lemma, w, fuzzy) for w in synset.words)
                if score <= 0.0:
                    continue
                prev = best.get(gid)
                if prev is None or score > prev[0]:
                    best[gid] = (score, synset)
        hits = []
        for gid, (score, matched) in best.items():
            entry: Synset | LexicalGap = (
                self._synsets[key].get(gid) or self._gaps[key].get(gid) or matched
            )
            hits.append(LookupHit(gid=gid, entry=entry, score=score))
        hits.sort(key=lambda h: (-h.score, h.gid))
        return hits

    # -- persistence ----------------------------------------------------------

    @staticmethod
    def _escape(text: str) -> str:
        return (
            text.replace("\\", "\\\\")
            .replace("|", "\\|")
            .replace("\t", "\\t")
            .replace("\n", "\\n")
        )

    @staticmethod
    def _unescape(text: str) -> str:
        out = []
        i = 0
        while i < len(text):
            c = text[i]
            if c == "\\" and i + 1 < len(text):
                nxt = text[i + 1]
                out.append({"t": "\t", "n": "\n"}.get(nxt, nxt))
                i += 2
            else:
                out.append(c)
                i += 1
        return "".join(out)

    @classmethod
    def _join(cls, items: tuple[str, ...]) -> str:
        return "|".join(cls._escape(x) for x in items)

    @classmethod
    def _split(cls, text: str) -> tuple[str, ...]:
        if text == "":
            return ()
        parts = []
        cur = []
        i = 0
        while i < len(text):
            c = text[i]
            if c == "\\" and i + 1 < len(text):
                cur.append(text[i:i + 2])
                i += 2
            elif c == "|":
                parts.append("".join(cur))
                cur = []
                i += 1
            else:
                cur.append(c)
                i += 1
        parts.append("".join(cur))
        return tuple(cls._unescape(p) for p in parts)

    def dump_language(self, language: LanguageId) -> tuple[str, str]:
        """(synset file, gap file) for one language, sorted for diffing."""
        key = self._lang_key(language)
        syn_lines = []
        for gid in sorted(self._synsets[key]):
            s = self._synsets[key][gid]
            syn_lines.append("\t".join([
                str(s.local_id),
                str(s.concept),
                self._join(s.words),
                self._escape(s.gloss),
                self._join(s.examples),
            ]))
        gap_lines = [
            f"{gid}\t{self._escape(self._gaps[key][gid].gloss)}"
            for gid in sorted(self._gaps[key])
        ]
        syn = "\n".join(syn_lines) + ("\n" if syn_lines else "")
        gap = "\n".join(gap_lines) + ("\n" if gap_lines else "")
        return syn, gap

    def load_language(self, language: LanguageId, synset_text: str, gap_text: str = "") -> None:
        lang = self.add_language(language)
        key = lang.key
        max_local = 0
        for n, line in enumerate(synset_text.splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ValueError(f"{key} synset line {n}: expected 5 fields")
            local_id, gid, words, gloss, examples = parts
            synset = Synset(
                local_id=int(local_id),
                language=lang,
                words=self._split(words),
                gloss=self._unescape(gloss),
                examples=self._split(examples),
                concept=int(gid),
            )
            if synset.concept not in self._core:
                raise UnknownConcept(synset.concept)
            self._synsets[key][synset.concept] = synset
            max_local = max(max_local, synset.local_id)
        self._next_local[key] = max(self._next_local[key], max_local + 1)
        for n, line in enumerate(gap_text.splitlines(), start=1):
            if not line.strip():
                continue
            gid, _, gloss = line.partition("\t")
            self.mark_lexical_gap(lang, int(gid), self._unescape(gloss))

    def snapshot(self) -> dict:
        return {
            "languages": dict(self._languages),
            "synsets": {k: dict(v) for k, v in self._synsets.items()},
            "gaps": {k: dict(v) for k, v in self._gaps.items()},
            "next_local": dict(self._next_local),
        }

    def restore(self, snap: dict) -> None:
        self._languages = dict(snap["languages"])
        self._synsets = {k: dict(v) for k, v in snap["synsets"].items()}
        self._gaps = {k: dict(v) for k, v in snap["gaps"].items()}
        self._next_local = dict(snap["next_local"])
