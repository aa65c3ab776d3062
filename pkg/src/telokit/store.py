"""Store hub: concept core + lexicon bound to one data directory.

Mutations are serialized through a single writer lock; every committed
mutation bumps a snapshot version that services expose to detect stale
clients. Reads proceed concurrently against the in-memory state.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from pathlib import Path

from .concepts import ConceptCore
from .lexicon import LanguageId, Lexicon

CONCEPTS_FILE = "concepts.tsv"
LEXICON_DIR = "lexicon"
CATALOG_DIR = "catalog"


class StoreHub:
    def __init__(self, data_dir: str | Path, default_language: str = "eng"):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.RLock()
        self.version = 0
        self.default_language = LanguageId.natural(default_language)
        self.core = self._load_core()
        self.lexicon = self._load_lexicon()
        self.lexicon.add_language(self.default_language)

    def _load_core(self) -> ConceptCore:
        path = self.data_dir / CONCEPTS_FILE
        if path.exists():
            return ConceptCore.load(path.read_text(encoding="utf-8"))
        return ConceptCore()

    def _load_lexicon(self) -> Lexicon:
        lexicon = Lexicon(self.core)
        lex_dir = self.data_dir / LEXICON_DIR
        if not lex_dir.exists():
            return lexicon
        for path in sorted(lex_dir.glob("*.tsv")):
            if path.name.endswith(".gaps.tsv"):
                continue
            key = path.name[:-len(".tsv")]
            gap_path = lex_dir / f"{key}.gaps.tsv"
            lexicon.load_language(
                LanguageId.from_key(key),
                path.read_text(encoding="utf-8"),
                gap_path.read_text(encoding="utf-8") if gap_path.exists() else "",
            )
        return lexicon

    @property
    def catalog_dir(self) -> Path:
        return self.data_dir / CATALOG_DIR

    @contextmanager
    def write(self):
        """Single-writer transaction scope; persists and bumps the version."""
        with self._write_lock:
            yield self
            self.save()
            self.version += 1

    def save(self) -> None:
        (self.data_dir / CONCEPTS_FILE).write_text(self.core.dump(), encoding="utf-8")
        lex_dir = self.data_dir / LEXICON_DIR
        lex_dir.mkdir(exist_ok=True)
        for language in self.lexicon.languages():
            synsets, gaps = self.lexicon.dump_language(language)
            (lex_dir / f"{language.key}.tsv").write_text(synsets, encoding="utf-8")
            gap_path = lex_dir / f"{language.key}.gaps.tsv"
            if gaps:
                gap_path.write_text(gaps, encoding="utf-8")
            elif gap_path.exists():
                gap_path.unlink()

    def stats(self) -> dict:
        synsets = {
            lang.key: len(self.lexicon.synsets(lang)) for lang in self.lexicon.languages()
        }
        gaps = {
            lang.key: len(self.lexicon.gaps(lang)) for lang in self.lexicon.languages()
        }
        return {
            "concepts": len(self.core),
            "next_gid": self.core.next_gid,
            "languages": [lang.key for lang in self.lexicon.languages()],
            "synsets": synsets,
            "lexical_gaps": gaps,
        }
