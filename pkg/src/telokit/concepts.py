"""Language-independent concept store: an evolving DAG of concepts.

Concepts are bare integer identifiers (GIDs) linked by IS_A (subsumption)
and PART_OF (meronymy) edges towards their parents. The store enforces
acyclicity over the union of both edge kinds and mints fresh GIDs from a
monotone counter that never reuses a value.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Iterable

from .errors import CycleError, SelfLoop, UnknownConcept, UnknownParent
from .report import Severity, ValidationReport

ROOT_GID = 1
ROOT_LABEL = "owl:Thing"


class RelationKind(Enum):
    IS_A = "IS_A"
    PART_OF = "PART_OF"


def _now_iso() -> str:
    # SOURCE_DATE_EPOCH gives reproducible store files in CI.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch else time.time()
    return datetime.fromtimestamp(t, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Concept:
    gid: int
    parents: tuple[tuple[int, RelationKind], ...]
    created_by: str
    created_at: str


class ConceptCore:
    """DAG of concepts with a built-in root (gid 1, label convention owl:Thing)."""

    def __init__(self, now_fn: Callable[[], str] = _now_iso):
        self._now = now_fn
        root = Concept(ROOT_GID, (), "builtin", "1970-01-01T00:00:00Z")
        self._concepts: dict[int, Concept] = {ROOT_GID: root}
        self._next_gid = ROOT_GID + 1

    # -- introspection ------------------------------------------------------

    def __contains__(self, gid: int) -> bool:
        return gid in self._concepts

    def __len__(self) -> int:
        return len(self._concepts)

    def get(self, gid: int) -> Concept:
        try:
            return self._concepts[gid]
        except KeyError:
            raise UnknownConcept(gid) from None

    def gids(self) -> list[int]:
        return sorted(self._concepts)

    @property
    def next_gid(self) -> int:
        return self._next_gid

    def parents_of(self, gid: int, relation: RelationKind | None = None) -> list[int]:
        concept = self.get(gid)
        return [p for p, rel in concept.parents if relation is None or rel is relation]

    def edges(self) -> Iterable[tuple[int, int, RelationKind]]:
        for gid in sorted(self._concepts):
            for parent, rel in self._concepts[gid].parents:
                yield gid, parent, rel

    # -- mutation -----------------------------------------------------------

    def preload(self, gid: int, parents: list[tuple[int, RelationKind]],
                provenance: str = "preload", created_at: str | None = None) -> None:
        """Insert a concept with a caller-chosen GID (fixture/store loading).

        Bumps the mint counter above the loaded GID so fresh mints never collide.
        """
        if gid < 1:
            raise ValueError(f"gid must be >= 1, got {gid}")
        if gid in self._concepts:
            raise ValueError(f"gid {gid} already loaded")
        for parent, _ in parents:
            if parent not in self._concepts:
                raise UnknownParent(parent)
        self._concepts[gid] = Concept(
            gid, tuple(parents), provenance, created_at or self._now()
        )
        if gid >= self._next_gid:
            self._next_gid = gid + 1
        # Loaded edges must keep the store acyclic.
        cycle = self._find_cycle()
        if cycle:
            del self._concepts[gid]
            raise CycleError(gid, parents[0][0] if parents else gid, cycle)

    def mint_concept(self, parent: int, relation: RelationKind, provenance: str) -> int:
        if parent not in self._concepts:
            raise UnknownParent(parent)
        gid = self._next_gid
        self._next_gid += 1
        self._concepts[gid] = Concept(gid, ((parent, relation),), provenance, self._now())
        return gid

    def add_edge(self, child: int, parent: int, relation: RelationKind) -> None:
        if child == parent:
            raise SelfLoop(child)
        if child not in self._concepts:
            raise UnknownConcept(child)
        if parent not in self._concepts:
            raise UnknownConcept(parent)
        concept = self._concepts[child]
        if (parent, relation) in concept.parents:
            return  # duplicate edges are idempotent no-ops
        # A new child->parent edge closes a cycle iff child is already an
        # ancestor of parent over the union of both relation kinds.
        path = self._path_upwards(parent, child)
        if path is not None:
            raise CycleError(child, parent, path)
        self._concepts[child] = replace(concept, parents=concept.parents + ((parent, relation),))

    # -- queries ------------------------------------------------------------

    def is_subsumed_by(self, a: int, b: int) -> bool:
        """True iff b is reachable from a along IS_A edges (reflexive)."""
        if a not in self._concepts:
            raise UnknownConcept(a)
        if b not in self._concepts:
            raise UnknownConcept(b)
        if a == b:
            return True
        seen = {a}
        stack = [a]
        while stack:
            node = stack.pop()
            for parent, rel in self._concepts[node].parents:
                if rel is not RelationKind.IS_A:
                    continue
                if parent == b:
                    return True
                if parent not in seen:
                    seen.add(parent)
                    stack.append(parent)
        return False

    def _path_upwards(self, start: int, target: int) -> list[int] | None:
        """Directed path start -> ... -> target along parent edges, or None."""
        stack: list[tuple[int, list[int]]] = [(start, [start])]
        seen = {start}
        while stack:
            node, path = stack.pop()
            if node == target:
                return path
            for parent, _ in self._concepts[node].parents:
                if parent not in seen:
                    seen.add(parent)
                    stack.append((parent, path + [parent]))
        return None

    def _find_cycle(self) -> list[int] | None:
        # Iterative three-colour DFS over the union edge set.
        WHITE, GREY, BLACK = 0, 1, 2
        colour = {gid: WHITE for gid in self._concepts}
        for root in self._concepts:
            if colour[root] != WHITE:
                continue
            stack: list[tuple[int, int]] = [(root, 0)]
            path: list[int] = []
            while stack:
                node, idx = stack.pop()
                if idx == 0:
                    colour[node] = GREY
                    path.append(node)
                parents = [p for p, _ in self._concepts[node].parents]
                if idx < len(parents):
                    stack.append((node, idx + 1))
                    nxt = parents[idx]
                    if colour[nxt] == GREY:
                        return path[path.index(nxt):] + [nxt]
                    if colour[nxt] == WHITE:
                        stack.append((nxt, 0))
                else:
                    colour[node] = BLACK
                    path.pop()
        return None

    def validate_core(self, lexicalizations: set[int]) -> ValidationReport:
        """Report unlexicalized concepts (root exempt) and re-check acyclicity."""
        report = ValidationReport("concept-core")
        for gid in sorted(self._concepts):
            if gid == ROOT_GID:
                continue
            if gid not in lexicalizations:
                report.add(
                    "CC001", Severity.ERROR, str(gid),
                    f"concept {gid} has no lexicalization in any language",
                )
        cycle = self._find_cycle()
        if cycle:
            report.add(
                "CC002", Severity.ERROR, str(cycle[0]),
                "cycle detected: " + " -> ".join(map(str, cycle)),
            )
        return report.finish()

    # -- persistence ---------------------------------------------------------

    def dump(self) -> str:
        """Record file: gid<TAB>relation<TAB>parent_gid<TAB>provenance<TAB>timestamp.

        Sorted by (gid, relation, parent) so the output is bit-exact for diffing.
        The built-in root is not written.
        """
        lines = []
        for gid in sorted(self._concepts):
            if gid == ROOT_GID:
                continue
            concept = self._concepts[gid]
            for parent, rel in sorted(concept.parents, key=lambda e: (e[1].value, e[0])):
                lines.append(
                    f"{gid}\t{rel.value}\t{parent}\t{concept.created_by}\t{concept.created_at}"
                )
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def load(cls, text: str, now_fn: Callable[[], str] = _now_iso) -> "ConceptCore":
        core = cls(now_fn=now_fn)
        rows: dict[int, tuple[list[tuple[int, RelationKind]], str, str]] = {}
        for n, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ValueError(f"concept record line {n}: expected 5 fields")
            gid, rel, parent, provenance, created_at = parts
            entry = rows.setdefault(int(gid), ([], provenance, created_at))
            entry[0].append((int(parent), RelationKind(rel)))
        # Parents may be declared after children in gid order; insert topologically.
        pending = dict(rows)
        while pending:
            progressed = False
            for gid in sorted(pending):
                parents, provenance, created_at = pending[gid]
                if all(p in core._concepts for p, _ in parents):
                    core.preload(gid, parents, provenance, created_at)
                    del pending[gid]
                    progressed = True
            if not progressed:
                raise ValueError("concept records contain unresolvable parents")
        return core

    def snapshot(self) -> dict:
        return {"concepts": dict(self._concepts), "next_gid": self._next_gid}

    def restore(self, snap: dict) -> None:
        self._concepts = dict(snap["concepts"])
        self._next_gid = snap["next_gid"]
