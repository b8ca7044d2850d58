"""Concept lattices from a binary relation between two label sets.

The polars of the relation form a Galois connection between subsets of
objects and subsets of attributes; the pairs fixed by both closures are
the concepts.  Enumeration uses lectic-order closure stepping, which
visits every closed extent exactly once without touching the full
powerset; subsets are bitmask integers internally so closures are a
handful of word operations.  Lattice meets intersect extents, lattice
joins close the union, both staying inside the fixed set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import FormatError

__all__ = [
    "UnknownLabelError",
    "NotAConceptError",
    "Context",
    "Concept",
    "ConceptLattice",
    "polar_up",
    "polar_down",
    "close_extent",
    "is_concept",
    "enumerate_concepts",
    "lattice_meet",
    "lattice_join",
    "export_dot",
    "parse_cxt",
    "render_cxt",
    "parse_context_csv",
    "render_context_csv",
]


class UnknownLabelError(ValueError):
    """A subset mentions a label the context does not have."""


class NotAConceptError(ValueError):
    """An (extent, intent) pair that is not closed under the polars."""


@dataclass(frozen=True)
class Context:
    """Objects, attributes and a boolean incidence matrix between them."""

    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    incidence: tuple[tuple[bool, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(
            self, "incidence", tuple(tuple(bool(c) for c in row) for row in self.incidence)
        )
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("object labels must be unique")
        if len(set(self.attributes)) != len(self.attributes):
            raise ValueError("attribute labels must be unique")
        if len(self.incidence) != len(self.objects):
            raise ValueError("incidence must have one row per object")
        for row in self.incidence:
            if len(row) != len(self.attributes):
                raise ValueError("incidence must have one column per attribute")

    @classmethod
    def from_pairs(
        cls,
        objects: Sequence[str],
        attributes: Sequence[str],
        pairs: Iterable[tuple[str, str]],
    ) -> "Context":
        oi = {g: i for i, g in enumerate(objects)}
        ai = {m: j for j, m in enumerate(attributes)}
        grid = [[False] * len(attributes) for _ in objects]
        for g, m in pairs:
            if g not in oi:
                raise UnknownLabelError(f"unknown object {g!r}")
            if m not in ai:
                raise UnknownLabelError(f"unknown attribute {m!r}")
            grid[oi[g]][ai[m]] = True
        return cls(tuple(objects), tuple(attributes), tuple(tuple(r) for r in grid))

    @cached_property
    def _object_index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.objects)}

    @cached_property
    def _attribute_index(self) -> dict[str, int]:
        return {m: j for j, m in enumerate(self.attributes)}

    @cached_property
    def _row_masks(self) -> tuple[int, ...]:
        # per object: bitmask of its attributes
        return tuple(
            sum(1 << j for j, hit in enumerate(row) if hit) for row in self.incidence
        )

    @cached_property
    def _col_masks(self) -> tuple[int, ...]:
        # per attribute: bitmask of the objects carrying it
        return tuple(
            sum(1 << i for i, row in enumerate(self.incidence) if row[j])
            for j in range(len(self.attributes))
        )

    def object_mask(self, labels: Iterable[str]) -> int:
        mask = 0
        for g in labels:
            i = self._object_index.get(g)
            if i is None:
                raise UnknownLabelError(f"unknown object {g!r}")
            mask |= 1 << i
        return mask

    def attribute_mask(self, labels: Iterable[str]) -> int:
        mask = 0
        for m in labels:
            j = self._attribute_index.get(m)
            if j is None:
                raise UnknownLabelError(f"unknown attribute {m!r}")
            mask |= 1 << j
        return mask

    def object_labels(self, mask: int) -> tuple[str, ...]:
        return tuple(g for i, g in enumerate(self.objects) if mask >> i & 1)

    def attribute_labels(self, mask: int) -> tuple[str, ...]:
        return tuple(m for j, m in enumerate(self.attributes) if mask >> j & 1)

    def polar_up_mask(self, object_mask: int) -> int:
        mask = (1 << len(self.attributes)) - 1
        rows = self._row_masks
        i = 0
        while object_mask:
            if object_mask & 1:
                mask &= rows[i]
            object_mask >>= 1
            i += 1
        return mask

    def polar_down_mask(self, attribute_mask: int) -> int:
        mask = (1 << len(self.objects)) - 1
        cols = self._col_masks
        j = 0
        while attribute_mask:
            if attribute_mask & 1:
                mask &= cols[j]
            attribute_mask >>= 1
            j += 1
        return mask

    def close_extent_mask(self, object_mask: int) -> int:
        return self.polar_down_mask(self.polar_up_mask(object_mask))

    def to_profunctor(self):
        """The incidence relation as a truth-valued profunctor, for use with
        the generic push/pull machinery."""
        from .core import TRUTH, Profunctor

        return Profunctor(self.incidence, TRUTH)


@dataclass(frozen=True)
class Concept:
    """A closed pair: each side is exactly the polar of the other.
    Labels are kept in context order, so rendering is deterministic."""

    extent: tuple[str, ...]
    intent: tuple[str, ...]

    def __str__(self) -> str:
        return "({%s}, {%s})" % (", ".join(self.extent), ", ".join(self.intent))


def polar_up(ctx: Context, objects: Iterable[str]) -> tuple[str, ...]:
    """Attributes shared by every object in the subset; all of them for the
    empty subset."""
    return ctx.attribute_labels(ctx.polar_up_mask(ctx.object_mask(objects)))


def polar_down(ctx: Context, attributes: Iterable[str]) -> tuple[str, ...]:
    """Objects carrying every attribute in the subset."""
    return ctx.object_labels(ctx.polar_down_mask(ctx.attribute_mask(attributes)))


def close_extent(ctx: Context, objects: Iterable[str]) -> tuple[str, ...]:
    """Smallest extent containing the subset: polar_down of polar_up."""
    return ctx.object_labels(ctx.close_extent_mask(ctx.object_mask(objects)))


def _concept_from_extent_mask(ctx: Context, extent_mask: int) -> Concept:
    return Concept(
        extent=ctx.object_labels(extent_mask),
        intent=ctx.attribute_labels(ctx.polar_up_mask(extent_mask)),
    )


def is_concept(ctx: Context, concept: Concept) -> bool:
    try:
        e = ctx.object_mask(concept.extent)
        i = ctx.attribute_mask(concept.intent)
    except UnknownLabelError:
        return False
    return ctx.polar_up_mask(e) == i and ctx.polar_down_mask(i) == e


def _lectic_closed_extents(ctx: Context) -> Iterator[int]:
    """All closed extents in lectic order (label index 0 is most significant).

    Step rule: from extent A, the next closed set is the closure of
    (A restricted below i) plus i, for the largest index i not in A
    whose closure adds nothing below i.
    """
    n = len(ctx.objects)
    current = ctx.close_extent_mask(0)
    yield current
    while True:
        found = False
        for i in range(n - 1, -1, -1):
            if current >> i & 1:
                continue
            below = (1 << i) - 1
            candidate = ctx.close_extent_mask((current & below) | (1 << i))
            if candidate & below == current & below:
                current = candidate
                found = True
                break
        if not found:
            return
        yield current


@dataclass(frozen=True)
class ConceptLattice:
    """All concepts of a context with their extent-inclusion order."""

    concepts: tuple[Concept, ...]
    order: tuple[tuple[bool, ...], ...]  # order[i][j]: concept i <= concept j

    def __len__(self) -> int:
        return len(self.concepts)

    def index_of(self, concept: Concept) -> int:
        return self.concepts.index(concept)

    @property
    def top(self) -> Concept:
        return next(c for i, c in enumerate(self.concepts) if all(self.order[j][i] for j in range(len(self))))

    @property
    def bottom(self) -> Concept:
        return next(c for i, c in enumerate(self.concepts) if all(self.order[i][j] for j in range(len(self))))

    def covers(self) -> tuple[tuple[int, int], ...]:
        """Pairs (i, j) with concept j covering concept i: the transitive
        reduction of the strict order."""
        o = np.array(self.order, dtype=bool)
        strict = o & ~np.eye(len(self.concepts), dtype=bool)
        reduced = strict & ~(strict @ strict)
        return tuple((int(i), int(j)) for i, j in np.argwhere(reduced))


def enumerate_concepts(ctx: Context) -> ConceptLattice:
    """Complete concept set in lectic order with the inclusion order matrix."""
    extents = list(_lectic_closed_extents(ctx))
    concepts = tuple(_concept_from_extent_mask(ctx, e) for e in extents)
    order = tuple(
        tuple(ei & ej == ei for ej in extents) for ei in extents
    )
    return ConceptLattice(concepts=concepts, order=order)


def _require_concept(ctx: Context, concept: Concept) -> tuple[int, int]:
    if not is_concept(ctx, concept):
        raise NotAConceptError(f"not a concept of this context: {concept}")
    return ctx.object_mask(concept.extent), ctx.attribute_mask(concept.intent)


def lattice_meet(ctx: Context, c1: Concept, c2: Concept) -> Concept:
    """Greatest common subconcept: intersect extents (already closed)."""
    e1, _ = _require_concept(ctx, c1)
    e2, _ = _require_concept(ctx, c2)
    return _concept_from_extent_mask(ctx, e1 & e2)


def lattice_join(ctx: Context, c1: Concept, c2: Concept) -> Concept:
    """Least common superconcept: close the union of extents; the intent is
    the intersection of intents."""
    e1, _ = _require_concept(ctx, c1)
    e2, _ = _require_concept(ctx, c2)
    return _concept_from_extent_mask(ctx, ctx.close_extent_mask(e1 | e2))


def export_dot(lattice: ConceptLattice) -> str:
    """GraphViz source for the Hasse diagram, edges pointing up the order."""
    lines = ["digraph concepts {", "  rankdir=BT;", "  node [shape=box];"]
    for i, c in enumerate(lattice.concepts):
        label = "{%s} / {%s}" % (", ".join(c.extent), ", ".join(c.intent))
        label = label.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  c{i} [label="{label}"];')
    for i, j in lattice.covers():
        lines.append(f"  c{i} -> c{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Burmeister .cxt: "B", a name line (may be blank), the two counts, object
# names, attribute names, then one X/. row per object.  Blank separator
# lines are tolerated when parsing; rendering never emits them.

def parse_cxt(text: str) -> Context:
    lines = text.splitlines()
    pos = 0

    def next_line(what: str, skip_blank: bool) -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines):
            lineno, raw = pos + 1, lines[pos]
            pos += 1
            if skip_blank and not raw.strip():
                continue
            return lineno, raw
        raise FormatError(f"unexpected end of file while reading {what}")

    lineno, magic = next_line("the format marker", skip_blank=True)
    if magic.strip() != "B":
        raise FormatError("expected Burmeister marker 'B'", line=lineno)
    next_line("the name line", skip_blank=False)

    counts = []
    for what in ("object count", "attribute count"):
        lineno, raw = next_line(what, skip_blank=True)
        try:
            counts.append(int(raw.strip()))
        except ValueError:
            raise FormatError(f"expected {what}, got {raw!r}", line=lineno) from None
        if counts[-1] < 0:
            raise FormatError(f"{what} may not be negative", line=lineno)
    n_obj, n_attr = counts

    objects = [next_line("an object name", skip_blank=True)[1].strip() for _ in range(n_obj)]
    attributes = [next_line("an attribute name", skip_blank=True)[1].strip() for _ in range(n_attr)]

    if n_attr == 0:
        # incidence rows are empty lines, indistinguishable from separators
        return Context(tuple(objects), (), ((),) * n_obj)
    rows = []
    for _ in range(n_obj):
        lineno, raw = next_line("an incidence row", skip_blank=True)
        row = raw.strip()
        if len(row) != n_attr:
            raise FormatError(
                f"incidence row has {len(row)} cells, expected {n_attr}", line=lineno
            )
        cells = []
        for ch in row:
            if ch in "Xx":
                cells.append(True)
            elif ch == ".":
                cells.append(False)
            else:
                raise FormatError(f"incidence cells must be 'X' or '.', got {ch!r}", line=lineno)
        rows.append(tuple(cells))
    try:
        return Context(tuple(objects), tuple(attributes), tuple(rows))
    except ValueError as e:
        raise FormatError(str(e)) from None


def render_cxt(ctx: Context) -> str:
    out = ["B", "", str(len(ctx.objects)), str(len(ctx.attributes))]
    out.extend(ctx.objects)
    out.extend(ctx.attributes)
    for row in ctx.incidence:
        out.append("".join("X" if c else "." for c in row))
    return "\n".join(out) + "\n"


def parse_context_csv(text: str) -> Context:
    """0/1 matrix with a header of attribute labels and a leading label column."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty context file")
    header = [c.strip() for c in lines[0].split(",")]
    attributes = tuple(header[1:])
    objects = []
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        cells = [c.strip() for c in ln.split(",")]
        if len(cells) != len(attributes) + 1:
            raise FormatError(
                f"expected {len(attributes) + 1} cells, found {len(cells)}", line=lineno
            )
        objects.append(cells[0])
        row = []
        for label, tok in zip(attributes, cells[1:]):
            if tok not in ("0", "1"):
                raise FormatError("incidence cells must be 0 or 1", line=lineno, field=label)
            row.append(tok == "1")
        rows.append(tuple(row))
    try:
        return Context(tuple(objects), attributes, tuple(rows))
    except ValueError as e:
        raise FormatError(str(e)) from None


def render_context_csv(ctx: Context) -> str:
    for lab in ctx.objects + ctx.attributes:
        if "," in lab:
            raise FormatError(f"label {lab!r} may not contain a comma")
    out = ["," + ",".join(ctx.attributes)]
    for g, row in zip(ctx.objects, ctx.incidence):
        out.append(g + "," + ",".join("1" if c else "0" for c in row))
    return "\n".join(out) + "\n"
