"""Quantale contract, finite profunctors and the push/pull adjunction.

A quantale instance bundles the order, lattice folds, tensor and
residuation of one carrier.  Two are provided: classical truth values
(tensor = conjunction, residuation = implication) and the extended
reals with the order read as >=, so join is infimum, meet is supremum,
the tensor is saturating addition and residuation is the subtraction
table from :mod:`nucleus.extreal`.

A profunctor is a finite matrix of quantale values between two object
sets.  It induces the adjoint operator pair ``push``/``pull`` between
presheaf vectors (PRE side) and opcopresheaf vectors (OPCO side); their
composites are closure operators, and the pairs fixed by both are what
the rest of the package instantiates as concept lattices and as the
conjugation calculus on sampled functions.  Limits and colimits of
fixed pairs are computed pointwise, with a closure applied on the side
where the pointwise formula can leave the fixed set.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from . import extreal as ext
from .extreal import ExtReal

__all__ = [
    "Side",
    "LimitKind",
    "SizeMismatchError",
    "NotFixedError",
    "FormatError",
    "Quantale",
    "TruthQuantale",
    "ExtRealQuantale",
    "TRUTH",
    "EXT_REAL",
    "Profunctor",
    "PresheafVector",
    "identity_profunctor",
    "push",
    "pull",
    "closure",
    "is_fixed",
    "hom_distance",
    "adjunction_gap",
    "compose_profunctors",
    "pointwise_meet",
    "pointwise_join",
    "tensor_each",
    "residuate_each",
    "nucleus_limit",
    "underlying_preorder",
    "check_rspace_axioms",
    "RSpaceReport",
    "parse_matrix_csv",
    "render_matrix_csv",
]


class Side(Enum):
    PRE = "pre"
    OPCO = "opco"


class LimitKind(Enum):
    PRODUCT = "product"
    COPRODUCT = "coproduct"
    TENSOR = "tensor"
    COTENSOR = "cotensor"


class SizeMismatchError(ValueError):
    """Operands indexed by object sets of incompatible sizes."""


class NotFixedError(ValueError):
    """A pair handed to nucleus_limit is not a fixed pair of the adjunction."""


class FormatError(ValueError):
    """Malformed text input; carries the offending line and field."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(f"field {field!r}")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class Quantale:
    """Operation bundle for one complete commutative quantale."""

    name: str = "abstract"
    unit: object = None
    default_fixed_tol: float = 0.0

    def leq(self, a, b) -> bool:
        raise NotImplementedError

    def join(self, xs: Iterable):
        raise NotImplementedError

    def meet(self, xs: Iterable):
        raise NotImplementedError

    def tensor(self, a, b):
        raise NotImplementedError

    def residuate(self, b, c):
        """Right adjoint to the tensor: the largest a with a (x) b <= c."""
        raise NotImplementedError

    def approx_equal(self, a, b, tol: float) -> bool:
        raise NotImplementedError

    def check_value(self, x) -> None:
        raise NotImplementedError

    @property
    def bottom(self):
        return self.join(())

    @property
    def top(self):
        return self.meet(())

    def __repr__(self) -> str:
        return f"<quantale {self.name}>"


class TruthQuantale(Quantale):
    """Truth values under entailment; the only strict relation is false |- true."""

    name = "truth"
    unit = True
    default_fixed_tol = 0.0

    def leq(self, a: bool, b: bool) -> bool:
        return (not a) or b

    def join(self, xs: Iterable[bool]) -> bool:
        return any(xs)

    def meet(self, xs: Iterable[bool]) -> bool:
        return all(xs)

    def tensor(self, a: bool, b: bool) -> bool:
        return a and b

    def residuate(self, b: bool, c: bool) -> bool:
        return (not b) or c

    def approx_equal(self, a: bool, b: bool, tol: float) -> bool:
        return a == b

    def check_value(self, x) -> None:
        if not isinstance(x, bool):
            raise TypeError(f"truth quantale needs bool values, got {type(x).__name__}")


class ExtRealQuantale(Quantale):
    """Extended reals ordered by >=: join is infimum, meet is supremum."""

    name = "extreal"
    unit = ext.ZERO
    default_fixed_tol = 1e-9

    def leq(self, a: ExtReal, b: ExtReal) -> bool:
        return ext.compare(a, b) >= 0

    def join(self, xs: Iterable[ExtReal]) -> ExtReal:
        return ext.fold_inf(xs)

    def meet(self, xs: Iterable[ExtReal]) -> ExtReal:
        return ext.fold_sup(xs)

    def tensor(self, a: ExtReal, b: ExtReal) -> ExtReal:
        return ext.add(a, b)

    def residuate(self, b: ExtReal, c: ExtReal) -> ExtReal:
        return ext.sub(c, b)

    def approx_equal(self, a: ExtReal, b: ExtReal, tol: float) -> bool:
        return ext.approx_equal(a, b, tol)

    def check_value(self, x) -> None:
        if not isinstance(x, ExtReal):
            raise TypeError(f"extreal quantale needs ExtReal values, got {type(x).__name__}")


TRUTH = TruthQuantale()
EXT_REAL = ExtRealQuantale()


@dataclass(frozen=True)
class Profunctor:
    """Total matrix of quantale values between two finite object sets."""

    entries: tuple[tuple[object, ...], ...]
    quantale: Quantale

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(tuple(row) for row in self.entries))
        if not self.entries or not self.entries[0]:
            raise ValueError("profunctor needs at least one row and one column")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise ValueError("profunctor rows must all have the same length")
            for cell in row:
                self.quantale.check_value(cell)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]], quantale: Quantale) -> "Profunctor":
        return cls(tuple(tuple(row) for row in rows), quantale)

    @property
    def domain_size(self) -> int:
        return len(self.entries)

    @property
    def codomain_size(self) -> int:
        return len(self.entries[0])


@dataclass(frozen=True)
class PresheafVector:
    """One quantale value per object; PRE vectors live over the domain of a
    profunctor, OPCO vectors over its codomain."""

    values: tuple[object, ...]
    side: Side
    quantale: Quantale

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("presheaf vector must be non-empty")
        for v in self.values:
            self.quantale.check_value(v)

    def __len__(self) -> int:
        return len(self.values)


def identity_profunctor(n: int, quantale: Quantale) -> Profunctor:
    """Unit on the diagonal, bottom elsewhere; the unit of composition."""
    bot = quantale.bottom
    rows = tuple(
        tuple(quantale.unit if i == j else bot for j in range(n)) for i in range(n)
    )
    return Profunctor(rows, quantale)


def _require_side(vector: PresheafVector, side: Side | None, expected: Side) -> None:
    if side is not None and side is not vector.side:
        raise ValueError(f"side argument {side} does not match vector side {vector.side}")
    if vector.side is not expected:
        raise ValueError(f"expected a {expected.value} vector, got {vector.side.value}")


def push(profunctor: Profunctor, pre: PresheafVector) -> PresheafVector:
    """Adjoint image of a PRE vector: out(b) = meet_a [P(a), M(a,b)].

    Over the extended reals this is sup_a { M(a,b) - P(a) } with the
    difference grouped exactly that way; over truth it reads
    "b is related to everything P contains".
    """
    if pre.side is not Side.PRE:
        raise ValueError("push needs a PRE vector")
    if pre.quantale is not profunctor.quantale:
        raise ValueError("vector and profunctor use different quantales")
    if len(pre) != profunctor.domain_size:
        raise SizeMismatchError(
            f"vector of length {len(pre)} against domain of size {profunctor.domain_size}"
        )
    q = profunctor.quantale
    entries = profunctor.entries
    vals = tuple(
        q.meet(q.residuate(pre.values[a], entries[a][b]) for a in range(profunctor.domain_size))
        for b in range(profunctor.codomain_size)
    )
    return PresheafVector(vals, Side.OPCO, q)


def pull(profunctor: Profunctor, opco: PresheafVector) -> PresheafVector:
    """Adjoint preimage of an OPCO vector: out(a) = meet_b [Q(b), M(a,b)]."""
    if opco.side is not Side.OPCO:
        raise ValueError("pull needs an OPCO vector")
    if opco.quantale is not profunctor.quantale:
        raise ValueError("vector and profunctor use different quantales")
    if len(opco) != profunctor.codomain_size:
        raise SizeMismatchError(
            f"vector of length {len(opco)} against codomain of size {profunctor.codomain_size}"
        )
    q = profunctor.quantale
    entries = profunctor.entries
    vals = tuple(
        q.meet(q.residuate(opco.values[b], entries[a][b]) for b in range(profunctor.codomain_size))
        for a in range(profunctor.domain_size)
    )
    return PresheafVector(vals, Side.PRE, q)


def closure(profunctor: Profunctor, vector: PresheafVector, side: Side | None = None) -> PresheafVector:
    """Round trip through the adjunction; idempotent on either side."""
    _require_side(vector, side, vector.side)
    if vector.side is Side.PRE:
        return pull(profunctor, push(profunctor, vector))
    return push(profunctor, pull(profunctor, vector))


def _vectors_approx_equal(a: PresheafVector, b: PresheafVector, tol: float) -> bool:
    if a.side is not b.side or len(a) != len(b):
        return False
    q = a.quantale
    return all(q.approx_equal(x, y, tol) for x, y in zip(a.values, b.values))


def is_fixed(
    profunctor: Profunctor,
    vector: PresheafVector,
    side: Side | None = None,
    tol: float | None = None,
) -> bool:
    """Whether the vector is a fixed point of its closure operator.

    Infinite tags must match exactly; finite coordinates may differ by
    ``tol`` (default 0 for truth, 1e-9 for extended reals).
    """
    if tol is None:
        tol = profunctor.quantale.default_fixed_tol
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return _vectors_approx_equal(closure(profunctor, vector, side), vector, tol)


def hom_distance(f1: PresheafVector, f2: PresheafVector, side: Side | None = None):
    """Enriched hom between two vectors on the same side.

    PRE side: meet_x [F1(x), F2(x)], the maximal climb from F1 to F2
    over the extended reals, subset inclusion over truth.  OPCO side is
    the reverse, the maximal fall.
    """
    if f1.side is not f2.side:
        raise ValueError("hom_distance needs two vectors on the same side")
    _require_side(f1, side, f1.side)
    if len(f1) != len(f2):
        raise SizeMismatchError(f"vector lengths differ: {len(f1)} vs {len(f2)}")
    if f1.quantale is not f2.quantale:
        raise ValueError("vectors use different quantales")
    q = f1.quantale
    if f1.side is Side.PRE:
        return q.meet(q.residuate(a, b) for a, b in zip(f1.values, f2.values))
    return q.meet(q.residuate(b, a) for a, b in zip(f1.values, f2.values))


def adjunction_gap(profunctor: Profunctor, pre: PresheafVector, opco: PresheafVector):
    """The two homs that the adjunction equates:
    (hom(push M P, Q) on OPCO, hom(P, pull M Q) on PRE)."""
    lhs = hom_distance(push(profunctor, pre), opco)
    rhs = hom_distance(pre, pull(profunctor, opco))
    return lhs, rhs


def compose_profunctors(first: Profunctor, second: Profunctor) -> Profunctor:
    """Relational composite: out(a,c) = join_b first(a,b) (x) second(b,c).

    Over the extended reals this is the min-plus matrix product; over
    truth it is composition of relations.
    """
    if first.quantale is not second.quantale:
        raise ValueError("profunctors use different quantales")
    if first.codomain_size != second.domain_size:
        raise SizeMismatchError(
            f"inner sizes differ: {first.codomain_size} vs {second.domain_size}"
        )
    q = first.quantale
    mid = first.codomain_size
    rows = tuple(
        tuple(
            q.join(q.tensor(first.entries[a][b], second.entries[b][c]) for b in range(mid))
            for c in range(second.codomain_size)
        )
        for a in range(first.domain_size)
    )
    return Profunctor(rows, q)


def _same_family(vectors: Sequence[PresheafVector]) -> tuple[Side, Quantale, int]:
    head = vectors[0]
    for v in vectors[1:]:
        if v.side is not head.side:
            raise ValueError("vectors must share a side")
        if v.quantale is not head.quantale:
            raise ValueError("vectors must share a quantale")
        if len(v) != len(head):
            raise SizeMismatchError("vectors must share a length")
    return head.side, head.quantale, len(head)


def pointwise_meet(vectors: Sequence[PresheafVector]) -> PresheafVector:
    side, q, n = _same_family(vectors)
    vals = tuple(q.meet(v.values[i] for v in vectors) for i in range(n))
    return PresheafVector(vals, side, q)


def pointwise_join(vectors: Sequence[PresheafVector]) -> PresheafVector:
    side, q, n = _same_family(vectors)
    vals = tuple(q.join(v.values[i] for v in vectors) for i in range(n))
    return PresheafVector(vals, side, q)


def tensor_each(scalar, vector: PresheafVector) -> PresheafVector:
    q = vector.quantale
    q.check_value(scalar)
    return PresheafVector(tuple(q.tensor(scalar, v) for v in vector.values), vector.side, q)


def residuate_each(scalar, vector: PresheafVector) -> PresheafVector:
    q = vector.quantale
    q.check_value(scalar)
    return PresheafVector(tuple(q.residuate(scalar, v) for v in vector.values), vector.side, q)


def _constant_vector(value, length: int, side: Side, q: Quantale) -> PresheafVector:
    return PresheafVector((value,) * length, side, q)


def _check_fixed_pair(profunctor: Profunctor, pair, tol: float) -> None:
    p, q_vec = pair
    if not (
        _vectors_approx_equal(push(profunctor, p), q_vec, tol)
        and _vectors_approx_equal(pull(profunctor, q_vec), p, tol)
    ):
        raise NotFixedError("input pair is not fixed by the adjunction")


def nucleus_limit(
    profunctor: Profunctor,
    kind: LimitKind,
    pairs: Sequence[tuple[PresheafVector, PresheafVector]] = (),
    scalar=None,
    tol: float | None = None,
) -> tuple[PresheafVector, PresheafVector]:
    """Limit or colimit of fixed pairs, staying inside the fixed set.

    Limits (PRODUCT, COTENSOR) are computed pointwise on the PRE side
    and the OPCO partner is re-closed; colimits (COPRODUCT, TENSOR) are
    pointwise on the OPCO side with the PRE partner re-closed.  Inputs
    must be fixed pairs; the output is again a fixed pair.
    """
    q = profunctor.quantale
    if tol is None:
        tol = q.default_fixed_tol
    for pair in pairs:
        _check_fixed_pair(profunctor, pair, tol)

    na, nb = profunctor.domain_size, profunctor.codomain_size
    pres = [p for p, _ in pairs]
    opcos = [qv for _, qv in pairs]

    if kind is LimitKind.PRODUCT:
        p_out = (
            pointwise_meet(pres)
            if pres
            else _constant_vector(q.top, na, Side.PRE, q)
        )
        q_join = (
            pointwise_join(opcos)
            if opcos
            else _constant_vector(q.bottom, nb, Side.OPCO, q)
        )
        return p_out, closure(profunctor, q_join)

    if kind is LimitKind.COPRODUCT:
        p_join = (
            pointwise_join(pres)
            if pres
            else _constant_vector(q.bottom, na, Side.PRE, q)
        )
        q_out = (
            pointwise_meet(opcos)
            if opcos
            else _constant_vector(q.top, nb, Side.OPCO, q)
        )
        return closure(profunctor, p_join), q_out

    if kind in (LimitKind.TENSOR, LimitKind.COTENSOR):
        if scalar is None or len(pairs) != 1:
            raise ValueError(f"{kind.value} needs a scalar and exactly one pair")
        p, q_vec = pairs[0]
        if kind is LimitKind.TENSOR:
            return closure(profunctor, tensor_each(scalar, p)), residuate_each(scalar, q_vec)
        return residuate_each(scalar, p), closure(profunctor, tensor_each(scalar, q_vec))

    raise ValueError(f"unknown limit kind: {kind!r}")


def underlying_preorder(d: Sequence[Sequence[ExtReal]]) -> tuple[tuple[bool, ...], ...]:
    """Relation induced by a distance matrix: i relates to j iff 0 >= d(i,j)."""
    n = len(d)
    for row in d:
        if len(row) != n:
            raise ValueError("distance matrix must be square")
        for cell in row:
            EXT_REAL.check_value(cell)
    return tuple(tuple(ext.ZERO >= d[i][j] for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class RSpaceReport:
    """Outcome of the generalized-metric axiom check."""

    ok: bool
    diagonal_violations: tuple[tuple[int, ExtReal], ...]
    triangle_violations: tuple[tuple[int, int, int], ...]

    def summary(self) -> str:
        if self.ok:
            return "ok: triangle inequality holds and every self-distance is 0 or -inf"
        lines = []
        for i, v in self.diagonal_violations:
            lines.append(f"self-distance at index {i} is {v}, expected 0 or -inf")
        for i, j, k in self.triangle_violations:
            lines.append(f"triangle fails on ({i}, {j}, {k}): d({i},{j}) + d({j},{k}) < d({i},{k})")
        return "\n".join(lines)


def check_rspace_axioms(d: Sequence[Sequence[ExtReal]]) -> RSpaceReport:
    """Verify d(x,y) + d(y,z) >= d(x,z) and d(x,x) in {0, -inf}."""
    n = len(d)
    for row in d:
        if len(row) != n:
            raise ValueError("distance matrix must be square")
        for cell in row:
            EXT_REAL.check_value(cell)
    diag = tuple(
        (i, d[i][i]) for i in range(n) if d[i][i] not in (ext.ZERO, ext.NEG_INF)
    )
    tri = tuple(
        (i, j, k)
        for i in range(n)
        for j in range(n)
        for k in range(n)
        if ext.compare(ext.add(d[i][j], d[j][k]), d[i][k]) < 0
    )
    return RSpaceReport(ok=not diag and not tri, diagonal_violations=diag, triangle_violations=tri)


# ---------------------------------------------------------------------------
# Matrix CSV: first cell blank, then column labels; each data row starts
# with its row label.  Cells are extended-real tokens.

def parse_matrix_csv(text: str) -> tuple[tuple[str, ...], tuple[str, ...], Profunctor]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty matrix file")
    header = [c.strip() for c in lines[0].split(",")]
    if len(header) < 2:
        raise FormatError("header needs at least one column label", line=1)
    col_labels = tuple(header[1:])
    row_labels = []
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        cells = [c.strip() for c in ln.split(",")]
        if len(cells) != len(col_labels) + 1:
            raise FormatError(
                f"expected {len(col_labels) + 1} cells, found {len(cells)}", line=lineno
            )
        row_labels.append(cells[0])
        parsed = []
        for label, tok in zip(col_labels, cells[1:]):
            try:
                parsed.append(ext.parse(tok))
            except ValueError as e:
                raise FormatError(str(e), line=lineno, field=label) from None
        rows.append(tuple(parsed))
    if not rows:
        raise FormatError("matrix has no data rows")
    return tuple(row_labels), col_labels, Profunctor(tuple(rows), EXT_REAL)


def render_matrix_csv(
    row_labels: Sequence[str], col_labels: Sequence[str], profunctor: Profunctor
) -> str:
    if len(row_labels) != profunctor.domain_size or len(col_labels) != profunctor.codomain_size:
        raise SizeMismatchError("label counts do not match the matrix")
    for lab in list(row_labels) + list(col_labels):
        if "," in lab:
            raise FormatError(f"label {lab!r} may not contain a comma")
    out = ["," + ",".join(col_labels)]
    for lab, row in zip(row_labels, profunctor.entries):
        out.append(lab + "," + ",".join(ext.render(c) for c in row))
    return "\n".join(out) + "\n"
