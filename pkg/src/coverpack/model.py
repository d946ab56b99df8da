"""Problem instances for covering/packing integer programs.

An instance bundles nonnegative data (A, B, a, b, c, d) describing

    minimize    c . x
    subject to  A x >= a      (covering rows, m of them)
                B x <= b      (packing rows, r of them)
                0 <= x <= d   (multiplicity bounds; d_j may be unbounded)
                x integer.

All entries are exact ``fractions.Fraction`` values.  Instances are
immutable after construction and safe to share across threads; every
operation here is a pure function of its inputs.

The canonical interchange format is a UTF-8 JSON document::

    {"A": [[...]], "a": [...], "B": [[...]], "b": [...],
     "c": [...], "d": [..., null, ...]}

``B``/``b`` may be omitted (no packing rows).  ``d`` entries of ``null``
mean unbounded.  Numbers are plain decimals or strings "p/q" for exact
rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Iterator, Sequence

#: Sentinel for a missing multiplicity bound (d_j = infinity).
UNBOUNDED = None

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


class CoverpackError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(CoverpackError):
    """Instance data is malformed or inconsistent."""


class ParseError(InstanceError):
    """Instance document is not well formed."""


def as_fraction(value, where: str = "value") -> Fraction:
    """Coerce an int, Fraction, float, or 'p/q'/decimal string exactly."""
    if isinstance(value, bool) or value is None:
        raise InstanceError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (str, float)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"{where}: cannot read {value!r} as a rational") from exc
    raise InstanceError(f"{where}: unsupported number type {type(value).__name__}")


def dot(u: Sequence[Fraction], v: Sequence) -> Fraction:
    return sum((ui * vi for ui, vi in zip(u, v)), Fraction(0))


def mat_vec(rows: Matrix, x: Sequence) -> Vector:
    return tuple(dot(row, x) for row in rows)


@dataclass(frozen=True)
class CpipInstance:
    """A covering/packing integer program (A, B, a, b, c, d)."""

    A: Matrix
    a: Vector
    B: Matrix
    b: Vector
    c: Vector
    d: tuple[Fraction | None, ...]

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def r(self) -> int:
        return len(self.b)

    def beta(self) -> Vector:
        """Row sums of the packing matrix."""
        return tuple(sum(row, Fraction(0)) for row in self.B)

    @classmethod
    def from_data(cls, A, a, c, d, B=(), b=(), *, allow_no_cover_rows: bool = True) -> "CpipInstance":
        """Validate raw (possibly mixed int/str/float) data and build an instance."""
        cf = tuple(as_fraction(v, f"c[{j}]") for j, v in enumerate(c))
        n = len(cf)
        if n == 0:
            raise InstanceError("instance has no variables")
        Af = tuple(
            tuple(as_fraction(v, f"A[{i}][{j}]") for j, v in enumerate(row))
            for i, row in enumerate(A)
        )
        af = tuple(as_fraction(v, f"a[{i}]") for i, v in enumerate(a))
        Bf = tuple(
            tuple(as_fraction(v, f"B[{i}][{j}]") for j, v in enumerate(row))
            for i, row in enumerate(B)
        )
        bf = tuple(as_fraction(v, f"b[{i}]") for i, v in enumerate(b))
        df = tuple(
            None if v is None else as_fraction(v, f"d[{j}]") for j, v in enumerate(d)
        )
        if len(Af) != len(af):
            raise InstanceError(f"A has {len(Af)} rows but a has {len(af)} entries")
        if len(Bf) != len(bf):
            raise InstanceError(f"B has {len(Bf)} rows but b has {len(bf)} entries")
        if not allow_no_cover_rows and len(Af) == 0:
            raise InstanceError("instance has no covering rows")
        for i, row in enumerate(Af):
            if len(row) != n:
                raise InstanceError(f"A row {i} has {len(row)} entries, expected {n}")
        for i, row in enumerate(Bf):
            if len(row) != n:
                raise InstanceError(f"B row {i} has {len(row)} entries, expected {n}")
        if len(df) != n:
            raise InstanceError(f"d has {len(df)} entries, expected {n}")
        for name, vecs in (("A", Af), ("B", Bf)):
            for i, row in enumerate(vecs):
                for j, v in enumerate(row):
                    if v < 0:
                        raise InstanceError(f"{name}[{i}][{j}] = {v} is negative")
        for name, vec in (("a", af), ("b", bf), ("c", cf)):
            for i, v in enumerate(vec):
                if v < 0:
                    raise InstanceError(f"{name}[{i}] = {v} is negative")
        for j, v in enumerate(df):
            if v is not None and v < 0:
                raise InstanceError(f"d[{j}] = {v} is negative")
        return cls(A=Af, a=af, B=Bf, b=bf, c=cf, d=df)


@dataclass(frozen=True)
class InstanceMetrics:
    """Width and dilation of the covering system.

    width: min over positive entries of a_i / A_ij (>= 1 once normalized).
    dilation: max number of covering rows any single variable appears in.
    """

    width: Fraction
    dilation: int


@dataclass(frozen=True)
class FractionalVector:
    """Nonnegative rational candidate solution."""

    values: Vector

    def __post_init__(self):
        for j, v in enumerate(self.values):
            if v < 0:
                raise InstanceError(f"x[{j}] = {v} is negative")

    @classmethod
    def of(cls, values) -> "FractionalVector":
        return cls(tuple(as_fraction(v, f"x[{j}]") for j, v in enumerate(values)))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __getitem__(self, j: int) -> Fraction:
        return self.values[j]


@dataclass(frozen=True)
class IntegerVector:
    """Nonnegative integer candidate solution."""

    values: tuple[int, ...]

    def __post_init__(self):
        for j, v in enumerate(self.values):
            if not isinstance(v, int) or v < 0:
                raise InstanceError(f"x[{j}] = {v!r} is not a nonnegative integer")

    @classmethod
    def of(cls, values) -> "IntegerVector":
        return cls(tuple(int(v) for v in values))

    def as_fractions(self) -> Vector:
        return tuple(Fraction(v) for v in self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __getitem__(self, j: int) -> int:
        return self.values[j]


def vec_ceil(x: Sequence[Fraction]) -> tuple[int, ...]:
    return tuple(ceil(v) for v in x)


def vec_floor(x: Sequence[Fraction]) -> tuple[int, ...]:
    return tuple(floor(v) for v in x)


def normalize_width(inst: CpipInstance) -> CpipInstance:
    """Lower covering coefficients so no entry exceeds its row demand.

    Each A_ij becomes min(A_ij, a_i); rows with a_i = 0 are vacuous and
    removed outright (keeping them would force the width to 0).  The set
    of integer solutions is unchanged.
    """
    keep = [i for i in range(inst.m) if inst.a[i] > 0]
    A = tuple(
        tuple(min(inst.A[i][j], inst.a[i]) for j in range(inst.n)) for i in keep
    )
    a = tuple(inst.a[i] for i in keep)
    return CpipInstance(A=A, a=a, B=inst.B, b=inst.b, c=inst.c, d=inst.d)


def is_width_normalized(inst: CpipInstance) -> bool:
    return all(
        inst.a[i] > 0 and all(v <= inst.a[i] for v in inst.A[i]) for i in range(inst.m)
    )


def metrics(inst: CpipInstance) -> InstanceMetrics:
    """Width and dilation of the covering system (requires some A_ij > 0)."""
    if inst.m == 0:
        raise InstanceError("no covering structure: instance has no covering rows")
    ratios = [
        inst.a[i] / inst.A[i][j]
        for i in range(inst.m)
        for j in range(inst.n)
        if inst.A[i][j] > 0
    ]
    if not ratios:
        raise InstanceError("no covering structure: A is all zeros")
    dilation = max(
        sum(1 for i in range(inst.m) if inst.A[i][j] > 0) for j in range(inst.n)
    )
    return InstanceMetrics(width=min(ratios), dilation=dilation)


def _number_out(v: Fraction):
    if v.denominator == 1:
        return int(v)
    return f"{v.numerator}/{v.denominator}"


def parse_instance(doc: str) -> CpipInstance:
    """Parse an instance document (see module docstring for the format)."""
    try:
        raw = json.loads(doc, parse_float=Fraction, parse_int=int)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError("top-level value must be an object")
    unknown = set(raw) - {"A", "a", "B", "b", "c", "d"}
    if unknown:
        raise ParseError(f"unknown fields: {sorted(unknown)}")
    for field in ("A", "a", "c"):
        if field not in raw:
            raise ParseError(f"missing required field {field!r}")
    if ("B" in raw) != ("b" in raw):
        raise ParseError("fields B and b must be given together")
    A, a, c = raw["A"], raw["a"], raw["c"]
    if not isinstance(A, list) or not all(isinstance(row, list) for row in A):
        raise ParseError("field A must be a list of rows")
    if not A:
        raise ParseError("field A must contain at least one covering row")
    if not isinstance(c, list) or not c:
        raise ParseError("field c must be a non-empty list (empty variable list)")
    d = raw.get("d", [None] * len(c))
    B = raw.get("B", [])
    b = raw.get("b", [])
    return CpipInstance.from_data(A=A, a=a, c=c, d=d, B=B, b=b)


def serialize_instance(inst: CpipInstance) -> str:
    """Render an instance as a canonical document; exact round-trip."""
    obj = {
        "A": [[_number_out(v) for v in row] for row in inst.A],
        "a": [_number_out(v) for v in inst.a],
        "c": [_number_out(v) for v in inst.c],
        "d": [None if v is None else _number_out(v) for v in inst.d],
    }
    if inst.r > 0:
        obj["B"] = [[_number_out(v) for v in row] for row in inst.B]
        obj["b"] = [_number_out(v) for v in inst.b]
    return json.dumps(obj)
