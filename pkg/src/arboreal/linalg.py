"""Exact linear algebra over Q and F_p.

Matrices are stored sparsely as a dict of rows, each row a dict from column
index to a nonzero field element.  Rational entries are kept as ``int`` when
integral and as ``Fraction`` otherwise, so the common case of small integer
matrices never touches ``Fraction`` arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class FieldError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """Base class; concrete fields normalize elements with ``reduce``."""

    characteristic = 0
    name = "field"

    def reduce(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.reduce(x)

    def __eq__(self, other):
        return isinstance(other, Field) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class RationalField(Field):
    name = "QQ"
    characteristic = 0

    def reduce(self, x):
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if x == 1 or x == -1:
            return x
        return self.reduce(Fraction(1) / x)


class PrimeField(Field):
    def __init__(self, p: int):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"GF({p})"

    def reduce(self, x):
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)


QQ = RationalField()


def parse_field(value) -> Field:
    """'rational' / 'QQ' / None give Q; an int or 'prime:7' / '7' gives F_p."""
    if value is None or isinstance(value, Field):
        return value or QQ
    if isinstance(value, int):
        return PrimeField(value)
    s = str(value).strip().lower()
    if s in ("rational", "qq", "q"):
        return QQ
    for prefix in ("prime:", "prime", "gf", "f"):
        if s.startswith(prefix):
            s = s[len(prefix):].strip("():= ")
            break
    try:
        return PrimeField(int(s))
    except ValueError:
        raise FieldError(f"unrecognised field {value!r}") from None


class Matrix:
    """Sparse matrix over an exact field."""

    __slots__ = ("nrows", "ncols", "field", "rows")

    def __init__(self, nrows: int, ncols: int, field: Field = QQ, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        self.rows: Dict[int, Dict[int, object]] = rows if rows is not None else {}

    # construction
    @classmethod
    def zeros(cls, nrows, ncols, field=QQ):
        return cls(nrows, ncols, field)

    @classmethod
    def identity(cls, n, field=QQ):
        return cls(n, n, field, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], field=QQ, ncols=None):
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        rows = {}
        for i, r in enumerate(data):
            if len(r) != ncols:
                raise ValueError("ragged dense matrix")
            d = {}
            for j, v in enumerate(r):
                v = field.reduce(v)
                if v != 0:
                    d[j] = v
            if d:
                rows[i] = d
        return cls(len(data), ncols, field, rows)

    @classmethod
    def from_entries(cls, nrows, ncols, entries: Iterable[Tuple[int, int, object]], field=QQ):
        """Build from (i, j, value) triples; repeated positions are summed."""
        rows: Dict[int, Dict[int, object]] = {}
        red = field.reduce
        for i, j, v in entries:
            r = rows.setdefault(i, {})
            r[j] = red(r.get(j, 0) + v)
        for i in list(rows):
            r = {j: v for j, v in rows[i].items() if v != 0}
            if r:
                rows[i] = r
            else:
                del rows[i]
        return cls(nrows, ncols, field, rows)

    @classmethod
    def from_columns(cls, cols: Sequence[Dict[int, object]], nrows, field=QQ):
        entries = ((i, j, v) for j, c in enumerate(cols) for i, v in c.items())
        return cls.from_entries(nrows, len(cols), entries, field)

    # basic access
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows.get(i, {}).get(j, 0)

    def to_dense(self) -> List[List]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, r in self.rows.items():
            for j, v in r.items():
                out[i][j] = v
        return out

    def nnz(self):
        return sum(len(r) for r in self.rows.values())

    def copy(self):
        return Matrix(self.nrows, self.ncols, self.field,
                      {i: dict(r) for i, r in self.rows.items()})

    def columns(self) -> List[Dict[int, object]]:
        cols: List[Dict[int, object]] = [dict() for _ in range(self.ncols)]
        for i, r in self.rows.items():
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def is_zero(self):
        return not self.rows

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()}, {self.field})"

    # arithmetic
    def transpose(self):
        rows: Dict[int, Dict[int, object]] = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return Matrix(self.ncols, self.nrows, self.field, rows)

    T = property(transpose)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        red = self.field.reduce
        orows = other.rows
        rows = {}
        for i, r in self.rows.items():
            acc: Dict[int, object] = {}
            for k, a in r.items():
                ok = orows.get(k)
                if not ok:
                    continue
                for j, b in ok.items():
                    acc[j] = acc.get(j, 0) + a * b
            acc = {j: red(v) for j, v in acc.items()}
            acc = {j: v for j, v in acc.items() if v != 0}
            if acc:
                rows[i] = acc
        return Matrix(self.nrows, other.ncols, self.field, rows)

    def _combine(self, other, sign):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        red = self.field.reduce
        rows = {i: dict(r) for i, r in self.rows.items()}
        for i, r in other.rows.items():
            t = rows.setdefault(i, {})
            for j, v in r.items():
                w = red(t.get(j, 0) + sign * v)
                if w == 0:
                    t.pop(j, None)
                else:
                    t[j] = w
            if not t:
                del rows[i]
        return Matrix(self.nrows, self.ncols, self.field, rows)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        red = self.field.reduce
        c = red(c)
        if c == 0:
            return Matrix(self.nrows, self.ncols, self.field)
        return Matrix(self.nrows, self.ncols, self.field,
                      {i: {j: red(c * v) for j, v in r.items()} for i, r in self.rows.items()})

    def apply(self, vec: Dict[int, object]) -> Dict[int, object]:
        """Matrix times a sparse column vector."""
        red = self.field.reduce
        out = {}
        for i, r in self.rows.items():
            s = 0
            for j, v in r.items():
                w = vec.get(j)
                if w:
                    s += v * w
            s = red(s)
            if s != 0:
                out[i] = s
        return out

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]):
        cpos = {c: k for k, c in enumerate(col_idx)}
        rows = {}
        for k, i in enumerate(row_idx):
            r = self.rows.get(i)
            if not r:
                continue
            d = {cpos[j]: v for j, v in r.items() if j in cpos}
            if d:
                rows[k] = d
        return Matrix(len(row_idx), len(col_idx), self.field, rows)

    @staticmethod
    def hstack(mats: Sequence["Matrix"]):
        field = mats[0].field
        nrows = mats[0].nrows
        rows: Dict[int, Dict[int, object]] = {}
        off = 0
        for m in mats:
            if m.nrows != nrows:
                raise ValueError("hstack row mismatch")
            for i, r in m.rows.items():
                t = rows.setdefault(i, {})
                for j, v in r.items():
                    t[j + off] = v
            off += m.ncols
        return Matrix(nrows, off, field, rows)

    @staticmethod
    def vstack(mats: Sequence["Matrix"]):
        field = mats[0].field
        ncols = mats[0].ncols
        rows = {}
        off = 0
        for m in mats:
            if m.ncols != ncols:
                raise ValueError("vstack column mismatch")
            for i, r in m.rows.items():
                rows[i + off] = dict(r)
            off += m.nrows
        return Matrix(off, ncols, field, rows)

    # elimination based queries
    def rank(self) -> int:
        return len(_echelon(self.rows.values(), self.field))

    def rref(self) -> Tuple[Dict[int, Dict[int, object]], List[int]]:
        """Reduced row echelon form as {pivot_col: row} plus sorted pivot columns."""
        piv = _echelon(self.rows.values(), self.field)
        _back_substitute(piv, self.field)
        return piv, sorted(piv)

    def nullspace(self) -> "Matrix":
        """Matrix whose columns form a basis of the kernel."""
        piv, pcols = self.rref()
        free = [j for j in range(self.ncols) if j not in piv]
        red = self.field.reduce
        cols = []
        for f in free:
            vec = {f: 1}
            for c, row in piv.items():
                v = row.get(f)
                if v:
                    vec[c] = red(-v)
            cols.append(vec)
        return Matrix.from_columns(cols, self.ncols, self.field)

    def left_nullspace(self) -> "Matrix":
        """Rows y with y @ self == 0, stacked as a matrix."""
        return self.transpose().nullspace().transpose()

    def solve(self, rhs: "Matrix") -> Optional["Matrix"]:
        """Some X with self @ X == rhs, or None when inconsistent."""
        if rhs.nrows != self.nrows:
            raise ValueError("rhs shape mismatch")
        aug = Matrix.hstack([self, rhs])
        piv = _echelon(aug.rows.values(), self.field)
        _back_substitute(piv, self.field)
        n = self.ncols
        if any(c >= n for c in piv):
            return None
        entries = []
        for c, row in piv.items():
            for j, v in row.items():
                if j >= n:
                    entries.append((c, j - n, v))
        return Matrix.from_entries(n, rhs.ncols, entries, self.field)

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows


def _echelon(rows: Iterable[Dict[int, object]], field: Field) -> Dict[int, Dict[int, object]]:
    """Row echelon form by incremental insertion; pivot rows are monic.

    Returns {pivot column: row}.  Rows are processed shortest first, which
    keeps fill-in low on the very sparse boundary matrices used here.
    """
    red = field.reduce
    inv = field.inv
    pivots: Dict[int, Dict[int, object]] = {}
    for row in sorted((r for r in rows if r), key=len):
        row = dict(row)
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                a = row[c]
                if a != 1:
                    ai = inv(a)
                    row = {j: red(v * ai) for j, v in row.items()}
                pivots[c] = row
                break
            f = row[c]
            for j, v in p.items():
                w = red(row.get(j, 0) - f * v)
                if w == 0:
                    row.pop(j, None)
                else:
                    row[j] = w
    return pivots


def _back_substitute(piv: Dict[int, Dict[int, object]], field: Field) -> None:
    red = field.reduce
    for c in sorted(piv, reverse=True):
        prow = piv[c]
        for c2, row in piv.items():
            if c2 >= c:
                continue
            f = row.get(c)
            if f:
                for j, v in prow.items():
                    w = red(row.get(j, 0) - f * v)
                    if w == 0:
                        row.pop(j, None)
                    else:
                        row[j] = w


def rank(m: Matrix) -> int:
    return m.rank()


# ---------------------------------------------------------------------------
# cochain complexes


class CochainComplex:
    """Bounded cochain complex: ``dims[i]`` and ``diff[i]: C^i -> C^{i+1}``."""

    def __init__(self, dims: Dict[int, int], diff: Optional[Dict[int, Matrix]] = None,
                 field: Field = QQ):
        self.dims = {i: d for i, d in dims.items() if d}
        self.field = field
        self.diff = {}
        for i, m in (diff or {}).items():
            if m.shape != (self.dim(i + 1), self.dim(i)):
                raise ValueError(f"differential {i} has shape {m.shape}, "
                                 f"expected {(self.dim(i + 1), self.dim(i))}")
            if not m.is_zero():
                self.diff[i] = m

    @classmethod
    def zero(cls, field=QQ):
        return cls({}, {}, field)

    @classmethod
    def concentrated(cls, degree: int, dim: int, field=QQ):
        return cls({degree: dim}, {}, field)

    def dim(self, i: int) -> int:
        return self.dims.get(i, 0)

    def d(self, i: int) -> Matrix:
        m = self.diff.get(i)
        if m is None:
            return Matrix(self.dim(i + 1), self.dim(i), self.field)
        return m

    def degrees(self):
        return sorted(self.dims)

    def total_dim(self):
        return sum(self.dims.values())

    def is_zero(self):
        return not self.dims

    def check(self) -> bool:
        return all((self.d(i + 1) @ self.d(i)).is_zero() for i in self.diff)

    def ranks(self) -> Dict[int, int]:
        return {i: m.rank() for i, m in self.diff.items()}

    def cohomology_dims(self) -> Dict[int, int]:
        rk = self.ranks()
        out = {}
        for i, n in self.dims.items():
            h = n - rk.get(i, 0) - rk.get(i - 1, 0)
            if h:
                out[i] = h
        return out

    def euler(self) -> int:
        return sum((-1) ** (i % 2) * n for i, n in self.dims.items())

    def shift(self, k: int) -> "CochainComplex":
        """C[k]^i = C^{i+k} with differential multiplied by (-1)^k."""
        s = -1 if k % 2 else 1
        return CochainComplex({i - k: n for i, n in self.dims.items()},
                              {i - k: (m if s == 1 else -m) for i, m in self.diff.items()},
                              self.field)

    def dual(self) -> "CochainComplex":
        """Linear dual: degree -i holds (C^i)^*, differential the transpose."""
        return CochainComplex({-i: n for i, n in self.dims.items()},
                              {-i - 1: m.transpose() for i, m in self.diff.items()},
                              self.field)

    def cocycles(self, i: int) -> Matrix:
        return self.d(i).nullspace()

    def __repr__(self):
        return f"CochainComplex(dims={dict(sorted(self.dims.items()))})"


class ChainMap:
    """Degreewise matrices between two cochain complexes."""

    def __init__(self, source: CochainComplex, target: CochainComplex,
                 comps: Optional[Dict[int, Matrix]] = None):
        self.source = source
        self.target = target
        self.comps = {}
        for i, m in (comps or {}).items():
            if m.shape != (target.dim(i), source.dim(i)):
                raise ValueError(f"component {i} has shape {m.shape}")
            if not m.is_zero():
                self.comps[i] = m

    def at(self, i: int) -> Matrix:
        m = self.comps.get(i)
        if m is None:
            return Matrix(self.target.dim(i), self.source.dim(i), self.source.field)
        return m

    def is_chain_map(self) -> bool:
        degs = set(self.source.dims) | set(self.target.dims)
        for i in degs:
            lhs = self.target.d(i) @ self.at(i)
            rhs = self.at(i + 1) @ self.source.d(i)
            if lhs != rhs:
                return False
        return True

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self o first."""
        comps = {i: self.at(i) @ first.at(i) for i in first.comps}
        return ChainMap(first.source, self.target, comps)

    @classmethod
    def identity(cls, c: CochainComplex):
        return cls(c, c, {i: Matrix.identity(n, c.field) for i, n in c.dims.items()})

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        degs = set(self.comps) | set(other.comps)
        return all(self.at(i) == other.at(i) for i in degs)

    def rank(self, i: int) -> int:
        return self.at(i).rank()
