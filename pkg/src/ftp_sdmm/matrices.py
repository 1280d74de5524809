"""Matrices over any field object, inner-product block partitioning, and the
pinned deterministic RNG (splitmix64 with per-digit rejection sampling)."""

from dataclasses import dataclass

from .errors import DimMismatch, NotDivisible

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64; digits are drawn by rejection so every residue is exactly
    uniform and runs reproduce across platforms."""

    def __init__(self, seed):
        self.state = seed & _MASK64

    def next64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n):
        bound = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next64()
            if v < bound:
                return v % n


class Mat:
    """Row-major matrix of field elements."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows, cols, data):
        if len(data) != rows or any(len(r) != cols for r in data):
            raise DimMismatch(f"data does not fill {rows}x{cols}")
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = [list(r) for r in data]

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, rows, cols, [[field.zero() for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def identity(cls, field, n):
        m = cls.zeros(field, n, n)
        for i in range(n):
            m.data[i][i] = field.one()
        return m

    def map(self, fn):
        return Mat(self.field, self.rows, self.cols,
                   [[fn(v) for v in row] for row in self.data])

    def add(self, other):
        self._conform(other)
        f = self.field
        return Mat(f, self.rows, self.cols,
                   [[f.add(a, b) for a, b in zip(r1, r2)]
                    for r1, r2 in zip(self.data, other.data)])

    def neg(self):
        f = self.field
        return self.map(f.neg)

    def scale(self, c):
        f = self.field
        return self.map(lambda v: f.mul(c, v))

    def eq(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        f = self.field
        return all(
            f.eq(a, b)
            for r1, r2 in zip(self.data, other.data)
            for a, b in zip(r1, r2)
        )

    def _conform(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimMismatch(
                f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )


def mat_mul(x, y):
    if x.cols != y.rows:
        raise DimMismatch(f"{x.rows}x{x.cols} times {y.rows}x{y.cols}")
    f = x.field
    out = Mat.zeros(f, x.rows, y.cols)
    for i in range(x.rows):
        for k in range(x.cols):
            xv = x.data[i][k]
            if f.is_zero(xv):
                continue
            for j in range(y.cols):
                out.data[i][j] = f.add(out.data[i][j], f.mul(xv, y.data[k][j]))
    return out


@dataclass
class Partition:
    L: int
    A_blocks: list
    B_blocks: list


def partition_inner(A, B, L):
    """Split A into L column blocks and B into L row blocks so that
    AB = sum_l A_l B_l."""
    if A.cols != B.rows:
        raise DimMismatch("inner dimensions differ")
    if A.cols % L != 0:
        raise NotDivisible(f"L={L} does not divide b={A.cols}")
    w = A.cols // L
    a_blocks = [
        Mat(A.field, A.rows, w, [row[l * w : (l + 1) * w] for row in A.data])
        for l in range(L)
    ]
    b_blocks = [
        Mat(B.field, w, B.cols, B.data[l * w : (l + 1) * w]) for l in range(L)
    ]
    return Partition(L, a_blocks, b_blocks)


def random_mat(rows, cols, field, seed=None, rng=None):
    """Entrywise-uniform matrix; deterministic for a fixed seed.  Entries are
    drawn row-major."""
    if rng is None:
        rng = SplitMix64(0 if seed is None else seed)
    return Mat(field, rows, cols,
               [[field.random(rng) for _ in range(cols)] for _ in range(rows)])
