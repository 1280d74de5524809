"""Dense univariate polynomials over any field object from ``fields``:
evaluation, Lagrange interpolation/basis, annihilators, and the dual-code
weights of a Reed-Solomon evaluation domain."""

from dataclasses import dataclass, field as dc_field

from .errors import DuplicatePoint, FieldMismatch, IndexOutOfRange
from .fields import batch_inv


class Poly:
    """Coefficients low degree first; trailing zeros trimmed."""

    def __init__(self, field, coeffs):
        self.field = field
        cs = list(coeffs)
        while cs and field.is_zero(cs[-1]):
            cs.pop()
        self.coeffs = cs

    @classmethod
    def zero(cls, field):
        return cls(field, [])

    @classmethod
    def one(cls, field):
        return cls(field, [field.one()])

    @classmethod
    def constant(cls, field, c):
        return cls(field, [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def add(self, other):
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [f.zero()] * (n - len(self.coeffs))
        b = other.coeffs + [f.zero()] * (n - len(other.coeffs))
        return Poly(f, [f.add(x, y) for x, y in zip(a, b)])

    def sub(self, other):
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [f.zero()] * (n - len(self.coeffs))
        b = other.coeffs + [f.zero()] * (n - len(other.coeffs))
        return Poly(f, [f.sub(x, y) for x, y in zip(a, b)])

    def mul(self, other):
        f = self.field
        if self.is_zero() or other.is_zero():
            return Poly.zero(f)
        out = [f.zero() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if f.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = f.add(out[i + j], f.mul(a, b))
        return Poly(f, out)

    def scale(self, c):
        f = self.field
        return Poly(f, [f.mul(c, a) for a in self.coeffs])

    def eq(self, other):
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(self.field.eq(a, b) for a, b in zip(self.coeffs, other.coeffs))


def eval_poly(f, x, field=None):
    """Horner evaluation; ``field`` guards against cross-field arguments."""
    fld = f.field
    if field is not None and field != fld:
        raise FieldMismatch("polynomial and point belong to different fields")
    acc = fld.zero()
    for c in reversed(f.coeffs):
        acc = fld.add(fld.mul(acc, x), c)
    return acc


def eval_poly_scalar(f, s):
    """Horner evaluation at a base-field scalar of a tower-coefficient
    polynomial (avoids full tower multiplications)."""
    fld = f.field
    acc = fld.zero()
    for c in reversed(f.coeffs):
        acc = fld.add(fld.scalar_mul(acc, s), c)
    return acc


def _check_distinct(field, points):
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if field.eq(points[i], points[j]):
                raise DuplicatePoint(f"points {i} and {j} coincide")


def annihilator(field, points):
    """Monic product of (x - a) over the points; empty set gives 1."""
    out = Poly.one(field)
    for a in points:
        out = out.mul(Poly(field, [field.neg(a), field.one()]))
    return out


def lagrange_basis(field, i, points):
    """Polynomial with value 1 at points[i] and 0 at the others (0-based i)."""
    if not 0 <= i < len(points):
        raise IndexOutOfRange(f"index {i} for {len(points)} points")
    _check_distinct(field, points)
    num = Poly.one(field)
    denom = field.one()
    for j, a in enumerate(points):
        if j == i:
            continue
        num = num.mul(Poly(field, [field.neg(a), field.one()]))
        denom = field.mul(denom, field.sub(points[i], a))
    return num.scale(field.inv(denom))


def lagrange_interpolate(field, points, values):
    """Unique polynomial of degree < len(points) through the given pairs."""
    if len(points) != len(values):
        raise DuplicatePoint("points and values differ in length")
    _check_distinct(field, points)
    out = Poly.zero(field)
    denoms = []
    for i, a in enumerate(points):
        d = field.one()
        for j, b in enumerate(points):
            if j != i:
                d = field.mul(d, field.sub(a, b))
        denoms.append(d)
    invs = batch_inv(field, denoms)
    for i in range(len(points)):
        num = Poly.one(field)
        for j, b in enumerate(points):
            if j != i:
                num = num.mul(Poly(field, [field.neg(b), field.one()]))
        out = out.add(num.scale(field.mul(invs[i], values[i])))
    return out


def dual_weights(field, points):
    """v_j = prod_{i != j} (a_j - a_i)^(-1): the column multipliers putting the
    dual of the Reed-Solomon code on this domain in GRS form."""
    _check_distinct(field, points)
    prods = []
    for j, a in enumerate(points):
        acc = field.one()
        for i, b in enumerate(points):
            if i != j:
                acc = field.mul(acc, field.sub(a, b))
        prods.append(acc)
    return batch_inv(field, prods)


@dataclass
class EvalDomain:
    """Ordered distinct points with their dual-code weights."""

    field: object
    points: list
    weights: list = dc_field(default=None)

    def __post_init__(self):
        if self.weights is None:
            self.weights = dual_weights(self.field, self.points)

    def __len__(self):
        return len(self.points)


def dual_orthogonality_check(domain, k, h_values, s_count):
    """True iff sum_j v_j * k(a_j) * a_j^s * h_j = 0 for all 0 <= s < s_count."""
    fld = domain.field
    if len(h_values) != len(domain.points):
        raise FieldMismatch("one h value per domain point required")
    terms = []
    for j, a in enumerate(domain.points):
        base = fld.mul(domain.weights[j], fld.mul(eval_poly(k, a), h_values[j]))
        terms.append((a, base))
    for s in range(s_count):
        acc = fld.zero()
        for a, base in terms:
            acc = fld.add(acc, fld.mul(fld.pow(a, s), base))
        if not fld.is_zero(acc):
            return False
    return True
