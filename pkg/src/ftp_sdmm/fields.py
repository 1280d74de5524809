"""Finite-field stack: prime fields, base extensions F_{q0} = F_p^d, and
composite towers F_q = F_{q0}(a_1, ..., a_L) with one axis per extension.

Representation: a tower element is an int64 tensor of shape
(p_1, ..., p_L, d); entry [e_1, ..., e_L, k] is the F_p coefficient of
x^k in the F_{q0} coefficient of a_1^{e_1} * ... * a_L^{e_L}.  This is the
tensor-product representation F_{q0}[x_1, ..., x_L]/(m_1, ..., m_L), valid
because the axis degrees are pairwise coprime.

Traces to the maximal subfields F_i = F_{q0}(a_j : j != i) collapse axis i
with precomputed scalars; the naive Frobenius-iterate definition is kept in
the test suite as an oracle.
"""

import numpy as np

from .errors import (
    BadGroupIndex,
    FieldMismatch,
    NoIrreducible,
    NonPrime,
    PrimesNotAscendingDistinct,
    SingularGram,
    ZeroInverse,
)
from .kernels import convolve


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# -- generic dense polynomial helpers (internal, for modulus search) ----------
# Coefficient lists are low-degree first over an arbitrary field object.

def _ptrim(f, c):
    while c and f.is_zero(c[-1]):
        c.pop()
    return c


def _pmul(f, a, b):
    if not a or not b:
        return []
    out = [f.zero() for _ in range(len(a) + len(b) - 1)]
    for i, ai in enumerate(a):
        if f.is_zero(ai):
            continue
        for j, bj in enumerate(b):
            out[i + j] = f.add(out[i + j], f.mul(ai, bj))
    return _ptrim(f, out)


def _pmod(f, a, m):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        shift = len(a) - 1 - dm
        if not f.is_zero(lead):
            for j in range(dm):
                a[shift + j] = f.sub(a[shift + j], f.mul(lead, m[j]))
        a.pop()
    return _ptrim(f, a)


def _ppow_mod(f, a, e, m):
    result = [f.one()]
    base = _pmod(f, a, m)
    while e:
        if e & 1:
            result = _pmod(f, _pmul(f, result, base), m)
        base = _pmod(f, _pmul(f, base, base), m)
        e >>= 1
    return result


def _pgcd_is_const(f, a, b):
    # True iff gcd(a, b) has degree 0
    a, b = list(a), list(b)
    while b:
        # make b monic
        lead_inv = f.inv(b[-1])
        b = [f.mul(c, lead_inv) for c in b]
        a, b = b, _pmod(f, a, b)
    return len(a) == 1


class PrimeField:
    """F_p with elements represented as plain ints in [0, p)."""

    def __init__(self, p):
        if not is_prime(p):
            raise NonPrime(f"{p} is not prime")
        self.p = p

    @property
    def order(self):
        return self.p

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def neg(self, x):
        return (-x) % self.p

    def mul(self, x, y):
        return (x * y) % self.p

    def inv(self, x):
        if x % self.p == 0:
            raise ZeroInverse("0 has no inverse")
        return pow(x, self.p - 2, self.p)

    def pow(self, x, e):
        return pow(x, e, self.p)

    def eq(self, x, y):
        return (x - y) % self.p == 0

    def is_zero(self, x):
        return x % self.p == 0

    def elements(self):
        return iter(range(self.p))

    def random(self, rng):
        return rng.below(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


def _fp_poly_is_irreducible(p, coeffs):
    """Brute-force factor search: trial division by every monic polynomial of
    degree 1..d//2 over F_p.  coeffs low-first, monic, degree d >= 1."""
    d = len(coeffs) - 1
    if d == 1:
        return True
    f = PrimeField(p)
    for deg in range(1, d // 2 + 1):
        for idx in range(p**deg):
            div = []
            k = idx
            for _ in range(deg):
                div.append(k % p)
                k //= p
            div.append(1)
            if not _pmod(f, list(coeffs), div):
                return False
    return True


class BaseField:
    """F_{q0} = F_p[x]/(modulus), elements as int64 coefficient vectors of
    length d (low degree first)."""

    def __init__(self, p, d, modulus=None):
        if not is_prime(p):
            raise NonPrime(f"{p} is not prime")
        if d < 1:
            raise NoIrreducible("degree must be >= 1")
        self.p = p
        self.d = d
        if modulus is None:
            modulus = self._smallest_irreducible()
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != d + 1 or modulus[-1] != 1:
            raise NoIrreducible("modulus must be monic of degree d")
        if not _fp_poly_is_irreducible(p, modulus):
            raise NoIrreducible(f"modulus {modulus} is reducible over F_{p}")
        self.modulus = tuple(modulus)
        self._redmat = self._build_redmat()

    def _smallest_irreducible(self):
        # Candidates in lexicographic order, coefficients compared
        # low-degree-first: c_0 is the most significant enumeration digit.
        p, d = self.p, self.d
        for idx in range(p**d):
            digits = []
            k = idx
            for _ in range(d):
                digits.append(k % p)
                k //= p
            digits.reverse()  # digits[0] = c_0
            cand = digits + [1]
            if _fp_poly_is_irreducible(p, cand):
                return cand
        raise NoIrreducible(f"no irreducible of degree {d} over F_{p}")

    def _build_redmat(self):
        # x^k mod modulus for k in [0, 2d-2]
        d, p = self.d, self.p
        mat = np.zeros((2 * d - 1, d), dtype=np.int64)
        row = np.zeros(d, dtype=np.int64)
        row[0] = 1
        mat[0] = row
        for k in range(1, 2 * d - 1):
            shifted = np.zeros(d + 1, dtype=np.int64)
            shifted[1:] = row
            if shifted[d]:
                lead = shifted[d]
                for j in range(d):
                    shifted[j] = (shifted[j] - lead * self.modulus[j]) % p
            row = shifted[:d] % p
            mat[k] = row
        return mat

    @property
    def order(self):
        return self.p**self.d

    def zero(self):
        return np.zeros(self.d, dtype=np.int64)

    def one(self):
        e = np.zeros(self.d, dtype=np.int64)
        e[0] = 1
        return e

    def from_coeffs(self, coeffs):
        x = np.asarray(coeffs, dtype=np.int64) % self.p
        if x.shape != (self.d,):
            raise FieldMismatch(f"expected {self.d} coefficients")
        return x

    def from_int(self, k):
        # enumeration index -> element; c_0 is the most significant digit,
        # so ordering by k is lexicographic low-degree-first.
        digits = []
        for _ in range(self.d):
            digits.append(k % self.p)
            k //= self.p
        digits.reverse()
        return np.array(digits, dtype=np.int64)

    def to_int(self, x):
        v = 0
        for c in x:
            v = v * self.p + int(c)
        return v

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def neg(self, x):
        return (-x) % self.p

    def mul(self, x, y):
        full = np.convolve(x, y)
        if full.shape[0] < 2 * self.d - 1:
            full = np.pad(full, (0, 2 * self.d - 1 - full.shape[0]))
        return (full @ self._redmat) % self.p

    def mul_matrix(self, s):
        """d x d matrix of multiplication by s acting on coefficient rows:
        (x @ M)[b] = coeff b of x*s."""
        d = self.d
        shifted = np.zeros((d, 2 * d - 1), dtype=np.int64)
        for a in range(d):
            shifted[a, a : a + d] = s
        return (shifted @ self._redmat) % self.p

    def pow(self, x, e):
        result = self.one()
        base = x % self.p
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, x):
        if self.is_zero(x):
            raise ZeroInverse("0 has no inverse")
        return self.pow(x, self.order - 2)

    def eq(self, x, y):
        return np.array_equal(x % self.p, y % self.p)

    def is_zero(self, x):
        return not (x % self.p).any()

    def elements(self):
        for k in range(self.order):
            yield self.from_int(k)

    def random(self, rng):
        return np.array([rng.below(self.p) for _ in range(self.d)], dtype=np.int64)

    def __eq__(self, other):
        return (
            isinstance(other, BaseField)
            and other.p == self.p
            and other.d == self.d
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("BaseField", self.p, self.d, self.modulus))

    def __repr__(self):
        return f"BaseField(p={self.p}, d={self.d})"


def make_base_field(p, d):
    """F_{p^d} with the lexicographically smallest monic irreducible modulus."""
    return BaseField(p, d)


class TowerField:
    """F_q = F_{q0}(a_1, ..., a_L) with per-axis moduli m_i, the
    lexicographically smallest monic irreducibles of degree p_i over F_{q0}."""

    def __init__(self, base, primes):
        primes = tuple(int(p) for p in primes)
        if not primes or any(not is_prime(p) for p in primes):
            raise PrimesNotAscendingDistinct(f"tower degrees must be primes: {primes}")
        if any(a >= b for a, b in zip(primes, primes[1:])):
            raise PrimesNotAscendingDistinct(f"primes must be strictly ascending: {primes}")
        self.base = base
        self.primes = primes
        self.L = len(primes)
        self.shape = primes + (base.d,)
        self.flat_size = int(np.prod(primes))
        self.moduli = [self._smallest_irreducible(p) for p in primes]
        self._ext_shape = tuple(2 * p - 1 for p in primes)
        self._ext_flat = int(np.prod(self._ext_shape))
        self._addtable = self._build_addtable()
        self._redmats = [self._build_axis_redmat(i) for i in range(self.L)]
        self._trace_mats, self._trace_scalars = zip(
            *(self._build_trace(i) for i in range(self.L))
        )
        self._frob_mats = [self._build_frobenius(i) for i in range(self.L)]

    # -- construction helpers --------------------------------------------------

    def _smallest_irreducible(self, n):
        """Lexicographically smallest monic irreducible of degree n over the
        base field (coefficients compared low-degree-first as integers, i.e.
        by base-field enumeration index).  Rabin test for prime degree."""
        f = self.base
        q0 = f.order
        # c_0 = 0 means divisibility by x; skip the whole block.
        for c0_idx in range(1, q0):
            c0 = f.from_int(c0_idx)
            for rest_idx in range(q0 ** (n - 1)):
                digits = []
                k = rest_idx
                for _ in range(n - 1):
                    digits.append(k % q0)
                    k //= q0
                digits.reverse()  # digits[0] = c_1
                cand = [c0] + [f.from_int(t) for t in digits] + [f.one()]
                if self._is_irreducible(cand, n):
                    return cand
        raise NoIrreducible(f"no irreducible of degree {n} over F_{q0}")

    def _is_irreducible(self, m, n):
        # n prime: irreducible iff gcd(x^q0 - x, m) = 1 and x^(q0^n) = x mod m
        f = self.base
        q0 = f.order
        x = [f.zero(), f.one()]
        u = _ppow_mod(f, x, q0, m)
        diff = _ptrim(f, [f.sub(a, b) for a, b in
                          zip(u + [f.zero()] * 2, x + [f.zero()] * len(u))])
        if not diff:  # x^q0 == x: m splits over F_{q0} unless n == 1
            return n == 1
        if not _pgcd_is_const(f, m, diff):
            return False
        w = u
        for _ in range(n - 1):
            w = _ppow_mod(f, w, q0, m)
        wm = _ptrim(f, [f.sub(a, b) for a, b in
                        zip(w + [f.zero()] * 2, x + [f.zero()] * len(w))])
        return not wm

    def _build_addtable(self):
        m = self.flat_size
        idx = np.stack(np.unravel_index(np.arange(m), self.primes), axis=1)
        sums = idx[:, None, :] + idx[None, :, :]
        flat = np.ravel_multi_index(
            tuple(sums[:, :, k] for k in range(self.L)), self._ext_shape
        )
        return np.ascontiguousarray(flat.astype(np.int64))

    def _xpow_table(self, i, upto):
        """Coefficient lists of x^k mod m_i for k in [0, upto)."""
        f = self.base
        m = self.moduli[i]
        p_i = self.primes[i]
        rows = []
        cur = [f.one()]
        for _ in range(upto):
            padded = cur + [f.zero()] * (p_i - len(cur))
            rows.append(padded)
            cur = _pmod(f, [f.zero()] + cur, m)
        return rows

    def _build_axis_redmat(self, i):
        p_i = self.primes[i]
        d = self.base.d
        rows = self._xpow_table(i, 2 * p_i - 1)
        mat = np.zeros((2 * p_i - 1, p_i, d, d), dtype=np.int64)
        for k, row in enumerate(rows):
            for e, c in enumerate(row):
                mat[k, e] = self.base.mul_matrix(c)
        return mat

    def _frob_images(self, i):
        """x^(q0^t) mod m_i for t in [0, p_i)."""
        f = self.base
        m = self.moduli[i]
        imgs = [[f.zero(), f.one()]]
        for _ in range(self.primes[i] - 1):
            imgs.append(_ppow_mod(f, imgs[-1], f.order, m))
        return imgs

    def _build_trace(self, i):
        """Scalars t_s = tr_{F_{q0}(a_i)/F_{q0}}(a_i^s), both as raw base-field
        elements and as multiplication matrices."""
        f = self.base
        m = self.moduli[i]
        p_i = self.primes[i]
        d = f.d
        imgs = self._frob_images(i)
        powacc = [[f.one()] for _ in range(p_i)]
        mats = np.zeros((p_i, d, d), dtype=np.int64)
        scalars = []
        for s in range(p_i):
            tot = f.zero()
            for t in range(p_i):
                poly = powacc[t]
                # accumulate constant term; higher coefficients must cancel
                tot = f.add(tot, poly[0] if poly else f.zero())
            # sanity: the full sum must be a constant polynomial
            full = [f.zero() for _ in range(p_i)]
            for t in range(p_i):
                for j, c in enumerate(powacc[t]):
                    full[j] = f.add(full[j], c)
            assert all(f.is_zero(c) for c in full[1:]), "trace scalar not in base field"
            scalars.append(tot)
            mats[s] = f.mul_matrix(tot)
            for t in range(p_i):
                powacc[t] = _pmod(f, _pmul(f, powacc[t], imgs[t]), m)
        return mats, scalars

    def _build_frobenius(self, i):
        """Expansion of (a_i^s)^{q0} in the power basis, as mult matrices."""
        f = self.base
        m = self.moduli[i]
        p_i = self.primes[i]
        d = f.d
        pi1 = self._frob_images(i)[1] if p_i > 1 else [f.zero(), f.one()]
        mat = np.zeros((p_i, p_i, d, d), dtype=np.int64)
        cur = [f.one()]
        for s in range(p_i):
            for e, c in enumerate(cur):
                mat[s, e] = f.mul_matrix(c)
            cur = _pmod(f, _pmul(f, cur, pi1), m)
        return mat

    # -- element constructors ---------------------------------------------------

    @property
    def order_int(self):
        return self.base.order**self.flat_size

    def zero(self):
        return np.zeros(self.shape, dtype=np.int64)

    def one(self):
        e = self.zero()
        e[(0,) * self.L + (0,)] = 1
        return e

    def embed_base(self, b):
        e = self.zero()
        e[(0,) * self.L] = b
        return e

    def embed_scalar_int(self, k):
        return self.embed_base(self.base.from_int(k))

    def gen(self, i):
        """The generator a_i (1-based axis index)."""
        self._check_axis(i)
        e = self.zero()
        idx = [0] * self.L
        idx[i - 1] = 1
        e[tuple(idx)] = self.base.one()
        return e

    def from_int(self, k):
        digits = []
        q0 = self.base.order
        for _ in range(self.flat_size):
            digits.append(k % q0)
            k //= q0
        digits.reverse()
        flat = np.stack([self.base.from_int(t) for t in digits])
        return flat.reshape(self.shape)

    def to_int(self, x):
        flat = x.reshape(self.flat_size, self.base.d)
        v = 0
        for row in flat:
            v = v * self.base.order + self.base.to_int(row)
        return v

    def elements(self):
        for k in range(self.order_int):
            yield self.from_int(k)

    def random(self, rng):
        p = self.base.p
        flat = np.array(
            [rng.below(p) for _ in range(self.flat_size * self.base.d)],
            dtype=np.int64,
        )
        return flat.reshape(self.shape)

    # -- arithmetic --------------------------------------------------------------

    def add(self, x, y):
        return (x + y) % self.base.p

    def sub(self, x, y):
        return (x - y) % self.base.p

    def neg(self, x):
        return (-x) % self.base.p

    def mul(self, x, y):
        d = self.base.d
        xf = np.ascontiguousarray(x.reshape(self.flat_size, d))
        yf = np.ascontiguousarray(y.reshape(self.flat_size, d))
        ext = convolve(xf, yf, self._addtable, self._ext_flat)
        cur = (ext @ self.base._redmat) % self.base.p
        cur = cur.reshape(self._ext_shape + (d,))
        for i in range(self.L - 1, -1, -1):
            arr = np.moveaxis(cur, i, -2)
            lead = arr.shape[:-2]
            arr = arr.reshape(-1, arr.shape[-2], d)
            out = np.einsum("nka,keab->neb", arr, self._redmats[i]) % self.base.p
            out = out.reshape(lead + (self.primes[i], d))
            cur = np.moveaxis(out, -2, i)
        return np.ascontiguousarray(cur)

    def scalar_mul(self, x, s):
        """Multiply by a base-field scalar s (cheap, no convolution)."""
        mt = self.base.mul_matrix(s)
        d = self.base.d
        return ((x.reshape(-1, d) @ mt) % self.base.p).reshape(self.shape)

    def pow(self, x, e):
        result = self.one()
        b = x % self.base.p
        while e:
            if e & 1:
                result = self.mul(result, b)
            b = self.mul(b, b)
            e >>= 1
        return result

    def support_axes(self, x):
        """1-based axes on which x has coefficients above index 0."""
        out = []
        for i in range(self.L):
            if np.take(x, range(1, self.primes[i]), axis=i).any():
                out.append(i + 1)
        return out

    def in_subfield(self, x, i):
        """True iff x lies in F_i = F_{q0}(a_j : j != i)."""
        self._check_axis(i)
        return not np.take(x, range(1, self.primes[i - 1]), axis=i - 1).any()

    def inv(self, x):
        if self.is_zero(x):
            raise ZeroInverse("0 has no inverse")
        # x lies in the subfield generated by its supported axes; using that
        # field's order keeps the exponent (and the squaring chain) small.
        prod = 1
        for i in self.support_axes(x):
            prod *= self.primes[i - 1]
        return self.pow(x, self.base.order**prod - 2)

    def frobenius_once(self, x):
        d = self.base.d
        cur = x
        for i in range(self.L):
            arr = np.moveaxis(cur, i, -2)
            lead = arr.shape[:-2]
            arr = arr.reshape(-1, self.primes[i], d)
            out = np.einsum("nsa,sfab->nfb", arr, self._frob_mats[i]) % self.base.p
            cur = np.moveaxis(out.reshape(lead + (self.primes[i], d)), -2, i)
        return np.ascontiguousarray(cur)

    def frobenius(self, x, e=1):
        """x^(q0^e) via repeated q0-th powering."""
        cur = x % self.base.p
        for _ in range(e):
            cur = self.frobenius_once(cur)
        return cur

    def trace_to_subfield(self, x, i):
        """tr_{F_q/F_i}(x): collapse axis i with the small-trace scalars."""
        self._check_axis(i)
        d = self.base.d
        arr = np.moveaxis(x, i - 1, -2)
        lead = arr.shape[:-2]
        flat = arr.reshape(-1, self.primes[i - 1], d)
        collapsed = np.einsum("nsa,sab->nb", flat, self._trace_mats[i - 1]) % self.base.p
        out = np.zeros(lead + (self.primes[i - 1], d), dtype=np.int64)
        out[..., 0, :] = collapsed.reshape(lead + (d,))
        return np.ascontiguousarray(np.moveaxis(out, -2, i - 1))

    def eq(self, x, y):
        return np.array_equal(x % self.base.p, y % self.base.p)

    def is_zero(self, x):
        return not (x % self.base.p).any()

    def _check_axis(self, i):
        if not 1 <= i <= self.L:
            raise BadGroupIndex(f"group index {i} not in [1, {self.L}]")

    def __eq__(self, other):
        if not isinstance(other, TowerField):
            return False
        if other.base != self.base or other.primes != self.primes:
            return False
        for m1, m2 in zip(self.moduli, other.moduli):
            if len(m1) != len(m2) or any(
                not self.base.eq(a, b) for a, b in zip(m1, m2)
            ):
                return False
        return True

    def __hash__(self):
        return hash(("TowerField", self.base, self.primes))

    def __repr__(self):
        return f"TowerField(q0={self.base.order}, primes={list(self.primes)})"


def make_tower(base, primes):
    """The composite field F_{q0}(a_1, ..., a_L) for distinct ascending primes."""
    return TowerField(base, primes)


def tower_arith(field, x, y, op):
    """Dispatch helper mirroring the element-level API."""
    for v in (x,) if op == "inv" else (x, y):
        if v is not None and np.shape(v) != field.shape:
            raise FieldMismatch(f"element shape {np.shape(v)} != field shape {field.shape}")
    if op == "add":
        return field.add(x, y)
    if op == "sub":
        return field.sub(x, y)
    if op == "mul":
        return field.mul(x, y)
    if op == "inv":
        return field.inv(x)
    if op == "pow":
        return field.pow(x, y)
    raise ValueError(f"unknown op {op!r}")


def frobenius(field, x, e=1):
    if e < 0:
        raise ValueError("exponent must be >= 0")
    return field.frobenius(x, e)


def trace_to_subfield(field, x, i):
    return field.trace_to_subfield(x, i)


def batch_inv(field, xs):
    """Invert many elements with one field inversion (Montgomery trick)."""
    xs = list(xs)
    if not xs:
        return []
    prefix = [xs[0]]
    for x in xs[1:]:
        prefix.append(field.mul(prefix[-1], x))
    if field.is_zero(prefix[-1]):
        raise ZeroInverse("batch contains zero")
    acc = field.inv(prefix[-1])
    out = [None] * len(xs)
    for k in range(len(xs) - 1, 0, -1):
        out[k] = field.mul(acc, prefix[k - 1])
        acc = field.mul(acc, xs[k])
    out[0] = acc
    return out


def trace_dual_basis(field, lambdas, i):
    """Basis {mu_t} with tr_i(lambda_s * mu_t) = delta_st, via inversion of the
    Gram matrix G_st = tr_i(lambda_s * lambda_t) over F_i."""
    from .linalg import mat_inverse
    from .errors import Singular

    field._check_axis(i)
    n = len(lambdas)
    gram = [
        [field.trace_to_subfield(field.mul(lambdas[s], lambdas[t]), i) for t in range(n)]
        for s in range(n)
    ]
    try:
        ginv = mat_inverse(field, gram)
    except Singular as exc:
        raise SingularGram("lambda set is not a basis") from exc
    mus = []
    for t in range(n):
        acc = field.zero()
        for s in range(n):
            acc = field.add(acc, field.mul(ginv[t][s], lambdas[s]))
        mus.append(acc)
    return mus
