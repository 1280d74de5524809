"""The trace-download multiplication scheme: parameter construction, user-side
encoding, server-side trace computation, user-side decoding, symbol-exact cost
accounting, and security audits."""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations, product

from .errors import (
    DimMismatch,
    InvalidParams,
    MissingBundle,
    NotDivisible,
    PrimesNotAscendingDistinct,
    ShapeMismatch,
    TooFewEvalPoints,
    TooLargeForExhaustive,
)
from .fields import batch_inv, is_prime, make_tower, trace_dual_basis
from .linalg import rank as mat_rank
from .matrices import Mat, SplitMix64, mat_mul, partition_inner, random_mat
from .poly import EvalDomain, Poly, annihilator, eval_poly, eval_poly_scalar


@dataclass
class SchemeParams:
    L: int
    T: int
    primes: tuple
    base: object            # BaseField
    tower: object           # TowerField
    a: int
    b: int
    c: int
    N: list                 # N_i per group, ascending
    n: int                  # |Omega| = N_L + L
    points: list            # full Omega as tower elements (gens first)
    scalar_points: list     # alpha_{L+1..n} as base-field elements
    domain: EvalDomain      # Omega with dual weights
    k_polys: list           # annihilator k_i per group
    server_scalars: list    # server_scalars[i-1][j-1] = v_{L+j} * k_i(alpha_{L+j})
    lambdas: list           # lambda bases per group
    mus: list               # trace-dual bases per group
    encode_coeffs: list = dc_field(repr=False, default=None)
    # encode_coeffs[k][j] = l_k(alpha_{L+1+j}) for Lagrange basis l_k on the
    # L+T interpolation nodes, j over the N_L upload points.


@dataclass
class CostReport:
    upload_symbols: int
    download_symbols: int
    output_symbols: int

    @property
    def rate(self):
        return Fraction(self.output_symbols,
                        self.upload_symbols + self.download_symbols)


@dataclass
class Share:
    server: int     # 1-based index j in [N_L]
    f_eval: Mat     # a x (b/L) over F_q
    g_eval: Mat     # (b/L) x c over F_q


@dataclass
class ResponseBundle:
    server: int
    traced: dict    # group i -> a x c Mat with entries in F_i


@dataclass
class AuditReport:
    mode: str
    checks: int
    failures: list

    @property
    def passed(self):
        return not self.failures


def build_scheme(L, T, primes, base, a, b, c):
    primes = tuple(int(p) for p in primes)
    if L < 1 or T < 1:
        raise InvalidParams("L and T must be positive")
    if len(primes) != L:
        raise PrimesNotAscendingDistinct(f"need {L} primes, got {len(primes)}")
    if any(not is_prime(p) for p in primes) or any(
        x >= y for x, y in zip(primes, primes[1:])
    ):
        raise PrimesNotAscendingDistinct(f"primes must be distinct ascending: {primes}")
    if b % L != 0:
        raise NotDivisible(f"L={L} does not divide b={b}")
    N = [p + 2 * L + 2 * T - 2 for p in primes]
    n = N[-1] + L
    if base.order < N[-1]:
        raise TooFewEvalPoints(f"q0={base.order} < N_L={N[-1]}")

    tower = make_tower(base, primes)
    gens = [tower.gen(i) for i in range(1, L + 1)]
    scalar_points = [base.from_int(k) for k in range(N[-1])]
    points = gens + [tower.embed_base(s) for s in scalar_points]
    domain = EvalDomain(tower, points)

    k_polys = []
    server_scalars = []
    for i in range(1, L + 1):
        keep = set(range(L + 1, L + N[i - 1] + 1)) | {i}
        excluded = [points[j - 1] for j in range(1, n + 1) if j not in keep]
        k_i = annihilator(tower, excluded)
        k_polys.append(k_i)
        row = []
        for j in range(1, N[i - 1] + 1):
            kv = eval_poly_scalar(k_i, scalar_points[j - 1])
            row.append(tower.mul(domain.weights[L + j - 1], kv))
        server_scalars.append(row)

    lambdas, mus = [], []
    for i in range(1, L + 1):
        scale = tower.mul(domain.weights[i - 1], eval_poly(k_polys[i - 1], points[i - 1]))
        lam = []
        cur = scale
        for _ in range(primes[i - 1]):
            lam.append(cur)
            cur = tower.mul(cur, gens[i - 1])
        lambdas.append(lam)
        mus.append(trace_dual_basis(tower, lam, i))

    scheme = SchemeParams(
        L=L, T=T, primes=primes, base=base, tower=tower, a=a, b=b, c=c,
        N=N, n=n, points=points, scalar_points=scalar_points, domain=domain,
        k_polys=k_polys, server_scalars=server_scalars,
        lambdas=lambdas, mus=mus,
    )
    scheme.encode_coeffs = _encode_coefficients(scheme)
    return scheme


def _encode_coefficients(scheme):
    """l_k(alpha_{L+j}) for the Lagrange basis on the L+T interpolation nodes,
    evaluated at every upload point."""
    tower = scheme.tower
    nodes = scheme.points[: scheme.L + scheme.T]
    denoms = []
    for kk, nk in enumerate(nodes):
        d = tower.one()
        for jj, nj in enumerate(nodes):
            if jj != kk:
                d = tower.mul(d, tower.sub(nk, nj))
        denoms.append(d)
    invs = batch_inv(tower, denoms)
    coeffs = []
    for kk, nk in enumerate(nodes):
        num = Poly.one(tower)
        for jj, nj in enumerate(nodes):
            if jj != kk:
                num = num.mul(Poly(tower, [tower.neg(nj), tower.one()]))
        basis = num.scale(invs[kk])
        coeffs.append([
            eval_poly_scalar(basis, s) for s in scheme.scalar_points[: scheme.N[-1]]
        ])
    return coeffs


def _draw_randoms(scheme, seed):
    rng = SplitMix64(seed)
    w = scheme.b // scheme.L
    R = [random_mat(scheme.a, w, scheme.tower, rng=rng) for _ in range(scheme.T)]
    S = [random_mat(w, scheme.c, scheme.tower, rng=rng) for _ in range(scheme.T)]
    return R, S


def encode(scheme, A, B, seed=0, randoms=None):
    """Interpolate f through (gens -> A blocks, first T upload points ->
    randoms) and likewise g; return the evaluations at the N_L upload points."""
    if (A.rows, A.cols) != (scheme.a, scheme.b) or (B.rows, B.cols) != (scheme.b, scheme.c):
        raise DimMismatch("matrix dimensions do not match the scheme")
    tower = scheme.tower
    part = partition_inner(A, B, scheme.L)
    R, S = randoms if randoms is not None else _draw_randoms(scheme, seed)
    f_nodes = part.A_blocks + list(R)
    g_nodes = part.B_blocks + list(S)

    shares = []
    for j in range(scheme.N[-1]):
        f_eval = Mat.zeros(tower, scheme.a, scheme.b // scheme.L)
        g_eval = Mat.zeros(tower, scheme.b // scheme.L, scheme.c)
        for kk in range(scheme.L + scheme.T):
            ck = scheme.encode_coeffs[kk][j]
            if tower.is_zero(ck):
                continue
            f_eval = f_eval.add(f_nodes[kk].scale(ck))
            g_eval = g_eval.add(g_nodes[kk].scale(ck))
        shares.append(Share(j + 1, f_eval, g_eval))
    return shares


def server_compute(scheme, share):
    """Product of the received evaluations, then per-group traced downloads.
    Groups with j > N_i are omitted (their annihilator scalar is zero)."""
    tower = scheme.tower
    h = mat_mul(share.f_eval, share.g_eval)
    traced = {}
    for i in range(1, scheme.L + 1):
        if share.server > scheme.N[i - 1]:
            continue
        w = scheme.server_scalars[i - 1][share.server - 1]
        traced[i] = h.map(lambda v: tower.trace_to_subfield(tower.mul(w, v), i))
    return ResponseBundle(share.server, traced)


def decode(scheme, bundles):
    """Recover AB from all N_L response bundles."""
    tower = scheme.tower
    by_server = {}
    for bundle in bundles:
        by_server[bundle.server] = bundle
    for j in range(1, scheme.N[-1] + 1):
        if j not in by_server:
            raise MissingBundle(f"no bundle from server {j}")

    total = Mat.zeros(tower, scheme.a, scheme.c)
    for i in range(1, scheme.L + 1):
        p_i = scheme.primes[i - 1]
        h_i = Mat.zeros(tower, scheme.a, scheme.c)
        for s in range(p_i):
            acc = Mat.zeros(tower, scheme.a, scheme.c)
            for j in range(1, scheme.N[i - 1] + 1):
                r = by_server[j].traced.get(i)
                if r is None or (r.rows, r.cols) != (scheme.a, scheme.c):
                    raise ShapeMismatch(f"bundle {j} lacks a well-formed group {i} response")
                alpha_pow = scheme.base.pow(scheme.scalar_points[j - 1], s)
                acc = acc.add(r.map(lambda v: tower.scalar_mul(v, alpha_pow)))
            c_is = acc.neg()
            mu = scheme.mus[i - 1][s]
            h_i = h_i.add(c_is.map(lambda v: tower.mul(v, mu)))
        total = total.add(h_i)
    return total


def cost_report(scheme):
    """Exact symbol counts in base-field symbols."""
    prod = 1
    for p in scheme.primes:
        prod *= p
    a, b, c, L = scheme.a, scheme.b, scheme.c, scheme.L
    upload = scheme.N[-1] * (a * b // L + b * c // L) * prod
    download = a * c * sum(
        scheme.N[i] * prod // scheme.primes[i] for i in range(L)
    )
    output = a * c * prod
    return CostReport(upload, download, output)


def security_rank_audit(tower, nodes, eval_points, T):
    """For every T-subset of eval_points, the T x T matrix of randomness
    Lagrange-basis values must be invertible."""
    from .poly import lagrange_basis

    total_nodes = len(nodes)
    basis = [lagrange_basis(tower, total_nodes - T + t, nodes) for t in range(T)]
    failures = []
    checks = 0
    for subset in combinations(range(len(eval_points)), T):
        mat = [
            [eval_poly(basis[t], eval_points[j]) for j in subset]
            for t in range(T)
        ]
        checks += 1
        if mat_rank(tower, mat) < T:
            failures.append(subset)
    return checks, failures


def security_audit(scheme, mode="rank", fixed_A=None):
    tower = scheme.tower
    if mode == "rank":
        nodes = scheme.points[: scheme.L + scheme.T]
        eval_points = scheme.points[scheme.L : scheme.L + scheme.N[-1]]
        checks, failures = security_rank_audit(tower, nodes, eval_points, scheme.T)
        return AuditReport("rank", checks, failures)

    if mode == "exhaustive":
        if tower.order_int > 1 << 16 or (scheme.a, scheme.b, scheme.c) != (1, 1, 1):
            raise TooLargeForExhaustive("exhaustive mode needs |F_q| <= 2^16 and 1x1 blocks")
        A = fixed_A if fixed_A is not None else Mat(tower, 1, 1, [[tower.gen(1)]])
        B = Mat(tower, 1, 1, [[tower.one()]])
        q = tower.order_int
        all_elems = list(tower.elements())
        failures = []
        checks = 0
        for subset in combinations(range(1, scheme.N[-1] + 1), scheme.T):
            seen = {}
            for draw in product(range(q), repeat=scheme.T):
                w = scheme.b // scheme.L
                R = [Mat(tower, scheme.a, w, [[all_elems[k]]]) for k in draw]
                S = [Mat(tower, w, scheme.c, [[tower.zero()]]) for _ in draw]
                shares = encode(scheme, A, B, randoms=(R, S))
                key = tuple(tower.to_int(shares[j - 1].f_eval.data[0][0]) for j in subset)
                seen[key] = seen.get(key, 0) + 1
            checks += 1
            if len(seen) != q**scheme.T or any(v != 1 for v in seen.values()):
                failures.append(subset)
        return AuditReport("exhaustive", checks, failures)

    raise InvalidParams(f"unknown audit mode {mode!r}")
