"""Group descriptors: series, dimension, canonical deformation parameters.

The base ring variable is v with r = v^2, so half-integer powers of r (needed
by the B-series metric exponents) stay polynomial.  Only independent q's are
symbols; all dependent ones reduce to monomials at access time, which makes
the tensor identities hold on the nose.
"""

from __future__ import annotations

from fractions import Fraction

from .ring import GR_ONE, GaussRat, RingElem, SymbolTable, parse_expr

GL, SO, SP = "GL", "SO", "Sp"


def _independent_pairs(series, n):
    if series == GL:
        return [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    return [(a, b) for a in range(1, n + 1) for b in range(a + 1, n // 2 + 1)]


class GroupSpec:
    """One quantum group: series GL/SO/Sp, fundamental dimension N, parameters.

    Derived data: eps (+1 orthogonal, -1 symplectic), the eps_a and rho_a
    vectors, the primed-index map a' = N+1-a, and the middle index for the
    odd orthogonal series.  Indices are 1-based everywhere, as in the series
    conventions; tensors use 0-based positions.
    """

    def __init__(self, series, n, labels=None, params=None, extra_symbols=()):
        if series not in (GL, SO, SP):
            raise ValueError(f"unknown series {series!r}")
        if series == SP and n % 2:
            raise ValueError("Sp requires even N")
        self.series = series
        self.n = n
        self.labels = tuple(labels) if labels else tuple(str(i) for i in range(1, n + 1))
        if len(self.labels) != n:
            raise ValueError("need one label per index")
        self.eps = -1 if series == SP else 1
        self.n2 = (n + 1) // 2 if series == SO and n % 2 else None

        pairs = _independent_pairs(series, n)
        self._qnames = {p: f"q{p[0]}{p[1]}" for p in pairs}
        names = ["v"] + [self._qnames[p] for p in pairs]
        if series == GL:
            names.append("s")
        self.table = SymbolTable(names)
        self.params = {}
        if params:
            for k, expr in params.items():
                if k not in self.table.index or k == "v":
                    raise ValueError(f"cannot assign {k!r}")
                self.params[k] = (expr if isinstance(expr, RingElem)
                                  else parse_expr(expr, self.table))
        self._cache = {}

    # --- series data --------------------------------------------------------
    def prime(self, a):
        return self.n + 1 - a

    def eps_a(self, a):
        if self.series == SP:
            return 1 if a <= self.n // 2 else -1
        return 1

    def rho2(self, a):
        """Twice rho_a, always an integer."""
        n = self.n
        if self.series == SO and n % 2:     # B series
            if a == self.n2:
                return 0
            return n - 2 * a if a < self.n2 else n - 2 * a + 2
        if self.series == SP:               # C series
            return n - 2 * a + (2 if a <= n // 2 else 0)
        if self.series == SO:               # D series
            return n - 2 * a + (0 if a <= n // 2 else 2)
        raise ValueError("rho is defined for the B, C, D series only")

    # --- ring helpers ---------------------------------------------------------
    def one(self):
        return RingElem.const(self.table, 1)

    def zero(self):
        return RingElem.const(self.table, 0)

    def const(self, c):
        return RingElem.const(self.table, c)

    def v_pow(self, k):
        key = ("v", k)
        if key not in self._cache:
            self._cache[key] = RingElem.symbol(self.table, "v", k)
        return self._cache[key]

    def r_pow(self, k):
        """r^k for integer k (r = v^2)."""
        return self.v_pow(2 * k)

    def r_half_pow(self, k2):
        """r^(k2/2), i.e. v^k2."""
        return self.v_pow(k2)

    def r(self):
        return self.r_pow(1)

    def lam(self):
        """lambda = r - r^-1."""
        key = "lam"
        if key not in self._cache:
            self._cache[key] = self.r_pow(1) - self.r_pow(-1)
        return self._cache[key]

    def s(self):
        if self.series != GL:
            raise ValueError("s is a GL-only normalization symbol")
        return RingElem.symbol(self.table, "s")

    def q_symbol(self, a, b):
        name = self._qnames[(a, b)]
        if name in self.params:
            return self.params[name]
        return RingElem.symbol(self.table, name)

    def q(self, a, b):
        """Canonical q_ab as a RingElem monomial times independent symbols."""
        key = ("q", a, b)
        out = self._cache.get(key)
        if out is None:
            out = self._q(a, b)
            self._cache[key] = out
        return out

    def _q(self, a, b):
        if a == b:
            return self.r()
        if b < a:
            return self.r_pow(2) / self._q(b, a)
        if self.series == GL:
            return self.q_symbol(a, b)
        if b == self.prime(a):
            return self.r()
        if b > self.prime(b):
            return self.r_pow(2) / self._q(a, self.prime(b))
        if self.n2 is not None and b == self.n2:
            return self.r()
        return self.q_symbol(a, b)

    def q_centrality(self, a):
        """Q_a = prod_c q_ca / r (GL determinant commutation factor)."""
        out = self.one()
        rinv = self.r_pow(-1)
        for c in range(1, self.n + 1):
            out = out * self.q(c, a) * rinv
        return out

    # --- numeric samples --------------------------------------------------
    def sample(self, seed):
        """Deterministic exact-rational sample avoiding small-denominator poles."""
        primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        vals = {}
        for k, name in enumerate(self.table.names):
            p = primes[(seed + k) % len(primes)]
            q = primes[(seed + 2 * k + 1) % len(primes)]
            if p == q:
                q = primes[(seed + 2 * k + 2) % len(primes)]
            vals[name] = GaussRat(Fraction(p, q) + 1 + k % 3)
        return vals

    def __repr__(self):
        ps = f", params={sorted(self.params)}" if self.params else ""
        return f"GroupSpec({self.series}, N={self.n}{ps})"


def gl_spec(n, params=None):
    return GroupSpec(GL, n, params=params)


def so_spec(n, params=None):
    return GroupSpec(SO, n, params=params)


def sp_spec(n, params=None):
    return GroupSpec(SP, n, params=params)


def uniparametric(spec_cls, n):
    """All q_ab = r: the single-parameter specialization."""
    probe = GroupSpec(spec_cls, n)
    params = {name: "v^2" for name in probe.table.names if name.startswith("q")}
    return GroupSpec(spec_cls, n, params=params)


def inhomogeneous_parent(series, n):
    """The S(N+2) (or GL(N+1)) spec whose index restriction yields the
    inhomogeneous group: labels 'o', 1..N, '*' (or 0, 1..N for GL)."""
    if series == GL:
        return GroupSpec(GL, n + 1, labels=["0"] + [str(i) for i in range(1, n + 1)])
    labels = ["o"] + [str(i) for i in range(1, n + 1)] + ["*"]
    return GroupSpec(series, n + 2, labels=labels)
