"""Multiparametric R-matrices, metrics, D-matrices, and projectors for the
GL and SO/Sp series, with their verification suites.

The orthogonal/symplectic R is transcribed from the explicit nonzero-component
list, which is unambiguous, rather than from the compact one-line formula.
"""

from __future__ import annotations

from .groups import GL, SO, SP, GroupSpec
from .ring import GR_ONE, RingElem
from .tensor import MatrixView, SparseTensor, identity_tensor, kron_pair


def build_R(spec):
    """Rank-4 R^{ab}_{cd}; lower triangular in the series ordering."""
    n = spec.n
    lab = (spec.labels,) * 4
    t = SparseTensor((n,) * 4, lab)
    r = spec.r()
    rinv = spec.r_pow(-1)
    lam = spec.lam()
    if spec.series == GL:
        for a in range(1, n + 1):
            t.set_entry((a - 1,) * 4, r)
            for b in range(1, n + 1):
                if a == b:
                    continue
                t.set_entry((a - 1, b - 1, a - 1, b - 1), r / spec.q(a, b))
                if b > a:
                    t.set_entry((b - 1, a - 1, a - 1, b - 1), lam)
        return t
    eps = spec.eps
    for a in range(1, n + 1):
        ap = spec.prime(a)
        if a == spec.n2:
            t.set_entry((a - 1,) * 4, spec.one())
        else:
            t.set_entry((a - 1,) * 4, r)
            t.set_entry((a - 1, ap - 1, a - 1, ap - 1), rinv)
        for b in range(1, n + 1):
            if b in (a, ap):
                continue
            t.set_entry((a - 1, b - 1, a - 1, b - 1), r / spec.q(a, b))
            if a > b:
                t.set_entry((a - 1, b - 1, b - 1, a - 1), lam)
        if a > ap:
            val = lam * (spec.one() - spec.r_half_pow(spec.rho2(a) - spec.rho2(ap))
                         .scale(eps))
            t.set_entry((a - 1, ap - 1, ap - 1, a - 1), val)
        for b in range(1, n + 1):
            if a > b and ap != b:
                coeff = spec.r_half_pow(spec.rho2(a) - spec.rho2(b)) \
                    .scale(-spec.eps_a(a) * spec.eps_a(b))
                t.set_entry((a - 1, ap - 1, b - 1, spec.prime(b) - 1), lam * coeff)
    return t


def invert_R(spec, R=None, check=True):
    """R^-1 via the parameter inversion R^-1_{q,r} = R_{q^-1,r^-1}; verified to
    contract with R to the identity unless check=False."""
    if R is None:
        R = build_R(spec)
    Rinv = R.map_values(lambda e: e.invert_symbols())
    if check:
        prod = Rinv.contract(R, [(2, 0), (3, 1)])
        if prod != kron_pair(spec.table, spec.n, spec.labels):
            raise ArithmeticError("parameter-inverted R is not a two-sided inverse")
    return Rinv


def rhat_of(R):
    """Braid form: Rhat^{ab}_{cd} = R^{ba}_{cd}."""
    return R.permute((1, 0, 2, 3))


def rhat_inv_of(Rinv):
    """(Rhat^-1)^{ab}_{cd} = (R^-1)^{ab}_{dc}."""
    return Rinv.permute((0, 1, 3, 2))


def build_metric(spec):
    """(C_ab, C^ab) for the B, C, D series."""
    if spec.series == GL:
        raise ValueError("the GL series carries no invariant metric")
    lab = (spec.labels, spec.labels)
    lo = SparseTensor((spec.n, spec.n), lab)
    up = SparseTensor((spec.n, spec.n), lab)
    for a in range(1, spec.n + 1):
        ap = spec.prime(a)
        val = spec.r_half_pow(-spec.rho2(a)).scale(spec.eps_a(a))
        lo.set_entry((a - 1, ap - 1), val)
        up.set_entry((a - 1, ap - 1), val.scale(spec.eps))
    return lo, up


def metric_trace(spec, lo, up):
    """C_ab C^ab as a scalar."""
    out = spec.zero()
    for (a, b), v in lo.entries.items():
        w = up.get((a, b))
        if w is not None:
            out = out + v * w
    return out


def qn_scalar(spec):
    """Q_N(r) = (C_ab C^ab)^-1, from the closed formula."""
    eps = spec.eps
    n = spec.n
    num = spec.one() - spec.r_pow(-2)
    den = (spec.one() - spec.r_half_pow(2 * (-n - 1 + eps)).scale(eps)) * \
          (spec.one() + spec.r_half_pow(2 * (n - 1 - eps)).scale(eps))
    return num / den


class RBundle:
    """One group's R-matrix package: R, inverses, braid form, metric,
    projectors, and the scalar constants used throughout the calculus."""

    def __init__(self, spec):
        self.spec = spec
        self.R = build_R(spec)
        self.Rinv = invert_R(spec, self.R)
        self.Rhat = rhat_of(self.R)
        self.Rhatinv = rhat_inv_of(self.Rinv)
        self.lam = spec.lam()
        if spec.series == GL:
            self.D = [spec.r_pow(2 * a - 1) for a in range(1, spec.n + 1)]
            self.C_lo = self.C_up = None
            self.P_S = self.P_A = self.P_0 = self.K = None
            self.QN = None
            self.z = None
        else:
            self.C_lo, self.C_up = build_metric(spec)
            self.D = [self.C_up.get((a, spec.prime(a + 1) - 1)) *
                      self.C_lo.get((a, spec.prime(a + 1) - 1))
                      for a in range(spec.n)]
            self.QN = metric_trace(spec, self.C_lo, self.C_up).inv()
            self.z = spec.r_half_pow(2 * (spec.n - spec.eps)).scale(spec.eps)
            self.K = self.C_up.contract(self.C_lo, [])  # outer product, rank 4
            self._build_projectors()

    def _build_projectors(self):
        spec = self.spec
        eps = spec.eps
        table = spec.table
        I4 = kron_pair(table, spec.n, spec.labels)
        self.P_0 = self.K.scale(self.QN)
        rp = spec.r() + spec.r_pow(-1)
        w = spec.r_half_pow(2 * (eps - spec.n)).scale(eps)
        ps = self.Rhat.add(I4.scale(spec.r_pow(-1))) \
            .add(self.P_0.scale((spec.r_pow(-1) + w).scale(-1)))
        self.P_S = ps.scale(rp.inv())
        pa = self.Rhat.scale(RingElem.const(table, -1)) \
            .add(I4.scale(spec.r())) \
            .add(self.P_0.scale((spec.r() - w).scale(-1)))
        self.P_A = pa.scale(rp.inv())

    def mv(self, tensor):
        return MatrixView(tensor, (0, 1), (2, 3))


def build_bundle(spec):
    return RBundle(spec)


# --- verification suites ----------------------------------------------------

def check_yang_baxter(R):
    """R12 R13 R23 = R23 R13 R12, exactly.  Returns (ok, witness)."""
    lhs = R.contract(R, [(2, 0)])            # (a1,b1,b2, c1,a3,c2)
    lhs = lhs.contract(R, [(2, 0), (5, 1)])  # (a1,b1,c1,a3, b3,c3)
    rhs = R.contract(R, [(3, 1)])            # (b1,c1,b2, a1,a2,c3)
    rhs = rhs.contract(R, [(4, 0), (2, 1)])  # (b1,c1,a1,c3, a3,b3)
    rhs = rhs.permute((2, 0, 1, 4, 5, 3))
    diff = lhs.sub(rhs)
    if diff.is_zero():
        return True, None
    return False, min(diff.entries)


def check_characteristic(bundle):
    """Hecke identity for GL, the cubic for the B, C, D series."""
    spec = bundle.spec
    rh = bundle.mv(bundle.Rhat)
    minus_r = spec.r().scale(-1)
    f1 = rh.add_scalar_identity(minus_r)
    f2 = rh.add_scalar_identity(spec.r_pow(-1))
    prod = f1.matmul(f2)
    if spec.series != GL:
        f3 = rh.add_scalar_identity(
            spec.r_half_pow(2 * (spec.eps - spec.n)).scale(-spec.eps))
        prod = prod.matmul(f3)
    return prod.is_zero()


def check_projectors(bundle):
    """Completeness, orthogonal idempotence, P_0 = Q_N K, and the spectral
    decomposition of Rhat.  Returns a {name: bool} report."""
    spec = bundle.spec
    I4 = kron_pair(spec.table, spec.n, spec.labels)
    ps, pa, p0 = bundle.P_S, bundle.P_A, bundle.P_0
    report = {}
    report["completeness"] = ps.add(pa).add(p0).sub(I4).is_zero()
    mv = bundle.mv
    projs = {"S": mv(ps), "A": mv(pa), "0": mv(p0)}
    for i, pi in projs.items():
        for j, pj in projs.items():
            prod = pi.matmul(pj)
            want = pi if i == j else None
            ok = prod.sub(want).is_zero() if want else prod.is_zero()
            report[f"P{i}P{j}"] = ok
    report["P0_is_QN_K"] = p0.sub(bundle.K.scale(bundle.QN)).is_zero()
    w = spec.r_half_pow(2 * (spec.eps - spec.n)).scale(spec.eps)
    spectral = ps.scale(spec.r()).add(pa.scale(spec.r_pow(-1)).scale(spec.const(-1))) \
        .add(p0.scale(w))
    report["spectral"] = spectral.sub(bundle.Rhat).is_zero()
    report["extra_relation"] = mv(bundle.Rhat).sub(mv(bundle.Rhatinv)) \
        .sub(mv(I4.sub(bundle.K)).scale(bundle.lam)).is_zero()
    return report


def check_metric_identities(bundle):
    """The CRC intertwining identities and the Rhat trace conditions."""
    spec = bundle.spec
    rh, rhi = bundle.Rhat, bundle.Rhatinv
    lo, up = bundle.C_lo, bundle.C_up
    report = {}
    # C_ab Rhat^{bc}_{de} = Rhatinv^{cf}_{ad} C_fe
    lhs = lo.contract(rh, [(1, 0)])                    # (a, c,d,e)
    rhs = rhi.contract(lo, [(1, 0)])                   # (c,a,d, e)
    report["crc_low"] = lhs.sub(rhs.permute((1, 0, 2, 3))).is_zero()
    # Rhat^{bc}_{de} C^{ea} = C^{bf} Rhatinv^{ca}_{fd}
    lhs = rh.contract(up, [(3, 0)])                    # (b,c,d, a)
    rhs = up.contract(rhi, [(1, 2)])                   # (b, c,a,d)
    report["crc_up"] = lhs.sub(rhs.permute((0, 1, 3, 2))).is_zero()
    w = spec.r_half_pow(2 * (spec.eps - spec.n)).scale(spec.eps)
    lhs = lo.contract(rh, [(0, 0), (1, 1)])
    report["trace_low"] = lhs.sub(lo.scale(w)).is_zero()
    lhs = rh.contract(up, [(2, 0), (3, 1)])
    report["trace_up"] = lhs.sub(up.scale(w)).is_zero()
    return report


def check_lower_triangular(R, spec):
    """R^{ab}_{cd} = 0 when a<c, or a=c and b<d."""
    for (a, b, c, d) in R.entries:
        if a < c or (a == c and b < d):
            return False
    return True


def check_prime_symmetry(R, spec):
    """(R)^{ab}_{cd} = (R)^{c'd'}_{a'b'} for the B, C, D series."""
    pr = [spec.prime(a + 1) - 1 for a in range(spec.n)]
    for (a, b, c, d), v in R.entries.items():
        w = R.get((pr[c], pr[d], pr[a], pr[b]))
        if w is None or not v.equals(w):
            return False
    return True


def check_gl_second_inverse(bundle):
    """The D-matrix compatibility identities of the GL series."""
    spec = bundle.spec
    n = spec.n
    d = bundle.D
    report = {}
    weighted = bundle.Rinv.copy()
    weighted = SparseTensor(weighted.dims, weighted.labels, {
        k: v * d[k[1]] / d[k[3]] for k, v in weighted.entries.items()})
    prod = weighted.contract(bundle.R, [(0, 2), (3, 1)])   # (A,D, E,F)
    want = SparseTensor((n,) * 4, (spec.labels,) * 4)
    for a in range(n):
        for e in range(n):
            want.set_entry((a, e, e, a), spec.one())
    report["second_inverse"] = prod.sub(want).is_zero()
    ok = True
    for a in range(n):
        acc = spec.zero()
        for c in range(n):
            v = bundle.R.get((a, c, c, a))
            if v is not None:
                acc = acc + v / d[c]
        if not acc.is_one():
            ok = False
    report["rd_normalization"] = ok
    qs = [spec.q_centrality(a) for a in range(1, n + 1)]
    prodq = spec.one()
    for q in qs:
        prodq = prodq * q
    report["centrality_product"] = prodq.is_one()
    return report


def block_decompose(spec_small):
    """Build R for S(N+2), extract the blocks of its inhomogeneous split, and
    compare with the S(N) construction and the printed corner formulas.
    Returns ({name: bool}, parent_spec)."""
    from .groups import inhomogeneous_parent
    big_spec = inhomogeneous_parent(spec_small.series, spec_small.n)
    big = build_R(big_spec)
    small = build_R(spec_small)
    n = spec_small.n
    report = {}
    # the (a b; c d) block reproduces the S(N) R-matrix
    rename = _subgroup_embedding(spec_small, big_spec)
    ok = True
    seen = set()
    for (a, b, c, d), v in small.entries.items():
        w = big.get((a + 1, b + 1, c + 1, d + 1))
        if w is None or not rename(v).equals(w):
            ok = False
            break
        seen.add((a + 1, b + 1, c + 1, d + 1))
    for (a, b, c, d) in big.entries:
        if 1 <= a <= n and 1 <= b <= n and 1 <= c <= n and 1 <= d <= n:
            if (a, b, c, d) not in seen:
                ok = False
    report["subgroup_block"] = ok
    # (o b; o b) = r / q_{o b}
    ok = True
    for b in range(1, n + 1):
        w = big.get((0, b, 0, b))
        if w is None or not w.equals(big_spec.r() / big_spec.q(1, b + 1)):
            ok = False
    report["ob_block"] = ok
    if spec_small.series != GL:
        eps = spec_small.eps
        rho2 = spec_small.n + 1 - eps        # 2*rho of the corner exponent
        star, circ = spec_small.n + 1, 0
        lam = big_spec.lam()
        # (* o ; c d) corner: -eps C_cd lambda r^-rho  (C of the subgroup)
        ok = True
        for c in range(1, n + 1):
            d = spec_small.prime(c)
            w = big.get((star, circ, c, d))
            csub = _sub_metric_value(spec_small, big_spec, c)
            want = lam * csub * big_spec.r_half_pow(-rho2).scale(-eps)
            if w is None or not w.equals(want):
                ok = False
        report["corner_starcirc"] = ok
        # (* o ; o *) corner: f(r) = lambda (1 - eps r^-2rho)
        w = big.get((star, circ, circ, star))
        want = lam * (big_spec.one() -
                      big_spec.r_half_pow(-2 * rho2).scale(eps))
        report["corner_f"] = w is not None and w.equals(want)
    return report, big_spec


def _subgroup_embedding(spec_small, big_spec):
    """Ring map sending the S(N) symbols into the S(N+2) table (index shift)."""

    def embed(elem):
        def conv(poly):
            out = RingElem.const(big_spec.table, 0)
            for e, c in poly.terms.items():
                acc = RingElem.const(big_spec.table, c)
                for name, k in zip(spec_small.table.names, e):
                    if not k:
                        continue
                    if name == "v":
                        acc = acc * big_spec.v_pow(k)
                    elif name == "s":
                        acc = acc * RingElem.symbol(big_spec.table, "s", k)
                    else:
                        a, b = int(name[1]), int(name[2])
                        acc = acc * big_spec.q(a + 1, b + 1) ** k
                out = out + acc
            return out
        return conv(elem.num) / conv(elem.den)
    return embed


def _sub_metric_value(spec_small, big_spec, c):
    """C_{c c'} of the subgroup, written in the big table."""
    val = spec_small.r_half_pow(-spec_small.rho2(c)).scale(spec_small.eps_a(c))
    return _subgroup_embedding(spec_small, big_spec)(val)


def build_Dcal(spec):
    """The index-swap (N even) or middle-sign (N odd) involution matrix."""
    if spec.series != SO:
        raise ValueError("the sharp involution is defined for the SO series")
    n = spec.n
    t = SparseTensor((n, n), (spec.labels, spec.labels))
    one = spec.one()
    if n % 2 == 0:
        h = n // 2
        for a in range(n):
            if a == h - 1:
                t.set_entry((a, a + 1), one)
            elif a == h:
                t.set_entry((a, a - 1), one)
            else:
                t.set_entry((a, a), one)
    else:
        for a in range(n):
            t.set_entry((a, a), one.scale(-1) if a == (n - 1) // 2 else one)
    return t


UNIT_MODULUS = (
    ("3/5", "4/5"), ("5/13", "12/13"), ("8/17", "15/17"), ("20/29", "21/29"),
    ("7/25", "24/25"), ("9/41", "40/41"),
)


def unit_sample(k):
    """k-th exact Gaussian rational on the unit circle."""
    from fractions import Fraction
    re, im = UNIT_MODULUS[k % len(UNIT_MODULUS)]
    from .ring import GaussRat
    return GaussRat(Fraction(re), Fraction(im))


def sharp_sample(restricted, seed):
    """Exact parameter point obeying the reality constraints of the sharp
    conjugation: |v| = 1, touching q's equal to r, the rest unit modulus."""
    v = unit_sample(seed)
    vals = {"v": v}
    k = seed + 1
    for name in restricted.table.names:
        if name == "v":
            continue
        if name in restricted.params:
            vals[name] = v * v          # pinned to r by the restriction
        else:
            vals[name] = unit_sample(k)
            k += 1
    return vals


def check_sharp(spec, seeds=(0, 1)):
    """Verify the sharp-involution identities: Dcal^2 = 1, Dcal C Dcal = C,
    D1 D2 R D1 D2 = R under the stated parameter restriction, and numerically
    the conjugation condition D1 D2 R D1 D2 = conj(R^-1) at exact
    Gaussian-rational points satisfying the reality constraints."""
    report = {}
    dc = build_Dcal(spec)
    mv = MatrixView(dc, (0,), (1,))
    report["involution"] = mv.matmul(mv).is_identity()
    lo, up = build_metric(spec)
    clo = dc.contract(lo, [(1, 0)]).contract(dc, [(1, 0)])
    report["commutes_with_metric"] = clo.sub(lo).is_zero()

    restricted = _sharp_restricted_spec(spec)
    R = build_R(restricted)
    dcr = build_Dcal(restricted)
    conj = _dcal_conjugate(R, dcr)
    report["fixes_R"] = conj.sub(R).is_zero()

    Rinv = invert_R(restricted, R)
    ok = True
    for seed in seeds:
        sample = sharp_sample(restricted, seed)
        Rs = R.map_values(lambda e: RingElem.const(restricted.table,
                                                   e.substitute(sample)))
        lhs = _dcal_conjugate(Rs, dcr)
        rhs = Rinv.map_values(
            lambda e: RingElem.const(restricted.table,
                                     e.substitute(sample).conjugate()))
        if not lhs.sub(rhs).is_zero():
            ok = False
    report["numeric_conjugation"] = ok
    return report


def _sharp_restricted_spec(spec):
    """Same series/N with q_ab = r whenever a or b touches the middle pair."""
    if spec.n % 2:
        return spec
    h = spec.n // 2
    params = dict()
    probe = GroupSpec(spec.series, spec.n)
    for name in probe.table.names:
        if name.startswith("q"):
            a, b = int(name[1]), int(name[2])
            if a in (h, h + 1) or b in (h, h + 1):
                params[name] = "v^2"
    merged = {k: v for k, v in params.items()}
    return GroupSpec(spec.series, spec.n, labels=spec.labels, params=merged)


def _dcal_conjugate(R, dc):
    """D1 D2 R D1 D2 on a rank-4 tensor."""
    out = dc.contract(R, [(1, 0)])            # (a, b,c,d)
    out = dc.contract(out, [(1, 1)])          # (b, a,c,d)
    out = out.permute((1, 0, 2, 3))           # (a,b,c,d)
    out = out.contract(dc, [(2, 0)])          # (a,b,d, c)
    out = out.contract(dc, [(2, 0)])          # (a,b,c, d) after two hops
    return out
