"""Exact coefficient field: rational functions in v (r = v^2) and the
independent deformation parameters, over Gaussian rationals.

Every scalar in the engine lives here.  Elements are unreduced fractions of
multivariate Laurent polynomials; equality is decided by cross-multiplication,
so no multivariate GCD is ever needed.  Half-integer powers of r are
representable because the base variable is v with r = v^2.
"""

from __future__ import annotations

from fractions import Fraction


class PoleError(ArithmeticError):
    """Raised when a substitution or limit hits a genuine pole."""


def _rat(x):
    """Coerce to int when exact, else Fraction; ints keep arithmetic fast."""
    if type(x) is int:
        return x
    f = x if isinstance(x, Fraction) else Fraction(x)
    return f.numerator if f.denominator == 1 else f


class GaussRat:
    """A Gaussian rational a + b*i; parts are exact ints or Fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is int else _rat(re)
        self.im = im if type(im) is int else _rat(im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        return GaussRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussRat(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        a, b = self.im, other.im
        if not a and not b:
            return GaussRat(self.re * other.re)
        return GaussRat(self.re * other.re - a * b,
                        self.re * b + a * other.re)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        if type(n) is int:
            return GaussRat(Fraction(self.re, n), Fraction(-self.im, n))
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if not other.im:
            d = other.re
            if not d:
                raise ZeroDivisionError("division by zero Gaussian rational")
            if type(d) is int and type(self.re) is int and type(self.im) is int:
                return GaussRat(Fraction(self.re, d), Fraction(self.im, d))
            return GaussRat(self.re / d, self.im / d)
        return self * other.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = GR_ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        if not self.im:
            return self
        return GaussRat(self.re, -self.im)

    def __str__(self):
        # canonical grammar: <rational>[+<rational>i]
        if not self.im:
            return str(self.re)
        return f"{self.re}+{self.im}i"

    __repr__ = __str__

    @staticmethod
    def parse(s):
        s = s.strip()
        if s.endswith("i"):
            body = s[:-1]
            head, _, tail = body.rpartition("+")
            if not head:  # bare "<rational>i"
                return GaussRat(0, Fraction(tail))
            return GaussRat(Fraction(head), Fraction(tail))
        return GaussRat(Fraction(s))


GR_ZERO = GaussRat(0)
GR_ONE = GaussRat(1)
GR_I = GaussRat(0, 1)


def gr(re, im=0):
    return GaussRat(re, im)


class SymbolTable:
    """Fixed, ordered list of symbol names shared by a family of polynomials."""

    __slots__ = ("names", "index")

    def __init__(self, names):
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("duplicate symbol names")

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, SymbolTable) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"SymbolTable{self.names}"


class SymbolMismatch(ValueError):
    """Operands built over different symbol tables."""


class LaurentPoly:
    """Finite map from integer exponent vectors to GaussRat coefficients.

    Exponents may be negative; no zero coefficients are stored.
    """

    __slots__ = ("table", "terms")

    def __init__(self, table, terms=None):
        self.table = table
        self.terms = terms if terms is not None else {}

    @staticmethod
    def const(table, c):
        if not isinstance(c, GaussRat):
            c = GaussRat(c)
        if not c:
            return LaurentPoly(table)
        return LaurentPoly(table, {(0,) * len(table): c})

    @staticmethod
    def monomial(table, exps, c=GR_ONE):
        if not c:
            return LaurentPoly(table)
        return LaurentPoly(table, {tuple(exps): c})

    @staticmethod
    def symbol(table, name, power=1):
        e = [0] * len(table)
        e[table.index[name]] = power
        return LaurentPoly.monomial(table, e)

    def is_zero(self):
        return not self.terms

    def is_one(self):
        if len(self.terms) != 1:
            return False
        (e, c), = self.terms.items()
        return c == GR_ONE and not any(e)

    def _chk(self, other):
        if self.table is not other.table and self.table != other.table:
            raise SymbolMismatch(f"{self.table} vs {other.table}")

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash((self.table, frozenset(self.terms.items())))

    @staticmethod
    def iadd_terms(dst, src):
        """In-place dst += src on raw term dicts."""
        for e, c in src.items():
            s = dst.get(e)
            if s is None:
                dst[e] = c
            else:
                s = s + c
                if s:
                    dst[e] = s
                else:
                    del dst[e]

    def __add__(self, other):
        self._chk(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        LaurentPoly.iadd_terms(out, other.terms)
        return LaurentPoly(self.table, out)

    def __neg__(self):
        return LaurentPoly(self.table, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._chk(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        if not a:
            return LaurentPoly(self.table)
        if len(a) == 1:
            (ea, ca), = a.items()
            if ca == GR_ONE and not any(ea):
                return LaurentPoly(self.table, dict(b))
            return LaurentPoly(self.table, {
                tuple(x + y for x, y in zip(ea, eb)): ca * cb
                for eb, cb in b.items()})
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                c = ca * cb
                s = out.get(e)
                if s is None:
                    if c:
                        out[e] = c
                else:
                    s = s + c
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return LaurentPoly(self.table, out)

    def scale(self, c):
        if not isinstance(c, GaussRat):
            c = GaussRat(c)
        if not c:
            return LaurentPoly(self.table)
        return LaurentPoly(self.table, {e: k * c for e, k in self.terms.items()})

    def subs_one(self, i, val):
        """Substitute symbol number i by the GaussRat val; result keeps the table
        (the i-th exponent is zeroed)."""
        out = LaurentPoly(self.table)
        cache = {}
        for e, c in self.terms.items():
            k = e[i]
            if k not in cache:
                if not val and k < 0:
                    raise PoleError(f"negative power of {self.table.names[i]} at 0")
                cache[k] = val ** k if k >= 0 or val else GR_ZERO
                if k > 0 and not val:
                    cache[k] = GR_ZERO
            w = cache[k]
            e2 = e[:i] + (0,) + e[i + 1:]
            out = out + LaurentPoly.monomial(self.table, e2, c * w)
        return out

    def div_linear(self, i, a):
        """Exact division by (x_i - a), assuming subs_one(i, a) vanishes.

        Works for Laurent exponents provided a != 0 when negative powers occur.
        """
        slices = {}
        for e, c in self.terms.items():
            k = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            slices.setdefault(k, {})[rest] = c
        if not slices:
            return LaurentPoly(self.table)
        kmin, kmax = min(slices), max(slices)
        if kmin < 0 and not a:
            raise ZeroDivisionError("cannot divide Laurent tail by x at 0")
        # synthetic division of sum_{k} p_k x^k by (x - a), descending Horner
        out = {}
        carry = {}
        for k in range(kmax, kmin - 1, -1):
            pk = slices.get(k, {})
            q = dict(carry)
            for rest, c in pk.items():
                s = q.get(rest, GR_ZERO) + c
                if s:
                    q[rest] = s
                elif rest in q:
                    del q[rest]
            if k > kmin:
                out[k - 1] = q
                carry = {rest: c * a for rest, c in q.items() if c * a}
            else:
                if q:
                    raise ArithmeticError("division by (x - a) is not exact")
        terms = {}
        for k, sl in out.items():
            for rest, c in sl.items():
                terms[rest[:i] + (k,) + rest[i + 1:]] = c
        return LaurentPoly(self.table, terms)

    def negate_exponents(self):
        """Evaluate at the inverted point (every symbol -> its inverse)."""
        return LaurentPoly(self.table, {tuple(-x for x in e): c
                                        for e, c in self.terms.items()})

    def min_exps(self):
        it = iter(self.terms)
        first = next(it)
        m = list(first)
        for e in it:
            for j, x in enumerate(e):
                if x < m[j]:
                    m[j] = x
        return m

    def shift(self, exps):
        return LaurentPoly(self.table, {
            tuple(x - y for x, y in zip(e, exps)): c for e, c in self.terms.items()})

    def apply_symbol_map(self, images):
        """Ring map sending symbol j to coeff_j * monomial_j; coefficients are
        complex conjugated (used by conjugations).  images[j] = (GaussRat, expvec)."""
        out = LaurentPoly(self.table)
        n = len(self.table)
        for e, c in self.terms.items():
            coeff = c.conjugate()
            exp = [0] * n
            for j, k in enumerate(e):
                if not k:
                    continue
                cj, ej = images[j]
                coeff = coeff * cj ** k
                for t, x in enumerate(ej):
                    exp[t] += x * k
            out = out + LaurentPoly.monomial(self.table, exp, coeff)
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0])

    def __str__(self):
        if not self.terms:
            return "0"
        return " ; ".join(term_str(self.table, e, c) for e, c in self.sorted_terms())


def term_str(table, exps, coeff):
    """Canonical term string: coeff * v^k * qsym^k ... with symbols in table order."""
    parts = [str(coeff)]
    for name, k in zip(table.names, exps):
        if k:
            parts.append(f"{name}^{k}")
    return " * ".join(parts)


def term_parse(table, s):
    parts = [p.strip() for p in s.split("*")]
    coeff = GaussRat.parse(parts[0])
    exps = [0] * len(table)
    for p in parts[1:]:
        name, _, k = p.partition("^")
        exps[table.index[name.strip()]] += int(k)
    return tuple(exps), coeff


class RingElem:
    """Unreduced fraction num/den of Laurent polynomials.

    Construction normalizes the joint monomial content and the denominator's
    lexicographically-first coefficient; full reduction is never attempted.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, normalize=True):
        if den is None:
            den = LaurentPoly.const(num.table, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if normalize and not den.is_one():
            if num.is_zero():
                den = LaurentPoly.const(num.table, 1)
            else:
                m = num.min_exps()
                dm = den.min_exps()
                g = [min(x, y) for x, y in zip(m, dm)]
                if any(g):
                    num = num.shift(g)
                    den = den.shift(g)
                lead = min(den.terms)
                c = den.terms[lead]
                if c != GR_ONE:
                    ci = c.inverse()
                    num = num.scale(ci)
                    den = den.scale(ci)
        self.num = num
        self.den = den

    # --- constructors -----------------------------------------------------
    @staticmethod
    def const(table, c):
        return RingElem(LaurentPoly.const(table, c), normalize=False)

    @staticmethod
    def symbol(table, name, power=1):
        return RingElem(LaurentPoly.symbol(table, name, power), normalize=False)

    @property
    def table(self):
        return self.num.table

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num == self.den

    # --- field operations -------------------------------------------------
    def __add__(self, other):
        if self.den is other.den or self.den == other.den:
            return RingElem(self.num + other.num, self.den)
        if self.den.is_one() and other.den.is_one():
            return RingElem(self.num + other.num, normalize=False)
        return RingElem(self.num * other.den + other.num * self.den,
                        self.den * other.den)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return RingElem(-self.num, self.den, normalize=False)

    def __mul__(self, other):
        if self.den.is_one() and other.den.is_one():
            return RingElem(self.num * other.num, normalize=False)
        return RingElem(self.num * other.num, self.den * other.den)

    def inv(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inversion of zero")
        return RingElem(self.den, self.num)

    def __truediv__(self, other):
        return self * other.inv()

    def scale(self, c):
        return RingElem(self.num.scale(c), self.den, normalize=False)

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        out = RingElem.const(self.table, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def equals(self, other):
        """Exact equality by cross-multiplication."""
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __eq__(self, other):
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.equals(other)

    def __hash__(self):  # hash by value class is impossible cheaply; use num/den form
        return hash((self.num, self.den))

    # --- evaluation -------------------------------------------------------
    def limit_at(self, name, val):
        """Substitute one symbol exactly, resolving (x-a)/(x-a) style 0/0 by
        synthetic division.  Raises PoleError at a genuine pole."""
        i = self.table.index[name]
        num, den = self.num, self.den
        if num.is_zero():
            dv = den.subs_one(i, val)
            if dv.is_zero():
                # 0/0 with zero numerator is still zero once den is cleared
                while dv.is_zero():
                    den = den.div_linear(i, val)
                    dv = den.subs_one(i, val)
            return RingElem(num, dv)
        while True:
            nv = num.subs_one(i, val)
            dv = den.subs_one(i, val)
            if dv.is_zero():
                if nv.is_zero():
                    num = num.div_linear(i, val)
                    den = den.div_linear(i, val)
                    continue
                raise PoleError(f"pole at {name} = {val}")
            return RingElem(nv, dv)

    def substitute(self, assignment):
        """Exact evaluation at a symbol -> GaussRat point; all symbols covered."""
        missing = [n for n in self.table.names if n not in assignment]
        if missing:
            raise KeyError(f"assignment misses symbols {missing}")
        e = self
        for n in self.table.names:
            e = e.limit_at(n, assignment[n])
        nv = next(iter(e.num.terms.values()), GR_ZERO)
        dv = next(iter(e.den.terms.values()), GR_ZERO)
        return nv / dv

    def classical_limit(self):
        """Value at v = 1 and every other symbol = 1; poles signal genuinely
        singular expressions (used to certify 1/lambda cancellations)."""
        return self.substitute({n: GR_ONE for n in self.table.names})

    def conjugate(self, rule):
        return RingElem(rule.apply_poly(self.num), rule.apply_poly(self.den))

    def invert_symbols(self):
        return RingElem(self.num.negate_exponents(), self.den.negate_exponents())

    # --- serialization ----------------------------------------------------
    def to_json(self):
        return {"num": [term_str(self.table, e, c) for e, c in self.num.sorted_terms()],
                "den": [term_str(self.table, e, c) for e, c in self.den.sorted_terms()]}

    @staticmethod
    def from_json(table, obj):
        num = LaurentPoly(table, dict(term_parse(table, t) for t in obj["num"]))
        den = LaurentPoly(table, dict(term_parse(table, t) for t in obj["den"]))
        return RingElem(num, den, normalize=False)

    def __str__(self):
        if self.den.is_one():
            return f"({self.num})"
        return f"({self.num}) / ({self.den})"

    __repr__ = __str__


class ConjRule:
    """Anti-linear ring involution: complex-conjugates coefficients and maps each
    symbol to a fixed unit monomial (e.g. v -> v^-1, q -> q*v^-4)."""

    def __init__(self, table, images):
        """images: name -> (GaussRat coeff, {name: exp}) or RingElem monomial."""
        self.table = table
        self.images = []
        for n in table.names:
            c, ev = images[n]
            vec = [0] * len(table)
            for k, x in ev.items():
                vec[table.index[k]] = x
            self.images.append((c, tuple(vec)))
        if not self._involutive():
            raise ValueError("conjugation rule is not involutive on the symbol table")

    def _involutive(self):
        for j in range(len(self.table)):
            c, e = self.images[j]
            # apply the rule to the image monomial
            coeff = c.conjugate()
            exp = [0] * len(self.table)
            for t, k in enumerate(e):
                if not k:
                    continue
                ct, et = self.images[t]
                coeff = coeff * ct ** k
                for u, x in enumerate(et):
                    exp[u] += x * k
            want = [0] * len(self.table)
            want[j] = 1
            if coeff != GR_ONE or exp != want:
                return False
        return True

    def apply_poly(self, p):
        return p.apply_symbol_map(self.images)

    def apply(self, elem):
        return elem.conjugate(self)


def identity_conj_rule(table):
    """Plain coefficient conjugation, all symbols fixed (real symbols)."""
    return ConjRule(table, {n: (GR_ONE, {n: 1}) for n in table.names})


# --- small expression parser (fixtures and CLI --params) -------------------

class _Tok:
    def __init__(self, s):
        self.s = s
        self.i = 0

    def peek(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1
        return self.s[self.i] if self.i < len(self.s) else ""

    def next_atom(self):
        c = self.peek()
        j = self.i
        if c.isdigit():
            while j < len(self.s) and self.s[j].isdigit():
                j += 1
            tok = self.s[self.i:j]
            self.i = j
            return ("num", int(tok))
        if c.isalpha() or c == "_":
            while j < len(self.s) and (self.s[j].isalnum() or self.s[j] == "_"):
                j += 1
            tok = self.s[self.i:j]
            self.i = j
            return ("sym", tok)
        self.i += 1
        return ("op", c)


def parse_expr(s, table, aliases=None):
    """Parse '+,-,*,/,^,(),i' expressions over the table's symbols into a RingElem.

    aliases maps extra names (e.g. the display parameter 'q') to RingElems.
    """
    aliases = aliases or {}
    tk = _Tok(s)

    def atom():
        c = tk.peek()
        if c == "(":
            tk.next_atom()
            e = expr()
            if tk.peek() != ")":
                raise ValueError(f"expected ')' in {s!r}")
            tk.next_atom()
            return e
        kind, val = tk.next_atom()
        if kind == "num":
            return RingElem.const(table, val)
        if kind == "sym":
            if val == "i":
                return RingElem.const(table, GR_I)
            if val in aliases:
                return aliases[val]
            if val in table.index:
                return RingElem.symbol(table, val)
            raise ValueError(f"unknown symbol {val!r} in {s!r}")
        raise ValueError(f"unexpected {val!r} in {s!r}")

    def power():
        e = atom()
        if tk.peek() == "^":
            tk.next_atom()
            neg = False
            if tk.peek() == "-":
                tk.next_atom()
                neg = True
            kind, val = tk.next_atom()
            if kind != "num":
                raise ValueError(f"bad exponent in {s!r}")
            e = e ** (-val if neg else val)
        return e

    def factor():
        if tk.peek() == "-":
            tk.next_atom()
            return -factor()
        return power()

    def term():
        e = factor()
        while tk.peek() in ("*", "/"):
            op = tk.next_atom()[1]
            rhs = factor()
            e = e * rhs if op == "*" else e / rhs
        return e

    def expr():
        e = term()
        while tk.peek() in ("+", "-"):
            op = tk.next_atom()[1]
            rhs = term()
            e = e + rhs if op == "+" else e - rhs
        return e

    out = expr()
    if tk.peek():
        raise ValueError(f"trailing input in {s!r}")
    return out
