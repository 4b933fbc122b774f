"""Sparse exact tensors over RingElem: contraction, permutation, matrix views
on index partitions, and exact rank computation."""

from __future__ import annotations

from .ring import GR_ZERO, GaussRat, LaurentPoly, PoleError, RingElem


_PROD_MEMO = {}


def _acc_product(acc, key, v, w):
    """Accumulate v*w into acc[key], tracking a common denominator.

    acc values are [table, num_terms_dict, den_poly_or_None]; None means 1.
    Products are memoized by object identity, which pays off on interned
    tensors whose entries share a small pool of distinct values.
    """
    mk = (id(v), id(w))
    hit = _PROD_MEMO.get(mk)
    if hit is not None and hit[0] is v and hit[1] is w:
        pn, pd = hit[2], hit[3]
    else:
        pn = v.num * w.num
        if v.den.is_one():
            pd = None if w.den.is_one() else w.den
        else:
            pd = v.den if w.den.is_one() else v.den * w.den
        if len(_PROD_MEMO) > 400000:
            _PROD_MEMO.clear()
        _PROD_MEMO[mk] = (v, w, pn, pd)
    cur = acc.get(key)
    if cur is None:
        acc[key] = [pn.table, dict(pn.terms), pd]
        return
    table, cn, cd = cur
    same = cd is pd or (cd is None and pd is None) or \
        (cd is not None and pd is not None and cd == pd)
    if same:
        LaurentPoly.iadd_terms(cn, pn.terms)
    elif cd is None:
        merged = LaurentPoly(table, cn) * pd
        cur[1] = dict(merged.terms)
        LaurentPoly.iadd_terms(cur[1], pn.terms)
        cur[2] = pd
    elif pd is None:
        LaurentPoly.iadd_terms(cn, (pn * cd).terms)
    else:
        merged = LaurentPoly(table, cn) * pd
        cur[1] = dict(merged.terms)
        LaurentPoly.iadd_terms(cur[1], (pn * cd).terms)
        cur[2] = cd * pd


def _acc_finish(acc):
    out = {}
    for key, (table, cn, cd) in acc.items():
        if not cn:
            continue
        num = LaurentPoly(table, cn)
        elem = RingElem(num) if cd is None else RingElem(num, cd)
        if not elem.is_zero():
            out[key] = elem
    return out


class SparseTensor:
    """Finite mapping from multi-indices to RingElem with declared per-axis
    dimensions and human index labels.  No stored zeros; indices are 0-based
    internally, labels carry the display alphabet (e.g. 'o', '1', ..., '*')."""

    __slots__ = ("dims", "labels", "entries")

    def __init__(self, dims, labels=None, entries=None):
        self.dims = tuple(dims)
        if labels is None:
            labels = tuple(tuple(str(i + 1) for i in range(d)) for d in self.dims)
        self.labels = tuple(tuple(ax) for ax in labels)
        for ax, d in zip(self.labels, self.dims):
            if len(ax) != d:
                raise ValueError("label alphabet does not match axis dimension")
        self.entries = entries if entries is not None else {}

    @property
    def rank(self):
        return len(self.dims)

    def add_term(self, idx, val):
        if val.is_zero():
            return
        cur = self.entries.get(idx)
        if cur is None:
            self.entries[idx] = val
        else:
            cur = cur + val
            if cur.is_zero():
                del self.entries[idx]
            else:
                self.entries[idx] = cur

    def set_entry(self, idx, val):
        idx = tuple(idx)
        if len(idx) != self.rank or any(not 0 <= i < d for i, d in zip(idx, self.dims)):
            raise IndexError(f"index {idx} outside dims {self.dims}")
        if val.is_zero():
            self.entries.pop(idx, None)
        else:
            self.entries[idx] = val

    def get(self, idx):
        return self.entries.get(tuple(idx))

    def copy(self):
        return SparseTensor(self.dims, self.labels, dict(self.entries))

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SparseTensor):
            return NotImplemented
        if self.dims != other.dims:
            return False
        if self.entries.keys() != other.entries.keys():
            return False
        return all(v.equals(other.entries[k]) for k, v in self.entries.items())

    def add(self, other):
        if self.dims != other.dims:
            raise ValueError("shape mismatch")
        out = self.copy()
        for k, v in other.entries.items():
            out.add_term(k, v)
        return out

    def sub(self, other):
        return self.add(other.scale_coeff(-1))

    def scale(self, elem):
        if elem.is_zero():
            return SparseTensor(self.dims, self.labels)
        return SparseTensor(self.dims, self.labels,
                            {k: v * elem for k, v in self.entries.items()})

    def scale_coeff(self, c):
        if not isinstance(c, GaussRat):
            c = GaussRat(c)
        if not c:
            return SparseTensor(self.dims, self.labels)
        return SparseTensor(self.dims, self.labels,
                            {k: v.scale(c) for k, v in self.entries.items()})

    def map_values(self, f):
        out = SparseTensor(self.dims, self.labels)
        for k, v in self.entries.items():
            out.add_term(k, f(v))
        return out

    def interned(self):
        """Share one object per distinct entry value (enables memoized
        products in contractions)."""
        pool = {}
        out = {}
        for k, v in self.entries.items():
            ck = (frozenset(v.num.terms.items()), frozenset(v.den.terms.items()))
            got = pool.get(ck)
            if got is None:
                pool[ck] = got = v
            out[k] = got
        return SparseTensor(self.dims, self.labels, out)

    def permute(self, order):
        dims = tuple(self.dims[a] for a in order)
        labels = tuple(self.labels[a] for a in order)
        return SparseTensor(dims, labels, {
            tuple(k[a] for a in order): v for k, v in self.entries.items()})

    def contract(self, other, pairs):
        """Sum over paired axes: pairs = [(axis_self, axis_other), ...].

        Free axes of self come first in the result, then free axes of other.
        """
        for a, b in pairs:
            if self.dims[a] != other.dims[b] or self.labels[a] != other.labels[b]:
                raise ValueError(f"axis mismatch on pair ({a},{b})")
        sa = [a for a, _ in pairs]
        sb = [b for _, b in pairs]
        fa = [a for a in range(self.rank) if a not in sa]
        fb = [b for b in range(other.rank) if b not in sb]
        dims = tuple(self.dims[a] for a in fa) + tuple(other.dims[b] for b in fb)
        labels = tuple(self.labels[a] for a in fa) + tuple(other.labels[b] for b in fb)
        buckets = {}
        for k, v in other.entries.items():
            key = tuple(k[b] for b in sb)
            buckets.setdefault(key, []).append((tuple(k[b] for b in fb), v))
        acc = {}
        for k, v in self.entries.items():
            key = tuple(k[a] for a in sa)
            hits = buckets.get(key)
            if not hits:
                continue
            base = tuple(k[a] for a in fa)
            for rest, w in hits:
                _acc_product(acc, base + rest, v, w)
        out = SparseTensor(dims, labels, _acc_finish(acc))
        if len(out.entries) > 64:
            out = out.interned()
        return out

    # --- serialization ----------------------------------------------------
    def to_json(self):
        return {
            "rank": self.rank,
            "dims": list(self.dims),
            "labels": [list(ax) for ax in self.labels],
            "entries": [{"i": list(k), "v": v.to_json()}
                        for k, v in sorted(self.entries.items())],
        }

    @staticmethod
    def from_json(table, obj):
        t = SparseTensor(obj["dims"], obj["labels"])
        for e in obj["entries"]:
            t.entries[tuple(e["i"])] = RingElem.from_json(table, e["v"])
        return t

    def __repr__(self):
        return f"SparseTensor(dims={self.dims}, nnz={len(self.entries)})"


def identity_tensor(table, dim, labels=None):
    """delta^a_b as a rank-2 tensor."""
    one = RingElem.const(table, 1)
    t = SparseTensor((dim, dim), (labels, labels) if labels else None)
    for i in range(dim):
        t.entries[(i, i)] = one
    return t


def kron_pair(table, dim, labels=None):
    """delta^a_c delta^b_d as a rank-4 tensor (identity on pairs)."""
    one = RingElem.const(table, 1)
    lab = (labels,) * 4 if labels else None
    t = SparseTensor((dim,) * 4, lab)
    for i in range(dim):
        for j in range(dim):
            t.entries[(i, j, i, j)] = one
    return t


class MatrixView:
    """A tensor with its axes split into a row group and a column group,
    flattened row-major (composite index (A1,A2) has A1 outer)."""

    __slots__ = ("tensor", "row_axes", "col_axes", "_rows")

    def __init__(self, tensor, row_axes, col_axes):
        if sorted(tuple(row_axes) + tuple(col_axes)) != list(range(tensor.rank)):
            raise ValueError("row/col axes must partition the tensor axes")
        self.tensor = tensor
        self.row_axes = tuple(row_axes)
        self.col_axes = tuple(col_axes)
        self._rows = None

    @property
    def nrows(self):
        n = 1
        for a in self.row_axes:
            n *= self.tensor.dims[a]
        return n

    @property
    def ncols(self):
        n = 1
        for a in self.col_axes:
            n *= self.tensor.dims[a]
        return n

    def _flat(self, idx, axes):
        n = 0
        for a in axes:
            n = n * self.tensor.dims[a] + idx[a]
        return n

    def rows(self):
        """Sparse dict-of-rows {r: {c: RingElem}}."""
        if self._rows is None:
            rows = {}
            for k, v in self.tensor.entries.items():
                r = self._flat(k, self.row_axes)
                c = self._flat(k, self.col_axes)
                rows.setdefault(r, {})[c] = v
            self._rows = rows
        return self._rows

    @staticmethod
    def from_rows(rows, dims_r, labels_r, dims_c, labels_c):
        t = SparseTensor(tuple(dims_r) + tuple(dims_c),
                         tuple(labels_r) + tuple(labels_c))
        nr = len(dims_r)
        for r, row in rows.items():
            ri = _unflatten(r, dims_r)
            for c, v in row.items():
                if not v.is_zero():
                    t.entries[ri + _unflatten(c, dims_c)] = v
        return MatrixView(t, tuple(range(nr)), tuple(range(nr, nr + len(dims_c))))

    def _meta(self):
        dims_r = [self.tensor.dims[a] for a in self.row_axes]
        labs_r = [self.tensor.labels[a] for a in self.row_axes]
        dims_c = [self.tensor.dims[a] for a in self.col_axes]
        labs_c = [self.tensor.labels[a] for a in self.col_axes]
        return dims_r, labs_r, dims_c, labs_c

    def matmul(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matmul")
        a = self.rows()
        b = other.rows()
        out = {}
        for r, row in a.items():
            acc = {}
            for k, v in row.items():
                brow = b.get(k)
                if not brow:
                    continue
                for c, w in brow.items():
                    _acc_product(acc, c, v, w)
            fin = _acc_finish(acc)
            if fin:
                out[r] = fin
        dims_r, labs_r, _, _ = self._meta()
        _, _, dims_c, labs_c = other._meta()
        return MatrixView.from_rows(out, dims_r, labs_r, dims_c, labs_c)

    def matpow(self, k):
        if k < 1:
            raise ValueError("matpow needs k >= 1")
        out = self
        for _ in range(k - 1):
            out = out.matmul(self)
        return out

    def normalized(self):
        """Same view with axes physically reordered to (rows..., cols...)."""
        nr = len(self.row_axes)
        if self.row_axes == tuple(range(nr)) and \
                self.col_axes == tuple(range(nr, self.tensor.rank)):
            return self
        t = self.tensor.permute(self.row_axes + self.col_axes)
        return MatrixView(t, tuple(range(nr)), tuple(range(nr, t.rank)))

    def add(self, other):
        a, b = self.normalized(), other.normalized()
        return MatrixView(a.tensor.add(b.tensor), a.row_axes, a.col_axes)

    def sub(self, other):
        a, b = self.normalized(), other.normalized()
        return MatrixView(a.tensor.sub(b.tensor), a.row_axes, a.col_axes)

    def scale(self, elem):
        return MatrixView(self.tensor.scale(elem), self.row_axes, self.col_axes)

    def add_scalar_identity(self, elem):
        """self + elem * I on square views."""
        if self.nrows != self.ncols:
            raise ValueError("not square")
        rows = {r: dict(row) for r, row in self.rows().items()}
        for r in range(self.nrows):
            row = rows.setdefault(r, {})
            cur = row.get(r)
            row[r] = elem if cur is None else cur + elem
            if row[r].is_zero():
                del row[r]
            if not row:
                del rows[r]
        dims_r, labs_r, dims_c, labs_c = self._meta()
        return MatrixView.from_rows(rows, dims_r, labs_r, dims_c, labs_c)

    def is_zero(self):
        return all(v.is_zero() for row in self.rows().values() for v in row.values())

    def is_identity(self):
        if self.nrows != self.ncols:
            return False
        rows = self.rows()
        seen = 0
        for r, row in rows.items():
            for c, v in row.items():
                if r == c:
                    if not v.is_one():
                        return False
                    seen += 1
                elif not v.is_zero():
                    return False
        return seen == self.nrows

    def witness_vs(self, other):
        """First differing flat (row, col) with both values, or None."""
        a, b = self.rows(), other.rows()
        keys = set()
        for r, row in a.items():
            keys.update((r, c) for c in row)
        for r, row in b.items():
            keys.update((r, c) for c in row)
        zero = None
        for r, c in sorted(keys):
            va = a.get(r, {}).get(c)
            vb = b.get(r, {}).get(c)
            if va is None and vb is None:
                continue
            if va is None or vb is None or not va.equals(vb):
                return (r, c, va, vb)
        return zero

    def rank_at(self, sample):
        """Rank of the evaluated matrix by exact Gaussian elimination over
        Gaussian rationals.  Raises PoleError if the sample hits a pole."""
        rows = []
        for r, row in self.rows().items():
            vals = {}
            for c, v in row.items():
                x = v.substitute(sample)
                if x:
                    vals[c] = x
            if vals:
                rows.append(vals)
        rank = 0
        while rows:
            piv_row = rows.pop()
            if not piv_row:
                continue
            rank += 1
            c0 = next(iter(piv_row))
            pv = piv_row[c0]
            reduced = []
            for row in rows:
                if c0 in row:
                    f = row[c0] / pv
                    new = dict(row)
                    for c, v in piv_row.items():
                        cur = new.get(c, GR_ZERO) - f * v
                        if cur:
                            new[c] = cur
                        else:
                            new.pop(c, None)
                    if new:
                        reduced.append(new)
                else:
                    reduced.append(row)
            rows = reduced
        return rank


def _unflatten(n, dims):
    out = []
    for d in reversed(dims):
        out.append(n % d)
        n //= d
    return tuple(reversed(out))


def unflatten(n, dims):
    return _unflatten(n, dims)


def flatten(idx, dims):
    n = 0
    for i, d in zip(idx, dims):
        n = n * d + i
    return n
