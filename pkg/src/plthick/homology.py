"""Integer simplicial homology via Smith normal form.

All arithmetic is arbitrary-precision integer; torsion coefficients are
exact.  The Smith normal form first exhausts unit pivots (chosen to limit
fill), then finishes the usually tiny remainder with the classic
smallest-pivot algorithm.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .complex_core import Complex, Simplex
from .errors import ConstructionError, ValidationError


@dataclass(frozen=True)
class ChainComplex:
    """Ordered simplex bases per dimension and integer boundary columns.

    ``matrices[k]`` holds one ``{row: coeff}`` dict per k-simplex, rows
    indexing the (k-1)-basis.  Relative chains simply omit the subcomplex's
    simplices from the bases.
    """

    bases: dict
    matrices: dict
    rel: Complex | None = None

    def rank(self, k):
        return len(self.bases.get(k, ()))


@dataclass(frozen=True)
class HomologyResult:
    """Betti numbers and torsion coefficients per dimension."""

    betti: tuple
    torsion: tuple

    def __str__(self):
        parts = []
        for k, b in enumerate(self.betti):
            t = "+".join("Z/%d" % d for d in self.torsion[k])
            parts.append("H%d=Z^%d%s" % (k, b, ("+" + t) if t else ""))
        return " ".join(parts)

    def euler(self):
        return sum((-1) ** k * b for k, b in enumerate(self.betti))

    def nonzero_top(self):
        return self.betti[-1] if self.betti else 0

    def agrees_with(self, other):
        """Group-by-group equality, padding the shorter result with zeros."""
        n = max(len(self.betti), len(other.betti))

        def padded(res):
            b = res.betti + (0,) * (n - len(res.betti))
            t = res.torsion + ((),) * (n - len(res.torsion))
            return b, t

        return padded(self) == padded(other)


def boundary_matrices(X, rel=None):
    """Chain complex of X, optionally relative to a subcomplex."""
    if rel is not None and not rel.is_subcomplex_of(X):
        raise ValidationError("relative subcomplex is not contained in X")
    excluded = rel.simplices if rel is not None else frozenset()
    bases = {}
    index = {}
    for k in range(X.dim + 1):
        basis = tuple(s for s in X.by_dim(k) if s not in excluded)
        bases[k] = basis
        index.update({s: i for i, s in enumerate(basis)})
    matrices = {}
    for k in range(1, X.dim + 1):
        cols = []
        for s in bases[k]:
            col = {}
            vs = s.vertices
            for i in range(len(vs)):
                facet = Simplex(vs[:i] + vs[i + 1:])
                if facet in excluded:
                    continue
                col[index[facet]] = 1 if i % 2 == 0 else -1
            cols.append(col)
        matrices[k] = cols
    cc = ChainComplex(bases=bases, matrices=matrices, rel=rel)
    _assert_boundary_squared_zero(cc)
    return cc


def _assert_boundary_squared_zero(cc):
    for k in range(2, max(cc.matrices, default=1) + 1):
        lower = cc.matrices[k - 1]
        for col in cc.matrices[k]:
            acc = {}
            for row, coeff in col.items():
                for row2, coeff2 in lower[row].items():
                    acc[row2] = acc.get(row2, 0) + coeff * coeff2
            if any(v != 0 for v in acc.values()):
                raise ConstructionError("boundary squared is nonzero in dim %d" % k)


# -- Smith normal form -------------------------------------------------------


def smith_normal_form(matrix):
    """Diagonal of the Smith normal form and the rank.

    ``matrix`` is a dense list of integer rows (possibly ragged-free).
    Returns ``(diagonal, rank)`` with positive diagonal entries satisfying
    d1 | d2 | ... .
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows and matrix[0] is not None and len(matrix[0]) else 0
    cols = []
    for c in range(ncols):
        col = {}
        for r in range(nrows):
            v = matrix[r][c]
            if v:
                col[r] = v
        cols.append(col)
    diag = _snf_diagonal_sparse(cols)
    return diag, len(diag)


def _snf_diagonal_sparse(cols):
    """Smith diagonal of a sparse column collection (destructive)."""
    live = {c: col for c, col in enumerate(cols) if col}
    row_cols = {}
    for c, col in live.items():
        for r in set(col):
            if col[r] == 0:
                del col[r]
                continue
            row_cols.setdefault(r, set()).add(c)

    def score(r, c):
        return (len(row_cols[r]) - 1) * (len(live[c]) - 1)

    heap = []
    for c, col in live.items():
        for r, v in col.items():
            if v in (1, -1):
                heapq.heappush(heap, (score(r, c), r, c))

    ones = 0
    while heap:
        sc, r, c = heapq.heappop(heap)
        col = live.get(c)
        if col is None or r not in col or col[r] not in (1, -1):
            continue
        if sc != score(r, c):
            heapq.heappush(heap, (score(r, c), r, c))
            continue
        pivot = col[r]
        ones += 1
        piv_entries = list(col.items())
        for c2 in list(row_cols[r]):
            if c2 == c:
                continue
            col2 = live[c2]
            factor = col2[r] * pivot
            for rr, vv in piv_entries:
                cur = col2.get(rr, 0) - factor * vv
                if cur:
                    if rr not in col2:
                        row_cols.setdefault(rr, set()).add(c2)
                    col2[rr] = cur
                    if cur in (1, -1):
                        heapq.heappush(heap, (score(rr, c2), rr, c2))
                elif rr in col2:
                    del col2[rr]
                    row_cols[rr].discard(c2)
            if not col2:
                del live[c2]
        for rr in list(col):
            row_cols[rr].discard(c)
        del live[c]
        row_cols.pop(r, None)

    if not live:
        return [1] * ones

    # Dense fallback for the residue without unit entries.
    rows = sorted({r for col in live.values() for r in col})
    rindex = {r: i for i, r in enumerate(rows)}
    dense = [[0] * len(live) for _ in rows]
    for j, (c, col) in enumerate(sorted(live.items())):
        for r, v in col.items():
            dense[rindex[r]][j] = v
    residue = _dense_snf(dense)
    diag = [1] * ones + residue
    return _normalize_divisibility(diag)


def _dense_snf(m):
    """Classic Smith normal form on a small dense matrix; returns diagonal."""
    m = [row[:] for row in m]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    diag = []
    t = 0
    while True:
        pr = pc = -1
        best = None
        for i in range(t, nr):
            row = m[i]
            for j in range(t, nc):
                v = row[j]
                if v and (best is None or abs(v) < best):
                    best, pr, pc = abs(v), i, j
        if best is None:
            break
        m[t], m[pr] = m[pr], m[t]
        for row in m:
            row[t], row[pc] = row[pc], row[t]
        while True:
            pivot = m[t][t]
            done = True
            for i in range(t + 1, nr):
                if m[i][t]:
                    q = m[i][t] // pivot
                    if q:
                        m[i] = [a - q * b for a, b in zip(m[i], m[t])]
                    if m[i][t]:
                        m[t], m[i] = m[i], m[t]
                        done = False
                        break
            if not done:
                continue
            for j in range(t + 1, nc):
                if m[t][j]:
                    q = m[t][j] // pivot
                    if q:
                        for row in m:
                            row[j] -= q * row[t]
                    if m[t][j]:
                        for row in m:
                            row[t], row[j] = row[j], row[t]
                        done = False
                        break
            if done:
                break
        # Ensure the pivot divides the rest of the submatrix.
        pivot = m[t][t]
        offender = None
        for i in range(t + 1, nr):
            row = m[i]
            for j in range(t + 1, nc):
                if row[j] % pivot:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            m[t] = [a + b for a, b in zip(m[t], m[offender])]
            continue
        diag.append(abs(pivot))
        t += 1
        if t >= nr or t >= nc:
            break
    return diag


def _normalize_divisibility(diag):
    import math

    diag = [abs(d) for d in diag if d]
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            a, b = diag[i], diag[i + 1]
            if b % a:
                g = math.gcd(a, b)
                diag[i], diag[i + 1] = g, a * b // g
                changed = True
    return diag


def _snf_of_matrix_k(cc, k):
    cols = [dict(col) for col in cc.matrices.get(k, [])]
    return _snf_diagonal_sparse(cols)


def homology_groups(X, rel=None):
    """Betti numbers and torsion coefficients of X (or of (X, rel))."""
    if X.dim < 0:
        return HomologyResult(betti=(), torsion=())
    cc = boundary_matrices(X, rel=rel)
    top = X.dim
    snf = {k: _snf_of_matrix_k(cc, k) for k in range(1, top + 1)}
    ranks = {k: len(snf.get(k, [])) for k in range(0, top + 2)}
    betti = []
    torsion = []
    for k in range(top + 1):
        b = cc.rank(k) - ranks.get(k, 0) - ranks.get(k + 1, 0)
        tor = tuple(d for d in snf.get(k + 1, []) if d > 1)
        betti.append(b)
        torsion.append(tor)
    result = HomologyResult(betti=tuple(betti), torsion=tuple(torsion))
    if rel is None:
        if result.euler() != X.euler_characteristic():
            raise ConstructionError("homology Euler characteristic mismatch")
    return result
