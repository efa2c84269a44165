"""Exact linear algebra over Z/p^m: triangular canonical forms.

Z/p^m is local, so a Smith-style diagonalization only ever needs the entry
of minimal p-valuation as pivot.  Everything a module computation needs --
kernels, solving, span membership, quotient structure, unique normal forms
-- reduces to `diagonalize` or to the Howell-style row span `SpanNF`.

The `batch_*` functions are numpy re-implementations of the same pivoting
scheme over stacks of small matrices; they exist for the large pairwise
window-hom sweeps and are cross-checked against the scalar routines in the
test suite.
"""

from __future__ import annotations

import numpy as np


def _val(a: int, p: int, m: int) -> int:
    if a == 0:
        return m
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def diagonalize(mat, p: int, m: int):
    """Return (U, D, V, evals) with U*mat*V = D diagonal, D[k][k] = p^evals[k].

    U and V are invertible over Z/p^m.  evals[k] = m encodes a zero pivot.
    `mat` is a list of lists of ints; inputs are reduced mod p^m.
    """
    mod = p ** m
    A = [[x % mod for x in row] for row in mat]
    r = len(A)
    c = len(A[0]) if r else 0
    U = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    V = [[1 if i == j else 0 for j in range(c)] for i in range(c)]
    steps = min(r, c)
    evals = []
    for k in range(steps):
        # minimal-valuation pivot in the trailing submatrix
        best = (m + 1, k, k)
        for i in range(k, r):
            Ai = A[i]
            for j in range(k, c):
                v = _val(Ai[j], p, m)
                if v < best[0]:
                    best = (v, i, j)
            if best[0] == 0:
                break
        e, pi, pj = best
        if e >= m:
            evals.append(m)
            continue
        if pi != k:
            A[k], A[pi] = A[pi], A[k]
            U[k], U[pi] = U[pi], U[k]
        if pj != k:
            for row in A:
                row[k], row[pj] = row[pj], row[k]
            for row in V:
                row[k], row[pj] = row[pj], row[k]
        pe = p ** e
        unit = A[k][k] // pe
        w = pow(unit, -1, mod)
        A[k] = [(w * x) % mod for x in A[k]]
        U[k] = [(w * x) % mod for x in U[k]]
        for i in range(r):
            if i == k:
                continue
            f = A[i][k] // pe
            if f:
                Ak, Ai, Uk, Ui = A[k], A[i], U[k], U[i]
                for j in range(c):
                    Ai[j] = (Ai[j] - f * Ak[j]) % mod
                for j in range(r):
                    Ui[j] = (Ui[j] - f * Uk[j]) % mod
        for j in range(k + 1, c):
            g = A[k][j] // pe
            if g:
                for i in range(r):
                    A[i][j] = (A[i][j] - g * A[i][k]) % mod
                for i in range(c):
                    V[i][j] = (V[i][j] - g * V[i][k]) % mod
        evals.append(e)
    return U, A, V, evals


def kernel_basis(mat, p: int, m: int):
    """Generators of {x : mat*x = 0 mod p^m} as a list of int tuples."""
    r = len(mat)
    c = len(mat[0]) if r else 0
    if c == 0:
        return []
    if r == 0:
        return [tuple(1 if i == j else 0 for i in range(c)) for j in range(c)]
    mod = p ** m
    _, _, V, evals = diagonalize(mat, p, m)
    gens = []
    for j in range(c):
        e = evals[j] if j < len(evals) else m
        scale = p ** (m - e) if e > 0 else None
        if scale is None:
            continue
        col = tuple((V[i][j] * scale) % mod for i in range(c))
        if any(col):
            gens.append(col)
    return gens


def solve(mat, rhs, p: int, m: int):
    """One solution of mat*x = rhs mod p^m, or None; pair with kernel_basis."""
    mod = p ** m
    r = len(mat)
    c = len(mat[0]) if r else 0
    U, _, V, evals = diagonalize(mat, p, m)
    y = [sum(U[i][k] * rhs[k] for k in range(r)) % mod for i in range(r)]
    z = [0] * c
    for i in range(r):
        e = evals[i] if i < len(evals) else m
        if e >= m:
            if y[i] % mod:
                return None
            continue
        pe = p ** e
        if y[i] % pe:
            return None
        z[i] = y[i] // pe
    x = [sum(V[i][j] * z[j] for j in range(c)) % mod for i in range(c)]
    return tuple(x)


class SpanNF:
    """Canonical (Howell-style) form of a row span over Z/p^m.

    Supports exact span membership and unique normal forms of cosets: after
    `reduce`, the entry at a pivot column with pivot p^e lies in [0, p^e).
    The stored rows are closed under multiplication by p^{m-e}, which is
    what makes membership-by-reduction complete over Z/p^m.
    """

    def __init__(self, ncols: int, p: int, m: int):
        self.ncols = ncols
        self.p = p
        self.m = m
        self.mod = p ** m
        self.rows: dict[int, tuple[int, list[int]]] = {}  # lead -> (e, row)

    def insert(self, vec) -> None:
        vec = [x % self.mod for x in vec]
        queue = [vec]
        while queue:
            v = queue.pop()
            lead = next((i for i, x in enumerate(v) if x), None)
            while lead is not None:
                e = _val(v[lead], self.p, self.m)
                if lead not in self.rows:
                    pe = self.p ** e
                    unit = v[lead] // pe
                    w = pow(unit, -1, self.mod)
                    row = [(w * x) % self.mod for x in v]
                    self.rows[lead] = (e, row)
                    if e > 0:
                        scale = self.p ** (self.m - e)
                        queue.append([(scale * x) % self.mod for x in row])
                    self._interreduce(lead)
                    lead = None
                else:
                    e0, row0 = self.rows[lead]
                    if e >= e0:
                        f = v[lead] // (self.p ** e0)
                        v = [(a - f * b) % self.mod for a, b in zip(v, row0)]
                        lead = next((i for i, x in enumerate(v) if x), None)
                    else:
                        # the new vector has the better pivot; swap them in
                        pe = self.p ** e
                        unit = v[lead] // pe
                        w = pow(unit, -1, self.mod)
                        newrow = [(w * x) % self.mod for x in v]
                        self.rows[lead] = (e, newrow)
                        if e > 0:
                            scale = self.p ** (self.m - e)
                            queue.append([(scale * x) % self.mod for x in newrow])
                        queue.append(row0)
                        self._interreduce(lead)
                        lead = None

    def _interreduce(self, lead: int) -> None:
        """Re-reduce other rows against a freshly (re)placed pivot row.

        A row with lead l2 can only meet the new pivot at a column lead > l2,
        so reduction never disturbs its own lead; rows whose entry at `lead`
        has smaller valuation than the pivot are displaced and re-inserted.
        """
        e, row = self.rows[lead]
        pe = self.p ** e
        displaced = []
        for l2 in list(self.rows):
            if l2 == lead:
                continue
            e2, row2 = self.rows[l2]
            if row2[lead]:
                if _val(row2[lead], self.p, self.m) >= e:
                    f = row2[lead] // pe
                    self.rows[l2] = (
                        e2,
                        [(a - f * b) % self.mod for a, b in zip(row2, row)],
                    )
                else:
                    del self.rows[l2]
                    displaced.append(row2)
        for v in displaced:
            self.insert(v)

    def reduce(self, vec):
        """Canonical representative of vec modulo the span."""
        v = [x % self.mod for x in vec]
        for lead in sorted(self.rows):
            e, row = self.rows[lead]
            if v[lead]:
                q = v[lead] // (self.p ** e)
                if q:
                    v = [(a - q * b) % self.mod for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def basis(self):
        return [tuple(row) for _, (e, row) in sorted(self.rows.items())]

    def pivots(self):
        return {lead: e for lead, (e, row) in self.rows.items()}


def quotient_factor_orders(rel_rows, ncols: int, p: int, m: int):
    """Cyclic factor orders of (Z/p^m)^ncols / row-span(rel_rows).

    The factor at a relation pivot p^e is Z/p^e; columns without a pivot
    contribute full Z/p^m factors.  Order-1 factors are dropped.
    """
    mod = p ** m
    if not rel_rows:
        return [mod] * ncols
    _, _, _, evals = diagonalize(rel_rows, p, m)
    orders = []
    for j in range(ncols):
        e = evals[j] if j < len(evals) else m
        order = p ** e
        if order > 1:
            orders.append(order)
    return orders


def p_torsion_of_quotient(rel_rows, ncols: int, p: int, m: int):
    """Generators of the p-torsion of (Z/p^m)^ncols / row-span(rel_rows).

    Returns vectors t (reduced to span normal form, nonzero) with p*t in
    the span.  The whole kernel of multiplication-by-p is generated by the
    returned vectors together with the span itself.
    """
    mod = p ** m
    k = len(rel_rows)
    # variables (t, lambda): p*t - lambda*rel = 0
    mat = [[0] * (ncols + k) for _ in range(ncols)]
    for i in range(ncols):
        mat[i][i] = p
        for s in range(k):
            mat[i][ncols + s] = (-rel_rows[s][i]) % mod
    gens = kernel_basis(mat, p, m)
    nf = SpanNF(ncols, p, m)
    for row in rel_rows:
        nf.insert(row)
    out = []
    seen = set()
    for g in gens:
        t = nf.reduce(g[:ncols])
        if any(t) and t not in seen:
            seen.add(t)
            out.append(t)
    return out, nf


# -- batched numpy variants ------------------------------------------------


def _tables(p: int, m: int):
    mod = p ** m
    val = np.zeros(mod, dtype=np.int64)
    for a in range(1, mod):
        val[a] = _val(a, p, m)
    val[0] = m
    inv = np.zeros(mod, dtype=np.int64)
    for a in range(1, mod):
        if a % p:
            inv[a] = pow(a, -1, mod)
    return val, inv


_TABLE_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def tables(p: int, m: int):
    key = (p, m)
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = _tables(p, m)
    return _TABLE_CACHE[key]


def batch_kernel(mats: np.ndarray, p: int, m: int):
    """Kernel generators for a stack of matrices over Z/p^m.

    mats: (N, r, c) int64, entries already reduced mod p^m.  Returns
    (gens, evals): gens is (N, c, c) with gens[n, :, j] a kernel generator
    (possibly zero), evals (N, c) the pivot exponents (m for free columns).
    Same pivoting scheme as `diagonalize`.
    """
    val_tab, inv_tab = tables(p, m)
    mod = p ** m
    A = mats % mod
    N, r, c = A.shape
    V = np.broadcast_to(np.eye(c, dtype=np.int64), (N, c, c)).copy()
    evals = np.full((N, c), m, dtype=np.int64)
    steps = min(r, c)
    batch = np.arange(N)
    for k in range(steps):
        sub = A[:, k:, k:]
        vals = val_tab[sub]
        flat = vals.reshape(N, -1)
        idx = np.argmin(flat, axis=1)
        width = c - k
        pi = idx // width + k
        pj = idx % width + k
        # row swap k <-> pi
        rows_k = A[batch, k, :].copy()
        A[batch, k, :] = A[batch, pi, :]
        A[batch, pi, :] = rows_k
        # column swap k <-> pj (also on V)
        cols_k = A[batch, :, k].copy()
        A[batch, :, k] = A[batch, :, pj]
        A[batch, :, pj] = cols_k
        vcols_k = V[batch, :, k].copy()
        V[batch, :, k] = V[batch, :, pj]
        V[batch, :, pj] = vcols_k
        pivot = A[:, k, k]
        e = val_tab[pivot]
        evals[:, k] = e
        pe = p ** np.minimum(e, m)
        unit = pivot // pe
        unit = np.where(unit == 0, 1, unit)
        w = inv_tab[unit % mod]
        A[:, k, :] = (A[:, k, :] * w[:, None]) % mod
        live = e < m
        # eliminate below
        if k + 1 < r:
            f = (A[:, k + 1 :, k] // pe[:, None]) * live[:, None]
            A[:, k + 1 :, :] = (A[:, k + 1 :, :] - f[:, :, None] * A[:, k, :][:, None, :]) % mod
        # eliminate to the right (column ops touch V)
        if k + 1 < c:
            g = (A[:, k, k + 1 :] // pe[:, None]) * live[:, None]
            A[:, :, k + 1 :] = (A[:, :, k + 1 :] - A[:, :, k][:, :, None] * g[:, None, :]) % mod
            V[:, :, k + 1 :] = (V[:, :, k + 1 :] - V[:, :, k][:, :, None] * g[:, None, :]) % mod
    scale = p ** (m - np.minimum(evals, m))
    scale = np.where(evals == 0, 0, scale)  # unit pivots force the coordinate to 0
    gens = (V * scale[:, None, :]) % mod
    return gens, evals


def batch_matmul_mod(a: np.ndarray, b: np.ndarray, mod: int) -> np.ndarray:
    return np.einsum("nij,njk->nik", a, b) % mod
