"""Connections on windows over divided-power frames.

A connection is a tuple of matrices N_1..N_k (one per base variable) with
entries in the cap-1 companion envelope: nabla(e_a) = sum e_b (N_i)_{ba} dx_i
plus the Leibniz rule.  Horizontality of Phi and Phi_1 is checked exactly at
the declared degree ledger; the solver flattens both diagrams to a linear
system over Z/p^m and returns the full affine solution set.

The square-zero frame D(1)_2 = D + Omega (multiplication (a,w)(a',w') =
(aa', aw' + a'w)) carries sigma1 = (sigma1, (dsigma)1) and the two
structural maps pbar_0(a) = (a, da), pbar_1(a) = (a, 0).  A horizontal
connection corresponds to the window isomorphism eps(x) = x + nabla(x)
between the two pullbacks; both directions of that dictionary are
implemented and certified through the generic window machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .frames import Frame, FrameHom
from .linalg import kernel_basis, solve as lin_solve
from .matrices import identity, mat, mat_col, mat_map, mat_mul
from .pdenv import PDAlgebra, PDDifferential, PDError, PDFrame, PDPresentation
from .windows import Window, WindowError, base_change, is_window_hom
from .matrices import is_invertible


@dataclass(frozen=True)
class Connection:
    """Per-variable operator matrices over the Omega coefficient envelope."""

    window: Window
    matrices: tuple  # k matrices, r x r over diff.env1

    @property
    def k(self):
        return len(self.matrices)


class NablaContext:
    """A window over a PD frame together with its differential structure."""

    def __init__(self, frame: PDFrame):
        if not isinstance(frame, PDFrame):
            raise WindowError("connections live over PD frames")
        self.frame = frame
        self.env = frame.env
        self.diff = PDDifferential(self.env)
        self.env1 = self.diff.env1

    def partial(self, x):
        """Tuple of dx_i components of d(x), over env1."""
        return self.diff.d(x)

    def partial_matrix(self, M, i):
        """Entrywise dx_i component of d applied to a matrix over env."""
        return mat([[self.partial(x)[i] for x in row] for row in M])

    def trunc(self, x):
        return self.env.truncate_to(self.env1, x)

    def trunc_mat(self, M):
        return mat_map(self.trunc, M)


def zero_connection(ctx: NablaContext, w: Window) -> Connection:
    r = w.rank
    z = ctx.env1.zero
    return Connection(w, tuple(mat([[z] * r for _ in range(r)]) for _ in range(ctx.diff.k)))


def _horizontality_residuals(ctx: NablaContext, w: Window, conn: Connection):
    """All residual matrices of the two horizontality diagrams; zero iff pass.

    Residuals are computed over env1: d(Phi)-terms, N-terms and the
    sigma-twisted (dsigma)1-terms, per direction j; the Phi_1 diagram is
    evaluated on the L-basis and on the a*e_t generators for a running over
    the ideal spanning set.
    """
    env1 = ctx.env1
    k = ctx.diff.k
    F = w.phi_matrix()
    Fbar = ctx.trunc_mat(F)
    theta = ctx.diff.theta
    sigN = [mat_map(env1.sigma, Ni) for Ni in conn.matrices]
    FsigN = [mat_mul(env1, Fbar, sNi) for sNi in sigN]
    residuals = []
    # (H-Phi): d_j(F) + N_j Fbar = p * sum_i Fbar sig(N_i) theta[j][i]
    for j in range(k):
        lhs = _mat_add(env1, ctx.partial_matrix(F, j), mat_mul(env1, conn.matrices[j], Fbar))
        rhs = _theta_combo(env1, FsigN, theta, j, scale_p=ctx.env.p)
        residuals.append(("phi", j, _mat_sub(env1, lhs, rhs)))
    # (H-Phi1) on L-columns: d_j(Psi_L) + N_j PsiBar_L = sum_i [Fbar sig(N_i)] theta[j][i], L columns
    if w.d:
        psi = w.psi
        psibar = ctx.trunc_mat(psi)
        for j in range(k):
            lhs = _mat_add(env1, ctx.partial_matrix(psi, j), mat_mul(env1, conn.matrices[j], psibar))
            rhs = _theta_combo(env1, FsigN, theta, j, scale_p=1)
            res = _mat_sub(env1, lhs, rhs)
            res_L = mat([row[: w.d] for row in res])
            residuals.append(("phi1-L", j, res_L))
    # (H-Phi1) on a e_t generators, a over the ideal spanning set
    gens = ctx.frame.ideal_spanning()
    for a in gens:
        s1a = ctx.frame.sigma1(a)
        s1a_bar = ctx.trunc(s1a)
        ds1a = ctx.partial(s1a)
        sa_bar = ctx.trunc(ctx.frame.sigma(a))
        da = ctx.partial(a)
        sig_da = [env1.sigma(c) for c in da]
        for j in range(k):
            for tcol in range(w.d, w.rank):
                # LHS: d_j(sigma1(a)) Fbar_col + sigma1(a) [d_j F + N_j Fbar]_col
                base = _vec_add(
                    env1,
                    _vec_scale(env1, ds1a[j], mat_col(Fbar, tcol)),
                    _vec_scale(
                        env1,
                        s1a_bar,
                        mat_col(
                            _mat_add(
                                env1,
                                ctx.partial_matrix(F, j),
                                mat_mul(env1, conn.matrices[j], Fbar),
                            ),
                            tcol,
                        ),
                    ),
                )
                # RHS: sigma(a) [sum_i Fbar sig(N_i) theta_ji]_col
                #      + sum_i Fbar_col(tcol via e_t) sigma(da_i) theta_ji
                rhs = _vec_scale(
                    env1, sa_bar, mat_col(_theta_combo(env1, FsigN, theta, j, scale_p=1), tcol)
                )
                extra = [env1.zero] * w.rank
                for i in range(k):
                    coeff = env1.mul(sig_da[i], theta[j][i])
                    col = mat_col(Fbar, tcol)
                    extra = _vec_add(env1, extra, _vec_scale(env1, coeff, col))
                rhs = _vec_add(env1, rhs, extra)
                residuals.append(
                    ("phi1-IT", (j, tcol, a), mat([_vec_sub(env1, base, rhs)]))
                )
    return residuals


def _theta_combo(env1, FsigN, theta, j, scale_p):
    r = len(FsigN[0]) if FsigN else 0
    acc = mat([[env1.zero] * r for _ in range(r)])
    for i, M in enumerate(FsigN):
        th = theta[j][i]
        if th == env1.zero:
            continue
        scaled = mat([[env1.mul(th, x) for x in row] for row in M])
        acc = _mat_add(env1, acc, scaled)
    if scale_p != 1:
        acc = mat([[env1.int_mul(scale_p, x) for x in row] for row in acc])
    return acc


def _mat_add(C, X, Y):
    return mat([[C.add(a, b) for a, b in zip(rx, ry)] for rx, ry in zip(X, Y)])


def _mat_sub(C, X, Y):
    return mat([[C.sub(a, b) if hasattr(C, "sub") else C.add(a, C.neg(b)) for a, b in zip(rx, ry)] for rx, ry in zip(X, Y)])


def _vec_add(C, u, v):
    return [C.add(a, b) for a, b in zip(u, v)]


def _vec_sub(C, u, v):
    return [C.sub(a, b) for a, b in zip(u, v)]


def _vec_scale(C, c, u):
    return [C.mul(c, a) for a in u]


@dataclass
class HorizontalityReport:
    passed: bool
    witnesses: list = field(default_factory=list)


def horizontality_check(ctx: NablaContext, w: Window, conn: Connection) -> HorizontalityReport:
    """Both diagrams, evaluated exactly; failures carry witnesses."""
    out = HorizontalityReport(True)
    for tag, where, res in _horizontality_residuals(ctx, w, conn):
        if any(x != ctx.env1.zero for row in res for x in row):
            out.passed = False
            out.witnesses.append((tag, where))
    return out


def solve_connection(ctx: NablaContext, w: Window):
    """The affine lattice of horizontal connections, by exact linear algebra.

    Returns (particular, homogeneous_generators) or None when empty.  The
    unknowns are the env1 coordinates of the N_i entries; every residual of
    `_horizontality_residuals` is linear in them with constant part given by
    the zero connection.
    """
    env1 = ctx.env1
    k = ctx.diff.k
    r = w.rank
    nc = env1.coord_count()
    nvars = k * r * r * nc
    mod = env1.mod
    rel_rows = [list(rw) for rw in env1.relations.basis()]

    def var(i, a, b, c):
        return ((i * r + a) * r + b) * nc + c

    zero_res = _flatten_residuals(ctx, _horizontality_residuals(ctx, w, zero_connection(ctx, w)))
    basis_res = []
    for i in range(k):
        for a in range(r):
            for b in range(r):
                for c in range(nc):
                    Nc = [
                        [[env1.zero] * r for _ in range(r)] for _ in range(k)
                    ]
                    Nc[i][a][b] = env1._unit_vec(c)
                    conn = Connection(w, tuple(mat(M) for M in Nc))
                    res = _flatten_residuals(ctx, _horizontality_residuals(ctx, w, conn))
                    basis_res.append([(x - z) % mod for x, z in zip(res, zero_res)])
    n_eq = len(zero_res)
    n_blocks = n_eq // nc
    n_slack = len(rel_rows) * n_blocks
    rows = []
    rhs = []
    for e in range(n_eq):
        row = [basis_res[v][e] for v in range(nvars)]
        row += [0] * n_slack
        blk = e // nc
        for s_idx, rel in enumerate(rel_rows):
            row[nvars + blk * len(rel_rows) + s_idx] = rel[e % nc] % mod
        rows.append(row)
        rhs.append((-zero_res[e]) % mod)
    part = lin_solve(rows, rhs, env1.p, env1.m)
    if part is None:
        return None
    hom_gens = kernel_basis(rows, env1.p, env1.m)

    def decode(vec):
        mats = []
        for i in range(k):
            rowsm = []
            for a in range(r):
                rowm = []
                for b in range(r):
                    base = var(i, a, b, 0)
                    rowm.append(env1.reduce(list(vec[base : base + nc])))
                rowsm.append(rowm)
            mats.append(mat(rowsm))
        return Connection(w, tuple(mats))

    particular = decode(part)
    gens = []
    seen = set()
    for g in hom_gens:
        conn = decode(g)
        keyed = tuple(conn.matrices)
        if any(x != env1.zero for M in conn.matrices for row in M for x in row) and keyed not in seen:
            seen.add(keyed)
            gens.append(conn)
    return particular, gens


def produced_connections(ctx: NablaContext, w: Window, solution, bound: int = 8):
    """The explicit finite list a solver result stands for: the particular
    solution plus its shifts by single homogeneous generators (budgeted)."""
    if solution is None:
        return []
    particular, gens = solution
    env1 = ctx.env1
    out = [particular]
    for g in gens[:bound]:
        shifted = tuple(
            _mat_add(env1, M, G) for M, G in zip(particular.matrices, g.matrices)
        )
        out.append(Connection(w, shifted))
    return out


@dataclass
class IntegrabilityReport:
    integrable: bool
    curvature_zero: bool
    nilpotence_indices: list
    note: str = ""


def integrability_and_qnilpotence(ctx: NablaContext, w: Window, conn: Connection, bound: int | None = None) -> IntegrabilityReport:
    """G = nabla(nabla) = 0 exactly, and each N_i nilpotent mod p.

    Curvature components K_{ij} = d_i N_j - d_j N_i + N_i N_j - N_j N_i are
    evaluated two degrees down (each d costs one cap digit).  Per the
    divided-power lemma these must hold for every horizontal connection, so
    a failure here is a defect, not a finding.
    """
    if ctx.env.cap < 4:
        raise PDError("curvature needs cap >= 4")
    env1 = ctx.env1
    env2 = PDAlgebra(
        PDPresentation(
            ctx.env.p, ctx.env.m, ctx.env.pres.variables, ctx.env.gens, ctx.env.cap - 2, ctx.env.pres.tau
        )
    )
    diff1 = PDDifferential(env1)

    def to2(x):
        return env1.truncate_to(env2, x)

    k = ctx.diff.k
    r = w.rank
    curv_zero = True
    for i in range(k):
        for j in range(i + 1, k):
            Ni, Nj = conn.matrices[i], conn.matrices[j]
            dNj_i = mat([[to2(diff1.d(x)[i]) for x in row] for row in Nj])
            dNi_j = mat([[to2(diff1.d(x)[j]) for x in row] for row in Ni])
            Ni2 = mat_map(to2, Ni)
            Nj2 = mat_map(to2, Nj)
            comm = _mat_sub(env2, mat_mul(env2, Ni2, Nj2), mat_mul(env2, Nj2, Ni2))
            K = _mat_add(env2, _mat_sub(env2, dNj_i, dNi_j), comm)
            if any(x != env2.zero for row in K for x in row):
                curv_zero = False
    indices = []
    nilpotent_all = True
    if bound is None:
        bound = r * len(env1.basis) + 2
    for Ni in conn.matrices:
        X = Ni
        idx = None
        for s in range(1, bound + 1):
            if all(all(c % env1.p == 0 for c in x) for row in X for x in row):
                idx = s
                break
            X = mat_mul(env1, Ni, X)
        if idx is None:
            nilpotent_all = False
            indices.append(None)
        else:
            indices.append(idx)
    return IntegrabilityReport(curv_zero and nilpotent_all, curv_zero, indices)


def _flatten_residuals(ctx: NablaContext, residuals):
    out = []
    for tag, where, res in residuals:
        for row in res:
            for x in row:
                out.extend(ctx.env1.coords(x))
    return out


# -- the square-zero frame D(1)_2 ---------------------------------------------------


class SquareZeroCarrier:
    """D + Omega with (a,w)(a',w') = (aa', a w' + a' w); K = Omega, K^2 = 0.

    Elements are pairs (env element, tuple of k env1 elements).  The carrier
    implements the full coordinate protocol, so the generic window and hom
    machinery runs over it unchanged.
    """

    def __init__(self, frame: PDFrame, diff: PDDifferential):
        self.base_frame = frame
        self.env = frame.env
        self.diff = diff
        self.env1 = diff.env1
        self.k = diff.k
        self.p = self.env.p
        self.m = self.env.m
        self.mod = self.env.mod
        self.n = self.env.n + self.k * self.env1.n

    @property
    def zero(self):
        return (self.env.zero, (self.env1.zero,) * self.k)

    @property
    def one(self):
        return (self.env.one, (self.env1.zero,) * self.k)

    def make(self, a, omega):
        return (a, tuple(omega))

    def add(self, x, y):
        return (
            self.env.add(x[0], y[0]),
            tuple(self.env1.add(a, b) for a, b in zip(x[1], y[1])),
        )

    def neg(self, x):
        return (self.env.neg(x[0]), tuple(self.env1.neg(a) for a in x[1]))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        a, w1 = x
        b, w2 = y
        abar = self.env.truncate_to(self.env1, a)
        bbar = self.env.truncate_to(self.env1, b)
        return (
            self.env.mul(a, b),
            tuple(
                self.env1.add(self.env1.mul(abar, v), self.env1.mul(bbar, u))
                for u, v in zip(w1, w2)
            ),
        )

    def embed_int(self, c):
        return (self.env.embed_int(c), (self.env1.zero,) * self.k)

    def int_mul(self, c, x):
        return (self.env.int_mul(c, x[0]), tuple(self.env1.int_mul(c, a) for a in x[1]))

    def equal(self, x, y):
        return x == y

    def is_unit(self, x):
        return self.env.is_unit(x[0])

    def inv(self, x):
        a, w = x
        ai = self.env.inv(a)
        ai1 = self.env.truncate_to(self.env1, ai)
        sq = self.env1.mul(ai1, ai1)
        return (ai, tuple(self.env1.neg(self.env1.mul(sq, u)) for u in w))

    # -- coordinates ------------------------------------------------------------

    def coords(self, x):
        out = list(self.env.coords(x[0]))
        for u in x[1]:
            out.extend(self.env1.coords(u))
        return tuple(out)

    def from_coords(self, cs):
        a = self.env.reduce(list(cs[: self.env.n]))
        omega = []
        for i in range(self.k):
            base = self.env.n + i * self.env1.n
            omega.append(self.env1.reduce(list(cs[base : base + self.env1.n])))
        return (a, tuple(omega))

    def coord_count(self):
        return self.n

    def coord_precision(self):
        return self.m

    def _unit_vec(self, i, c=1):
        v = [0] * self.n
        v[i] = c % self.mod
        return self.from_coords(v)

    def module_spanning(self):
        return [self._unit_vec(i) for i in range(self.n)]

    def mult_matrix(self, x):
        cols = [self.coords(self.mul(x, self._unit_vec(j))) for j in range(self.n)]
        return [[cols[j][i] for j in range(self.n)] for i in range(self.n)]

    def t_indices(self):
        out = list(self.env.t_indices())
        out += list(range(self.env.n, self.n))  # all Omega coordinates
        return out

    def mu_indices(self):
        return list(self.env.mu_indices())

    def sigma1_cert(self, i):
        """Certified sigma1 of a T-type coordinate basis element."""
        if i < self.env.n:
            return self.coords((self.env.sigma1_cert(i), (self.env1.zero,) * self.k))
        slot = (i - self.env.n) // self.env1.n
        cidx = (i - self.env.n) % self.env1.n
        omega = [self.env1.zero] * self.k
        omega[slot] = self.env1._unit_vec(cidx)
        img = self.diff.dsigma1(tuple(omega))
        return self.coords((self.env.zero, tuple(img)))

    @property
    def relations(self):
        return _SZRelations(self)


class _SZRelations:
    """Relation rows of the square-zero carrier coordinates."""

    def __init__(self, carrier: SquareZeroCarrier):
        self.carrier = carrier

    def basis(self):
        c = self.carrier
        rows = []
        for r in c.env.relations.basis():
            rows.append(tuple(list(r) + [0] * (c.k * c.env1.n)))
        for i in range(c.k):
            for r in c.env1.relations.basis():
                row = [0] * c.n
                base = c.env.n + i * c.env1.n
                for j, v in enumerate(r):
                    row[base + j] = v
                rows.append(tuple(row))
        return rows


class SquareZeroFrame(Frame):
    """The frame on D(1)_2 with sigma1 = (sigma1, (dsigma)1) on Ibar + K."""

    kind = "squarezero"

    def __init__(self, base: PDFrame, diff: PDDifferential | None = None):
        diff = diff or PDDifferential(base.env)
        carrier = SquareZeroCarrier(base, diff)
        super().__init__(carrier, base.p, base.depth)
        self.base_frame = base
        self.diff = diff
        self.residue_ring = base.residue_ring
        self.name = f"squarezero({base.name})"
        self.p_elt = carrier.embed_int(base.p)

    def residue(self, x):
        return self.base_frame.residue(x[0])

    def section(self, r):
        return (self.base_frame.section(r), (self.diff.env1.zero,) * self.A.k)

    def sigma(self, x):
        a, w = x
        return (self.base_frame.sigma(a), tuple(self.diff.dsigma(tuple(w))))

    @property
    def sigma1_codomain(self):
        return self.A

    def reduce_to_codomain(self, x):
        return x

    def ideal_contains(self, x):
        return self.base_frame.ideal_contains(x[0])

    def sigma1(self, x):
        a, w = x
        return (self.base_frame.sigma1(a), tuple(self.diff.dsigma1(tuple(w))))

    def ideal_spanning(self, budget: int = 4096):
        out = [
            (g, (self.diff.env1.zero,) * self.A.k)
            for g in self.base_frame.ideal_spanning(budget)
        ]
        for i in range(self.A.k):
            for j in range(self.diff.env1.n):
                omega = [self.diff.env1.zero] * self.A.k
                omega[i] = self.diff.env1._unit_vec(j)
                out.append((self.base_frame.env.zero, tuple(omega)))
        return out[:budget]

    def sample_elements(self, k: int, seed: int = 0):
        base = self.base_frame.sample_elements(k, seed)
        out = [(a, (self.diff.env1.zero,) * self.A.k) for a in base]
        for i, a in enumerate(base):
            omega = [self.diff.env1.zero] * self.A.k
            omega[i % self.A.k] = self.diff.env1.one
            out.append((a, tuple(omega)))
        return out[: max(k, 4)]

    def eq_mod_p(self, x, y):
        d = self.A.sub(x, y)
        return all(c % self.p == 0 for c in self.A.coords(d))


def square_zero_frame(base: PDFrame, diff: PDDifferential | None = None) -> SquareZeroFrame:
    fr = SquareZeroFrame(base, diff)
    # self-test: sigma1 on K is (dsigma)1 and p*sigma1 = sigma there
    env1 = fr.diff.env1
    for i in range(fr.A.k):
        for j in range(min(env1.n, 8)):
            omega = [env1.zero] * fr.A.k
            omega[i] = env1._unit_vec(j)
            x = (fr.base_frame.env.zero, tuple(omega))
            lhs = fr.sigma1(x)
            want = (fr.base_frame.env.zero, tuple(fr.diff.dsigma1(tuple(omega))))
            if lhs != want:
                raise PDError("sigma1 on K does not match (dsigma)1")
            if fr.A.int_mul(fr.p, lhs) != fr.sigma(x):
                raise PDError("p sigma1 != sigma on K")
    return fr


def pbar0(fr: SquareZeroFrame) -> FrameHom:
    """a -> (a, da): the first structural map, a frame homomorphism."""
    base = fr.base_frame
    diff = fr.diff

    def fn(a):
        return (a, tuple(diff.d(a)))

    hom = FrameHom(base, fr, fn=fn, name="pbar0")
    hom.section = lambda x: x[0]
    return hom


def pbar1(fr: SquareZeroFrame) -> FrameHom:
    """a -> (a, 0): the second structural map."""
    base = fr.base_frame
    z = (fr.diff.env1.zero,) * fr.A.k

    def fn(a):
        return (a, z)

    hom = FrameHom(base, fr, fn=fn, name="pbar1")
    hom.section = lambda x: x[0]
    return hom


def connection_to_stratification(ctx: NablaContext, w: Window, conn: Connection, sz: SquareZeroFrame | None = None):
    """eps(x) = x + nabla(x) as a window isomorphism pbar0^* w -> pbar1^* w.

    Raises when the input is not horizontal (the certificate fails).
    """
    sz = sz or square_zero_frame(ctx.frame, ctx.diff)
    h0, h1 = pbar0(sz), pbar1(sz)
    w0 = base_change(h0, w)
    w1 = base_change(h1, w)
    r = w.rank
    env1 = ctx.env1
    E = []
    for a in range(r):
        row = []
        for b in range(r):
            omega = tuple(conn.matrices[i][a][b] for i in range(ctx.diff.k))
            diag = ctx.env.one if a == b else ctx.env.zero
            row.append((diag, omega))
        E.append(row)
    E = mat(E)
    if not is_window_hom(w0, w1, E):
        raise WindowError("eps fails the window axioms: input connection not horizontal")
    if not is_invertible(sz.A, E):
        raise WindowError("eps is not invertible")
    return E, (w0, w1)


def stratification_to_connection(ctx: NablaContext, w: Window, E, sz: SquareZeroFrame | None = None) -> Connection:
    """Extract nabla from the K-component of a window isomorphism.

    Requires eps to reduce to the identity along K and to be a window
    isomorphism; the extracted connection is re-certified horizontal.
    """
    sz = sz or square_zero_frame(ctx.frame, ctx.diff)
    h0, h1 = pbar0(sz), pbar1(sz)
    w0 = base_change(h0, w)
    w1 = base_change(h1, w)
    r = w.rank
    for a in range(r):
        for b in range(r):
            want = ctx.env.one if a == b else ctx.env.zero
            if E[a][b][0] != want:
                raise WindowError("eps is not filtration-compatible with the diagonal")
    if not is_window_hom(w0, w1, E):
        raise WindowError("eps is not a window homomorphism")
    mats = []
    for i in range(ctx.diff.k):
        mats.append(mat([[E[a][b][1][i] for b in range(r)] for a in range(r)]))
    conn = Connection(w, tuple(mats))
    rep = horizontality_check(ctx, w, conn)
    if not rep.passed:
        raise WindowError("extracted connection fails horizontality")
    return conn
