"""Truncated divided-power envelopes with generators-and-relations normal forms.

A presentation is Z/p^m[x_1..x_k] -> R where the kernel is generated by p
together with monomials g_1..g_s, plus a declared Frobenius lift
sigma(x_i) = x_i^p + p*tau_i.  The envelope is spanned by divided monomials
mu * prod_j g_j^[n_j] (mu a residual monomial, sum n_j < cap), modulo the
relation span obtained by instantiating the divided-power axiom families:
two spanning monomials with the same plain-monomial shadow are identified up
to their exact factorial weights.  The relation span is kept in triangular
canonical form, so normal forms are unique and every quotient computation is
exact linear algebra over Z/p^m.

Divided powers of p itself are scalars gamma_n(p) = p^n/n!, never basis
symbols.  The divided Frobenius follows sigma1(a) = (p-1)! a^[p] + tau(a)
and sigma1(a^[n]) = (p^{n-1}/n!) sigma1(a)^n on generators; its consistency
on the relation span is certified at construction (one digit of slack is
tolerated and recorded, since division by p is not well defined mod p^m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct

from .intpoly import IntPolyRing
from .linalg import SpanNF, diagonalize, p_torsion_of_quotient
from .residues import Residues, gamma_of_p
from .frames import Frame


class PDError(ValueError):
    pass


@dataclass(frozen=True)
class PDPresentation:
    """Base data for an envelope: variables, monomial generators, sigma."""

    p: int
    m: int
    variables: tuple[str, ...]
    generators: tuple[tuple[int, ...], ...]  # exponent vectors; p is implicit
    cap: int
    tau: tuple = ()  # per-variable integer polynomials, aligned with variables

    def __post_init__(self):
        if self.cap < 2:
            raise PDError("cap too small: r >= 2 required")
        for g in self.generators:
            if len(g) != len(self.variables) or not any(g):
                raise PDError("non-monomial or trivial generator")


class PDAlgebra:
    """The truncated envelope D as a finite free-presentation Z/p^m-module.

    Elements are coordinate tuples over the divided-monomial basis, always
    in relation-span normal form.  The class doubles as the frame carrier:
    it exposes ring operations plus the coordinate hooks used by the linear
    solvers (coords / module_spanning / mult_matrix / sigma matrices).
    """

    RESIDUAL_BOUND = 4096

    def __init__(self, pres: PDPresentation):
        self.pres = pres
        self.p = pres.p
        self.m = pres.m
        self.ring = Residues(pres.p, pres.m)
        self.mod = self.ring.modulus
        self.nvars = len(pres.variables)
        self.poly = IntPolyRing(pres.variables)
        self._tau = list(pres.tau) if pres.tau else [self.poly.zero for _ in pres.variables]
        if len(self._tau) != self.nvars:
            raise PDError("tau must align with the variables")
        self.residuals = self._residual_monomials()
        self._residual_set = set(self.residuals)
        self.gens = pres.generators
        self.s = len(self.gens)
        self.cap = pres.cap
        nvecs = [v for v in _compositions_below(self.s, self.cap)]
        nvecs.sort()
        self.basis = [(mu, nv) for mu in self.residuals for nv in nvecs]
        self.basis.sort()
        self.index = {b: i for i, b in enumerate(self.basis)}
        self.n = len(self.basis)
        self._mult_cache: dict = {}
        self.relations = self._build_relations()
        self._sigma_cols = None
        self._sigma1_cert = None
        self.sigma1_precision = self.m  # lowered by the well-definedness check

    # -- construction ---------------------------------------------------------

    def _residual_monomials(self):
        """Monomials not divisible by any generator; must be finite."""
        out = []
        frontier = [(0,) * self.nvars]
        seen = set(frontier)
        while frontier:
            e = frontier.pop()
            if any(all(a >= b for a, b in zip(e, g)) for g in self.pres.generators):
                continue
            out.append(e)
            if len(out) > self.RESIDUAL_BOUND:
                raise PDError("generators do not give a finite residual basis")
            for i in range(self.nvars):
                e2 = e[:i] + (e[i] + 1,) + e[i + 1 :]
                if e2 not in seen:
                    seen.add(e2)
                    frontier.append(e2)
        out.sort()
        return out

    def _shadow(self, b):
        mu, nv = b
        return tuple(
            mu[i] + sum(n * g[i] for n, g in zip(nv, self.gens)) for i in range(self.nvars)
        )

    def _stratum_members(self, shadow):
        """All decompositions shadow = mu * prod g_j^{n_j} with mu residual.

        Members beyond the divided-degree cap are phantoms: they are zero in
        the truncation but still source relations for the surviving ones.
        """
        out = []

        def rec(j, rest, nv):
            if j == self.s:
                if rest in self._residual_set:
                    out.append((rest, tuple(nv)))
                return
            g = self.gens[j]
            max_n = min(
                (rest[i] // g[i]) for i in range(self.nvars) if g[i]
            )
            for n in range(max_n + 1):
                rec(
                    j + 1,
                    tuple(rest[i] - n * g[i] for i in range(self.nvars)),
                    nv + [n],
                )

        rec(0, shadow, [])
        return out

    def _ancestor_coeff(self, nv, n0) -> int:
        """prod (nv_j)!/(n0_j)!: the absorption-path coefficient, an integer."""
        c = 1
        for a, b in zip(nv, n0):
            c *= math.factorial(a) // math.factorial(b)
        return c

    def _build_relations(self) -> SpanNF:
        """The derivable identifications of the divided-monomial spanning set.

        Seeds: (a) rewrite rows -- two stratum members related through their
        latest common ancestor (the componentwise min of divided exponents;
        earlier ancestors only scale the same row); (b) scalar-family rows
        (c a)^[n] = c^n a^[n] instantiated at the pairwise lcm of generator
        monomials.  A phantom partner (divided degree at or above the cap)
        contributes a single-term row.  The seed span is then closed under
        multiplication by basis elements, which makes the quotient a ring.

        Shadow coincidence alone is NOT an identification: a difference of
        equal-shadow monomials that no derivation connects at full weight is
        genuine p-torsion of the envelope (Berthelot-type).
        """
        nf = SpanNF(self.n, self.p, self.m)
        rows = set()
        # (a) rewrite/ancestor rows per stratum
        shadows: dict = {}
        for b in self.basis:
            shadows.setdefault(self._shadow(b), None)
        for shadow in shadows:
            members = self._stratum_members(shadow)
            if len(members) < 2:
                continue
            for a in range(len(members)):
                mu_a, nv_a = members[a]
                if sum(nv_a) >= self.cap:
                    continue
                ia = self.index[(mu_a, nv_a)]
                for b in range(len(members)):
                    if b == a:
                        continue
                    mu_b, nv_b = members[b]
                    b_live = sum(nv_b) < self.cap
                    if b_live and b < a:
                        continue
                    n0 = tuple(min(x, y) for x, y in zip(nv_a, nv_b))
                    vec = [0] * self.n
                    vec[ia] = self._ancestor_coeff(nv_a, n0) % self.mod
                    if b_live:
                        ib = self.index[(mu_b, nv_b)]
                        vec[ib] = (vec[ib] - self._ancestor_coeff(nv_b, n0)) % self.mod
                    if any(vec):
                        rows.add(tuple(vec))
        # (b) scalar-family rows at generator-pair lcms
        for i in range(self.s):
            for j in range(i + 1, self.s):
                gi, gj = self.gens[i], self.gens[j]
                lcm = tuple(max(a, b) for a, b in zip(gi, gj))
                ci = tuple(l - a for l, a in zip(lcm, gi))
                cj = tuple(l - a for l, a in zip(lcm, gj))
                for n in range(1, self.cap):
                    vec = [0] * self.n
                    nonzero = False
                    for (cc, jj, sign) in ((ci, i, 1), (cj, j, -1)):
                        exps = tuple(n * e for e in cc)
                        nv0 = [0] * self.s
                        nv0[jj] = n
                        coeff, mu, nv = self._absorb(1, exps, nv0)
                        if coeff is None:
                            continue
                        idx = self.index[(mu, tuple(nv))]
                        vec[idx] = (vec[idx] + sign * coeff) % self.mod
                        nonzero = True
                    if nonzero and any(vec):
                        rows.add(tuple(vec))
        for vec in sorted(rows):
            nf.insert(list(vec))
        self._close_under_multiplication(nf)
        return nf

    def _close_under_multiplication(self, nf: SpanNF) -> None:
        """Grow the row span until it is an ideal (stable under basis products)."""
        for _ in range(64):
            changed = False
            for row in list(nf.basis()):
                support = [(i, c) for i, c in enumerate(row) if c]
                for j in range(self.n):
                    prod = [0] * self.n
                    for i, c in support:
                        hit = self._basis_product_raw(i, j)
                        if hit is not None:
                            coeff, idx = hit
                            prod[idx] = (prod[idx] + c * coeff) % self.mod
                    if any(prod) and not nf.contains(prod):
                        nf.insert(prod)
                        changed = True
            if not changed:
                return
        raise PDError("relation closure failed to stabilize")

    # -- canonical elements ----------------------------------------------------

    @property
    def zero(self):
        return (0,) * self.n

    @property
    def one(self):
        return self._unit_vec(self.index[(self._zero_exp(), (0,) * self.s)])

    def _zero_exp(self):
        return (0,) * self.nvars

    def _unit_vec(self, i, c=1):
        v = [0] * self.n
        v[i] = c % self.mod
        return self.reduce(v)

    def reduce(self, coords):
        return self.relations.reduce([c % self.mod for c in coords])

    def add(self, a, b):
        return self.reduce([x + y for x, y in zip(a, b)])

    def sub(self, a, b):
        return self.reduce([x - y for x, y in zip(a, b)])

    def neg(self, a):
        return self.reduce([-x for x in a])

    def smul(self, c: int, a):
        return self.reduce([c * x for x in a])

    def int_mul(self, k: int, a):
        return self.smul(k % self.mod, a)

    def embed_int(self, c: int):
        return self._unit_vec(self.index[(self._zero_exp(), (0,) * self.s)], c)

    def equal(self, a, b) -> bool:
        return a == b

    def _basis_product_raw(self, i: int, j: int):
        """Product of basis elements i and j as (coefficient, basis index).

        Structurally a product of divided monomials is a single divided
        monomial again; returns None when it crosses the cap.  No relation
        reduction happens here, so this is usable while the relation span is
        still being built.
        """
        key = (i, j) if i <= j else (j, i)
        if key in self._mult_cache:
            return self._mult_cache[key]
        (mu1, n1) = self.basis[key[0]]
        (mu2, n2) = self.basis[key[1]]
        out = None
        nv = [a + b for a, b in zip(n1, n2)]
        if sum(nv) < self.cap:
            coeff = 1
            for a, b in zip(n1, n2):
                coeff *= math.comb(a + b, a)
            exps = [x + y for x, y in zip(mu1, mu2)]
            coeff, mu, nv = self._absorb(coeff, exps, nv)
            if coeff is not None and coeff % self.mod:
                out = (coeff % self.mod, self.index[(mu, tuple(nv))])
        self._mult_cache[key] = out
        return out

    def _absorb(self, coeff: int, exps, nv):
        """Rewrite a plain monomial times divided part into basis form.

        Dividing out a generator g_j raises n_j by one and multiplies by
        (n_j + 1), since T_{g,n} * g = (n+1) T_{g,n+1}.  Returns (None,..)
        when the divided degree crosses the cap.
        """
        exps = list(exps)
        nv = list(nv)
        changed = True
        while changed:
            changed = False
            for j, g in enumerate(self.gens):
                if all(a >= b for a, b in zip(exps, g)):
                    for i in range(self.nvars):
                        exps[i] -= g[i]
                    nv[j] += 1
                    coeff *= nv[j]
                    if sum(nv) >= self.cap:
                        return None, None, None
                    changed = True
                    break
        mu = tuple(exps)
        if mu not in self._residual_set:
            raise AssertionError("absorption failed to reach a residual monomial")
        return coeff % self.mod, mu, nv

    def mul(self, a, b):
        out = [0] * self.n
        nz_a = [(i, c) for i, c in enumerate(a) if c]
        nz_b = [(j, c) for j, c in enumerate(b) if c]
        for i, ca in nz_a:
            for j, cb in nz_b:
                hit = self._basis_product_raw(i, j)
                if hit is not None:
                    coeff, idx = hit
                    out[idx] += ca * cb * coeff
        return self.reduce(out)

    def pow(self, a, e: int):
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inject_poly(self, f) -> tuple:
        """Image of an integer polynomial in the variables, in normal form."""
        out = [0] * self.n
        for mono, c in f.items():
            coeff, mu, nv = self._absorb(c % self.mod, mono, [0] * self.s)
            if coeff is None:
                continue
            out[self.index[(mu, tuple(nv))]] += coeff
        return self.reduce(out)

    def truncate_to(self, smaller: "PDAlgebra", x):
        """The quotient map onto the same presentation at a lower cap."""
        out = [0] * smaller.n
        for i, c in enumerate(x):
            if c:
                b = self.basis[i]
                if b in smaller.index:
                    out[smaller.index[b]] += c
        return smaller.reduce(out)

    def divided_generator(self, j: int, n: int = 1):
        """g_j^[n] as an element."""
        if n >= self.cap:
            return self.zero
        nv = [0] * self.s
        nv[j] = n
        return self._unit_vec(self.index[(self._zero_exp(), tuple(nv))])

    def gamma_p(self, n: int) -> int:
        """p^[n] = gamma_n(p), a scalar."""
        return gamma_of_p(n, self.ring) if n >= 1 else 1

    def variable(self, name: str):
        return self.inject_poly(self.poly.gen(name))

    # -- local-ring structure --------------------------------------------------

    def is_unit(self, a) -> bool:
        c = a[self.index[(self._zero_exp(), (0,) * self.s)]]
        return c % self.p != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError("not a unit")
        c = a[self.index[(self._zero_exp(), (0,) * self.s)]]
        y = self.embed_int(pow(c, -1, self.mod))
        two = self.embed_int(2)
        for _ in range(64):
            ay = self.mul(a, y)
            if ay == self.one:
                return y
            y = self.mul(y, self.sub(two, ay))
        raise AssertionError("inversion failed to converge")

    # -- coordinate hooks for solvers -------------------------------------------

    def coords(self, a):
        return a

    def from_coords(self, cs):
        return self.reduce(cs)

    def coord_count(self) -> int:
        return self.n

    def coord_precision(self) -> int:
        return self.m

    def module_spanning(self):
        return [self._unit_vec(i) for i in range(self.n)]

    def mult_matrix(self, a):
        """Columns: a * basis_j, as plain coordinate columns."""
        cols = [self.mul(a, self._unit_vec(j)) for j in range(self.n)]
        return [[cols[j][i] for j in range(self.n)] for i in range(self.n)]

    def elements(self):
        for combo in iproduct(range(self.mod), repeat=self.n):
            x = self.reduce(list(combo))
            if x == tuple(combo):
                yield x

    def size(self) -> int:
        # normal forms are coset representatives; count via pivot exponents
        pivots = self.relations.pivots()
        total = 1
        for i in range(self.n):
            total *= self.p ** pivots.get(i, self.m)
        return total

    # -- sigma and sigma1 --------------------------------------------------------

    def tau_poly(self, f):
        """tau(f) = (sigma(f) - f^p)/p for an integer polynomial, exactly."""
        R = self.poly
        sf = self.sigma_poly(f)
        return R.divexact(R.sub(sf, R.pow(f, self.p)), self.p)

    def sigma_poly(self, f):
        """sigma of an integer polynomial: substitute x_i -> x_i^p + p tau_i."""
        R = self.poly
        images = [
            R.add(R.pow(R.gen(v), self.p), R.scale(self.p, self._tau[i]))
            for i, v in enumerate(self.pres.variables)
        ]
        return R.evaluate_in(f, R, images)

    def sigma_basis(self, i: int):
        """sigma of a basis element, via sigma(mu) * prod sigma(T_{g,n})."""
        if self._sigma_cols is None:
            self._sigma_cols = {}
        if i in self._sigma_cols:
            return self._sigma_cols[i]
        mu, nv = self.basis[i]
        acc = self.inject_poly(self.sigma_poly({mu: 1}))
        for j, njj in enumerate(nv):
            if njj:
                acc = self.mul(acc, self._sigma_T(j, njj))
        self._sigma_cols[i] = acc
        return acc

    def _sigma_T(self, j: int, n: int):
        """sigma(g_j^[n]) = sum_i (g^p)^[i] * (p tau(g))^[n-i]."""
        g_poly = {self.gens[j]: 1}
        tau_g = self.tau_poly(g_poly)
        acc = self.zero
        tau_pow = self.one  # inject(tau(g))^k accumulated
        for k in range(0, n + 1):
            i = n - k
            # (g^p)^[i] = ((pi)!/i!) T_{g, pi}
            if self.p * i >= self.cap:
                coeff_T = None
            else:
                coeff_T = _exact_factorial_ratio(self.p * i, i, self.ring)
                term = self.divided_generator(j, self.p * i) if i > 0 else self.one
            # (p tau)^[k] = gamma_k(p) tau^k
            if coeff_T is not None:
                gk = self.gamma_p(k) if k >= 1 else 1
                piece = self.smul(coeff_T * gk % self.mod, self.mul(term, tau_pow))
                acc = self.add(acc, piece)
            tau_pow = self.mul(tau_pow, self.inject_poly(tau_g))
        return acc

    def sigma(self, a):
        out = self.zero
        for i, c in enumerate(a):
            if c:
                out = self.add(out, self.smul(c, self.sigma_basis(i)))
        return out

    def sigma1_generator(self, j: int):
        """sigma1(g_j) = (p-1)! g_j^[p] + tau(g_j)."""
        fac = math.factorial(self.p - 1) % self.mod
        out = self.smul(fac, self.divided_generator(j, self.p))
        return self.add(out, self.inject_poly(self.tau_poly({self.gens[j]: 1})))

    def sigma1_T(self, j: int, n: int):
        """sigma1(g_j^[n]) = (p^{n-1}/n!) sigma1(g_j)^n."""
        v, u = self.ring.factorial_parts(n)
        e = n - 1 - v
        if e < 0:
            raise AssertionError("p^{n-1}/n! failed integrality")
        c = pow(self.p, e, self.mod) * pow(u, -1, self.mod) % self.mod if e < self.m else 0
        return self.smul(c, self.pow(self.sigma1_generator(j), n))

    def sigma1_cert(self, i: int):
        """Certified sigma1 of a T-containing basis element.

        sigma1(mu * prod_j T_{g_j, n_j}) = p^{rho-1} sigma(mu) prod sigma1(T),
        rho the number of distinct generators present.
        """
        if self._sigma1_cert is None:
            self._sigma1_cert = {}
        if i in self._sigma1_cert:
            return self._sigma1_cert[i]
        mu, nv = self.basis[i]
        rho = sum(1 for n in nv if n)
        if rho == 0:
            raise PDError("sigma1 certificate only exists for T-containing monomials")
        acc = self.inject_poly(self.sigma_poly({mu: 1}))
        for j, n in enumerate(nv):
            if n:
                acc = self.mul(acc, self.sigma1_T(j, n))
        acc = self.smul(pow(self.p, rho - 1, self.mod), acc)
        self._sigma1_cert[i] = acc
        return acc

    def mu_indices(self):
        """Indices of the purely residual basis monomials (no T part)."""
        return [i for i, (mu, nv) in enumerate(self.basis) if not any(nv)]

    def t_indices(self):
        return [i for i, (mu, nv) in enumerate(self.basis) if any(nv)]

    def ideal_contains(self, a) -> bool:
        return all(a[i] % self.p == 0 for i in self.mu_indices())

    def sigma1(self, a):
        """Canonical total sigma1 on the augmentation ideal.

        T-coordinates use the certified generator formulas (exact); a
        residual coordinate c*mu with c = p*h contributes h*sigma(mu) via
        the minimal witness h = c // p.
        """
        if not self.ideal_contains(a):
            raise PDError("sigma1 is only defined on the ideal")
        out = self.zero
        for i, c in enumerate(a):
            if not c:
                continue
            mu, nv = self.basis[i]
            if any(nv):
                out = self.add(out, self.smul(c, self.sigma1_cert(i)))
            else:
                out = self.add(out, self.smul(c // self.p, self.sigma_basis(i)))
        return out

    def verify_sigma1_well_defined(self):
        """sigma1 must annihilate the relation span, up to one digit.

        Returns the certified precision (m if exact, m-1 if one digit was
        needed) and raises when even that fails, reporting the offending
        relation.
        """
        achieved = self.m
        for row in self.relations.basis():
            img = self.zero
            for i, c in enumerate(row):
                if c:
                    if not any(self.basis[i][1]):
                        raise PDError("relation span touches residual coordinates")
                    img = self.add(img, self.smul(c, self.sigma1_cert(i)))
            if any(img):
                if all(c % (self.p ** (self.m - 1)) == 0 for c in img):
                    achieved = min(achieved, self.m - 1)
                else:
                    raise PDError(f"sigma1 well-definedness fails on relation {row}")
        self.sigma1_precision = achieved
        return achieved


def _compositions_below(parts: int, cap: int):
    """All tuples of `parts` nonnegative ints with sum < cap."""
    if parts == 0:
        yield ()
        return
    def rec(prefix, remaining, budget):
        if remaining == 1:
            for v in range(budget):
                yield prefix + (v,)
            return
        for v in range(budget):
            yield from rec(prefix + (v,), remaining - 1, budget - v)
    yield from rec((), parts, cap)


def _exact_factorial_ratio(a: int, b: int, ring: Residues) -> int:
    """(a!)/(b!) mod p^m via valuation/unit parts (a >= b)."""
    va, ua = ring.factorial_parts(a)
    vb, ub = ring.factorial_parts(b)
    v = va - vb
    if v < 0:
        raise AssertionError("factorial ratio not integral")
    if v >= ring.m:
        return 0
    return pow(ring.p, v, ring.modulus) * ua * pow(ub, -1, ring.modulus) % ring.modulus


def build_pd_envelope(pres: PDPresentation) -> PDAlgebra:
    """Construct the envelope and certify unique normal forms.

    Uniqueness is re-checked by reducing a sample of products two ways.
    """
    env = PDAlgebra(pres)
    # idempotence sanity on the basis itself
    for i in range(min(env.n, 64)):
        v = env._unit_vec(i)
        if env.reduce(list(v)) != v:
            raise PDError("normal form is not idempotent")
    return env


# -- residue ring -------------------------------------------------------------


class PDResidue:
    """R = A/(p, generators): the F_p-span of the residual monomials."""

    def __init__(self, env: PDAlgebra):
        self.env = env
        self.p = env.p
        self.monos = list(env.residuals)
        self.index = {mu: i for i, mu in enumerate(self.monos)}

    @property
    def zero(self):
        return (0,) * len(self.monos)

    @property
    def one(self):
        return self._unit(self.index[(0,) * self.env.nvars])

    def _unit(self, i, c=1):
        v = [0] * len(self.monos)
        v[i] = c % self.p
        return tuple(v)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        out = [0] * len(self.monos)
        for i, ca in enumerate(a):
            if not ca:
                continue
            for j, cb in enumerate(b):
                if not cb:
                    continue
                exps = tuple(x + y for x, y in zip(self.monos[i], self.monos[j]))
                if exps in self.index:
                    out[self.index[exps]] = (out[self.index[exps]] + ca * cb) % self.p
        return tuple(out)

    def embed_int(self, c):
        return self._unit(self.index[(0,) * self.env.nvars], c)

    def int_mul(self, k, a):
        return tuple((k * x) % self.p for x in a)

    def equal(self, a, b):
        return a == b

    def is_unit(self, a):
        return a[self.index[(0,) * self.env.nvars]] % self.p != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError("not a unit")
        c = a[self.index[(0,) * self.env.nvars]]
        y = self._unit(self.index[(0,) * self.env.nvars], pow(c, -1, self.p))
        two = self.embed_int(2)
        for _ in range(2 * len(self.monos) + 4):
            ay = self.mul(a, y)
            if ay == self.one:
                return y
            y = self.mul(y, self.add(two, self.neg(ay)))
        raise AssertionError("residue inversion failed to converge")

    def elements(self):
        for combo in iproduct(range(self.p), repeat=len(self.monos)):
            yield tuple(combo)

    def size(self):
        return self.p ** len(self.monos)


# -- the PD frame --------------------------------------------------------------


class PDFrame(Frame):
    """(D, Ibar, R, sigma, sigma1) on a truncated envelope; sigma1 stays in D."""

    kind = "pd"

    def __init__(self, env: PDAlgebra):
        super().__init__(env, env.p, env.m)
        self.env = env
        self.residue_ring = PDResidue(env)
        self.name = f"pdframe(p={env.p},m={env.m},cap={env.cap})"
        self.p_elt = env.embed_int(env.p)
        self.sigma1_certified_precision = env.verify_sigma1_well_defined()
        self.safe_subbasis = [
            i
            for i in env.t_indices()
            if all(env.p * n < env.cap for n in env.basis[i][1])
        ]

    def residue(self, x):
        R = self.residue_ring
        out = [0] * len(R.monos)
        for i, c in enumerate(x):
            mu, nv = self.env.basis[i]
            if not any(nv):
                out[R.index[mu]] = c % self.p
        return tuple(out)

    def section(self, r):
        out = [0] * self.env.n
        for i, c in enumerate(r):
            mu = self.residue_ring.monos[i]
            out[self.env.index[(mu, (0,) * self.env.s)]] = c
        return self.env.reduce(out)

    def sigma(self, x):
        return self.env.sigma(x)

    @property
    def sigma1_codomain(self):
        return self.env

    def reduce_to_codomain(self, x):
        return x

    def ideal_contains(self, x) -> bool:
        return self.env.ideal_contains(x)

    def sigma1(self, i):
        if any(i[k] for k in self.env.mu_indices()):
            # the residual part goes through the minimal p-witness
            self.ledger.after_div_p(self.env.m, "sigma1-mu-canonical")
        return self.env.sigma1(i)

    def sigma1_witnessed(self, a):
        return self.sigma(a)

    def ideal_spanning(self, budget: int = 4096):
        env = self.env
        out = [env.smul(self.p, env._unit_vec(i)) for i in env.mu_indices()]
        out += [env._unit_vec(i) for i in env.t_indices()]
        return [x for x in out if x != env.zero][:budget]

    def sample_elements(self, k: int, seed: int = 0):
        import random as _random

        rng = _random.Random(seed)
        env = self.env
        out = [env.zero, env.one, self.p_elt]
        for _ in range(k):
            coords = [rng.randrange(env.mod) if rng.random() < 0.4 else 0 for _ in range(env.n)]
            out.append(env.reduce(coords))
        return out[: max(k, 3)]

    def eq_mod_p(self, x, y) -> bool:
        d = self.env.sub(x, y)
        return all(c % self.p == 0 for c in d)


def pd_frame(env: PDAlgebra) -> PDFrame:
    """Frame structure on the envelope; fails loudly if sigma1 is inconsistent."""
    return PDFrame(env)


# -- torsion probe --------------------------------------------------------------


@dataclass
class TorsionReport:
    level: tuple  # (cap, m)
    torsion_generators: list
    free_rank: int
    factor_orders: list
    note: str = "truncation-level evidence, not a statement about the p-adic limit"


def pd_torsion_probe(env: PDAlgebra) -> TorsionReport:
    """Certified p-torsion of the truncated module, with independent re-check.

    Reports generators of ker(p) modulo p^{m-1}*D: the p^{m-1} multiples are
    the unavoidable truncation artifact of working mod p^m (a free module
    has exactly those), so only torsion beyond them is evidence.  Every
    reported t satisfies p*t = 0 and t != 0 in normal form; the verification
    re-reduces p*t against a freshly rebuilt relation span.
    """
    rel_rows = [list(r) for r in env.relations.basis()]
    tors, _ = p_torsion_of_quotient(rel_rows, env.n, env.p, env.m)
    fresh = env._build_relations()
    artifact = env.p ** (env.m - 1)
    certified = []
    for t in tors:
        t_norm = env.reduce(list(t))
        if t_norm == env.zero:
            continue
        if all(c % artifact == 0 for c in t_norm):
            continue  # explained by the p^{m-1} truncation kernel
        pt = [env.p * c for c in t_norm]
        if not fresh.contains(pt):
            raise AssertionError("torsion candidate failed independent re-reduction")
        certified.append(t_norm)
    if rel_rows:
        _, _, _, evals = diagonalize(rel_rows, env.p, env.m)
    else:
        evals = []
    free = env.n - sum(1 for e in evals if e < env.m)
    orders = [env.p ** e for e in evals if 0 < e < env.m]
    return TorsionReport((env.cap, env.m), certified, free, orders)


# -- differentials ---------------------------------------------------------------


class PDDifferential:
    """Omega = free module on dx_i over the cap-1 companion envelope.

    The divided-degree cap ideal is not differential (d lowers the degree),
    so Omega coefficients live one cap lower: d: D_r -> Omega(D_{r-1}).  In
    that codomain d is exactly Leibniz and exactly kills the relations.
    Elements are tuples of companion-envelope elements of length k.
    d(a^[n]) = a^[n-1] da on divided powers; (dsigma)1(dx_i) is
    x_i^{p-1} dx_i + sum_j (d tau_i/d x_j) dx_j, extended sigma-semilinearly.
    """

    def __init__(self, env: PDAlgebra):
        if env.cap < 3:
            raise PDError("differentials need cap >= 3")
        self.env = env
        self.env1 = PDAlgebra(
            PDPresentation(env.p, env.m, env.pres.variables, env.gens, env.cap - 1, env.pres.tau)
        )
        self.k = env.nvars
        self._d_basis = [self._d_of_basis(i) for i in range(env.n)]
        self.theta = self._build_theta()

    @property
    def zero(self):
        return (self.env1.zero,) * self.k

    def add(self, w1, w2):
        return tuple(self.env1.add(a, b) for a, b in zip(w1, w2))

    def neg(self, w):
        return tuple(self.env1.neg(a) for a in w)

    def smul(self, a, w):
        """Module action of D on Omega, through the truncation D -> D_{r-1}."""
        a1 = self.env.truncate_to(self.env1, a)
        return tuple(self.env1.mul(a1, x) for x in w)

    def int_mul(self, c: int, w):
        return tuple(self.env1.int_mul(c, x) for x in w)

    def equal(self, w1, w2):
        return w1 == w2

    def eq_mod_p(self, w1, w2):
        return all(
            all(c % self.env.p == 0 for c in self.env1.sub(a, b)) for a, b in zip(w1, w2)
        )

    def _d_of_basis(self, i: int):
        """d(mu * prod T_{g_j,n_j}) by Leibniz and d(g^[n]) = g^[n-1] dg."""
        env1 = self.env1
        mu, nv = self.env.basis[i]
        total = [env1.zero] * self.k
        # d(mu) * rest
        if (self.env._zero_exp(), nv) in env1.index:
            rest = env1._unit_vec(env1.index[(self.env._zero_exp(), nv)])
            for v in range(self.k):
                if mu[v]:
                    lowered = list(mu)
                    lowered[v] -= 1
                    term = env1.mul(env1.inject_poly({tuple(lowered): mu[v]}), rest)
                    total[v] = env1.add(total[v], term)
        # mu * sum_j (prod_{j' != j} T) * T_{g_j, n_j - 1} * d(g_j)
        for j in range(self.env.s):
            if nv[j]:
                nv2 = list(nv)
                nv2[j] -= 1
                if (mu, tuple(nv2)) not in env1.index:
                    continue
                partner = env1._unit_vec(env1.index[(mu, tuple(nv2))])
                g = self.env.gens[j]
                for v in range(self.k):
                    if g[v]:
                        lowered = list(g)
                        lowered[v] -= 1
                        term = env1.mul(env1.inject_poly({tuple(lowered): g[v]}), partner)
                        total[v] = env1.add(total[v], term)
        return tuple(total)

    def d(self, a):
        """The PD derivation D_r -> Omega(D_{r-1})."""
        env1 = self.env1
        out = [env1.zero] * self.k
        for i, c in enumerate(a):
            if c:
                db = self._d_basis[i]
                for v in range(self.k):
                    out[v] = env1.add(out[v], env1.smul(c, db[v]))
        return tuple(out)

    def _build_theta(self):
        """theta[j][i]: the dx_j coefficient of (dsigma)1(dx_i)."""
        env1 = self.env1
        R = self.env.poly
        theta = [[env1.zero] * self.k for _ in range(self.k)]
        for i, v in enumerate(self.env.pres.variables):
            xi = R.gen(v)
            lead = R.pow(xi, self.env.p - 1)
            theta[i][i] = env1.add(theta[i][i], env1.inject_poly(lead))
            for j, w in enumerate(self.env.pres.variables):
                dtau = R.derivative(self.env._tau[i], w)
                if dtau:
                    theta[j][i] = env1.add(theta[j][i], env1.inject_poly(dtau))
        return theta

    def dsigma1(self, w):
        """(dsigma)1 on Omega: sigma-semilinear, dx_i -> sum_j theta[j][i] dx_j."""
        env1 = self.env1
        out = [env1.zero] * self.k
        for i in range(self.k):
            coeff = env1.sigma(w[i])
            for j in range(self.k):
                if self.theta[j][i] != env1.zero:
                    out[j] = env1.add(out[j], env1.mul(coeff, self.theta[j][i]))
        return tuple(out)

    def dsigma(self, w):
        """d(sigma) = p * (dsigma)1."""
        return tuple(self.env1.int_mul(self.env.p, x) for x in self.dsigma1(w))


def pd_derivation(diff: PDDifferential, a):
    return diff.d(a)


def pd_multiply(env: PDAlgebra, a, b):
    return env.mul(a, b)
