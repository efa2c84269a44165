"""Finite monomial-quotient algebras with fractional exponents.

Carriers look like F_p[x^{1/p^N}, y, ...]/(monomial caps): exponents of the
variable x live in (1/p^N) * Z>=0 and monomials at or above the per-variable
cap are zero.  Coefficients come from F_p, F_{p^k} or Z/p^m.  Elements are
canonical sorted tuples of (exponent-numerators, coefficient), so they are
hashable and enumeration order is deterministic.

This class is deliberately narrow: normal forms are canonical without any
Groebner machinery, and it covers every test ring used here (truncated
perfections, F_p[x]/(x^n), F_p[x,y]/(x,y)^2, finite fields).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from .residues import GaloisField, Residues


class MonomialAlgebra:
    """A monomial-quotient algebra over F_p, F_{p^k} or Z/p^m.

    vars_spec: list of (name, depth, cap) where exponents of the variable
    are k/p^depth and cap is a Fraction/int bound (exponent >= cap is zero)
    or None for no bound.  total_cap bounds the total degree when any
    per-variable cap is None.
    """

    def __init__(self, coeffs, vars_spec, total_cap=None, max_depth: int = 6):
        if not isinstance(coeffs, (Residues, GaloisField)):
            raise TypeError("coefficients must be Residues or GaloisField")
        self.cf = coeffs
        self.p = coeffs.p
        self.names = tuple(v[0] for v in vars_spec)
        self.depths = tuple(int(v[1]) for v in vars_spec)
        if any(d < 0 or d > max_depth for d in self.depths):
            raise ValueError("perfection depth out of configured range")
        self.max_depth = max_depth
        caps = []
        for (name, depth, cap) in vars_spec:
            if cap is None:
                caps.append(None)
            else:
                num = Fraction(cap) * self.p ** depth
                if num.denominator != 1:
                    raise ValueError(f"cap for {name} not representable at depth {depth}")
                caps.append(int(num))
        self.cap_nums = tuple(caps)
        self.total_cap = None if total_cap is None else Fraction(total_cap)
        if any(c is None for c in self.cap_nums) and self.total_cap is None:
            raise ValueError("unbounded variable requires a total-degree cap")
        self._index = {nm: i for i, nm in enumerate(self.names)}
        self._basis = None

    # -- identity & printing --

    def key(self):
        return (self.cf, self.names, self.depths, self.cap_nums, self.total_cap)

    def __eq__(self, other):
        return isinstance(other, MonomialAlgebra) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = []
        for nm, d, c in zip(self.names, self.depths, self.cap_nums):
            v = nm if d == 0 else f"{nm}^(1/{self.p ** d})"
            parts.append(f"{v}<{Fraction(c, self.p ** d) if c is not None else 'inf'}")
        return f"{self.cf}[{', '.join(parts)}]"

    @property
    def char_is_p(self):
        return self.cf.char_is_p

    # -- monomial admissibility --

    def _admissible(self, exps) -> bool:
        for e, cap in zip(exps, self.cap_nums):
            if e < 0:
                return False
            if cap is not None and e >= cap:
                return False
        if self.total_cap is not None:
            total = sum(Fraction(e, self.p ** d) for e, d in zip(exps, self.depths))
            if total >= self.total_cap:
                return False
        return True

    # -- canonical element plumbing --

    def _canon(self, d: dict) -> tuple:
        items = []
        zero = self.cf.zero
        for exps, c in d.items():
            c = self.cf.reduce(c) if isinstance(self.cf, GaloisField) else c % self.cf.modulus
            if c != zero and self._admissible(exps):
                items.append((exps, c))
        items.sort(key=lambda t: t[0])
        return tuple(items)

    def _to_dict(self, elt) -> dict:
        return {exps: c for exps, c in elt}

    @property
    def zero(self):
        return ()

    @property
    def one(self):
        return (((0,) * len(self.names), self.cf.one),)

    def scalar(self, c):
        return self._canon({(0,) * len(self.names): c})

    def embed_int(self, c: int):
        if isinstance(self.cf, GaloisField):
            return self.scalar(self.cf.embed(c))
        return self.scalar(c % self.cf.modulus)

    def gen(self, name: str, power=1):
        """The monomial name^power (power may be a Fraction)."""
        i = self._index[name]
        num = Fraction(power) * self.p ** self.depths[i]
        if num.denominator != 1:
            raise ValueError(f"exponent {power} not representable at depth {self.depths[i]}")
        exps = [0] * len(self.names)
        exps[i] = int(num)
        return self._canon({tuple(exps): self.cf.one})

    def monomial(self, exps, c=None):
        return self._canon({tuple(exps): self.cf.one if c is None else c})

    # -- arithmetic --

    def add(self, a, b):
        d = self._to_dict(a)
        for exps, c in b:
            if exps in d:
                d[exps] = self.cf.add(d[exps], c)
            else:
                d[exps] = c
        return self._canon(d)

    def neg(self, a):
        return tuple((exps, self.cf.neg(c)) for exps, c in a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        out: dict = {}
        for e1, c1 in a:
            for e2, c2 in b:
                exps = tuple(x + y for x, y in zip(e1, e2))
                if not self._admissible(exps):
                    continue
                c = self.cf.mul(c1, c2)
                if exps in out:
                    out[exps] = self.cf.add(out[exps], c)
                else:
                    out[exps] = c
        return self._canon(out)

    def smul(self, c, a):
        return self._canon({exps: self.cf.mul(c, cc) for exps, cc in a})

    def int_mul(self, k: int, a):
        return self.mul(self.embed_int(k), a)

    def pow(self, a, e: int):
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def equal(self, a, b) -> bool:
        return a == b

    # -- Frobenius --

    def frobenius(self, a):
        """The p-power endomorphism; rejected unless coefficients have char p."""
        if not self.char_is_p:
            raise ValueError("Frobenius is canonical only in characteristic p")
        out: dict = {}
        for exps, c in a:
            exps2 = tuple(self.p * e for e in exps)
            if not self._admissible(exps2):
                continue
            cp = self.cf.frobenius(c)
            if exps2 in out:
                out[exps2] = self.cf.add(out[exps2], cp)
            else:
                out[exps2] = cp
        return self._canon(out)

    # -- finite basis / coordinates --

    def basis(self):
        """All admissible exponent tuples, sorted; requires finiteness."""
        if self._basis is not None:
            return self._basis
        ranges = []
        for cap, d in zip(self.cap_nums, self.depths):
            if cap is None:
                if self.total_cap is None:
                    raise ValueError("algebra has infinite rank")
                cap = int(self.total_cap * self.p ** d) + 1
            ranges.append(range(cap))
        basis = [e for e in iproduct(*ranges) if self._admissible(e)]
        basis.sort()
        self._basis = tuple(basis)
        return self._basis

    def rank(self) -> int:
        return len(self.basis())

    def coords(self, a):
        """Coefficient-field coordinates in the monomial basis."""
        basis = self.basis()
        pos = {e: i for i, e in enumerate(basis)}
        out = [self.cf.zero] * len(basis)
        for exps, c in a:
            out[pos[exps]] = c
        return tuple(out)

    def from_coords(self, cs):
        basis = self.basis()
        return self._canon({e: c for e, c in zip(basis, cs)})

    def fp_dim(self) -> int:
        k = self.cf.k if isinstance(self.cf, GaloisField) else 1
        if isinstance(self.cf, Residues) and self.cf.m != 1:
            raise ValueError("F_p coordinates need characteristic-p coefficients")
        return self.rank() * k

    def fp_coords(self, a):
        out = []
        for c in self.coords(a):
            if isinstance(self.cf, GaloisField):
                out.extend(c)
            else:
                out.append(c)
        return tuple(out)

    def from_fp_coords(self, cs):
        k = self.cf.k if isinstance(self.cf, GaloisField) else 1
        coeffs = []
        for i in range(0, len(cs), k):
            chunk = cs[i:i + k]
            coeffs.append(tuple(c % self.p for c in chunk) if k > 1 or isinstance(self.cf, GaloisField) else chunk[0] % self.p)
        return self.from_coords(coeffs)

    def elements(self):
        """Deterministic enumeration of the whole algebra (use with budgets)."""
        basis = self.basis()
        coeff_list = list(self.cf.elements())
        for combo in iproduct(coeff_list, repeat=len(basis)):
            yield self._canon({e: c for e, c in zip(basis, combo)})

    def size(self) -> int:
        q = self.cf.modulus if isinstance(self.cf, Residues) else self.p ** self.cf.k
        return q ** self.rank()

    # -- local-ring structure --

    def constant_term(self, a):
        zero_exp = (0,) * len(self.names)
        for exps, c in a:
            if exps == zero_exp:
                return c
        return self.cf.zero

    def is_unit(self, a) -> bool:
        return self.cf.is_unit(self.constant_term(a))

    def inv(self, a):
        """Newton iteration from the residue-field inverse; exact."""
        c = self.constant_term(a)
        if not self.cf.is_unit(c):
            raise ZeroDivisionError("not a unit")
        y = self.scalar(self.cf.inv(c))
        two = self.embed_int(2)
        for _ in range(64):
            ay = self.mul(a, y)
            if ay == self.one:
                return y
            y = self.mul(y, self.sub(two, ay))
        raise AssertionError("unit inversion failed to converge")


def adjoin_p_roots(R: MonomialAlgebra, targets, depth: int) -> MonomialAlgebra:
    """R[(a_i^{1/p^depth})] for the named variables; caps are preserved.

    Returns the re-depthed algebra; use `embed_after_adjoin` to map elements.
    """
    if depth == 0:
        return R
    spec = []
    for nm, d, cap in zip(R.names, R.depths, R.cap_nums):
        nd = max(d, depth) if nm in targets else d
        if nd > R.max_depth:
            raise ValueError("depth overflow beyond configured maximum")
        cap_frac = None if cap is None else Fraction(cap, R.p ** d)
        spec.append((nm, nd, cap_frac))
    return MonomialAlgebra(R.cf, spec, total_cap=R.total_cap, max_depth=R.max_depth)


def embed_after_adjoin(R: MonomialAlgebra, S: MonomialAlgebra, a):
    """The inclusion R -> S when S was produced by adjoin_p_roots."""
    out = {}
    for exps, c in a:
        exps2 = tuple(e * R.p ** (dS - dR) for e, dR, dS in zip(exps, R.depths, S.depths))
        out[exps2] = c
    return S._canon(out)


def frobenius_kernel_nilpotency(R: MonomialAlgebra, max_power: int | None = None):
    """Decide whether ker(Frobenius) is nilpotent as an ideal; exact.

    Returns (nilpotent, index) where index is the least r with (ker phi)^r = 0,
    and index = 1 means the kernel is already zero.
    """
    from .linalg import kernel_basis

    if not R.char_is_p:
        raise ValueError("needs a characteristic-p algebra")
    n = R.fp_dim()
    # columns = phi(basis vector j) in F_p coordinates
    cols = []
    for j in range(n):
        vec = [0] * n
        vec[j] = 1
        img = R.frobenius(R.from_fp_coords(vec))
        cols.append(R.fp_coords(img))
    mat = [[cols[j][i] for j in range(n)] for i in range(n)]
    ker = kernel_basis(mat, R.p, 1)
    kernel_elts = [R.from_fp_coords(v) for v in ker]
    kernel_elts = [e for e in kernel_elts if e != R.zero]
    if not kernel_elts:
        return True, 1

    def span_close(elts):
        """F_p row-echelon span of fp-coordinate vectors of `elts`."""
        rows = []
        for e in elts:
            v = list(R.fp_coords(e))
            for r in rows:
                lead = next(i for i, x in enumerate(r) if x)
                if v[lead]:
                    f = v[lead] * pow(r[lead], -1, R.p) % R.p
                    v = [(a - f * b) % R.p for a, b in zip(v, r)]
            if any(v):
                rows.append(v)
                rows.sort(key=lambda r: next(i for i, x in enumerate(r) if x))
        return [R.from_fp_coords(r) for r in rows]

    monomials = [R.monomial(e) for e in R.basis()]
    ideal = span_close([R.mul(k, mu) for k in kernel_elts for mu in monomials])
    power = ideal
    bound = max_power if max_power is not None else n + 1
    for r in range(1, bound + 1):
        if not power:
            return True, r
        power = span_close([R.mul(a, b) for a in power for b in ideal])
    return False, bound
