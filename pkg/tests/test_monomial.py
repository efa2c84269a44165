import random

import pytest

from crystaframe.monomial import (
    MonomialAlgebra,
    adjoin_p_roots,
    embed_after_adjoin,
    frobenius_kernel_nilpotency,
)
from crystaframe.residues import GaloisField, Residues


def F2x(cap, depth=0):
    return MonomialAlgebra(Residues(2, 1), [("x", depth, cap)])


def random_element(R, rng, nterms=3):
    out = R.zero
    basis = R.basis()
    for _ in range(nterms):
        e = basis[rng.randrange(len(basis))]
        c = rng.randrange(R.p)
        out = R.add(out, R.monomial(e, c if not hasattr(R.cf, "k") else R.cf.embed(c)))
    return out


@pytest.mark.parametrize(
    "R",
    [
        F2x(4),
        MonomialAlgebra(Residues(3, 1), [("y", 0, 2)]),
        MonomialAlgebra(Residues(2, 2), [("x", 0, 3)]),
        MonomialAlgebra(GaloisField(2, 2), [("x", 0, 2)]),
        MonomialAlgebra(Residues(2, 1), [("x", 1, 2), ("y", 0, 2)]),
    ],
)
def test_ring_axioms_random(R):
    rng = random.Random(17)
    for _ in range(200):
        a = random_element(R, rng)
        b = random_element(R, rng)
        c = random_element(R, rng)
        assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))
        assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
        assert R.add(a, b) == R.add(b, a)
        assert R.mul(a, b) == R.mul(b, a)
        assert R.mul(R.one, a) == a
        assert R.add(a, R.neg(a)) == R.zero


def test_caps_kill_monomials():
    R = F2x(4)
    x = R.gen("x")
    assert R.pow(x, 4) == R.zero
    assert R.pow(x, 3) != R.zero


def test_frobenius_freshmans_dream():
    R = F2x(4)
    x = R.gen("x")
    a = R.add(R.one, x)
    assert R.frobenius(a) == R.add(R.one, R.pow(x, 2))


def test_frobenius_halves():
    R = MonomialAlgebra(Residues(2, 1), [("x", 1, 2)])
    half = R.gen("x", power=__import__("fractions").Fraction(1, 2))
    assert R.frobenius(half) == R.gen("x")


def test_frobenius_exceeds_cap():
    R = MonomialAlgebra(Residues(3, 1), [("y", 0, 2)])
    assert R.frobenius(R.gen("y")) == R.zero


def test_frobenius_rejected_for_zpm():
    R = MonomialAlgebra(Residues(2, 2), [("x", 0, 3)])
    with pytest.raises(ValueError):
        R.frobenius(R.gen("x"))


def test_frobenius_is_ring_hom():
    rng = random.Random(23)
    R = MonomialAlgebra(GaloisField(2, 2), [("x", 1, 2)])
    for _ in range(100):
        a = random_element(R, rng)
        b = random_element(R, rng)
        assert R.frobenius(R.mul(a, b)) == R.mul(R.frobenius(a), R.frobenius(b))
        assert R.frobenius(R.add(a, b)) == R.add(R.frobenius(a), R.frobenius(b))


def test_kernel_nilpotency_f2x3():
    nil, idx = frobenius_kernel_nilpotency(F2x(3))
    assert nil and idx == 2


def test_kernel_nilpotency_perfect_field():
    F4alg = MonomialAlgebra(GaloisField(2, 2), [])
    nil, idx = frobenius_kernel_nilpotency(F4alg)
    assert nil and idx == 1


def test_kernel_nilpotency_deep_perfection():
    # F_2[x^{1/4}]/(x) is F-nilpotent
    R = MonomialAlgebra(Residues(2, 1), [("x", 2, 1)])
    nil, idx = frobenius_kernel_nilpotency(R)
    assert nil
    # oracle: kernel = span{x^{1/2}, x^{3/4}}, square lands above the cap
    assert idx == 2


def test_phi_kills_its_kernel():
    R = F2x(3)
    from crystaframe.linalg import kernel_basis

    n = R.fp_dim()
    cols = []
    for j in range(n):
        v = [0] * n
        v[j] = 1
        cols.append(R.fp_coords(R.frobenius(R.from_fp_coords(v))))
    mat = [[cols[j][i] for j in range(n)] for i in range(n)]
    for k in kernel_basis(mat, R.p, 1):
        assert R.frobenius(R.from_fp_coords(k)) == R.zero


def test_adjoin_p_roots_rank():
    R = F2x(2)
    S = adjoin_p_roots(R, ["x"], 1)
    assert S.rank() == 4  # 1, x^{1/2}, x, x^{3/2}
    # embedding is an algebra map on admissible monomials
    x = R.gen("x")
    assert embed_after_adjoin(R, S, x) == S.gen("x")
    assert embed_after_adjoin(R, S, R.pow(x, 2)) == S.zero == S.pow(S.gen("x"), 2)


def test_adjoin_depth_zero_identity():
    R = F2x(2)
    assert adjoin_p_roots(R, ["x"], 0) is R


def test_adjoin_two_variables_rank_multiplies():
    R = MonomialAlgebra(Residues(2, 1), [("x", 0, 2), ("y", 0, 2)])
    S = adjoin_p_roots(R, ["x", "y"], 1)
    assert S.rank() == R.rank() * 4  # each variable rank doubles: 2 -> 4


def test_adjoin_depth_overflow():
    R = F2x(2)
    with pytest.raises(ValueError):
        adjoin_p_roots(R, ["x"], 9)


def test_adjoin_preserves_f_nilpotence():
    # Lemma instance as a property: adjoining p-roots keeps F-nilpotence
    cases = [
        F2x(3),
        MonomialAlgebra(Residues(2, 1), [("x", 0, 2), ("y", 0, 2)]),
        MonomialAlgebra(Residues(3, 1), [("y", 0, 2)]),
    ]
    for R in cases:
        nil, _ = frobenius_kernel_nilpotency(R)
        assert nil
        S = adjoin_p_roots(R, [R.names[0]], 1)
        nil2, _ = frobenius_kernel_nilpotency(S)
        assert nil2


def test_local_inverse():
    R = MonomialAlgebra(Residues(2, 3), [("x", 0, 3)])
    a = R.add(R.one, R.gen("x"))  # 1 + x is a unit
    assert R.mul(a, R.inv(a)) == R.one
    assert R.is_unit(a)
    assert not R.is_unit(R.gen("x"))
    with pytest.raises(ZeroDivisionError):
        R.inv(R.gen("x"))


def test_elements_enumeration_count():
    R = F2x(2)
    assert len(list(R.elements())) == 4
    assert R.size() == 4
