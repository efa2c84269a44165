import pytest

from crystaframe.residues import (
    GaloisField,
    PrecisionExhausted,
    PrecisionLedger,
    Residues,
    divided_power_constant,
    gamma_of_p,
    INF,
    is_prime,
)


def test_prime_certification():
    with pytest.raises(ValueError):
        Residues(4, 2)
    with pytest.raises(ValueError):
        Residues(1, 1)
    Residues(2, 1)
    Residues(13, 3)


def test_valuation_and_unit():
    assert Residues(2, 4).valuation_and_unit(12) == (2, 3)
    assert Residues(3, 3).valuation_and_unit(0) == (INF, 1)
    assert Residues(5, 2).valuation_and_unit(10) == (1, 2)


def test_valuation_reconstructs():
    for (p, m) in [(2, 3), (3, 2), (5, 2)]:
        R = Residues(p, m)
        for z in range(R.modulus):
            v, u = R.valuation_and_unit(z)
            if z == 0:
                assert v == INF and u == 1
            else:
                assert z == p ** v * u % R.modulus
                assert u % p != 0


def exact_cn(n, p):
    import math

    num = math.factorial(n * p)
    den = math.factorial(n) * p
    assert num % den == 0
    return num // den


def test_divided_power_constant_small():
    R2 = Residues(2, 8)
    assert divided_power_constant(1, R2) == 1 % R2.modulus
    assert divided_power_constant(2, R2) == 6
    assert divided_power_constant(3, R2) == 60
    R3 = Residues(3, 4)
    assert divided_power_constant(1, R3) == 2  # (p-1)!


@pytest.mark.parametrize("p,m", [(2, 6), (3, 4), (5, 3)])
def test_divided_power_constant_vs_factorial_oracle(p, m):
    R = Residues(p, m)
    for n in range(1, 13):
        assert divided_power_constant(n, R) == exact_cn(n, p) % R.modulus


@pytest.mark.parametrize("p", [2, 3, 5])
def test_cn_divisible_by_p_for_large_n(p):
    R = Residues(p, 5)
    for n in range(p, 3 * p):
        v, _ = R.valuation_and_unit(divided_power_constant(n, R))
        assert v >= 1


def test_p_times_cn_equals_quotient_of_factorials():
    import math

    for p, m in [(2, 5), (3, 4)]:
        R = Residues(p, m)
        for n in range(1, 13):
            lhs = R.mul(p % R.modulus, divided_power_constant(n, R))
            rhs = (math.factorial(n * p) // math.factorial(n)) % R.modulus
            assert lhs == rhs


def test_gamma_of_p_examples():
    assert gamma_of_p(3, Residues(2, 3)) == 4
    assert gamma_of_p(2, Residues(3, 2)) == 0
    for p in (2, 3, 5):
        assert gamma_of_p(1, Residues(p, 3)) == p


def test_gamma_of_p_times_factorial():
    import math

    for p, m in [(2, 4), (3, 3), (5, 2)]:
        R = Residues(p, m)
        for n in range(1, 10):
            lhs = R.mul(math.factorial(n) % R.modulus, gamma_of_p(n, R))
            assert lhs == pow(p, n, R.modulus)


def test_galois_field_f4():
    F4 = GaloisField(2, 2)
    a = (0, 1)
    assert F4.mul(a, a) == F4.add(a, F4.one)  # x^2 = x + 1
    # Frobenius is an automorphism of order 2
    assert F4.frobenius(F4.frobenius(a)) == a
    assert F4.frobenius(a) != a
    # every nonzero element is a unit
    for e in F4.elements():
        if any(e):
            assert F4.mul(e, F4.inv(e)) == F4.one


def test_galois_field_rejects_reducible():
    with pytest.raises(ValueError):
        GaloisField(2, 2, (1, 0, 1))  # x^2 + 1 = (x+1)^2 over F_2


def test_precision_ledger():
    led = PrecisionLedger(3)
    assert led.combine(3, 2) == 2
    assert led.after_div_p(2) == 1
    with pytest.raises(PrecisionExhausted):
        led.after_div_p(1)
    with pytest.raises(PrecisionExhausted):
        led.combine(0)
    assert led.trace()


def test_prime_checker():
    assert [q for q in range(2, 30) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
