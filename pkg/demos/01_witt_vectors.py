"""Truncated p-typical Witt vectors, from the universal polynomials up.

Run:  python3 demos/01_witt_vectors.py
"""

from crystaframe import MonomialAlgebra, Residues, WittRing, witt_cache

print("== The universal sum/product polynomials for p = 2, length 3 ==")
cache = witt_cache(2, 3)
print("S_1 =", cache.S[1], " (x1 + y1 - x0*y0)")
print("P_1 =", cache.P[1])
print("The ghost identities w_i(S) = w_i(x) + w_i(y) are re-verified")
print("symbolically every time a cache is built; a non-integral division")
print("during the recursion would have raised immediately.\n")

print("== W_2(F_2) is Z/4 ==")
F2 = MonomialAlgebra(Residues(2, 1), [])
W = WittRing(F2, 2)
one = W.one
two = W.add(one, one)
three = W.add(two, one)
print("1 =", one)
print("1+1 =", two, "   (carry into the second component)")
print("1+1+1 =", three)
print("1+1+1+1 =", W.add(three, one), " = 0:  the ring is cyclic of order 4\n")

print("== Teichmuller, Verschiebung, Frobenius over F_2[x]/(x^3) ==")
R = MonomialAlgebra(Residues(2, 1), [("x", 0, 3)])
W = WittRing(R, 2)
x = R.gen("x")
tx = W.teichmuller(x)
print("[x] =", tx)
print("[x]*[x] = [x^2]:", W.mul(tx, tx) == W.teichmuller(R.mul(x, x)))
vx = W.verschiebung((x,))
print("v(x) =", vx)
print("F(v(x)) = 2*x at one level down:", W.frobenius(vx) == W.shorter(1).int_mul(2, (x,)))
print("v(F(y)) = 2*y at full length (char-p base):",
      all(W.verschiebung(W.frobenius(y)) == W.int_mul(2, y) for y in W.elements()))
