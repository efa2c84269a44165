"""Frames, windows, and the structure-matrix dictionary.

Run:  python3 demos/03_frames_and_windows.py
"""

from crystaframe import (
    MonomialAlgebra,
    Residues,
    f_nilpotence,
    fv_operators,
    hom_space,
    lift_frame,
    window_from_psi,
    witt_frame,
)

print("== The lift frame (Z/8, 2Z/8, F_2, id, sigma1 = sigma/2) ==")
fr = lift_frame(Residues(2, 3))
print("p*sigma1 = sigma on the whole ideal:",
      all(fr.frame_axiom_p_sigma1(i) for i in (0, 2, 4, 6)), "\n")

print("== Windows through Psi ==")
etale = window_from_psi(fr, 0, 1, [[1]])
mult = window_from_psi(fr, 1, 0, [[1]])
ss = window_from_psi(fr, 1, 1, [[0, 1], [1, 0]])
print("etale: Phi matrix", etale.phi_matrix())
print("multiplicative: Phi matrix", mult.phi_matrix())
print("supersingular-type: Phi matrix", ss.phi_matrix(), "\n")

print("== F and V with certificates ==")
for name, w in (("etale", etale), ("multiplicative", mult), ("supersingular", ss)):
    cert = fv_operators(w)
    print(f"{name}: F = {cert.F}  V = {cert.V}  VF = FV = p:",
          cert.vf_is_p and cert.fv_is_p)
print()

print("== F-nilpotence ==")
print("multiplicative:", f_nilpotence(mult), " etale:", f_nilpotence(etale),
      " supersingular:", f_nilpotence(ss), "\n")

print("== Hom groups (window homs embed into Phi-module homs) ==")
hs_win = hom_space(mult, etale, "window")
hs_phi = hom_space(mult, etale, "phi_module")
print("Hom(mult, etale): window generators:", len(hs_win.generators),
      " Phi generators:", len(hs_phi.generators), " (both zero: 1 - p is a unit)")
end_w = hom_space(etale, etale, "window")
print("End(etale) generators:", [g[0][0] for g in end_w.generators], "\n")

print("== A Witt frame over a non-perfect base ==")
R = MonomialAlgebra(Residues(2, 1), [("x", 0, 3)])
wf = witt_frame(R, 2)
print(wf.name, " ideal v(W_1) of size", len(wf.ideal_spanning(1 << 12)) + 1)
print("p*sigma1 = sigma holds exhaustively on the ideal:",
      all(wf.frame_axiom_p_sigma1(g) for g in wf.ideal_spanning(1 << 12)))
print("(sigma1 values live one Witt level down: the honest truncation)")
