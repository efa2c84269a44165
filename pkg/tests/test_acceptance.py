"""Acceptance criteria, one test per criterion, exact tolerances pinned.

Every test prints a single `ACCEPTANCE <k>: PASS/FAIL` line (run pytest -s
to watch them live).  Time budgets are asserted where the criterion states
one.  Nothing here is sampled where the criterion says exhaustive; nothing
is loosened below the stated precision.
"""

import json
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from crystaframe.frames import (
    AdmissibleSequence,
    admissible_quotient_frame,
    lift_frame,
    witt_frame,
)
from crystaframe.homsweep import sweep_win_phi_mod
from crystaframe.matrices import mat, mat_mul
from crystaframe.monomial import MonomialAlgebra
from crystaframe.nabla import (
    NablaContext,
    connection_to_stratification,
    horizontality_check,
    square_zero_frame,
    stratification_to_connection,
    zero_connection,
    Connection,
    solve_connection,
)
from crystaframe.pdenv import (
    PDPresentation,
    build_pd_envelope,
    pd_frame,
    pd_torsion_probe,
)
from crystaframe.residues import GaloisField, Residues
from crystaframe.verify import (
    verify_deform_win,
    verify_gamma_vp,
    verify_integrability,
    verify_pd_axioms,
    verify_sigma1_formula,
)
from crystaframe.windows import (
    Window,
    classify_windows,
    fv_operators,
    window_from_psi,
)
from crystaframe.witt import WittRing, witt_cache

ROOT = Path(__file__).resolve().parents[1]


_REPORTER = None


@pytest.fixture(scope="module", autouse=True)
def _acceptance_reporter(request):
    global _REPORTER
    _REPORTER = request.config.pluginmanager.get_plugin("terminalreporter")
    yield
    _REPORTER = None


def _line(k, ok, elapsed, extra=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({elapsed:.1f}s{'; ' + extra if extra else ''})"
    text = f"ACCEPTANCE {k}: {status}{suffix}"
    if _REPORTER is not None:
        _REPORTER.write_line(text)
    print(text)
    assert ok


@pytest.fixture(scope="module")
def class_tables():
    """Rank <= 2 classifications over (Z/p^3, pZ/p^3, F_p, id), p in {2, 3}."""
    out = {}
    for p in (2, 3):
        frame = lift_frame(Residues(p, 3))
        out[p] = (frame, [classify_windows(frame, r, budget=1 << 22) for r in (0, 1, 2)])
    return out


def test_criterion_1_witt_ghost():
    t0 = time.time()
    ok = True
    rng = random.Random(1)
    evals = 0
    grid = [(p, n) for p in (2, 3) for n in (2, 3, 4)]
    per_cell = 200 // len(grid) + 1  # 204 random evaluations overall
    for p, n in grid:
        cache = witt_cache(p, n)
        cache.verify_ghost_identities()  # symbolic, raises on defect
        base = MonomialAlgebra(Residues(p, 4), [("x", 0, 2)])
        W = WittRing(base, n, p)
        for _ in range(per_cell):
            x = tuple(
                base.monomial((rng.randrange(2),), rng.randrange(base.cf.modulus))
                for _ in range(n)
            )
            y = tuple(
                base.monomial((rng.randrange(2),), rng.randrange(base.cf.modulus))
                for _ in range(n)
            )
            gx, gy = W.ghost(x), W.ghost(y)
            gs, gp = W.ghost(W.add(x, y)), W.ghost(W.mul(x, y))
            for i in range(n):
                ok = ok and gs[i] == base.add(gx[i], gy[i])
                ok = ok and gp[i] == base.mul(gx[i], gy[i])
            evals += 1
    elapsed = time.time() - t0
    _line(1, ok and evals >= 200 and elapsed < 10.0, elapsed, f"{evals} random evaluations")


def _frame_axiom_battery(frame, budget=4096):
    gens = frame.ideal_spanning(budget)
    for g in gens:
        if not frame.frame_axiom_p_sigma1(g):
            return False, f"p*sigma1 != sigma at {g!r}"
    cod = frame.sigma1_codomain
    samples = frame.sample_elements(12, seed=2)
    for k, a in enumerate(samples):
        g = gens[k % len(gens)]
        defect = frame.sigma_linear_defect(a, g)
        if defect != cod.zero:
            if frame.kind in ("lift", "pd"):
                pm1 = frame.p ** (frame.A.m - 1)
                vals = defect if isinstance(defect, tuple) else (defect,)
                if not all(isinstance(c, int) and c % pm1 == 0 for c in vals):
                    return False, "sigma1 linearity beyond ledger"
            else:
                return False, "sigma1 linearity failed"
        # sigma reduces to Frobenius mod p
        ppow = frame.A.one
        for _ in range(frame.p):
            ppow = frame.A.mul(ppow, a)
        if not frame.eq_mod_p(frame.sigma(a), ppow):
            return False, "sigma is not Frobenius mod p"
    return True, f"{len(gens)} generators"


def test_criterion_2_frame_axioms():
    t0 = time.time()
    ok = True
    notes = []
    F2 = MonomialAlgebra(Residues(2, 1), [])
    F4 = MonomialAlgebra(GaloisField(2, 2), [])
    F2x3 = MonomialAlgebra(Residues(2, 1), [("x", 0, 3)])
    for R in (F2, F4, F2x3):
        good, note = _frame_axiom_battery(witt_frame(R, 2))
        ok = ok and good
        notes.append(note)
    good, note = _frame_axiom_battery(lift_frame(Residues(2, 3)))
    ok = ok and good
    for p, m in ((2, 3), (3, 3)):
        env = build_pd_envelope(PDPresentation(p, m, ("x",), ((1,),), 8))
        good, note = _frame_axiom_battery(pd_frame(env), budget=64)
        ok = ok and good
    S = MonomialAlgebra(Residues(2, 1), [("Y", 2, 2)])
    seq = AdmissibleSequence.minimal(S, [S.gen("Y")], 2)
    good, note = _frame_axiom_battery(admissible_quotient_frame(seq, 2), budget=128)
    ok = ok and good
    elapsed = time.time() - t0
    _line(2, ok and elapsed < 30.0, elapsed)


def test_criterion_3_sigma1_formula():
    t0 = time.time()
    res = verify_sigma1_formula(primes=(2, 3, 5), nmax=8, precision=3)
    _line(3, res.passed, time.time() - t0, f"{res.checks} checks")


def test_criterion_4_gamma_vp():
    t0 = time.time()
    res = verify_gamma_vp(primes=(2, 3), nmax=3)
    _line(4, res.passed, time.time() - t0, f"{res.checks} checks")


def test_criterion_5_win_phi_mod(class_tables):
    t0 = time.time()
    ok = True
    total_pairs = 0
    for p in (2, 3):
        frame, tables = class_tables[p]
        rep = sweep_win_phi_mod(frame, tables)
        ok = ok and rep.passed
        total_pairs += rep.pairs_checked
    elapsed = time.time() - t0
    _line(5, ok and elapsed < 120.0, elapsed, f"{total_pairs} ordered pairs")


def test_criterion_6_deform_win():
    t0 = time.time()
    res = verify_deform_win()
    elapsed = time.time() - t0
    _line(6, res.passed and elapsed < 60.0, elapsed, f"{res.checks} checks")


def test_criterion_7_pd_consistency():
    t0 = time.time()
    ok = True
    res = verify_pd_axioms(p=2, precision=3, cap=6)
    ok = ok and res.passed
    res3 = verify_pd_axioms(p=3, precision=2, cap=5)
    ok = ok and res3.passed
    # regular presentations: empty torsion at every tested (r <= 8, m <= 4)
    tested = 0
    for p in (2, 3):
        for k in (1, 2):
            for cap in (3, 5, 8):
                for m in (2, 3, 4):
                    gens = tuple(
                        tuple(1 if i == j else 0 for i in range(k)) for j in range(k)
                    )
                    env = build_pd_envelope(
                        PDPresentation(p, m, tuple("xy"[:k]), gens, cap)
                    )
                    rep = pd_torsion_probe(env)
                    ok = ok and rep.torsion_generators == [] and rep.free_rank == env.n
                    tested += 1
    # the (x,y)^2 non-example: findings are self-consistent under re-reduction
    for p in (2, 3):
        for m in (2, 3):
            env = build_pd_envelope(
                PDPresentation(p, m, ("x", "y"), ((2, 0), (1, 1), (0, 2)), 4)
            )
            rep = pd_torsion_probe(env)
            fresh = env._build_relations()
            for t in rep.torsion_generators:
                ok = ok and t != env.zero
                ok = ok and fresh.contains([env.p * c for c in t])
    _line(7, ok, time.time() - t0, f"{tested} regular probes")


def test_criterion_8_integrability():
    t0 = time.time()
    res = verify_integrability(p_list=(2, 3), min_instances=50)
    elapsed = time.time() - t0
    _line(
        8,
        res.passed and elapsed < 120.0,
        elapsed,
        f"{res.details.get('instances', 0)} connections",
    )


def test_criterion_9_nabla_eps_dictionary():
    t0 = time.time()
    ok = True
    env = build_pd_envelope(PDPresentation(2, 3, ("x",), ((1,),), 6))
    ctx = NablaContext(pd_frame(env))
    sz = square_zero_frame(ctx.frame, ctx.diff)
    one, zero = env.one, env.zero
    windows = [
        window_from_psi(ctx.frame, 0, 1, [[one]]),
        window_from_psi(ctx.frame, 1, 0, [[one]]),
        window_from_psi(ctx.frame, 1, 1, [[zero, one], [one, zero]]),
    ]
    # round trips on solver outputs
    for w in windows:
        sol = solve_connection(ctx, w)
        conns = [zero_connection(ctx, w)] if sol is None else [sol[0]]
        for conn in conns:
            E, _ = connection_to_stratification(ctx, w, conn, sz)
            back = stratification_to_connection(ctx, w, E, sz)
            ok = ok and back.matrices == conn.matrices
    # bi-implication on sampled pairs
    rng = random.Random(5)
    pairs = 0
    seen_pass = seen_fail = 0
    while pairs < 51:
        w = windows[rng.randrange(len(windows))]
        sol = solve_connection(ctx, w)
        base = sol[0] if sol else zero_connection(ctx, w)
        M = [list(map(list, Mi)) for Mi in base.matrices]
        if rng.random() < 0.6:
            a, b = rng.randrange(w.rank), rng.randrange(w.rank)
            M[0][a][b] = ctx.env1.add(
                M[0][a][b], ctx.env1.embed_int(rng.randrange(1, ctx.env1.mod))
            )
        cand = Connection(w, tuple(mat(Mi) for Mi in M))
        horizontal = horizontality_check(ctx, w, cand).passed
        try:
            connection_to_stratification(ctx, w, cand, sz)
            eps_ok = True
        except Exception:
            eps_ok = False
        ok = ok and (eps_ok == horizontal)
        seen_pass += horizontal
        seen_fail += not horizontal
        pairs += 1
    ok = ok and seen_pass > 0 and seen_fail > 0
    _line(9, ok, time.time() - t0, f"{pairs} sampled pairs")


def test_criterion_10_fv_certificates(class_tables):
    t0 = time.time()
    ok = True
    count = 0
    for p in (2, 3):
        frame, tables = class_tables[p]
        p_elt = frame.p_elt
        for table in tables:
            for c in table.classes:
                if c.d + c.t == 0:
                    continue
                w = Window(frame, c.d, c.t, c.psi)
                cert = fv_operators(w)  # raises on failure
                r = c.d + c.t
                p_id = mat(
                    [[p_elt if i == j else frame.A.zero for j in range(r)] for i in range(r)]
                )
                ok = ok and mat_mul(frame.A, cert.V, cert.F) == p_id
                ok = ok and mat_mul(frame.A, cert.F, cert.V) == p_id
                count += 1
    # also every class of the bundled Witt-frame tables
    R = MonomialAlgebra(Residues(2, 1), [])
    wf = witt_frame(R, 2)
    for c in classify_windows(wf, 1, budget=1 << 12).classes:
        cert = fv_operators(Window(wf, c.d, c.t, c.psi))
        count += 1
    _line(10, ok, time.time() - t0, f"{count} windows certified")


def test_criterion_11_classification_golden(tmp_path):
    t0 = time.time()
    frame = lift_frame(Residues(2, 2))
    table = classify_windows(frame, 1)
    ok = len(table.classes) == 4
    reps = {(c.d, c.psi[0][0]) for c in table.classes}
    ok = ok and reps == {(0, 1), (0, 3), (1, 1), (1, 3)}
    # byte-identical machine report on re-run
    golden = ROOT / "scenarios" / "golden" / "classify_rank1_zp2.json"
    out = tmp_path / "fresh.json"
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "crystaframe.cli",
            "run",
            str(ROOT / "scenarios" / "classify_rank1_zp2.scn"),
            "--report",
            str(out),
        ],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )
    ok = ok and proc.returncode == 0
    ok = ok and out.read_bytes() == golden.read_bytes()
    _line(11, ok, time.time() - t0)
