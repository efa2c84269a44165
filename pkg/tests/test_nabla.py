import random

import pytest

from crystaframe.frames import validate_frame_hom
from crystaframe.matrices import mat
from crystaframe.nabla import (
    Connection,
    NablaContext,
    connection_to_stratification,
    horizontality_check,
    integrability_and_qnilpotence,
    pbar0,
    pbar1,
    produced_connections,
    solve_connection,
    square_zero_frame,
    stratification_to_connection,
    zero_connection,
)
from crystaframe.pdenv import PDPresentation, build_pd_envelope, pd_frame
from crystaframe.windows import WindowError, window_from_psi


def ctx_one_var(p=2, m=3, cap=6):
    env = build_pd_envelope(PDPresentation(p, m, ("x",), ((1,),), cap))
    return NablaContext(pd_frame(env))


def ctx_two_var(p=2, m=2, cap=4):
    env = build_pd_envelope(PDPresentation(p, m, ("x", "y"), ((1, 0), (0, 1)), cap))
    return NablaContext(pd_frame(env))


def unit_window(ctx):
    return window_from_psi(ctx.frame, 0, 1, [[ctx.env.one]])


def mult_window(ctx):
    return window_from_psi(ctx.frame, 1, 0, [[ctx.env.one]])


def ss_window(ctx):
    one, zero = ctx.env.one, ctx.env.zero
    return window_from_psi(ctx.frame, 1, 1, [[zero, one], [one, zero]])


def test_zero_connection_horizontal_on_unit():
    ctx = ctx_one_var()
    w = unit_window(ctx)
    rep = horizontality_check(ctx, w, zero_connection(ctx, w))
    assert rep.passed


def test_nonzero_omega_fails_on_unit():
    # any nabla = e (x) omega with omega != 0 mod p fails: dsigma = 0 mod p forces it
    ctx = ctx_one_var()
    w = unit_window(ctx)
    bad = Connection(w, (mat([[ctx.env1.one]]),))
    rep = horizontality_check(ctx, w, bad)
    assert not rep.passed and rep.witnesses


def test_solver_unit_window_unique_zero():
    ctx = ctx_one_var()
    w = unit_window(ctx)
    sol = solve_connection(ctx, w)
    assert sol is not None
    part, gens = sol
    assert all(x == ctx.env1.zero for M in part.matrices for row in M for x in row)
    assert gens == []


def test_solver_multiplicative_window_unique_zero():
    ctx = ctx_one_var()
    w = mult_window(ctx)
    sol = solve_connection(ctx, w)
    assert sol is not None
    part, gens = sol
    assert all(x == ctx.env1.zero for M in part.matrices for row in M for x in row)
    assert gens == []


def test_solver_outputs_pass_horizontality():
    ctx = ctx_one_var()
    w = ss_window(ctx)
    sol = solve_connection(ctx, w)
    assert sol is not None
    conns = produced_connections(ctx, w, sol)
    assert conns
    for conn in conns:
        assert horizontality_check(ctx, w, conn).passed


def test_perturbed_solution_fails():
    ctx = ctx_one_var()
    w = ss_window(ctx)
    sol = solve_connection(ctx, w)
    part = sol[0]
    M = [list(map(list, Mi)) for Mi in part.matrices]
    M[0][0][1] = ctx.env1.add(M[0][0][1], ctx.env1.one)
    bad = Connection(w, tuple(mat(Mi) for Mi in M))
    assert not horizontality_check(ctx, w, bad).passed


def test_integrability_and_qnilpotence_desk():
    for make_ctx in (ctx_one_var, ctx_two_var):
        ctx = make_ctx()
        for make_w in (unit_window, mult_window, ss_window):
            w = make_w(ctx)
            sol = solve_connection(ctx, w)
            if sol is None:
                continue
            for conn in produced_connections(ctx, w, sol, bound=4):
                rep = integrability_and_qnilpotence(ctx, w, conn)
                assert rep.curvature_zero
                assert all(i is not None for i in rep.nilpotence_indices)


def test_square_zero_frame_selftest_and_homs():
    ctx = ctx_one_var()
    sz = square_zero_frame(ctx.frame, ctx.diff)
    for hom in (pbar0(sz), pbar1(sz)):
        cert = validate_frame_hom(hom, n_samples=10, seed=4)
        assert cert.passed, (hom.name, cert.failures)


def test_stratification_round_trip():
    ctx = ctx_one_var()
    sz = square_zero_frame(ctx.frame, ctx.diff)
    for make_w in (unit_window, mult_window, ss_window):
        w = make_w(ctx)
        sol = solve_connection(ctx, w)
        if sol is None:
            continue
        conn = sol[0]
        E, _ = connection_to_stratification(ctx, w, conn, sz)
        back = stratification_to_connection(ctx, w, E, sz)
        assert back.matrices == conn.matrices


def test_stratification_round_trip_other_direction():
    # eps -> nabla -> eps is the identity on the stratification side
    ctx = ctx_one_var()
    sz = square_zero_frame(ctx.frame, ctx.diff)
    for make_w in (unit_window, ss_window):
        w = make_w(ctx)
        sol = solve_connection(ctx, w)
        conn = sol[0] if sol else zero_connection(ctx, w)
        E, _ = connection_to_stratification(ctx, w, conn, sz)
        back = stratification_to_connection(ctx, w, E, sz)
        E2, _ = connection_to_stratification(ctx, w, back, sz)
        assert E2 == E


def test_zero_connection_gives_canonical_eps():
    ctx = ctx_one_var()
    sz = square_zero_frame(ctx.frame, ctx.diff)
    w = unit_window(ctx)
    E, _ = connection_to_stratification(ctx, w, zero_connection(ctx, w), sz)
    assert E[0][0][0] == ctx.env.one
    assert all(u == ctx.env1.zero for u in E[0][0][1])


def test_bi_implication_sampled():
    # eps is a window isomorphism iff horizontality holds, on random pairs
    ctx = ctx_one_var()
    sz = square_zero_frame(ctx.frame, ctx.diff)
    rng = random.Random(9)
    checked_pass = checked_fail = 0
    for make_w in (unit_window, mult_window, ss_window):
        w = make_w(ctx)
        sol = solve_connection(ctx, w)
        base = sol[0] if sol else zero_connection(ctx, w)
        for _ in range(9):
            M = [list(map(list, Mi)) for Mi in base.matrices]
            if rng.random() < 0.5:
                a = rng.randrange(w.rank)
                b = rng.randrange(w.rank)
                bump = ctx.env1.embed_int(rng.randrange(1, ctx.env1.mod))
                M[0][a][b] = ctx.env1.add(M[0][a][b], bump)
            cand = Connection(w, tuple(mat(Mi) for Mi in M))
            horizontal = horizontality_check(ctx, w, cand).passed
            try:
                connection_to_stratification(ctx, w, cand, sz)
                eps_ok = True
            except WindowError:
                eps_ok = False
            assert eps_ok == horizontal
            if horizontal:
                checked_pass += 1
            else:
                checked_fail += 1
    assert checked_pass and checked_fail
