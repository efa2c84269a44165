"""Line-oriented scenario files: declarations plus a command list.

Format (version 1): one directive per line, `#` comments, blank lines
ignored.  Directives:

    format_version 1
    prime <p>
    precision <m>
    depth <n>
    budget max_carrier <int>
    budget max_enum <int>
    budget max_cap <int>
    ring <name> field <Fp|F4|F8|F9|F25|Zpm> [vars <v:depth:cap>[,...]]
    frame <name> kind witt ring <R> length <n>
    frame <name> kind lift [precision <m>]
    frame <name> kind quotient ring <S> length <n> ideal <mono>[,<mono>]
    frame <name> kind pd vars <v>[,<v>] gens <mono>[,...] cap <r> [precision <m>]
    hom <name> from <F> to <G> kind <identity|witt-to-quotient>
    window <name> frame <F> d <d> t <t> psi <int>[,<int>...]
    command validate <frame>
    command classify <frame> rank <r>
    command base-change <window> hom <h>
    command hom <w1> <w2> mode <window|phi_module>
    command lift <window> hom <h>
    command solve-connection <frame> <window>
    command torsion-probe <frame>
    command verify <tag> [key=value ...]

Monomials use `*` and `^` with optional fractional exponents: x, x^2,
x^2*y, Y^1/2.  All three budgets are mandatory; enumerating operations
refuse to exceed them.  Budget defaults can be overridden through the
CRYSTAFRAME_MAX_CARRIER / _MAX_ENUM / _MAX_CAP environment variables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

FORMAT_VERSION = 1

ENV_BUDGETS = {
    "max_carrier": "CRYSTAFRAME_MAX_CARRIER",
    "max_enum": "CRYSTAFRAME_MAX_ENUM",
    "max_cap": "CRYSTAFRAME_MAX_CAP",
}


class ScenarioParseError(ValueError):
    def __init__(self, msg, line_no=None):
        loc = f" (line {line_no})" if line_no else ""
        super().__init__(f"{msg}{loc}")
        self.line_no = line_no


class ScenarioSemanticError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Scenario:
    prime: int = 0
    precision: int = 0
    depth: int = 0
    budgets: dict = field(default_factory=dict)
    rings: dict = field(default_factory=dict)     # name -> spec dict
    frames: dict = field(default_factory=dict)    # name -> spec dict
    homs: dict = field(default_factory=dict)
    windows: dict = field(default_factory=dict)
    commands: list = field(default_factory=list)
    source_text: str = ""


def parse_monomial(token: str, line_no=None):
    """x^2*y -> [(var, Fraction exponent), ...]."""
    out = []
    for factor in token.split("*"):
        factor = factor.strip()
        if not factor:
            raise ScenarioParseError(f"empty factor in monomial {token!r}", line_no)
        if "^" in factor:
            var, exp = factor.split("^", 1)
            if "/" in exp:
                num, den = exp.split("/", 1)
                e = Fraction(int(num), int(den))
            else:
                e = Fraction(int(exp))
        else:
            var, e = factor, Fraction(1)
        if not var.isidentifier():
            raise ScenarioParseError(f"bad variable name {var!r}", line_no)
        out.append((var, e))
    return out


def _keyvals(tokens, line_no):
    if len(tokens) % 2:
        raise ScenarioParseError("expected key value pairs", line_no)
    return {tokens[i]: tokens[i + 1] for i in range(0, len(tokens), 2)}


def parse_scenario(text: str) -> Scenario:
    sc = Scenario(source_text=text)
    seen_version = False
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        try:
            if head == "format_version":
                if int(tokens[1]) != FORMAT_VERSION:
                    raise ScenarioParseError(f"unsupported format_version {tokens[1]}", line_no)
                seen_version = True
            elif head == "prime":
                sc.prime = int(tokens[1])
            elif head == "precision":
                sc.precision = int(tokens[1])
            elif head == "depth":
                sc.depth = int(tokens[1])
            elif head == "budget":
                if tokens[1] not in ENV_BUDGETS:
                    raise ScenarioParseError(f"unknown budget {tokens[1]!r}", line_no)
                sc.budgets[tokens[1]] = int(tokens[2])
            elif head == "ring":
                name = tokens[1]
                kv = _keyvals(tokens[2:], line_no)
                spec = {"field": kv.get("field", "Fp"), "vars": []}
                if "vars" in kv:
                    for piece in kv["vars"].split(","):
                        parts = piece.split(":")
                        vname = parts[0]
                        depth = int(parts[1]) if len(parts) > 1 else 0
                        cap = Fraction(parts[2]) if len(parts) > 2 else None
                        spec["vars"].append((vname, depth, cap))
                if "total_cap" in kv:
                    spec["total_cap"] = Fraction(kv["total_cap"])
                sc.rings[name] = spec
            elif head == "frame":
                name = tokens[1]
                kv = _keyvals(tokens[2:], line_no)
                if "kind" not in kv:
                    raise ScenarioParseError("frame needs a kind", line_no)
                sc.frames[name] = kv
            elif head == "hom":
                name = tokens[1]
                kv = _keyvals(tokens[2:], line_no)
                sc.homs[name] = kv
            elif head == "window":
                name = tokens[1]
                kv = _keyvals(tokens[2:], line_no)
                sc.windows[name] = {
                    "frame": kv["frame"],
                    "d": int(kv["d"]),
                    "t": int(kv["t"]),
                    "psi": [int(x) for x in kv["psi"].split(",")],
                }
            elif head == "command":
                sc.commands.append(tokens[1:])
            else:
                raise ScenarioParseError(f"unknown directive {head!r}", line_no)
        except ScenarioParseError:
            raise
        except (IndexError, ValueError, KeyError) as exc:
            raise ScenarioParseError(f"malformed {head!r} directive: {exc}", line_no)
    if not seen_version:
        raise ScenarioParseError("missing format_version")
    return sc


def apply_env_budget_overrides(sc: Scenario) -> None:
    for key, env in ENV_BUDGETS.items():
        if env in os.environ:
            sc.budgets[key] = int(os.environ[env])


def validate_scenario(sc: Scenario):
    """Resolve names and build the live objects; semantic errors raise."""
    from .frames import (
        AdmissibleSequence,
        FrameHom,
        admissible_quotient_frame,
        lift_frame,
        witt_frame,
    )
    from .monomial import MonomialAlgebra
    from .pdenv import PDPresentation, build_pd_envelope, pd_frame
    from .residues import GaloisField, Residues
    from .windows import window_from_psi

    if sc.prime < 2:
        raise ScenarioSemanticError("prime is required")
    if sc.precision < 1:
        raise ScenarioSemanticError("precision is required")
    for key in ENV_BUDGETS:
        if key not in sc.budgets:
            raise ScenarioSemanticError(f"mandatory budget {key!r} missing")
    max_cap = sc.budgets["max_cap"]

    rings = {}
    for name, spec in sc.rings.items():
        fld = spec["field"]
        if fld == "Fp":
            cf = Residues(sc.prime, 1)
        elif fld == "Zpm":
            cf = Residues(sc.prime, sc.precision)
        elif fld.startswith("F") and fld[1:].isdigit():
            q = int(fld[1:])
            k = 0
            qq = q
            while qq % sc.prime == 0 and qq > 1:
                qq //= sc.prime
                k += 1
            if qq != 1 or k < 1:
                raise ScenarioSemanticError(f"field {fld} is not a power of the prime {sc.prime}")
            cf = Residues(sc.prime, 1) if k == 1 else GaloisField(sc.prime, k)
        else:
            raise ScenarioSemanticError(f"unknown field {fld!r}")
        for (v, depth, cap) in spec["vars"]:
            if cap is not None and cap > max_cap:
                raise BudgetExceeded(f"variable cap {cap} exceeds max_cap")
        rings[name] = MonomialAlgebra(cf, spec["vars"], total_cap=spec.get("total_cap"))

    frames = {}
    for name, kv in sc.frames.items():
        kind = kv["kind"]
        if kind == "witt":
            R = _lookup(rings, kv["ring"], "ring")
            fr = witt_frame(R, int(kv["length"]))
        elif kind == "lift":
            m = int(kv.get("precision", sc.precision))
            fr = lift_frame(Residues(sc.prime, m))
        elif kind == "quotient":
            S = _lookup(rings, kv["ring"], "ring")
            gens = []
            for tok in kv["ideal"].split(","):
                mono = parse_monomial(tok)
                elt = S.one
                for v, e in mono:
                    elt = S.mul(elt, S.gen(v, power=e))
                gens.append(elt)
            seq = AdmissibleSequence.minimal(S, gens, int(kv["length"]))
            fr = admissible_quotient_frame(seq, int(kv["length"]))
        elif kind == "pd":
            variables = tuple(kv["vars"].split(","))
            cap = int(kv["cap"])
            if cap > max_cap:
                raise BudgetExceeded(f"cap {cap} exceeds max_cap")
            gen_vecs = []
            for tok in kv["gens"].split(","):
                mono = parse_monomial(tok)
                vec = [0] * len(variables)
                for v, e in mono:
                    if e.denominator != 1:
                        raise ScenarioSemanticError("pd generators need integer exponents")
                    vec[variables.index(v)] += int(e)
                gen_vecs.append(tuple(vec))
            m = int(kv.get("precision", sc.precision))
            env = build_pd_envelope(PDPresentation(sc.prime, m, variables, tuple(gen_vecs), cap))
            fr = pd_frame(env)
        else:
            raise ScenarioSemanticError(f"unknown frame kind {kind!r}")
        # max_carrier gates the kinds whose operations enumerate the carrier;
        # pd frames are solved through coordinates and never enumerated
        if kind in ("witt", "lift", "quotient") and hasattr(fr.A, "size"):
            if fr.A.size() > sc.budgets["max_carrier"]:
                raise BudgetExceeded(f"frame {name!r} carrier exceeds max_carrier")
        frames[name] = fr

    homs = {}
    for name, kv in sc.homs.items():
        src = _lookup(frames, kv["from"], "frame")
        tgt = _lookup(frames, kv["to"], "frame")
        kind = kv["kind"]
        if kind == "identity":
            if src is not tgt:
                raise ScenarioSemanticError("identity hom needs equal frames")
            hom = FrameHom(src, tgt, fn=lambda x: x, name=name)
            hom.section = lambda x: x
        elif kind == "witt-to-quotient":
            if src.kind != "witt" or tgt.kind != "quotient":
                raise ScenarioSemanticError("witt-to-quotient needs a witt source and quotient target")
            hom = FrameHom(
                src,
                tgt,
                fn=tgt.A.reduce,
                cod_fn=tgt.sigma1_codomain.reduce,
                name=name,
            )
            hom.section = lambda x: x  # canonical representatives
        else:
            raise ScenarioSemanticError(f"unknown hom kind {kind!r}")
        homs[name] = hom

    windows = {}
    for name, spec in sc.windows.items():
        fr = _lookup(frames, spec["frame"], "frame")
        r = spec["d"] + spec["t"]
        entries = spec["psi"]
        if len(entries) != r * r:
            raise ScenarioSemanticError(f"window {name!r}: psi needs {r * r} entries")
        rows = [
            [fr.A.embed_int(entries[i * r + j]) for j in range(r)] for i in range(r)
        ]
        windows[name] = window_from_psi(fr, spec["d"], spec["t"], rows)

    for cmd in sc.commands:
        _validate_command(cmd, frames, homs, windows)
    return {"rings": rings, "frames": frames, "homs": homs, "windows": windows}


def _lookup(table, name, kind):
    if name not in table:
        raise ScenarioSemanticError(f"unresolved {kind} name {name!r}")
    return table[name]


def _validate_command(cmd, frames, homs, windows):
    from .verify import TAGS

    if not cmd:
        raise ScenarioSemanticError("empty command")
    op = cmd[0]
    if op == "validate":
        _lookup(frames, cmd[1], "frame")
    elif op == "classify":
        _lookup(frames, cmd[1], "frame")
        if len(cmd) < 4 or cmd[2] != "rank":
            raise ScenarioSemanticError("classify needs: classify <frame> rank <r>")
        int(cmd[3])
    elif op == "base-change":
        _lookup(windows, cmd[1], "window")
        if cmd[2] != "hom":
            raise ScenarioSemanticError("base-change needs: base-change <window> hom <h>")
        _lookup(homs, cmd[3], "hom")
    elif op == "hom":
        _lookup(windows, cmd[1], "window")
        _lookup(windows, cmd[2], "window")
        if len(cmd) >= 5 and cmd[3] == "mode" and cmd[4] not in ("window", "phi_module"):
            raise ScenarioSemanticError(f"unknown hom mode {cmd[4]!r}")
    elif op == "lift":
        _lookup(windows, cmd[1], "window")
        if cmd[2] != "hom":
            raise ScenarioSemanticError("lift needs: lift <window> hom <h>")
        _lookup(homs, cmd[3], "hom")
    elif op == "solve-connection":
        fr = _lookup(frames, cmd[1], "frame")
        if fr.kind != "pd":
            raise ScenarioSemanticError("solve-connection needs a pd frame")
        _lookup(windows, cmd[2], "window")
    elif op == "torsion-probe":
        fr = _lookup(frames, cmd[1], "frame")
        if fr.kind != "pd":
            raise ScenarioSemanticError("torsion-probe needs a pd frame")
    elif op == "verify":
        if len(cmd) < 2 or cmd[1] not in TAGS:
            raise ScenarioSemanticError(f"unknown verify tag {cmd[1] if len(cmd) > 1 else '?'}")
        for tok in cmd[2:]:
            if "=" not in tok:
                raise ScenarioSemanticError(f"verify parameters look like key=value, got {tok!r}")
    else:
        raise ScenarioSemanticError(f"unknown command {op!r}")
