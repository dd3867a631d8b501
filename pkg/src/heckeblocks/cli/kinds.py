"""Per-kind expansion, execution and explanation of cases.

Every instance is a plain dict of picklable values so it can be shipped to a
worker process.  ``run_instance`` returns report entries of the form
``{identity, status, residual, relations_used, prolongation_order}``.
"""

from __future__ import annotations

from fractions import Fraction

from .cases import SYMBOLIC, CaseSpec, sweep_axes

RESIDUAL_LIMIT = 4000


def _text(x) -> str:
    s = str(x)
    if len(s) > RESIDUAL_LIMIT:
        s = s[:RESIDUAL_LIMIT] + f"...[{len(s)} chars]"
    return s


def _entry(identity: str, zero: bool, residual, relations_used: int = 0, order: int = 0) -> dict:
    return {
        "identity": identity,
        "status": "verified" if zero else "failed",
        "residual": "0" if zero else _text(residual),
        "relations_used": int(relations_used),
        "prolongation_order": int(order),
    }


def _int(v, key: str) -> int:
    if not isinstance(v, Fraction) or v.denominator != 1:
        raise ValueError(f"{key} must be an integer, got {v}")
    return int(v)


def _rational(v, key: str) -> Fraction:
    if not isinstance(v, Fraction):
        raise ValueError(f"{key} must be a rational number, got {v!r}")
    return v


def _default(params: dict, key: str, value) -> None:
    params.setdefault(key, value)


def _range(lo: int, hi: int) -> list:
    return [Fraction(v) for v in range(lo, hi + 1)]


# ---------------------------------------------------------------------------
# expansion (validates every binding)


def expand(spec: CaseSpec) -> list:
    fn = _EXPAND[spec.kind]
    return fn(dict(spec.params), spec)


def _flavors(spec: CaseSpec) -> list:
    return list(spec.flavor) if spec.flavor else ["pgl2"]


def _x_virasoro(p, spec):
    _default(p, "m", _range(-2, 2))
    _default(p, "n", _range(-2, 2))
    _default(p, "depth", [Fraction(4)])
    out = []
    for d in sweep_axes(p, ["m", "n", "depth"]):
        m, n, depth = _int(d["m"], "m"), _int(d["n"], "n"), _int(d["depth"], "depth")
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        if m < n:  # antisymmetry covers m > n; m = n is trivial
            out.append({"m": m, "n": n, "depth": depth})
    if not out:
        raise ValueError("no pair with m < n in the given ranges")
    return out


def _x_currents(p, spec):
    _default(p, "n", _range(-2, 2))
    _default(p, "m", _range(-2, 2))
    _default(p, "basis", ["e", "h", "f"])
    _default(p, "depth", [Fraction(2)])
    out = []
    for d in sweep_axes(p, ["n", "m", "basis", "depth"]):
        if d["basis"] not in ("e", "h", "f"):
            raise ValueError(f"basis must be e, h or f, got {d['basis']!r}")
        out.append({"n": _int(d["n"], "n"), "m": _int(d["m"], "m"), "basis": d["basis"], "depth": _int(d["depth"], "depth")})
    return out


def _x_nilpotent(p, spec):
    _default(p, "a", [Fraction(1)])
    _default(p, "x", ["e"])
    _default(p, "j", [Fraction(1)])
    _default(p, "n", _range(-1, 1))
    _default(p, "depth", [Fraction(3)])
    out = []
    for d in sweep_axes(p, ["a", "x", "j", "n", "depth"]):
        if d["x"] not in ("e", "f"):
            raise ValueError(f"x must be e or f, got {d['x']!r}")
        j = _int(d["j"], "j")
        if j < 1:
            raise ValueError("j must be >= 1 (pro-unipotent element)")
        out.append({"a": _rational(d["a"], "a"), "x": d["x"], "j": j, "n": _int(d["n"], "n"), "depth": _int(d["depth"], "depth")})
    return out


def _x_coweight(p, spec):
    _default(p, "lambda", [Fraction(v) for v in (-2, -1, 1, 2)])
    _default(p, "n", _range(-2, 2))
    _default(p, "depth", [Fraction(3)])
    _default(p, "method", ["flow"])
    out = []
    for d in sweep_axes(p, ["lambda", "n", "depth", "method"]):
        if d["method"] not in ("flow", "matrix"):
            raise ValueError("method must be flow or matrix")
        out.append({"lambda": _int(d["lambda"], "lambda"), "n": _int(d["n"], "n"), "depth": _int(d["depth"], "depth"), "method": d["method"]})
    return out


def _x_minuscule(p, spec):
    _default(p, "lambda", [Fraction(1)])
    _default(p, "depth", [Fraction(3)])
    out = []
    for d in sweep_axes(p, ["lambda", "depth"]):
        lam = _int(d["lambda"], "lambda")
        if lam != 1:
            raise ValueError(f"alpha(lambda) = {lam} is not minuscule dominant nonzero (need alpha(lambda) = 1)")
        out.append({"lambda": lam, "depth": _int(d["depth"], "depth")})
    return out


def _x_factorize(p, spec):
    _default(p, "a", [Fraction(1)])
    _default(p, "mu", [Fraction(0)])
    _default(p, "lambda", [Fraction(1)])
    _default(p, "regime", ["auto"])
    out = []
    skipped = 0
    for flavor in _flavors(spec):
        for d in sweep_axes(p, ["a", "mu", "lambda", "regime"]):
            a = _rational(d["a"], "a")
            if a == 0:
                raise ValueError("a must be nonzero")
            mu, lam = _int(d["mu"], "mu"), _int(d["lambda"], "lambda")
            if d["regime"] not in ("auto", "generic", "left", "right"):
                raise ValueError("regime must be auto, generic, left or right")
            if flavor == "sl2" and (mu % 2 or lam % 2):
                skipped += 1
                continue
            js = [_int(j, "j") for j in p["j"]] if "j" in p else list(range(0, lam))
            for j in js:
                out.append({"a": a, "mu": mu, "lambda": lam, "j": j, "flavor": flavor, "regime": d["regime"]})
    if not out:
        raise ValueError("no valid instance (SL2 needs even pairings alpha(mu), alpha(lambda))")
    spec.params["_skipped"] = skipped
    return out


def _x_hecke(p, spec):
    from ..roots import Coweight, hecke_class, root_datum

    kind = p.get("type", ["A1"])[0]
    if not isinstance(kind, str) or len(kind) < 2 or not kind[1:].isdigit():
        raise ValueError(f"type must look like A1, B3, G2, got {kind!r}")
    datum = root_datum(kind[0], int(kind[1:]))
    for key in ("mu", "lambda", "j"):
        if key not in p:
            raise ValueError(f"hecke-class needs {key}=")

    def cw(key):
        vals = p[key][0]
        if len(vals) != datum.rank or not all(isinstance(v, Fraction) for v in vals):
            raise ValueError(f"{key} needs {datum.rank} rational coordinates")
        return tuple(vals)

    mu, lam = cw("mu"), cw("lambda")
    root = p["root"][0] if "root" in p else tuple(Fraction(c) for c in datum.theta)
    root = tuple(_int(v, "root") for v in root)
    out = []
    for j in p["j"]:
        inst = {"type": kind, "mu": mu, "lambda": lam, "root": root, "j": _int(j, "j")}
        if "nu" in p:
            inst["nu"] = cw("nu")
        hecke_class(Coweight(datum, mu), Coweight(datum, lam), root, inst["j"])  # precondition check
        out.append(inst)
    return out


def _chis(value, N: int) -> list:
    """``sym`` -> fresh symbols; ``equal`` -> one shared symbol; ``a:b:c`` per point; a rational -> all points."""
    if value == SYMBOLIC:
        return [None] * N
    if value == "equal":
        return [None] + ["chi1"] * (N - 1)
    if isinstance(value, Fraction):
        return [value] * N
    parts = str(value).split(":")
    if len(parts) != N:
        raise ValueError(f"chi={value} gives {len(parts)} weights for N={N}")
    out = []
    for part in parts:
        if part == SYMBOLIC:
            out.append(None)
        elif part.startswith("chi"):
            out.append(part)
        else:
            try:
                out.append(Fraction(part))
            except ValueError:
                raise ValueError(f"bad weight {part!r}") from None
    return out


def _level(v):
    if v == SYMBOLIC:
        return None
    k = _rational(v, "k")
    if k == -2:
        raise ValueError("critical level k = -2 is excluded")
    return k


def _mutation(v):
    from ..kz import MUTATIONS

    if v == "none":
        return None
    if v not in MUTATIONS:
        raise ValueError(f"unknown mutation {v!r} (expected none or one of {', '.join(MUTATIONS)})")
    return v


def _x_ward(p, spec):
    _default(p, "N", _range(1, 3))
    _default(p, "chi", [SYMBOLIC])
    _default(p, "k", [SYMBOLIC])
    _default(p, "mutation", ["none"])
    _default(p, "order", [Fraction(1)])
    out = []
    for d in sweep_axes(p, ["N", "chi", "k", "mutation", "order"]):
        N = _int(d["N"], "N")
        if N < 1:
            raise ValueError("N must be >= 1")
        out.append(
            {"N": N, "chi": _chis(d["chi"], N), "k": _level(d["k"]), "mutation": _mutation(d["mutation"]), "order": _int(d["order"], "order")}
        )
    return out


def _x_kz(p, spec):
    _default(p, "N", _range(1, 3))
    _default(p, "chi", [SYMBOLIC])
    _default(p, "k", [SYMBOLIC])
    _default(p, "mutation", ["none"])
    _default(p, "rounds", [Fraction(1)])
    out = []
    for d in sweep_axes(p, ["N", "chi", "k", "mutation", "rounds"]):
        N = _int(d["N"], "N")
        if N < 1:
            raise ValueError("N must be >= 1")
        idx = [_int(i, "i") for i in p["i"]] if "i" in p else list(range(1, N + 1))
        for i in idx:
            if not 1 <= i <= N:
                raise ValueError(f"i={i} out of range 1..{N}")
            out.append(
                {"N": N, "i": i, "chi": _chis(d["chi"], N), "k": _level(d["k"]), "mutation": _mutation(d["mutation"]), "rounds": _int(d["rounds"], "rounds")}
            )
    return out


def _x_two_point(p, spec):
    _default(p, "chi", [Fraction(1, 2)])
    _default(p, "k", [Fraction(1)])
    out = []
    for d in sweep_axes(p, ["chi", "k"]):
        chi = None if d["chi"] == SYMBOLIC else _rational(d["chi"], "chi")
        if d["k"] == SYMBOLIC:
            raise ValueError("two-point needs a rational level k")
        out.append({"chi": chi, "k": _level(d["k"])})
    return out


def _x_casimir(p, spec):
    _default(p, "points", [Fraction(3)])
    out = []
    for d in sweep_axes(p, ["points"]):
        n = _int(d["points"], "points")
        if n < 2:
            raise ValueError("points must be >= 2")
        out.append({"points": n})
    return out


_EXPAND = {
    "virasoro": _x_virasoro,
    "currents": _x_currents,
    "conjugation-nilpotent": _x_nilpotent,
    "conjugation-coweight": _x_coweight,
    "minuscule": _x_minuscule,
    "factorize": _x_factorize,
    "hecke-class": _x_hecke,
    "ward-transport": _x_ward,
    "kz-transport": _x_kz,
    "two-point": _x_two_point,
    "casimir": _x_casimir,
}


# ---------------------------------------------------------------------------
# execution


def _state_sweep(identity: str, fn, depth: int) -> list:
    from ..affine import states_up_to_depth

    states = states_up_to_depth(depth)
    for v in states:
        r = fn(v)
        if not r.is_zero():
            return [_entry(f"{identity} on {len(states)} states depth<={depth}", False, f"{v}: {r}", len(states))]
    return [_entry(f"{identity} on {len(states)} states depth<={depth}", True, 0, len(states))]


def _weights(inst):
    from ..kz import WeightParams

    return WeightParams(inst["N"], inst["chi"], inst["k"])


def run_instance(kind: str, inst: dict) -> list:
    if kind == "virasoro":
        from ..affine import virasoro_residual

        m, n = inst["m"], inst["n"]
        return _state_sweep(f"[S_{m},S_{n}]", lambda v: virasoro_residual(m, n, v), inst["depth"])
    if kind == "currents":
        from ..affine import current_residual

        n, b, m = inst["n"], inst["basis"], inst["m"]
        return _state_sweep(f"[S_{n},{b}_{m}]", lambda v: current_residual(n, b, m, v), inst["depth"])
    if kind == "conjugation-nilpotent":
        from ..affine import conjugation_nilpotent_residual

        a, x, j, n = inst["a"], inst["x"], inst["j"], inst["n"]
        return _state_sweep(
            f"Ad(exp({a}*{x}*t^{j}))S_{n}", lambda v: conjugation_nilpotent_residual(a, x, j, n, v), inst["depth"]
        )
    if kind == "conjugation-coweight":
        from ..affine import conjugation_coweight_residual

        lam, n, mat = inst["lambda"], inst["n"], inst["method"] == "matrix"
        return _state_sweep(
            f"Ad(t^(alpha={lam}))S_{n}", lambda v: conjugation_coweight_residual(lam, n, v, mat), inst["depth"]
        )
    if kind == "minuscule":
        from ..affine import verify_minuscule_presentation

        rep = verify_minuscule_presentation(inst["lambda"], inst["depth"])
        out = [_entry(f"relation {name}", ok, "relation fails") for name, ok in rep.relations.items()]
        out.append(_entry(f"{rep.generator}*lw is singular", rep.generator_singular, "not singular"))
        mism = rep.mismatches
        detail = "; ".join(
            f"(D={D},q={q}) V={rep.dims_vacuum[(D, q)]} image={rep.dims_image.get((D, q))} M/N={rep.dims_quotient.get((D, q))}"
            for D, q in mism
        )
        out.append(_entry(f"bigraded dimensions V^lambda = M/N, D<={inst['depth']}", not mism, detail, len(rep.dims_vacuum)))
        return out
    if kind == "factorize":
        from ..loops import birkhoff_factorize, check

        regime = None if inst["regime"] == "auto" else inst["regime"]
        f = birkhoff_factorize(inst["a"], inst["mu"], inst["lambda"], inst["j"], inst["flavor"], regime)
        c = check(f)
        flags = {k: getattr(c, k) for k in ("product", "A_regular_at_infinity", "B_regular_at_zero", "class_match")}
        bad = ", ".join(k for k, ok in flags.items() if not ok)
        ident = f"factorize a={inst['a']} alpha(mu)={inst['mu']} alpha(lambda)={inst['lambda']} j={inst['j']} {inst['flavor']} [{f.regime}] nu: {f.nu}"
        return [_entry(ident, bool(c), f"failed: {bad}")]
    if kind == "hecke-class":
        from ..roots import Coweight, dominant_rep, hecke_class, hecke_formula, root_datum, weyl_orbit

        datum = root_datum(inst["type"][0], int(inst["type"][1:]))
        mu, lam = Coweight(datum, inst["mu"]), Coweight(datum, inst["lambda"])
        raw = hecke_formula(mu, lam, inst["root"], inst["j"])
        nu = hecke_class(mu, lam, inst["root"], inst["j"])
        ok = nu.is_dominant() and nu.coeffs in weyl_orbit(raw)
        why = "not dominant or not in the Weyl orbit"
        if "nu" in inst and tuple(inst["nu"]) != nu.coeffs:
            ok, why = False, f"expected {Coweight(datum, inst['nu'])}, got {nu}"
        return [_entry(f"hecke-class {inst['type']} mu={mu} lambda={lam} root={inst['root']} j={inst['j']}: {nu}", ok, why)]
    if kind == "ward-transport":
        from ..kz import ward_transport

        rep = ward_transport(_weights(inst), inst["mutation"], inst["order"])
        return [
            _entry(f"{rep.case} {r.identity}", r.zero, r.residual, r.relations_used, r.prolongation_order) for r in rep.results
        ]
    if kind == "kz-transport":
        from ..kz import kz_transport

        rep = kz_transport(_weights(inst), inst["i"], inst["mutation"], inst["rounds"])
        return [
            _entry(f"{rep.case} {r.identity}", r.zero, r.residual, r.relations_used, r.prolongation_order) for r in rep.results
        ]
    if kind == "two-point":
        from ..kz import two_point_solution

        chk = two_point_solution(inst["chi"], inst["k"])
        tag = f"two-point chi={'sym' if inst['chi'] is None else inst['chi']} k={inst['k']}"
        out = [_entry(f"{tag} 2-point {name}", r.is_zero(), r) for name, r in chk.two_point.items()]
        out += [_entry(f"{tag} transported 3-point {name}", r.is_zero(), r) for name, r in chk.transported.items()]
        return out
    if kind == "casimir":
        from ..kz import casimir_properties

        return [_entry(name, r.is_zero(), r) for name, r in casimir_properties(inst["points"]).items()]
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# explanation transcripts


def explain_instance(kind: str, inst: dict) -> str:
    lines = [f"# {kind} " + " ".join(f"{k}={'none' if k == 'mutation' and v is None else _show(v)}" for k, v in inst.items())]
    add = lines.append
    if kind in ("ward-transport", "kz-transport"):
        from ..kz import (
            hecke_prefactor,
            kz_relation_set,
            kz_residual,
            to_formal,
            ward_ops_extended,
            ward_relations,
            ward_residuals,
        )

        params = _weights(inst)
        mut = inst["mutation"]
        add(f"parameters: {params.describe()} (weight of point i is 2*chi_i; point {params.N + 1} has chi = k/2)")
        add(f"prefactor: {hecke_prefactor(params, mut)}")
        if kind == "ward-transport":
            R = ward_relations(params)
            add(f"relations ({len(R.relations)}): N-point Ward identities on Psi")
            for r in R.relations:
                add(f"  {r} = 0")
            ops = ward_ops_extended(params)
            res = ward_residuals(params, mut)
            add(f"residuals ({len(res)}): (N+1)-point operators applied to Y, in formal coordinates")
            for g, r in res.items():
                add(f"  ward-{g}: operator {ops[g]}")
                add(f"    residual = {to_formal(r, params, mut)}")
        else:
            R = kz_relation_set(params)
            add(f"relations ({len(R.relations)}): Ward prolonged once plus KZ")
            for r in R.relations:
                add(f"  {r} = 0")
            add(f"residual kz-{inst['i']} = {to_formal(kz_residual(params, inst['i'], mut), params, mut)}")
        return "\n".join(lines)
    if kind == "factorize":
        from ..exact import laurent_mat_mul
        from ..loops import birkhoff_factorize, t_coweight_matrix
        from ..roots import pairing

        regime = None if inst["regime"] == "auto" else inst["regime"]
        f = birkhoff_factorize(inst["a"], inst["mu"], inst["lambda"], inst["j"], inst["flavor"], regime)
        t_nu = t_coweight_matrix(pairing((1,), f.nu), f.A.flavor)
        add(f"regime: {f.regime}")
        add(f"source: {f.source()} = {f.source().realize()}")
        add(f"A = {f.A} = {f.A.realize()}")
        add(f"t^nu: nu = {f.nu} -> {t_nu}")
        add(f"B = {f.B} = {f.B.realize()}")
        add(f"A * t^nu * B = {laurent_mat_mul(laurent_mat_mul(f.A.realize(), t_nu), f.B.realize()).normalized()}")
        return "\n".join(lines)
    if kind == "hecke-class":
        from ..roots import Coweight, dominant_rep, hecke_formula, root_datum

        datum = root_datum(inst["type"][0], int(inst["type"][1:]))
        mu, lam = Coweight(datum, inst["mu"]), Coweight(datum, inst["lambda"])
        raw = hecke_formula(mu, lam, inst["root"], inst["j"])
        dom, word = dominant_rep(raw)
        add(f"nu before dominance: {raw}")
        add(f"reflections: {' '.join(f's{i + 1}' for i in word) or 'none'}")
        add(f"nu after dominance: {dom}")
        return "\n".join(lines)
    if kind in ("virasoro", "currents", "conjugation-nilpotent", "conjugation-coweight"):
        from ..affine import ModeElement, ModuleState, ad_loop, correction_mode, scaled_sugawara_apply, spectral_flow
        from ..loops import LoopElement

        vac = ModuleState.vacuum()
        add("Sugawara operators are used in the scaled form S~_n = 2(k+2) S_n.")
        if kind == "virasoro":
            m, n = inst["m"], inst["n"]
            add(f"identity: [S~_{m},S~_{n}] = 2(k+2)({m - n}) S~_{m + n} + delta (m^3-m) k(k+2)")
            add(f"S~_{n} vac = {scaled_sugawara_apply(n, vac)}")
            add(f"S~_{m} vac = {scaled_sugawara_apply(m, vac)}")
        elif kind == "currents":
            add(f"identity: [S~_{inst['n']}, {inst['basis']}_{inst['m']}] = -2(k+2)({inst['m']}) {inst['basis']}_{inst['m'] + inst['n']}")
        elif kind == "conjugation-nilpotent":
            a, x, j, n = inst["a"], inst["x"], inst["j"], inst["n"]
            g = LoopElement.exp_nilpotent(1 if x == "e" else -1, a, j, "SL2")
            add(f"g = {g}")
            for b in ("e", "h", "f"):
                for mm in (-j, 0):
                    X = ModeElement.mode(b, mm)
                    add(f"  Ad(g) {X} = {ad_loop(g, X)}")
            add(f"correction t^(n+1) (dg/dt) g^-1 = {correction_mode(x, a, j, n)}")
        else:
            lam, n = inst["lambda"], inst["n"]
            for b in ("e", "h", "f"):
                X = ModeElement.mode(b, 0)
                add(f"  Ad(t^lambda) {X} = {spectral_flow(X, lam)}")
            add(f"correction lambda_{n} + delta (k/2) kappa(lambda,lambda) with kappa(lambda,lambda) = {Fraction(lam * lam, 2)}")
        return "\n".join(lines)
    if kind == "minuscule":
        from ..affine import verify_minuscule_presentation

        rep = verify_minuscule_presentation(inst["lambda"], inst["depth"])
        for name, ok in rep.relations.items():
            add(f"relation {name}: {ok}")
        add(f"generator {rep.generator}: singular = {rep.generator_singular}")
        for note in rep.notes:
            add(f"note: {note}")
        add("(D, q): dim V^lambda / rank of psi / dim M/N")
        for key in sorted(rep.dims_vacuum):
            add(f"  {key}: {rep.dims_vacuum[key]} / {rep.dims_image[key]} / {rep.dims_quotient[key]}")
        return "\n".join(lines)
    if kind == "two-point":
        from ..kz import two_point_solution

        chk = two_point_solution(inst["chi"], inst["k"])
        add(f"Psi2 = {chk.psi}")
        for name, r in chk.two_point.items():
            add(f"2-point {name}: {r}")
        for name, r in chk.transported.items():
            add(f"3-point {name}: {r}")
        return "\n".join(lines)
    if kind == "casimir":
        from ..exact import VarTable, Polynomial
        from ..kz import casimir_omega

        T = VarTable(["x1", "x2", "chi1", "chi2"])
        add(f"Omega_12 = {casimir_omega(1, 2, Polynomial.var(T, 'chi1'), Polynomial.var(T, 'chi2'), T)}")
        return "\n".join(lines)
    raise ValueError(f"unknown kind {kind!r}")


def _show(v) -> str:
    if v is None:
        return SYMBOLIC
    if isinstance(v, (list, tuple)):
        return ":".join(_show(x) for x in v)
    return str(v)
