"""Command-line front end.

Exit codes: 0 success, 2 input or usage error, 3 numerical failure.
JSON floats carry 17 significant digits and angles are in radians.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError, SymsphereError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    return s if any(c in s for c in ".en") else s + ".0"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with 17-digit floats (``inf`` becomes the string ``"inf"``)."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent, _level + 1) for v in seq) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _point(p) -> dict:
    return {"theta": p.theta, "phi": p.phi}


def _count(c):
    return "inf" if c is not None and math.isinf(c) else c


def _report_json(rep) -> dict:
    return {
        "g_max": rep.g_max,
        "e_g": rep.e_g,
        "cpp_count": _count(rep.count),
        "cpp_ring_theta": rep.ring,
        "cpps": [_point(p) for p in rep.cpps],
    }


def _read_state(path: str):
    from .symstate import state_from_json

    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})") from exc
    return state_from_json(obj)


def _emit(args, payload: dict, human: list) -> None:
    if getattr(args, "json", False):
        print(dumps(payload))
    else:
        print("\n".join(human))


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    args: argparse.Namespace


def _threads() -> int:
    raw = os.environ.get("SYMSPHERE_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        val = int(raw)
    except ValueError as exc:
        raise InputError("SYMSPHERE_THREADS must be a positive integer") from exc
    if val < 1:
        raise InputError("SYMSPHERE_THREADS must be a positive integer")
    return val


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_analyze(a) -> int:
    from .geometric import find_cpps, integral_check
    from .slocc import dc_class
    from .symstate import state_to_json, state_to_mps

    st = _read_state(a.state)
    mps = state_to_mps(st)
    rep = find_cpps(st, grid_deg=a.grid_deg)
    integral = integral_check(st, quad_order=a.quad_order)
    dc = dc_class(mps)
    payload = {
        "state": state_to_json(st),
        "mps": [_point(p) for p in mps.points],
        "clusters": [{"theta": p.theta, "phi": p.phi, "multiplicity": m} for p, m in mps.clusters],
        "dc_class": list(dc.partition),
        **_report_json(rep),
        "integral": integral,
        "integral_expected": 4 * math.pi / (st.n + 1),
    }
    human = [f"n = {st.n}", f"DC class: {dc}", "MPs (theta, phi):"]
    human += [f"  {p.theta:.12f} {p.phi:.12f}" for p in mps.points]
    human += [f"E_g = {rep.e_g:.12f}", f"G = {rep.g_max:.12f}", f"CPP count: {_count(rep.count)}"]
    human += [f"  CPP {p.theta:.12f} {p.phi:.12f}" for p in rep.cpps]
    human.append(f"sphere integral of g^2 = {integral:.12f} (expected {4 * math.pi / (st.n + 1):.12f})")
    _emit(a, payload, human)
    return EXIT_OK


def _cmd_equiv(a) -> int:
    from .slocc import lu_equivalence, slocc_equivalence

    s1, s2 = _read_state(a.a), _read_state(a.b)
    if a.tol is not None and not a.tol > 0:
        raise InputError("--tol must be positive")
    fn = lu_equivalence if a.relation == "lu" else slocc_equivalence
    v = fn(s1, s2, a.tol)
    payload = v.to_json()
    human = [v.relation, v.detail] if v.detail else [v.relation]
    _emit(a, payload, human)
    return EXIT_OK


def _cmd_catalog(a) -> int:
    from .catalog import catalog_names, named_state, verify_entry

    if a.action == "list":
        names = catalog_names()
        _emit(a, {"names": names}, names)
        return EXIT_OK
    if not a.name:
        raise InputError("catalog show needs a NAME")
    entry = named_state(a.name, n=a.n, k=a.k, param=a.param)
    payload = entry.to_json()
    human = [f"{entry.name} (n = {entry.n})"]
    if entry.e_g is not None:
        human.append(f"E_g = {entry.e_g:.12f}" + (f"  [{entry.e_g_expr}]" if entry.e_g_expr else ""))
    if entry.cpp_count is not None:
        human.append(f"CPPs: {_count(entry.cpp_count)} {entry.cpp_note}".rstrip())
    if entry.dc is not None:
        human.append(f"DC class: {entry.dc}")
    if a.verify:
        rep = verify_entry(entry)
        payload["verify"] = {"passed": rep.passed, "checks": [
            {"field": c.field, "passed": c.passed, "value": str(c.value), "reference": str(c.reference)}
            for c in rep.checks]}
        human += rep.lines()
    _emit(a, payload, human)
    return EXIT_OK


def _cmd_search(a) -> int:
    from .extremal import parse_family, search_max_entangled

    res = search_max_entangled(parse_family(a.family, a.n, a.restarts, a.seed))
    payload = res.to_json()
    payload["cpp_count"] = _count(res.report.count)
    payload["restart_e_g"] = list(res.restart_values)
    human = [f"family {payload['family']}, n = {a.n}", f"E_g = {res.e_g:.12f}",
             f"CPP count: {_count(res.report.count)}",
             "coefficients: " + " ".join(f"{c.real:+.10f}{c.imag:+.10f}j" for c in res.state.coeffs)]
    _emit(a, payload, human)
    return EXIT_OK


def _cmd_classical(a) -> int:
    from .classical import optimize_thomson, optimize_toth, pointset_to_state, thomson_energy, toth_objective
    from .geometric import find_cpps

    if a.problem == "thomson":
        ps = optimize_thomson(a.n, restarts=a.restarts, seed=a.seed)
    else:
        ps = optimize_toth(a.n, restarts=a.restarts, seed=a.seed)
    rep = find_cpps(pointset_to_state(ps))
    payload = {"problem": a.problem, "n": a.n, "seed": a.seed, "restarts": a.restarts,
               "thomson_energy": thomson_energy(ps), "min_chord": toth_objective(ps),
               **ps.to_json(), **_report_json(rep)}
    human = [f"{a.problem} n = {a.n}", f"Coulomb energy = {payload['thomson_energy']:.12f}",
             f"min chord = {payload['min_chord']:.12f}", f"E_g of the point state = {rep.e_g:.12f}"]
    _emit(a, payload, human)
    return EXIT_OK


def _cmd_lmg(a) -> int:
    from .geometric import find_cpps
    from .lmg import LmgParams, cpp_latitude, ground_state
    from .symstate import state_to_json, state_to_mps

    p = LmgParams.from_spin(a.spin, a.h, a.gamma)
    st = ground_state(p)
    mps = state_to_mps(st)
    rep = find_cpps(st, grid_deg=a.grid_deg)
    lat = cpp_latitude(a.h / a.gamma)
    payload = {"spin": p.s, "h": p.h, "gamma": p.gamma, "state": state_to_json(st),
               "mps": [_point(q) for q in mps.points], **_report_json(rep),
               "continuum_cpp_theta": lat}
    human = [f"s = {p.s}, h = {p.h}, gamma = {p.gamma}", f"E_g = {rep.e_g:.12f}",
             f"CPP count: {_count(rep.count)}"]
    human += [f"  CPP {q.theta:.12f} {q.phi:.12f}" for q in rep.cpps]
    human.append(f"continuum CPP latitude = {lat:.12f}")
    _emit(a, payload, human)
    return EXIT_OK


def _cmd_sample(a) -> int:
    from .geometric import sample_sphere

    try:
        n_t, n_p = (int(v) for v in a.resolution.lower().split("x"))
    except ValueError as exc:
        raise InputError("--resolution must look like 91x180") from exc
    st = _read_state(a.state)
    samples = sample_sphere(st, a.function, (n_t, n_p))
    try:
        with open(a.out, "w", encoding="utf-8", newline="") as fh:
            samples.to_csv(fh)
    except OSError as exc:
        raise InputError(f"cannot write {a.out}: {exc.strerror}") from exc
    print(f"wrote {n_t * n_p} samples to {a.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with code 2
        self.print_usage(sys.stderr)
        raise InputError(message)


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="symsphere", description="Majorana-representation toolkit for symmetric multiqubit states.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    s = sub.add_parser("analyze", help="MPs, DC class, CPPs and E_g of a state file")
    s.add_argument("--state", required=True)
    s.add_argument("--grid-deg", type=_positive(float), default=1.0)
    s.add_argument("--quad-order", type=_positive(int), default=64)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("equiv", help="SLOCC or LU equivalence of two state files")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--relation", choices=("slocc", "lu"), default="slocc")
    s.add_argument("--tol", type=_positive(float), default=None)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_equiv)

    s = sub.add_parser("catalog", help="named reference states")
    s.add_argument("action", choices=("list", "show"))
    s.add_argument("name", nargs="?")
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--param", type=float)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_catalog)

    s = sub.add_parser("search", help="search an ansatz family for the most entangled state")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--family", required=True)
    s.add_argument("--restarts", type=_positive(int), default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_search)

    s = sub.add_parser("classical", help="Thomson or Toth point configurations")
    s.add_argument("--problem", choices=("thomson", "toth"), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--restarts", type=_positive(int), default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_classical)

    s = sub.add_parser("lmg", help="LMG ground state")
    s.add_argument("--spin", type=float, required=True)
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--gamma", type=_positive(float), default=1.0)
    s.add_argument("--grid-deg", type=_positive(float), default=1.0)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_lmg)

    s = sub.add_parser("sample", help="sample g^2 or g^(2/3) on a theta-phi grid into CSV")
    s.add_argument("--state", required=True)
    s.add_argument("--function", choices=("amp2", "vol"), default="amp2")
    s.add_argument("--resolution", default="91x180")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sample)
    return p


def run(argv: list | None = None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit code."""
    try:
        _threads()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except NumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, SymsphereError) as exc:
        name = type(exc).__name__
        print(f"error: {name}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
