"""Command-line front end.

Every command prints (or writes with ``--out``) one canonical JSON report:
sorted keys, compact separators, trailing newline.  Wall-clock timing is
only included with ``--timing`` so that reports are reproducible byte for
byte.  Exit codes: 0 ok, 1 invalid input, 2 undecidable, 3 I/O error,
64 usage error, 70 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import chow, geometry, monad as mon, net as nets
from .algebra import GF, QQ, Field, PrimeField, field_from_json
from .errors import InstantonLabError, UndecidableError, ValidationError

SCHEMA = 1
EXIT_OK, EXIT_INVALID, EXIT_UNDECIDABLE, EXIT_IO, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3, 64, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _version() -> str:
    try:
        return version("instanton-lab")
    except PackageNotFoundError:
        return "unknown"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# input helpers


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    # accept a full report as input as well as a bare payload
    if isinstance(obj, dict) and "result" in obj and "schema" in obj:
        obj = obj["result"]
    return obj


def _field(args, default: Field | None = None) -> Field:
    if getattr(args, "p", None) is not None:
        return GF(args.p)
    if default is not None:
        return default
    raise ValidationError("a prime --p is required")


def _coords(text: str, fld: Field, length: int, what: str) -> list:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != length:
        raise ValidationError(f"{what} needs {length} comma-separated coordinates")
    return [fld(s) for s in parts]


def _load_monad(args, need_prime: bool = True) -> mon.InstantonMonad:
    obj = _load_json(args.monad)
    fld = field_from_json(obj.get("field", "Q"))
    if isinstance(fld, PrimeField):
        if args.p is not None and args.p != fld.p:
            raise ValidationError(f"monad is over F_{fld.p}, --p {args.p} given")
        return mon.validate_monad(obj["A"], obj["B"], fld, n=obj.get("n"))
    if need_prime or args.p is not None:
        if args.p is None:
            raise ValidationError("a rational monad needs --p to reduce to")
        return mon.validate_monad(obj["A"], obj["B"], GF(args.p), n=obj.get("n"))
    raise ValidationError("a rational monad needs --p for the rank scan")


def _symplectic(monad: mon.InstantonMonad, seed: int) -> mon.SymplecticStructure:
    sym = mon.find_symplectic(monad, seed=seed)
    if sym is None:
        raise UndecidableError("no invertible antisymmetric J found for this monad")
    return sym


def _net_from_args(args) -> tuple[nets.NetOfQuadrics, tuple | None]:
    """Net from ``--net``, or built at ``--point`` from ``--monad``; second item is (monad, J, point)."""
    if getattr(args, "net", None):
        obj = _load_json(args.net)
        fld = _field(args, field_from_json(obj["field"]) if "field" in obj else None)
        return nets.NetOfQuadrics.from_json(obj, fld), None
    if getattr(args, "monad", None) and getattr(args, "point", None):
        m = _load_monad(args)
        sym = _symplectic(m, args.seed)
        pt = geometry.ProjPoint(m.field, _coords(args.point, m.field, 4, "--point"))
        net = nets.net_at_point(nets.hypernet_from_monad(m, sym), pt)
        return net, (m, sym, pt)
    raise ValidationError("give --net FILE, or --monad FILE with --point")


def _matrix_json(fld: Field, arr) -> list:
    return [[fld.encode(v) for v in row] for row in np.asarray(arr).tolist()]


def _vector_json(fld: Field, vec) -> list:
    return [fld.encode(v) for v in np.asarray(vec).tolist()]


def _line_json(line: geometry.PluckerLine) -> list:
    return [line.field.encode(c) for c in line.p]


def _point_json(pt: geometry.ProjPoint) -> list:
    return [pt.field.encode(c) for c in pt.coords]


# --------------------------------------------------------------------------
# commands


def cmd_fixture_thooft(args):
    fld = _field(args, QQ)
    m = mon.special_thooft_monad(args.n, fld, validate=isinstance(fld, PrimeField))
    return m.to_json()


def cmd_scan_multijump(args):
    m = _load_monad(args)
    found = mon.multijump_scan(m, jobs=args.jobs)
    return {
        "lines_scanned": geometry.count_lines(m.field.p),
        "matches": [{"plucker": _line_json(ln), "order": order} for ln, order in found],
    }


def cmd_scan_order(args):
    m = _load_monad(args)
    line = geometry.PluckerLine(m.field, _coords(args.line, m.field, 6, "--line"))
    sym = _symplectic(m, args.seed) if args.symplectic else None
    order = mon.jumping_order(m, line, sym)
    if order == mon.UNDECIDED:
        raise UndecidableError("order is 0 or 1; pass --symplectic to decide it through the net corank")
    return {"plucker": _line_json(line), "h0": mon.restricted_h0(m, line, 0), "order": order}


def cmd_scan_planes(args):
    m = _load_monad(args)
    profiles = mon.plane_profiles(m, mon.multijump_scan(m, jobs=args.jobs))
    n = m.n
    stable_clean = [pr for pr in profiles if pr.stable and pr.max_order < 4]
    return {
        "planes": len(profiles),
        "stable_planes": sum(pr.stable for pr in profiles),
        "max_multijump_stable_without_order4": max((pr.multijump for pr in stable_clean), default=0),
        "max_order_ge_3": max((pr.order3 for pr in profiles), default=0),
        "bound_multijump": 2 * n - 6,
        "bound_order_ge_3": n - 3,
        "profiles": [pr.to_json() for pr in profiles if pr.multijump or not pr.stable],
    }


def cmd_net_at_point(args):
    net, ctx = _net_from_args(args)
    m, sym, pt = ctx
    out = net.to_json()
    out["point"] = _point_json(pt)
    out["complement_basis"] = _matrix_json(net.field, net.basis)
    out["symplectic_solution_dim"] = sym.solution_dim
    disc = nets.discriminant(net)
    out["discriminant"] = {
        "degree": disc.degree,
        "terms": [{"exponents": list(e), "coeff": net.field.encode(c)} for e, c in disc.terms],
    }
    return out


def cmd_net_stability(args):
    net, _ = _net_from_args(args)
    result = nets.net_stability(net, args.p)
    return result.to_json(net.field)


def cmd_theta_spaces(args):
    net, _ = _net_from_args(args)
    spaces = nets.theta_section_spaces(net)
    n = net.n
    return {"n": n, "dims": spaces.dims, "h1_oc1": nets.h1_oc1_dim(net)}


def cmd_theta_beta(args):
    net, _ = _net_from_args(args)
    beta = nets.beta_system(net)
    fld = net.field
    return {"r": beta.r, "stacked_rank": beta.stacked_rank(), "forms": [_matrix_json(fld, a) for a in beta.forms]}


def _pair_json(fld, obs: nets.Obstruction, s, t) -> dict:
    return {
        "s": _vector_json(fld, s),
        "t": _vector_json(fld, t),
        "beta": _vector_json(fld, obs.value),
        "vanishes": obs.vanishes,
        "in_image": obs.in_image,
    }


def cmd_theta_obstruction(args):
    net, ctx = _net_from_args(args)
    fld = net.field
    beta = nets.beta_system(net)
    d = beta.spaces.theta2.dim
    pairs = []
    if args.s or args.t:
        if not (args.s and args.t):
            raise ValidationError("--s and --t go together")
        pairs.append((fld.array(_coords(args.s, fld, d, "--s")), fld.array(_coords(args.t, fld, d, "--t"))))
    rng = np.random.default_rng(args.seed)
    for _ in range(args.random):
        pairs.append((fld.random_array(rng, d), fld.random_array(rng, d)))
    out = {"pairs": [_pair_json(fld, nets.splitting_obstruction(beta, s, t), s, t) for s, t in pairs]}
    if ctx is not None:
        m, sym, pt = ctx
        K = nets.distinguished_pair(m, sym, pt, beta.spaces)
        out["distinguished"] = _pair_json(fld, nets.splitting_obstruction(beta, K[0], K[1]), K[0], K[1])
    return out


def cmd_theta_diagnose(args):
    net, ctx = _net_from_args(args)
    fld = net.field
    beta = nets.beta_system(net)
    rng = np.random.default_rng(args.seed)
    K = nets.random_kernel_pair(beta, rng)
    out = {"generic": nets.singularity_diagnostics(beta, K) | {"K": _matrix_json(fld, K)}}
    if ctx is not None:
        m, sym, pt = ctx
        Kd = nets.distinguished_pair(m, sym, pt, beta.spaces)
        out["distinguished"] = nets.singularity_diagnostics(beta, Kd) | {"K": _matrix_json(fld, Kd)}
    g = out["generic"]
    out["identity"] = {
        "theta_moduli_dim": g["theta_moduli_dim"],
        "projective_fibre_dim": g["projective_fibre_dim"],
        "tangent_dim": g["tangent_dim"],
        "total": g["total_dim"],
        "text": f"{g['theta_moduli_dim']} + {g['projective_fibre_dim']} + {g['tangent_dim']} = {g['total_dim']}",
    }
    return out


def _congruence(args) -> chow.CongruenceData:
    if args.data:
        return chow.CongruenceData.from_json(_load_json(args.data))
    missing = [k for k in ("n", "alpha", "beta", "pi", "chi") if getattr(args, k) is None]
    if missing:
        raise ValidationError(f"missing congruence data: {', '.join(missing)}")
    return chow.CongruenceData(
        n=args.n, alpha=args.alpha, beta=args.beta, pi=args.pi, chi=args.chi, m=args.m,
        c2Omega=args.c2omega, c1Omega_sq=args.c1omega_sq,
    )


def cmd_chow_residual(args):
    data = _congruence(args)
    if data.c2Omega is None and data.c1Omega_sq is None:
        data = chow.CongruenceData(**{**data.__dict__, "c1Omega_sq": chow.canonical_square(data.alpha, data.beta, data.pi, data.chi)})
    out = chow.residual_class(data).to_json()
    if data.m == 1:
        point, tu = chow.residual_smooth(data.n, data.alpha, data.beta, data.pi, data.chi)
        out["smooth"] = {"point_coeff": point, "tu_coeff": tu}
    return out


def cmd_chow_identity(args):
    missing = [k for k in ("alpha", "beta", "pi", "chi", "c1omega_sq") if getattr(args, k) is None]
    if missing:
        raise ValidationError(f"missing data: {', '.join(missing)}")
    return {"holds": chow.congruence_identity(args.alpha, args.beta, args.pi, args.c1omega_sq, args.chi)}


def cmd_chow_sym2(args):
    return {"h2_coeff": chow.sym2_omega_check()}


def cmd_geom_ngon(args):
    m = _load_monad(args)
    fld = m.field
    section, config = mon.thooft_configuration(m)
    pt = geometry.ProjPoint(fld, _coords(args.point, fld, 4, "--point"))
    vertices = geometry.ngon_vertices(config, pt)
    out = {
        "rulings": [_line_json(ln) for ln in config],
        "vertices": [{"pair": list(k), "y": _point_json(v)} for k, v in sorted(vertices.items())],
    }
    sym = mon.find_symplectic(m, seed=args.seed)
    if sym is not None:
        net = nets.net_at_point(nets.hypernet_from_monad(m, sym), pt)
        disc = nets.discriminant(net)
        value = mon.section_value(m, section, 1, pt.coords)
        check = nets.ngon_section_check(m, sym, net, value, vertices)
        for item in out["vertices"]:
            key = tuple(item["pair"])
            item["discriminant"] = fld.encode(disc.eval(vertices[key].coords))
            item.update(check[key])
    return out


def cmd_geom_transversals(args):
    obj = _load_json(args.lines)
    fld = _field(args, field_from_json(obj["field"]) if "field" in obj else None)
    lines = [geometry.PluckerLine(fld, c) for c in obj["lines"]]
    if len(lines) != 4:
        raise ValidationError("need exactly four lines")
    res = geometry.transversals_to_four(*lines)
    return {
        "infinite": res.infinite,
        "double_root": res.double_root,
        "lines": None if res.lines is None else [_line_json(ln) for ln in res.lines],
    }


COMMANDS = {
    ("fixture", "thooft"): cmd_fixture_thooft,
    ("scan", "multijump"): cmd_scan_multijump,
    ("scan", "order"): cmd_scan_order,
    ("scan", "planes"): cmd_scan_planes,
    ("net", "at-point"): cmd_net_at_point,
    ("net", "stability"): cmd_net_stability,
    ("theta", "spaces"): cmd_theta_spaces,
    ("theta", "beta"): cmd_theta_beta,
    ("theta", "obstruction"): cmd_theta_obstruction,
    ("theta", "diagnose"): cmd_theta_diagnose,
    ("chow", "residual"): cmd_chow_residual,
    ("chow", "identity"): cmd_chow_identity,
    ("chow", "sym2"): cmd_chow_sym2,
    ("geom", "ngon"): cmd_geom_ngon,
    ("geom", "transversals"): cmd_geom_transversals,
}


# --------------------------------------------------------------------------
# parser


def _jobs_default() -> int:
    raw = os.environ.get("INSTANTON_LAB_JOBS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"INSTANTON_LAB_JOBS must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, help="prime field F_p")
    common.add_argument("--seed", type=int, default=0, help="seed for pseudo-random choices")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: $INSTANTON_LAB_JOBS or 1)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")

    parser = _Parser(prog="instanton-lab", description="Instanton bundles, jumping lines and nets of quadrics.")
    groups = parser.add_subparsers(dest="group", metavar="GROUP", parser_class=_Parser)

    def sub(group, name, help_text):
        return group.add_parser(name, parents=[common], help=help_text)

    g = groups.add_parser("fixture", help="generate fixtures").add_subparsers(dest="action", parser_class=_Parser)
    s = sub(g, "thooft", "special t'Hooft monad")
    s.add_argument("--n", type=int, required=True)

    g = groups.add_parser("scan", help="jumping lines").add_subparsers(dest="action", parser_class=_Parser)
    s = sub(g, "multijump", "all F_p-lines of order >= 2")
    s.add_argument("--monad", required=True)
    s = sub(g, "order", "jumping order of one line")
    s.add_argument("--monad", required=True)
    s.add_argument("--line", required=True, help="Pluecker coordinates p01,p02,p03,p12,p13,p23")
    s.add_argument("--symplectic", action="store_true", help="decide order 0/1 through the net corank")
    s = sub(g, "planes", "stability and multi-jumping counts per plane")
    s.add_argument("--monad", required=True)

    g = groups.add_parser("net", help="nets of quadrics").add_subparsers(dest="action", parser_class=_Parser)
    s = sub(g, "at-point", "net of the hypernet at a point")
    s.add_argument("--monad", required=True)
    s.add_argument("--point", required=True)
    s = sub(g, "stability", "exhaustive (semi)stability search")
    s.add_argument("--net")
    s.add_argument("--monad")
    s.add_argument("--point")

    g = groups.add_parser("theta", help="theta-characteristic data").add_subparsers(dest="action", parser_class=_Parser)
    for name, text in (
        ("spaces", "dimensions of the section spaces"),
        ("beta", "skew forms of the splitting condition"),
        ("obstruction", "evaluate the splitting obstruction"),
        ("diagnose", "tangent and common-kernel dimensions"),
    ):
        s = sub(g, name, text)
        s.add_argument("--net")
        s.add_argument("--monad")
        s.add_argument("--point")
        if name == "obstruction":
            s.add_argument("--s", help="coordinates of a section of theta(2)")
            s.add_argument("--t", help="coordinates of a second section")
            s.add_argument("--random", type=int, default=0, help="number of random pairs")

    g = groups.add_parser("chow", help="intersection numbers").add_subparsers(dest="action", parser_class=_Parser)
    s = sub(g, "residual", "residual class of a congruence")
    s.add_argument("--data")
    for flag in ("--n", "--alpha", "--beta", "--pi", "--chi", "--c2omega", "--c1omega-sq"):
        s.add_argument(flag, type=int)
    s.add_argument("--m", type=int, default=1)
    s = sub(g, "identity", "smooth-congruence identity")
    for flag in ("--alpha", "--beta", "--pi", "--chi", "--c1omega-sq"):
        s.add_argument(flag, type=int)
    sub(g, "sym2", "Chern check for S^2 Omega(2)")

    g = groups.add_parser("geom", help="line geometry").add_subparsers(dest="action", parser_class=_Parser)
    s = sub(g, "ngon", "complete (n+1)-gon of the t'Hooft configuration")
    s.add_argument("--monad", required=True)
    s.add_argument("--point", required=True)
    s = sub(g, "transversals", "common transversals of four lines")
    s.add_argument("--lines", required=True)
    return parser


def _config(args) -> dict:
    skip = {"group", "action", "jobs", "out", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def run(argv: list[str]) -> tuple[int, str]:
    """Execute a command; returns ``(exit_code, text)`` where text is the report or error JSON."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = COMMANDS.get((args.group, getattr(args, "action", None)))
        if handler is None:
            raise UsageError(parser.format_help())
        if args.jobs is None:
            args.jobs = _jobs_default()
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
    except UsageError as exc:
        return EXIT_USAGE, str(exc) + ("\n" if not str(exc).endswith("\n") else "")

    command = f"{args.group} {args.action}"
    start = time.perf_counter()
    try:
        result = handler(args)
    except UndecidableError as exc:
        return EXIT_UNDECIDABLE, _error(command, exc.category, str(exc))
    except InstantonLabError as exc:
        code = EXIT_INTERNAL if exc.category in {"internal", "consistency"} else EXIT_INVALID
        return code, _error(command, exc.category, str(exc))
    except (OSError, json.JSONDecodeError) as exc:
        return EXIT_IO, _error(command, "io", str(exc))
    except ValueError as exc:
        return EXIT_INVALID, _error(command, "validation", str(exc))
    except (KeyError, TypeError) as exc:
        return EXIT_INVALID, _error(command, "validation", f"malformed input: {exc}")

    report = {"schema": SCHEMA, "version": _version(), "command": command, "config": _config(args), "result": result}
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6), "jobs": args.jobs}
    text = canonical_json(report)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            return EXIT_IO, _error(command, "io", str(exc))
        return EXIT_OK, ""
    return EXIT_OK, text


def _error(command: str, category: str, message: str) -> str:
    return canonical_json({"schema": SCHEMA, "command": command, "error": {"category": category, "message": message}})


def main(argv: list[str] | None = None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if code == EXIT_OK else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
