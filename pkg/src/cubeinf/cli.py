"""Command-line entry point: ``cubeinf <subcommand> [options]``.

Exit status: 0 when every checked contract holds, 2 when any is violated
(violations go to stderr), 1 for I/O or argument errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__
from . import certificate as cert
from . import chebyshev as cheb
from . import cube, graphs, influence, noise, prooftrace
from ._parallel import ordered_map

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Output:
    record: dict[str, Any] = field(default_factory=dict)
    rows: list[dict[str, Any]] | None = None
    violations: list[str] = field(default_factory=list)
    default_format: str = "json"


# ---------------------------------------------------------------------------
# Serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    return obj


def dumps(obj, indent: int = 2, level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    obj = _plain(obj)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(v) -> str:
    v = _plain(v)
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, list):
        return " ".join(_csv_cell(x) for x in v)
    return "" if v is None else str(v)


def render(out: Output, fmt: str, provenance: dict) -> str:
    if fmt == "json":
        doc = {"provenance": provenance, "result": out.record}
        if out.rows is not None:
            doc["rows"] = out.rows
        doc["violations"] = out.violations
        return dumps(doc) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if out.rows:
        header = list(out.rows[0])
        w.writerow(header)
        for row in out.rows:
            w.writerow([_csv_cell(row.get(k)) for k in header])
    else:
        w.writerow(["key", "value"])
        for k, v in out.record.items():
            w.writerow([k, _csv_cell(v)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Subcommands


def _load_function(path: str | None, default=None) -> cube.CubeFunction:
    if path is None:
        if default is None:
            raise UsageError("--in is required")
        return default
    return cube.load_function(path)


def cmd_fourier(args) -> Output:
    obj = cube.load(args.inp)
    if isinstance(obj, cube.CubeFunction):
        F = cube.fourier_transform(obj)
        rec = cube.to_json(F, tol=args.tol)
        rec["degree"] = cube.degree(F, args.tol)
        rows = [{"mask": c["mask"], "size": c["mask"].bit_count(), "value": c["value"]} for c in rec["coeffs"]]
    else:
        f = cube.inverse_transform(obj)
        rec = cube.to_json(f)
        rec["degree"] = cube.degree(obj, args.tol)
        rows = [{"index": x, "value": v} for x, v in enumerate(rec["values"])]
    return Output(rec, rows, default_format="json")


def cmd_influence(args) -> Output:
    f = _load_function(args.inp)
    prof = influence.influence_profile(f, args.threads)
    rows = [
        {"coordinate": i + 1, "l1": a, "l2": b}
        for i, (a, b) in enumerate(zip(prof.per_coordinate_l1, prof.per_coordinate_l2))
    ]
    rows.append({"coordinate": "total", "l1": prof.total_l1, "l2": prof.total_l2})
    rec = {"n": f.n, "total_l1": prof.total_l1, "total_l2": prof.total_l2}
    violations = []
    if args.fourier:
        F = cube.fourier_transform(f)
        l1f = influence.total_l1_via_fourier(F, args.threads)
        l2f = influence.total_l2_via_fourier(F)
        rec.update(total_l1_fourier=l1f, total_l2_fourier=l2f)
        rows.append({"coordinate": "total_fourier", "l1": l1f, "l2": l2f})
        if abs(l1f - prof.total_l1) > 1e-9:
            violations.append(f"L1 total mismatch: definition {prof.total_l1} vs Fourier {l1f}")
        if abs(l2f - prof.total_l2) > 1e-9:
            violations.append(f"L2 total mismatch: definition {prof.total_l2} vs Fourier {l2f}")
    return Output(rec, rows, violations, default_format="csv")


def cmd_noise(args) -> Output:
    f = _load_function(args.inp, default=cube.majority(3))
    F = cube.fourier_transform(f)
    T = cube.inverse_transform(noise.apply_noise(F, args.rho))
    rec = {
        "n": f.n,
        "rho": args.rho,
        "x": args.x,
        "noisy_value": float(T.values[args.x]),
        "max": float(T.values.max()),
        "min": float(T.values.min()),
    }
    violations = []
    if -1.0 <= args.rho <= 1.0:
        chk = noise.noise_mc_check(f, args.rho, args.x, args.samples, np.random.default_rng(args.seed))
        rec.update(mc_estimate=chk.mc_estimate, fourier_value=chk.fourier_value, z_score=chk.z_score, samples=args.samples)
        if abs(chk.z_score) > 4:
            violations.append(f"Monte Carlo estimate off by {chk.z_score:.2f} standard errors")
        for q in (1.0, 2.0, math.inf):
            if cube.norm(T, q) > cube.norm(f, q) + 1e-10:
                violations.append(f"noise increased the {q}-norm")
        if T.values.max() > f.values.max() + 1e-10 or T.values.min() < f.values.min() - 1e-10:
            violations.append("noise widened the range")
    return Output(rec, None, violations, default_format="json")


def cmd_certificate(args) -> Output:
    rows, violations = [], []
    certs = ordered_map(lambda d: cert.solve_certificate(d, strict=False), range(1, args.dmax + 1), args.threads)
    for c in certs:
        rows.append(
            {
                "d": c.d,
                "residual": c.residual_inf,
                "l1_norm": c.l1_norm,
                "harmonic_bound": c.harmonic_bound,
                "ratio": c.ratio,
            }
        )
        if c.d <= cert.CERTIFIED_DMAX and c.residual_inf > cert.RESIDUAL_TOL:
            violations.append(f"d={c.d}: residual {c.residual_inf:.3e}")
        for xk, gk in zip(c.x, c.gammas):
            if abs(xk) > 1 / abs(gk) + 1e-8:
                violations.append(f"d={c.d}: |x_k|={abs(xk)} > 1/|gamma_k|")
        if c.l1_norm > c.harmonic_bound + 1e-6:
            violations.append(f"d={c.d}: l1 norm above harmonic bound")
        if min(cert.product_gap(c.gammas)) < -1e-9:
            violations.append(f"d={c.d}: node product exceeds gap product")
    rec = {"dmax": args.dmax, "max_ratio": max((r["ratio"] for r in rows), default=math.nan)}
    return Output(rec, rows, violations, default_format="csv")


def cmd_chebyshev(args) -> Output:
    rows, violations = [], []
    for d in range(2, args.dmax + 1):
        value, bound, ok = cheb.extremal_growth_check(d)
        rows.append({"d": d, "t_rho_prime": value, "paturi": bound, "ok": ok})
        if not ok:
            violations.append(f"d={d}: T_d(rho')={value} exceeds Paturi bound {bound}")
        if value > 20:
            violations.append(f"d={d}: T_d(rho')={value} above 20")
    rec = {"dmax": args.dmax, "max_value": max((r["t_rho_prime"] for r in rows), default=math.nan)}
    return Output(rec, rows, violations, default_format="csv")


def cmd_trace(args) -> Output:
    f = _load_function(args.inp)
    rep = prooftrace.theorem_trace(
        f,
        trials=args.trials,
        rng=np.random.default_rng(args.seed),
        homogeneous=True if args.homogeneous else None,
        threads=args.threads,
    )
    rec = asdict(rep)
    rec["ok"] = rep.ok
    return Output(rec, None, list(rep.violations), default_format="json")


def _family_graph(args) -> graphs.Graph:
    fam = args.family
    if args.n is None:
        raise UsageError("--family needs --n")
    if fam == "er":
        return graphs.er_graph(args.n, args.edge_p, args.seed)
    if fam == "cycle":
        return graphs.cycle(args.n)
    if fam == "clique":
        return graphs.clique(args.n)
    if fam == "bipartite-complement":
        return graphs.bipartite_complement(args.n)
    raise UsageError(f"unknown family {fam}")


def cmd_cutdev(args) -> Output:
    if (args.graph is None) == (args.family is None):
        raise UsageError("give exactly one of --graph or --family")
    G = graphs.read_graph(args.graph) if args.graph else _family_graph(args)
    p = None if args.p in (None, "auto") else float(args.p)
    exhaustive = args.exhaustive or (args.restarts is None and G.n <= graphs.EXHAUSTIVE_MAX_N)
    if exhaustive:
        res = graphs.exhaustive_cut_deviation(G, p, one_sided=args.one_sided, threads=args.threads)
    else:
        res = graphs.heuristic_cut_deviation(
            G, p, args.restarts or 32, np.random.default_rng(args.seed), one_sided=args.one_sided, threads=args.threads
        )
    rec = asdict(res)
    rec["vertices"] = res.vertices
    rec.update(n=G.n, edge_count=G.edge_count, density=G.density)
    rec["theorem_constant"] = graphs.theorem_52_constant(G, res.deviation)
    violations = []
    if abs(res.deviation - (abs(res.cut_value - res.expected) if not res.one_sided else res.cut_value - res.expected)) > 1e-9:
        violations.append("deviation inconsistent with cut value")
    return Output(rec, None, violations, default_format="json")


def _scan_instance(n: int, d: int, seed: int, k: int, tol: float) -> dict:
    f = influence.random_bounded_polynomial(n, d, [seed, k])
    F = cube.fourier_transform(f)
    deg = cube.degree(F, tol)
    A = cube.range_width(f)
    prof = influence.influence_profile(f)
    l2_fourier = influence.total_l2_via_fourier(F)
    row = {
        "instance": k,
        "degree": deg,
        "range_width": A,
        "total_l1": prof.total_l1,
        "total_l2": l2_fourier,
        "inf_over_A": prof.total_l1 / A if A > 0 else 0.0,
    }
    row["inf_over_Ad"] = row["inf_over_A"] / deg if deg else 0.0
    row["inf_over_Ad3log"] = row["inf_over_A"] / (deg**3 * math.log(deg + 2)) if deg else 0.0
    violations = []
    if deg and row["inf_over_Ad3log"] > 100:
        violations.append(f"instance {k}: Inf/A_p = {row['inf_over_A']} exceeds 100 d^3 ln(d+2)")
    if l2_fourier > deg * cube.norm(f, 2) ** 2 + 1e-9:
        violations.append(f"instance {k}: L2 influence above degree * ||f||_2^2")
    if any(a < b - 1e-12 for a, b in zip(prof.per_coordinate_l1, prof.per_coordinate_l2)):
        violations.append(f"instance {k}: per-coordinate L1 below L2")
    row["_violations"] = violations
    return row


def cmd_verify_theorem(args) -> Output:
    if not 0 <= args.d <= args.n:
        raise UsageError("need 0 <= d <= n")
    rows = ordered_map(lambda k: _scan_instance(args.n, args.d, args.seed, k, args.tol), range(args.instances), args.threads)
    violations = [v for r in rows for v in r.pop("_violations")]
    rec = {
        "n": args.n,
        "d": args.d,
        "instances": args.instances,
        "max_inf_over_A": max((r["inf_over_A"] for r in rows), default=0.0),
        "max_inf_over_Ad": max((r["inf_over_Ad"] for r in rows), default=0.0),
        "max_inf_over_Ad3log": max((r["inf_over_Ad3log"] for r in rows), default=0.0),
        "violations": len(violations),
    }
    return Output(rec, rows, violations, default_format="json")


SLOPE_TARGET, SLOPE_TOL = 0.5, 0.15


def separation_table(nmin: int, nmax: int, seeds: int, seed: int, threads: int | None = 1) -> tuple[list[dict], dict]:
    """Influence ratios of normalized cut polynomials on G(n, 1/2)."""
    rows = []
    for n in range(nmin, nmax + 1, 2):
        for s in range(seeds):
            G = graphs.er_graph(n, 0.5, [seed, n, s])
            p = G.density
            D = graphs.exhaustive_cut_deviation(G, p, threads=threads).deviation
            l1, l2 = graphs.cut_polynomial_influence(G, p)
            rows.append(
                {
                    "n": n,
                    "sample": s,
                    "density": p,
                    "sup_norm": D,
                    "l1": l1 / D,
                    "l2": l2 / D**2,
                    "ratio": (l1 / D) / (l2 / D**2),
                    "ratio_scale_free": l1 / math.sqrt(l2),
                }
            )
    ns = sorted({r["n"] for r in rows})

    def geo(key, n):
        return math.exp(np.mean([math.log(r[key]) for r in rows if r["n"] == n]))

    summary = {
        "slope_l1_over_l2": graphs.fit_loglog_slope(ns, [geo("ratio", n) for n in ns]),
        "slope_l1_over_sqrt_l2": graphs.fit_loglog_slope(ns, [geo("ratio_scale_free", n) for n in ns]),
    }
    return rows, summary


def cmd_separation(args) -> Output:
    rows, summary = separation_table(args.nmin, args.nmax, args.samples, args.seed, args.threads)
    rec = {"nmin": args.nmin, "nmax": args.nmax, "samples": args.samples, **summary}
    violations = []
    if abs(summary["slope_l1_over_l2"] - SLOPE_TARGET) > SLOPE_TOL:
        violations.append(
            f"log-log slope of L1/L2 for normalized cut polynomials is {summary['slope_l1_over_l2']:.4f}, "
            f"outside {SLOPE_TARGET} +- {SLOPE_TOL}"
        )
    return Output(rec, rows, violations, default_format="csv")


# ---------------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common(suppress: bool) -> argparse.ArgumentParser:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d(0), help="RNG seed (default 0)")
    p.add_argument("--threads", type=int, default=d(0), help="worker threads; 0 means all cores")
    p.add_argument("--tol", type=float, default=d(1e-12), help="zero tolerance for Fourier degree")
    p.add_argument("--out", default=d(None), help="write output here instead of stdout")
    p.add_argument("--format", choices=["csv", "json"], default=d(None))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cubeinf", description=__doc__.splitlines()[0], parents=[_common(False)])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common(True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fourier", parents=[common], help="forward or inverse transform of a JSON function")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("influence", parents=[common], help="per-coordinate L1/L2 influences")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--fourier", action="store_true", help="also compute totals from Fourier identities")
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser("noise", parents=[common], help="noise operator smoke check")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--in", dest="inp", help="function JSON (default: majority on 3 bits)")
    p.add_argument("--x", type=int, default=0, help="point index")
    p.add_argument("--samples", type=int, default=100000)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("certificate", parents=[common], help="gamma-grid certificates for d = 1..dmax")
    p.add_argument("--dmax", type=int, required=True)
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("chebyshev", parents=[common], help="T_d(rho') against the Paturi bound")
    p.add_argument("--dmax", type=int, required=True)
    p.set_defaults(func=cmd_chebyshev)

    p = sub.add_parser("trace", parents=[common], help="inequality-chain trace for one function")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--homogeneous", action="store_true")
    p.add_argument("--trials", type=int, default=20000)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("cutdev", parents=[common], help="cut deviation of a graph")
    p.add_argument("--graph")
    p.add_argument("--family", choices=["er", "cycle", "clique", "bipartite-complement"])
    p.add_argument("--n", type=int)
    p.add_argument("--edge-p", type=float, default=0.5, help="edge probability for --family er")
    p.add_argument("--p", default="auto", help="'auto' (edge density) or a number in [0, 1]")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--restarts", type=int)
    p.add_argument("--one-sided", action="store_true", help="maximize E(S,S^c) - p|S||S^c| instead of |.|")
    p.set_defaults(func=cmd_cutdev)

    p = sub.add_parser("verify-theorem", parents=[common], help="scan random bounded degree-d functions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--instances", type=int, default=100)
    p.set_defaults(func=cmd_verify_theorem)

    p = sub.add_parser("separation", parents=[common], help="L1 vs L2 influence of cut polynomials")
    p.add_argument("--nmin", type=int, default=12)
    p.add_argument("--nmax", type=int, default=22)
    p.add_argument("--samples", type=int, default=3, help="graphs per n")
    p.set_defaults(func=cmd_separation)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except (UsageError, cube.CubeError, graphs.GraphError, prooftrace.TraceError, cheb.HypothesisError) as exc:
        print(f"cubeinf: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cubeinf: I/O error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    provenance = {
        "command": args.command,
        "version": __version__,
        "seed": args.seed,
        "params": {
            k: v
            for k, v in sorted(vars(args).items())
            if k not in {"func", "command", "seed", "threads", "out", "format"}
        },
    }
    text = render(out, args.format or out.default_format, provenance)
    try:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"cubeinf: I/O error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for v in out.violations:
        print(f"violation: {v}", file=sys.stderr)
    return EXIT_VIOLATION if out.violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
