"""
Command-line front end: ``gw stationary|scatter|comfort|sweep|verify``.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

import numpy as np

from gwalk.errors import ConvergenceError, GraphError, SingularFrequencyError, SolverError
from gwalk.graph import SymmetricDigraph, parse_graph_source
from gwalk.laplacian import singular_set
from gwalk.observables import comfortability, scattering_matrix, transmitting_rate
from gwalk.oracle import DEFAULT_MAX_ITER, DEFAULT_TOL, iterate_to_stationary
from gwalk.stationary import SINGULAR_RADIUS, averaged_potential, stationary_state

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


class InputError(Exception):
    """Malformed command-line value."""


def fmt(x: float) -> str:
    """Fixed 17-significant-digit float formatting for byte-stable output."""
    return format(float(x), ".17g")


# argument parsing ---------------------------------------------------------------

def default_theta_star(g: SymmetricDigraph) -> float:
    """Smallest positive non-trivial singular angle of ``g``."""
    pos = [t for t in singular_set(g).nontrivial() if t > 0]
    if not pos:
        raise InputError("graph has no non-trivial singular frequency; theta_star undefined")
    return float(min(pos))


_PI_FRAC = re.compile(r"^([+-]?)(\d*\.?\d*)\*?pi(?:/(\d*\.?\d+))?$")


def parse_theta(token: str, g: Optional[SymmetricDigraph] = None) -> float:
    """
    Parse an angle token.

    Accepts plain floats, ``pi``, ``-pi``, ``pi/k``, ``k*pi``, ``k*pi/j`` and
    ``theta_star`` / ``-theta_star`` (resolved on ``g``).
    """
    tok = token.strip().lower()
    if tok.lstrip("+-") == "theta_star":
        if g is None:
            raise InputError("theta_star needs a graph")
        ts = default_theta_star(g)
        return -ts if tok.startswith("-") else ts
    m = _PI_FRAC.match(tok)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        div = float(m.group(3)) if m.group(3) else 1.0
        if div == 0:
            raise InputError(f"division by zero in angle {token!r}")
        return sign * coef * np.pi / div
    try:
        val = float(tok)
    except ValueError:
        raise InputError(f"cannot parse angle {token!r}") from None
    if not np.isfinite(val):
        raise InputError(f"angle must be finite, got {token!r}")
    return val


def parse_thetas(spec: str, g: Optional[SymmetricDigraph] = None) -> np.ndarray:
    """``start:end:count`` (inclusive linspace) or a comma-separated list."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise InputError(f"theta range must be start:end:count, got {spec!r}")
        try:
            count = int(parts[2])
        except ValueError:
            raise InputError(f"bad count in {spec!r}") from None
        if count < 1:
            raise InputError("theta count must be positive")
        return np.linspace(parse_theta(parts[0], g), parse_theta(parts[1], g), count)
    return np.array([parse_theta(t, g) for t in spec.split(",") if t.strip()])


def parse_inflow(spec: Optional[str], r: int) -> np.ndarray:
    """
    Inflow amplitudes in boundary order.

    ``"1,0,0.5+1j"`` lists complex literals; ``"1,0;0,1"`` lists ``re,im``
    pairs.  Default is ``(1, 0, .., 0)``.
    """
    if spec is None:
        out = np.zeros(r, dtype=complex)
        out[0] = 1.0
        return out
    try:
        if ";" in spec:
            vals = []
            for pair in spec.split(";"):
                re_s, im_s = pair.split(",")
                vals.append(complex(float(re_s), float(im_s)))
        else:
            vals = [complex(t.strip().replace("i", "j")) for t in spec.split(",")]
    except ValueError:
        raise InputError(f"cannot parse inflow {spec!r}") from None
    if len(vals) != r:
        raise InputError(f"inflow has {len(vals)} amplitudes, boundary has {r}")
    return np.asarray(vals, dtype=complex)


def parse_n_range(spec: str) -> list:
    """``"4..6"`` or ``"4,5,6"``."""
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(t) for t in spec.split(",")]
    except ValueError:
        raise InputError(f"cannot parse N range {spec!r}") from None
    if not out or min(out) < 3:
        raise InputError(f"N range must be non-empty with N >= 3, got {spec!r}")
    return out


_VALUE_FLAGS = {"--theta", "--thetas", "--inflow"}


def _merge_negative_values(argv: Sequence[str]) -> list:
    # "--thetas -pi:pi:5" would otherwise read -pi... as an option
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gw", description="Grover walks with tails.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, thetas: bool):
        p.add_argument("--graph", required=True, help="JSON file or complete:N:L, cycle:N:L, path:N:L")
        p.add_argument("--inflow", help="complex amplitudes per boundary vertex (default e1)")
        if thetas:
            p.add_argument("--thetas", help="start:end:count or comma list")
        p.add_argument("--theta", help="single angle (pi, pi/k, theta_star, ...)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--method", choices=("closed", "oracle"), default="closed")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="oracle tolerance")
        p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)

    common(sub.add_parser("stationary", help="per-arc stationary state"), thetas=False)
    common(sub.add_parser("scatter", help="scattering matrix"), thetas=False)
    common(sub.add_parser("comfort", help="comfortability at one or more angles"), thetas=True)
    sw = sub.add_parser("sweep", help="comfortability and scattering over a theta grid")
    common(sw, thetas=True)
    sw.add_argument("--workers", type=int, default=1)

    ver = sub.add_parser("verify", help="run the self-verification suite")
    ver.add_argument("--suite", choices=("all", "core", "complete"), default="all")
    ver.add_argument("--N", dest="n_range", default="4..6", help="complete-graph sizes, e.g. 4..6")
    ver.add_argument("--out")
    ver.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


# evaluation ---------------------------------------------------------------------

def _state(g, z, alpha, args):
    if args.method == "oracle":
        return iterate_to_stationary(g, alpha, z, tol=args.tol, max_iter=args.max_iter)
    return stationary_state(g, z, alpha)


def _scattering(g, z, args) -> np.ndarray:
    if args.method == "closed":
        return scattering_matrix(g, z).S
    r = g.n_boundary
    S = np.empty((r, r), dtype=complex)
    for v in range(r):
        alpha = np.zeros(r, dtype=complex)
        alpha[v] = 1.0
        phi = _state(g, z, alpha, args)
        nu = g.restrict_boundary(averaged_potential(g, alpha, phi))
        S[:, v] = 2 * z * nu - z * alpha
    return S


def _comfort(g, z, alpha, args) -> float:
    if args.method == "oracle":
        return 0.5 * _state(g, z, alpha, args).norm2()
    return comfortability(g, z, alpha).value


def _is_singular(g, z) -> bool:
    return singular_set(g).nearest(z, SINGULAR_RADIUS) is not None


def _single_theta(args, g) -> float:
    if args.theta is None:
        raise InputError("--theta is required")
    return parse_theta(args.theta, g)


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_stationary(args, g) -> int:
    theta = _single_theta(args, g)
    z = np.exp(1j * theta)
    alpha = parse_inflow(args.inflow, g.n_boundary)
    phi = _state(g, z, alpha, args)
    vals = phi.values
    rows = [
        (a, int(g.origin[a]), int(g.terminus[a]), fmt(v.real), fmt(v.imag), fmt(abs(v) ** 2))
        for a, v in enumerate(vals)
    ]
    if args.format == "json":
        doc = {
            "graph": args.graph,
            "theta": theta,
            "method": args.method,
            "iterations": phi.iterations,
            "comfortability": 0.5 * phi.norm2(),
            "arcs": [
                {"arc_id": r[0], "origin": r[1], "terminus": r[2], "re": v.real, "im": v.imag}
                for r, v in zip(rows, vals)
            ],
        }
        _write(args, json.dumps(doc, indent=2) + "\n")
    else:
        _write(args, _csv(["arc_id", "origin", "terminus", "re", "im", "abs2"], rows))
    return EXIT_OK


def cmd_scatter(args, g) -> int:
    theta = _single_theta(args, g)
    S = _scattering(g, np.exp(1j * theta), args)
    r = g.n_boundary
    if args.format == "json":
        doc = {
            "graph": args.graph,
            "theta": theta,
            "boundary": list(g.boundary),
            "S_re": S.real.tolist(),
            "S_im": S.imag.tolist(),
            "unitarity_defect": float(np.max(np.abs(S @ S.conj().T - np.eye(r)))),
        }
        _write(args, json.dumps(doc, indent=2) + "\n")
    else:
        rows = [
            (i, j, fmt(S[i, j].real), fmt(S[i, j].imag), fmt(abs(S[i, j]) ** 2))
            for i in range(r)
            for j in range(r)
        ]
        _write(args, _csv(["row", "col", "re", "im", "abs2"], rows))
    return EXIT_OK


def cmd_comfort(args, g) -> int:
    if args.thetas:
        thetas = parse_thetas(args.thetas, g)
    else:
        thetas = np.array([_single_theta(args, g)])
    alpha = parse_inflow(args.inflow, g.n_boundary)
    values = [_comfort(g, np.exp(1j * t), alpha, args) for t in thetas]
    if args.format == "json":
        doc = {"graph": args.graph, "points": [{"theta": t, "comfortability": e} for t, e in zip(thetas, values)]}
        _write(args, json.dumps(doc, indent=2) + "\n")
    else:
        _write(args, _csv(["theta", "comfortability"], [(fmt(t), fmt(e)) for t, e in zip(thetas, values)]))
    return EXIT_OK


def _sweep_point(payload):
    g, theta, alpha, method, tol, max_iter = payload
    args = argparse.Namespace(method=method, tol=tol, max_iter=max_iter)
    z = np.exp(1j * theta)
    S = _scattering(g, z, args)
    return _comfort(g, z, alpha, args), S, _is_singular(g, z)


def sweep_columns(r: int) -> list:
    trans = [f"transmit_rate_{i}_{j}" for i in range(r) for j in range(r) if i != j]
    refl = [f"reflect_abs2_{j}_{j}" for j in range(r)]
    return ["theta", "comfortability"] + trans + refl + ["is_singular"]


def cmd_sweep(args, g) -> int:
    if args.thetas is None:
        raise InputError("--thetas is required for sweep")
    thetas = np.sort(parse_thetas(args.thetas, g))
    if thetas.size < 2:
        raise InputError("sweep needs at least 2 theta values")
    alpha = parse_inflow(args.inflow, g.n_boundary)
    payloads = [(g, float(t), alpha, args.method, args.tol, args.max_iter) for t in thetas]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_point, payloads))
    else:
        results = [_sweep_point(p) for p in payloads]
    r = g.n_boundary
    header = sweep_columns(r)
    rows = []
    for t, (e, S, sing) in zip(thetas, results):
        trans = [fmt(transmitting_rate(S, i, j)) for i in range(r) for j in range(r) if i != j]
        refl = [fmt(abs(S[j, j]) ** 2) for j in range(r)]
        rows.append([fmt(t), fmt(e)] + trans + refl + [int(sing)])
    if args.format == "json":
        doc = {"graph": args.graph, "columns": header, "rows": rows}
        _write(args, json.dumps(doc, indent=2) + "\n")
    else:
        _write(args, _csv(header, rows))
    return EXIT_OK


def cmd_verify(args) -> int:
    from gwalk.verify import run_suite

    report = run_suite(args.suite, parse_n_range(args.n_range))
    ok = all(c["pass"] for c in report["checks"])
    lines = [f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}: {c['detail']}" for c in report["checks"]]
    lines.append(f"{'OK' if ok else 'FAILED'}: {sum(c['pass'] for c in report['checks'])}/{len(report['checks'])} checks")
    blob = json.dumps(report, indent=2) + "\n"
    # stdout carries the human summary, or the JSON report when asked for json without --out
    if args.format == "json" and not args.out:
        sys.stdout.write(blob)
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(blob)
    return EXIT_OK if ok else EXIT_VERIFY


_COMMANDS = {
    "stationary": cmd_stationary,
    "scatter": cmd_scatter,
    "comfort": cmd_comfort,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_merge_negative_values(argv))
    try:
        if args.command == "verify":
            return cmd_verify(args)
        g = parse_graph_source(args.graph)
        return _COMMANDS[args.command](args, g)
    except (GraphError, InputError, OSError) as exc:
        print(f"gw: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, ConvergenceError, SingularFrequencyError) as exc:
        print(f"gw: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
