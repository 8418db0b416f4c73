"""Command-line front end: ``misobc <dof|region|sweep|certify> [flags]``.

Flags override values from ``--config FILE`` (a JSON object keyed by flag
name with dashes as underscores). Exit codes: 0 success, 1 runtime error,
2 invalid arguments.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import dofregion as dr
from . import montecarlo as mc
from .formats import csv_text, json_text
from .svg import region_svg, sweep_svg, vertex_letters

MAX_REGION_M = 5
FORMATS = ("csv", "json", "svg")
# flags whose values may start with '-' (negative offsets)
VALUE_FLAGS = ("--offsets", "--snr", "--point")

DEFAULTS = {
    "m": 2,
    "k": 3,
    "alpha": 0.5,
    "b": 0.5,
    "beta": None,
    "snr": "5:35:5",
    "offsets": "-10,-20",
    "trials": 1000,
    "workers": 1,
    "out": None,
    "format": None,
    "scheme": "pp",
    "fig3": False,
    "point": None,
    "subset": None,
}


class UsageError(Exception):
    pass


def parse_snr_grid(text):
    """``start:stop:step`` in dB (stop inclusive) or a comma list."""
    text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"SNR grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"SNR grid needs step > 0 and stop >= start, got {text!r}")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    return [float(x) for x in text.split(",") if x.strip()]


def parse_floats(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="misobc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, region=True):
        p.add_argument("--config", help="JSON file with default flag values")
        p.add_argument("--m", type=int, help="antennas = size of the CSIT group")
        p.add_argument("--k", type=int, help="number of users")
        p.add_argument("--alpha", type=float, help="CSIT quality in [0, 1]")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", help="comma list of csv, json, svg")

    p = sub.add_parser("dof", help="closed-form DoF of both schemes")
    common(p)
    p.add_argument("--b", type=float, help="time partition in [0, 1]")
    p.add_argument("--beta", type=float, help="power partition (defaults to b)")

    p = sub.add_parser("region", help="optimum and time-partitioning DoF regions")
    common(p)

    p = sub.add_parser("sweep", help="Monte Carlo ergodic rates over an SNR grid")
    common(p)
    p.add_argument("--fig3", action="store_true", default=None,
                   help="paired TP/PP comparison with the no-CSIT rate held equal")
    p.add_argument("--scheme", choices=mc.SCHEMES)
    p.add_argument("--b", type=float, help="time partition in [0, 1]")
    p.add_argument("--beta", type=float, help="power partition (defaults to b)")
    p.add_argument("--snr", help="SNR grid in dB, start:stop:step")
    p.add_argument("--offsets", help="gain offsets of the no-CSIT users in dB, comma list")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="base seed (default: $MISOBC_SEED or 0)")
    p.add_argument("--workers", type=int, help="threads for trial chunks")

    p = sub.add_parser("certify", help="achievability certificate for a DoF tuple")
    common(p)
    p.add_argument("--point", help="DoF tuple, comma list")
    p.add_argument("--subset", help="CSIT users of the facet to certify, e.g. 1,2")
    return parser


def _join_value_flags(argv):
    out, i = [], 0
    while i < len(argv):
        arg = argv[i]
        if arg in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def resolve(args):
    """Merge flags over the config file over defaults, then validate."""
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise UsageError("argument --config: file must hold a JSON object")
    merged = {}
    for key in vars(args):
        value = getattr(args, key)
        if value is None:
            value = cfg.get(key, DEFAULTS.get(key))
        merged[key] = value
    if "seed" in merged and merged["seed"] is None:
        merged["seed"] = int(os.environ.get("MISOBC_SEED", "0"))
    ns = argparse.Namespace(**merged)
    validate(ns)
    return ns


def _bad(flag, msg):
    raise UsageError(f"argument --{flag}: {msg}")


def validate(ns):
    if ns.m is None or ns.m < 1:
        _bad("m", f"must be >= 1, got {ns.m}")
    if ns.k is None or ns.k <= ns.m:
        _bad("k", f"must exceed m={ns.m}, got {ns.k}")
    for name in ("alpha", "b", "beta"):
        value = getattr(ns, name, None)
        if value is not None and not 0.0 <= value <= 1.0:
            _bad(name, f"must lie in [0, 1], got {value}")
    if getattr(ns, "beta", "unset") is None:
        ns.beta = ns.b
    fmt = ns.format
    if fmt is not None:
        items = [f.strip() for f in (fmt if isinstance(fmt, list) else str(fmt).split(","))]
        for f in items:
            if f not in FORMATS:
                _bad("format", f"unknown format {f!r}; choose from {', '.join(FORMATS)}")
        ns.format = items
    if hasattr(ns, "trials"):
        if ns.trials is None or ns.trials < 1:
            _bad("trials", f"must be >= 1, got {ns.trials}")
        if ns.workers is None or ns.workers < 1:
            _bad("workers", f"must be >= 1, got {ns.workers}")
        if ns.seed < 0 or ns.seed >= 2 ** 64:
            _bad("seed", f"must be an unsigned 64-bit integer, got {ns.seed}")
        try:
            ns.snr = parse_snr_grid(ns.snr)
        except ValueError as err:
            _bad("snr", str(err))
        if any(s < 0 for s in ns.snr):
            _bad("snr", "SNR points must be >= 0 dB")
        try:
            ns.offsets = parse_floats(ns.offsets)
        except ValueError as err:
            _bad("offsets", str(err))
    if getattr(ns, "command", None) == "certify":
        if ns.point is None:
            _bad("point", "a DoF tuple is required")
        try:
            ns.point = parse_floats(ns.point)
        except ValueError as err:
            _bad("point", str(err))
        if len(ns.point) != ns.k:
            _bad("point", f"needs {ns.k} entries, got {len(ns.point)}")
        if ns.subset is not None:
            try:
                ns.subset = [int(x) - 1 for x in str(ns.subset).split(",")]
            except ValueError as err:
                _bad("subset", str(err))
            if any(not 0 <= i < ns.m for i in ns.subset):
                _bad("subset", f"users must lie in 1..{ns.m}")
    if getattr(ns, "command", None) == "region" and ns.m > MAX_REGION_M:
        _bad("m", f"vertex enumeration is limited to m <= {MAX_REGION_M}, got {ns.m}")


def fmt_tuple(d):
    return "(" + ", ".join(f"{x:.12g}" for x in d) + ")"


def _emit(ns, name, text, stdout=True):
    if ns.out:
        path = Path(ns.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text, encoding="utf-8")
    elif stdout:
        sys.stdout.write(text)


def cmd_dof(ns):
    tp = dr.tp_dof(ns.b, ns.alpha, ns.m, ns.k)
    pp = dr.pp_dof(ns.beta, ns.alpha, ns.m, ns.k)
    gain = dr.strict_gain_users(tp, pp)
    dominates = bool(np.all(pp >= tp - dr.TOL))
    verdict = ("strict gain: users " + ",".join(str(i + 1) for i in gain)) if gain else "no strict gain"
    formats = ns.format or []
    if "json" in formats:
        _emit(ns, "dof.json", json_text({
            "m": ns.m, "k": ns.k, "alpha": ns.alpha, "b": ns.b, "beta": ns.beta,
            "tp": tp.tolist(), "pp": pp.tolist(), "pp_dominates": dominates,
            "strict_gain_users": [i + 1 for i in gain],
        }))
    if "csv" in formats:
        rows = [["tp", *tp], ["pp", *pp]]
        _emit(ns, "dof.csv", csv_text(["scheme"] + [f"d{i + 1}" for i in range(ns.k)], rows))
    if not formats or ns.out:
        print(f"TP {fmt_tuple(tp)}")
        print(f"PP {fmt_tuple(pp)}")
        print(verdict)
    return 0


def cmd_region(ns):
    poly = dr.theorem1_region(ns.m, ns.k, ns.alpha)
    tpoly = dr.tp_region(ns.m, ns.k, ns.alpha)
    verts = dr.enumerate_vertices(poly)
    tverts = dr.enumerate_vertices(tpoly)
    letters = vertex_letters(verts, ns.m)
    formats = ns.format or ["csv"]
    coord_cols = [f"d{i + 1}" for i in range(ns.k)]

    def hs_rows(p):
        return [[h.label, *h.coeffs, h.bound] for h in p.halfspaces]

    def vert_rows(vs, named):
        return [[named.get(v, ""), *v] for v in vs]

    if "csv" in formats:
        _emit(ns, "region_halfspaces.csv", csv_text(["label", *coord_cols, "bound"], hs_rows(poly)))
        _emit(ns, "region_vertices.csv", csv_text(["name", *coord_cols], vert_rows(verts, letters)))
        _emit(ns, "tp_halfspaces.csv", csv_text(["label", *coord_cols, "bound"], hs_rows(tpoly)))
        _emit(ns, "tp_vertices.csv", csv_text(["name", *coord_cols], vert_rows(tverts, letters)))
    if "json" in formats:
        _emit(ns, "region.json", json_text({
            "m": ns.m, "k": ns.k, "alpha": ns.alpha,
            "region": poly.to_json(),
            "vertices": [list(v) for v in verts],
            "named_vertices": {letters[v]: list(v) for v in verts if v in letters},
            "tp_region": tpoly.to_json(),
            "tp_vertices": [list(v) for v in tverts],
        }))
    if "svg" in formats:
        if ns.k != 3:
            raise ValueError("svg region plots need k = 3")
        _emit(ns, "region.svg", region_svg(poly, verts, tpoly, tverts, ns.m, ns.alpha), stdout=False)
    if ns.out:
        print(f"{len(verts)} vertices (optimum region), {len(tverts)} (time partitioning) -> {ns.out}")
    return 0


SWEEP_COLUMNS_HEAD = ["snr_db", "scheme", "offset_db"]
SWEEP_COLUMNS_TAIL = ["sum_rate_kalpha", "stderr", "p0", "calibrated"]


def sweep_table(rows, k):
    columns = SWEEP_COLUMNS_HEAD + [f"rate_u{i + 1}" for i in range(k)] + SWEEP_COLUMNS_TAIL
    table = [[r.snr_db, r.scheme, r.offset_db, *r.rates, r.sum_rate_kalpha, r.stderr,
              r.p0, r.calibrated] for r in rows]
    return columns, table


def run_sweep(ns):
    if ns.fig3:
        return mc.fig3_experiment(ns.alpha, ns.b, ns.snr, ns.offsets, ns.trials, ns.seed,
                                  m=ns.m, k=ns.k, workers=ns.workers)
    partition = ns.b if ns.scheme == "tp" else ns.beta
    rows = []
    for offset in ns.offsets:
        spec = mc.SweepSpec(ns.alpha, ns.scheme, partition, tuple(ns.snr), ns.trials, ns.seed,
                            ns.m, ns.k, (0.0,) * ns.m + (offset,) * (ns.k - ns.m))
        rows += mc.report_rows(mc.ergodic_rates(spec, workers=ns.workers))
    return rows


def cmd_sweep(ns):
    rows = run_sweep(ns)
    columns, table = sweep_table(rows, ns.k)
    formats = ns.format or ["csv"]
    if "csv" in formats:
        _emit(ns, "sweep.csv", csv_text(columns, table))
    if "json" in formats:
        _emit(ns, "sweep.json", json_text({
            "columns": columns,
            "rows": [dict(zip(columns, row)) for row in table],
        }))
    if "svg" in formats:
        _emit(ns, "sweep.svg", sweep_svg(rows), stdout=False)
    if ns.out:
        print(f"{len(table)} rows -> {ns.out}")
    return 0


def cmd_certify(ns):
    poly = dr.theorem1_region(ns.m, ns.k, ns.alpha)
    d = np.array(ns.point)
    bad = dr.violated_rows(poly, d)
    if bad:
        raise ValueError(f"point {fmt_tuple(d)} is outside the region: violates row {', '.join(bad)}")
    verts = dr.enumerate_vertices(poly)
    is_vertex = any(np.max(np.abs(np.array(v) - d)) <= dr.TOL for v in verts)

    if ns.subset is not None:
        result = {"point": d.tolist(),
                  "certificate": dr.facet_certificate(d, ns.subset, ns.m, ns.k, ns.alpha).to_json()}
    elif is_vertex:
        cert = dr.certify_vertex(d, ns.m, ns.k, ns.alpha)
        result = {"point": d.tolist(),
                  "certificate": cert.to_json() if cert else None,
                  "note": None if cert else "origin-type vertex: achieved by silencing users"}
    else:
        parts = dr.convex_decomposition(poly, d, verts)
        letters = vertex_letters(verts, ns.m)
        result = {"point": d.tolist(), "decomposition": []}
        for w, v in parts:
            cert = dr.certify_vertex(v, ns.m, ns.k, ns.alpha)
            result["decomposition"].append({
                "weight": w, "vertex": list(v), "name": letters.get(tuple(v)),
                "certificate": cert.to_json() if cert else None,
            })

    if ns.format and "json" in ns.format:
        _emit(ns, "certificate.json", json_text(result))
        return 0
    lines = [f"point {fmt_tuple(d)}"]
    if "certificate" in result:
        lines += _cert_lines(result["certificate"]) if result["certificate"] else [result["note"]]
    else:
        lines.append("convex combination of vertices:")
        for part in result["decomposition"]:
            name = f" {part['name']}" if part["name"] else ""
            lines.append(f"  weight {part['weight']:.12g} x{name} {fmt_tuple(part['vertex'])}")
            if part["certificate"]:
                lines += ["    " + x for x in _cert_lines(part["certificate"])]
            else:
                lines.append("    origin-type vertex: achieved by silencing users")
    _emit(ns, "certificate.txt", "\n".join(lines) + "\n")
    return 0


def _cert_lines(c):
    return [
        f"facet S={{{','.join(str(i) for i in c['subset_s'])}}}",
        f"beta = {c['beta']:.12g}",
        f"private exponents = {fmt_tuple(c['private_exponents'])}",
        f"common shares = {fmt_tuple(c['common_shares'])}",
        f"d_sigma = {c['d_sigma']:.12g}",
    ]


COMMANDS = {"dof": cmd_dof, "region": cmd_region, "sweep": cmd_sweep, "certify": cmd_certify}


def main(argv=None):
    parser = build_parser()
    argv = _join_value_flags(sys.argv[1:] if argv is None else list(argv))
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        ns = resolve(args)
    except (UsageError, OSError, json.JSONDecodeError) as err:
        parser.error(str(err))
    try:
        return COMMANDS[ns.command](ns)
    except (ValueError, RuntimeError) as err:
        print(f"misobc: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
