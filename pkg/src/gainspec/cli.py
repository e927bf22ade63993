"""Command line: ``gainspec analyze | verify | convert``.

Exit codes: 0 ok, 1 verification failure, 2 parse/usage error, 3 size cap
exceeded, 4 lossy conversion refused.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds as B
from . import combinatorics as comb
from . import generators_io as gio
from .gain_core import GainGraph, GainParseError, GraphError, Graph, adjacency, parse_angle
from .spectra import EigenConvergenceError, eigendecompose, energy_profile

SCHEMA = "gainspec/1"
EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_CAP, EXIT_LOSSY = 0, 1, 2, 3, 4
CYCLE_THETAS = ("0", "pi/3", "pi/2", "pi")
SPECTRUM_TOL = 1e-9


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


# -- deterministic JSON -----------------------------------------------------

def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits, keys in insertion order."""
    parts: list[str] = []
    _dump(obj, parts)
    return "".join(parts)


def _dump(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        out.append(format(x, ".17g") if math.isfinite(x) else "null")
    elif isinstance(obj, str):
        import json

        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            _dump(str(k), out)
            out.append(": ")
            _dump(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _dump(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def report_to_dict(r: B.BoundReport) -> dict:
    return {
        "theorem": r.theorem_id.value,
        "kind": r.kind,
        "vertex": r.vertex,
        "component": list(r.component) if r.component is not None else None,
        "bound": r.bound_value,
        "actual": r.actual_value,
        "slack": r.slack,
        "holds": r.holds,
        "equality": r.equality,
        "characterizer": r.characterizer,
        "characterizer_agrees": r.characterizer_agrees,
        "tolerance_event": r.tolerance_event,
        "skipped": r.skipped,
        "detail": {k: r.detail[k] for k in sorted(r.detail)},
    }


# -- inputs -----------------------------------------------------------------

def default_seed() -> int:
    raw = os.environ.get("GAINSPEC_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise CliError(f"GAINSPEC_SEED must be an integer, got {raw!r}", EXIT_PARSE) from None


def _gain_spec(mode: str, seed: int) -> gio.GainAssignmentSpec:
    try:
        return gio.GainAssignmentSpec(gio.GainMode(mode), seed=seed)
    except ValueError:
        names = ", ".join(m.value for m in gio.GainMode)
        raise CliError(f"unknown gain mode {mode!r} (choose from {names})", EXIT_PARSE) from None


def _kv(body: str, allowed: dict) -> dict:
    out = {}
    positional = list(allowed)
    for i, item in enumerate(filter(None, body.split(","))):
        if "=" in item:
            k, v = item.split("=", 1)
        elif i < len(positional):
            k, v = positional[i], item
        else:
            raise CliError(f"unexpected generator argument {item!r}", EXIT_PARSE)
        k = k.strip()
        if k not in allowed:
            raise CliError(f"unknown generator parameter {k!r}", EXIT_PARSE)
        try:
            out[k] = allowed[k](v.strip())
        except ValueError as exc:
            raise CliError(f"bad value for {k}: {exc}", EXIT_PARSE) from None
    return out


GENERATORS = {
    "cycle": {"n": int, "theta": str},
    "kbipartite": {"p": int, "q": int},
    "complete": {"n": int},
    "star": {"r": int},
    "path": {"n": int},
    "figure2": {},
}


def build_input(source: str, spec: gio.GainAssignmentSpec) -> GainGraph:
    """A generator expression like ``cycle:n=5,theta=pi/2`` or a GGF / graph6 file."""
    name, _, body = source.partition(":")
    if name in GENERATORS and not Path(source).exists():
        args = _kv(body, GENERATORS[name])
        try:
            if name == "cycle":
                theta = args.get("theta", "0")
                try:
                    parse_angle(theta)
                except (ValueError, GainParseError) as exc:
                    raise CliError(str(exc), EXIT_PARSE) from None
                return gio.make_cycle(args["n"], theta)
            if name == "kbipartite":
                return gio.make_complete_bipartite(args["p"], args["q"], spec)
            if name == "complete":
                return gio.make_complete(args["n"], spec)
            if name == "star":
                return gio.make_star(args["r"], spec)
            if name == "path":
                return gio.make_path(args["n"], spec)
            return gio.make_figure2_graph(spec)
        except KeyError as exc:
            raise CliError(f"generator {name!r} needs parameter {exc}", EXIT_PARSE) from None
        except GraphError as exc:
            raise CliError(str(exc), EXIT_PARSE) from None
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {source}: {exc.strerror or exc}", EXIT_PARSE) from None
    return parse_text(text, spec)


def _looks_like_ggf(text: str) -> bool:
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].strip()
        if body:
            return body.startswith("GGF1")
    return False


def parse_text(text: str, spec: gio.GainAssignmentSpec) -> GainGraph:
    try:
        if _looks_like_ggf(text):
            return gio.parse_ggf(text)
        return gio.random_gains(gio.parse_graph6(text.strip()), spec)
    except (GainParseError, GraphError) as exc:
        raise CliError(f"parse error: {exc}", EXIT_PARSE) from None


# -- analyze ----------------------------------------------------------------

def analysis_report(g: GainGraph, source: str, spec: gio.GainAssignmentSpec) -> dict:
    dec = eigendecompose(adjacency(g))
    prof = energy_profile(g, dec)
    basis = comb.fundamental_cycles(g)
    try:
        cprof = comb.combinatorial_profile(g)
    except comb.CapExceeded as exc:
        raise CliError(str(exc), EXIT_CAP) from None
    if g.n > comb.SUBSET_CAP:
        raise CliError(f"bound evaluation capped at n={comb.SUBSET_CAP}, got n={g.n}", EXIT_CAP)
    reports = B.run_all(g)
    return {
        "schema": SCHEMA,
        "input": {"source": source, "gains": spec.mode.value, "seed": spec.seed},
        "n": g.n,
        "m": g.m,
        "edges": [[p, q, gain.re, gain.im] for p, q, gain in g.edges],
        "spectrum": [float(x) for x in dec.eigenvalues],
        "diagnostics": {"residual": dec.residual, "unitarity_defect": dec.unitarity_defect(),
                        "sweeps": dec.sweeps},
        "energy": {
            "total": prof.total,
            "per_vertex": list(prof.per_vertex),
            "spectral_radius": prof.spectral_radius,
            "positive_count": prof.positive_count,
            "rank": prof.rank,
        },
        "combinatorics": {
            "matching_number": cprof.matching_number,
            "vertex_cover_number": cprof.vertex_cover_number,
            "odd_cycle_count": cprof.odd_cycle_count,
            "bipartite_obstruction": cprof.bipartite_obstruction,
            "is_bipartite": cprof.is_bipartite,
            "is_balanced": comb.is_balanced(g),
            "components": [list(c) for c in cprof.components],
        },
        "fundamental_cycles": [
            {"vertices": list(c), "angle": gain.angle} for c, gain in zip(basis.cycles, basis.gains)
        ],
        "bounds": [report_to_dict(r) for r in reports],
    }


def _fmt(x, width=12):
    if x is None:
        return "-".rjust(width)
    if isinstance(x, float):
        return f"{x:{width}.6f}"
    return str(x).rjust(width)


def render_table(rep: dict) -> str:
    e, c = rep["energy"], rep["combinatorics"]
    lines = [
        f"input     {rep['input']['source']}  (gains {rep['input']['gains']}, seed {rep['input']['seed']})",
        f"n, m      {rep['n']}, {rep['m']}",
        "spectrum  " + " ".join(f"{x:.6f}" for x in rep["spectrum"]),
        f"energy    {e['total']:.9f}   rho {e['spectral_radius']:.6f}   rank {e['rank']}"
        f"   positive {e['positive_count']}",
        "vertex E  " + " ".join(f"{x:.6f}" for x in e["per_vertex"]),
        f"mu {c['matching_number']}  tau {c['vertex_cover_number']}  c {c['odd_cycle_count']}"
        f"  b {c['bipartite_obstruction']}  bipartite {c['is_bipartite']}  balanced {c['is_balanced']}",
        "",
        f"{'theorem':<15}{'vertex':>7}{'bound':>12}{'actual':>12}{'slack':>12}  verdict",
    ]
    for r in rep["bounds"]:
        if r["skipped"]:
            lines.append(f"{r['theorem']:<15}{_fmt(r['vertex'], 7)}  skipped: {r['skipped']}")
            continue
        verdict = "holds" if r["holds"] else "VIOLATED"
        if r["equality"]:
            verdict += ", equality"
        if r["characterizer_agrees"] is False:
            verdict += ", CHARACTERIZER DISAGREES"
        lines.append(f"{r['theorem']:<15}{_fmt(r['vertex'], 7)}{_fmt(r['bound'])}{_fmt(r['actual'])}"
                     f"{_fmt(r['slack'])}  {verdict}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    spec = _gain_spec(args.gains, seed)
    g = build_input(args.input, spec)
    t0 = time.perf_counter()
    rep = analysis_report(g, args.input, spec)
    if args.timing:
        rep["timing"] = {"seconds": time.perf_counter() - t0}
    print(dumps(rep) if args.json else render_table(rep))
    bad = [r for r in rep["bounds"] if (not r["skipped"] and not r["holds"]) or r["characterizer_agrees"] is False]
    return EXIT_VERIFY if bad else EXIT_OK


# -- verify -----------------------------------------------------------------

@dataclass
class Tally:
    checked: int = 0
    holds: int = 0
    equality: int = 0
    tolerance_events: int = 0
    failures: int = 0
    disagreements: int = 0
    skipped: int = 0
    min_slack: float = math.inf
    min_slack_instance: str | None = None

    def add(self, r: dict, key: str):
        if r["skipped"]:
            self.skipped += 1
            return
        self.checked += 1
        self.holds += bool(r["holds"])
        self.failures += not r["holds"]
        self.equality += bool(r["equality"])
        self.tolerance_events += bool(r["tolerance_event"])
        self.disagreements += r["characterizer_agrees"] is False
        if r["slack"] is not None and r["slack"] < self.min_slack:
            self.min_slack, self.min_slack_instance = r["slack"], key


def _cycle_instances(n_max: int, seed: int, samples: int):
    rng = np.random.default_rng(seed)
    for n in range(3, max(3, n_max) + 1):
        thetas = [(t, parse_angle(t)) for t in CYCLE_THETAS]
        thetas += [(f"{x:.17g}", x) for x in rng.uniform(0, 2 * math.pi, size=samples)]
        for label, theta in thetas:
            yield f"cycle:n={n},theta={label}", ("cycle", n, label)


def _corpus_instances(args, seed: int):
    corpus = gio.CorpusSpec(
        n_min=args.n_min,
        n_max=args.n_max,
        connected_only=not args.include_disconnected,
        bipartite_only=args.bipartite_only,
        gain_modes=tuple(gio.GainMode(m) for m in args.gains),
        samples_per_graph=args.samples,
        seed=seed,
    )
    for key, g in gio.enumerate_underlying(corpus):
        for spec, _ in gio.gain_samples(g, corpus, key):
            yield f"{key}|{spec.mode.value}|{spec.seed}", ("g6", gio.encode_graph6(g), spec.mode.value, spec.seed)


def _rebuild(recipe):
    if recipe[0] == "cycle":
        _, n, label = recipe
        return gio.make_cycle(n, label), None
    _, g6, mode, seed = recipe
    spec = gio.GainAssignmentSpec(gio.GainMode(mode), seed=seed)
    return gio.random_gains(gio.parse_graph6(g6), spec), spec


def _spectrum_record(g: GainGraph, recipe) -> dict:
    dec = eigendecompose(adjacency(g))
    rho = dec.spectral_radius
    if recipe[0] == "cycle":
        _, n, label = recipe
        theta = parse_angle(label)
        theta = float(theta) * math.pi if not isinstance(theta, float) else theta
        closed = np.sort([2 * math.cos((theta + 2 * math.pi * j) / n) for j in range(n)])[::-1]
        dev = float(np.abs(closed - dec.eigenvalues).max())
        ok = dev < SPECTRUM_TOL
        detail = {"max_deviation": dev}
    else:
        unit = dec.unitarity_defect()
        trace = abs(float(dec.eigenvalues.sum()))
        ok = dec.residual <= 1e-9 * max(1.0, rho) and unit <= 1e-10 and trace <= 1e-9
        dev = dec.residual
        detail = {"residual": dec.residual, "unitarity_defect": unit, "trace": trace}
    return {
        "theorem": "SPECTRUM", "kind": "oracle", "vertex": None, "component": None,
        "bound": SPECTRUM_TOL, "actual": dev, "slack": SPECTRUM_TOL - dev, "holds": ok,
        "equality": False, "characterizer": None, "characterizer_agrees": None,
        "tolerance_event": False, "skipped": None, "detail": detail,
    }


def _verify_one(job):
    key, recipe, theorems = job
    g, spec = _rebuild(recipe)
    records = []
    if "SPECTRUM" in theorems:
        records.append(_spectrum_record(g, recipe))
    wanted = [t for t in theorems if t != "SPECTRUM"]
    if wanted:
        records += [report_to_dict(r) for r in B.run_all(g, theorems=wanted)]
    out = {"key": key, "n": g.n, "m": g.m, "reports": records}
    if spec is not None:
        out["gains"] = {"mode": spec.mode.value, "seed": spec.seed}
    return out


ALL_THEOREMS = [t.value for t in B.TheoremId] + ["SPECTRUM"]


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    theorems = args.theorem or [t for t in ALL_THEOREMS if t not in ("SPECTRUM",)]
    for t in theorems:
        if t not in ALL_THEOREMS:
            raise CliError(f"unknown theorem {t!r}", EXIT_PARSE)
    for m in args.gains:
        _gain_spec(m, 0)
    if args.n_max > comb.SUBSET_CAP:
        raise CliError(f"--n-max capped at {comb.SUBSET_CAP}", EXIT_CAP)
    if args.family == "cycles":
        instances = list(_cycle_instances(args.n_max, seed, args.samples))
    else:
        try:
            instances = list(_corpus_instances(args, seed))
        except comb.CapExceeded as exc:
            raise CliError(str(exc), EXIT_CAP) from None
    instances.sort(key=lambda kv: kv[0])
    jobs = [(key, recipe, tuple(theorems)) for key, recipe in instances]

    t0 = time.perf_counter()
    workers = args.jobs or os.cpu_count() or 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_one, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        results = [_verify_one(j) for j in jobs]

    tallies: dict[str, Tally] = {}
    for res in results:
        for r in res["reports"]:
            tallies.setdefault(r["theorem"], Tally()).add(r, res["key"])

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            for res in results:
                fh.write(dumps(res) + "\n")

    summary = {
        "schema": SCHEMA,
        "corpus": {"family": args.family, "n_min": args.n_min, "n_max": args.n_max,
                   "gains": list(args.gains), "samples": args.samples, "seed": seed,
                   "bipartite_only": args.bipartite_only,
                   "connected_only": not args.include_disconnected},
        "instances": len(results),
        "theorems": {k: vars(tallies[k]) for k in sorted(tallies)},
    }
    if args.timing:
        summary["timing"] = {"seconds": time.perf_counter() - t0}
    if args.json:
        print(dumps(summary))
    else:
        print(f"instances checked: {len(results)}")
        print(f"{'theorem':<15}{'checked':>9}{'holds':>9}{'equal':>9}{'tol-ev':>8}{'fail':>6}"
              f"{'disagree':>9}{'skip':>6}  min slack (instance)")
        for k in sorted(tallies):
            t = tallies[k]
            ms = "-" if t.min_slack_instance is None else f"{t.min_slack:.3e} ({t.min_slack_instance})"
            print(f"{k:<15}{t.checked:>9}{t.holds:>9}{t.equality:>9}{t.tolerance_events:>8}"
                  f"{t.failures:>6}{t.disagreements:>9}{t.skipped:>6}  {ms}")
    bad = sum(t.failures + t.disagreements for t in tallies.values())
    return EXIT_VERIFY if bad else EXIT_OK


# -- convert ----------------------------------------------------------------

def _format_of(path: str, override: str | None) -> str:
    if override:
        return override
    suffix = Path(path).suffix.lower()
    if suffix in (".g6", ".graph6"):
        return "graph6"
    if suffix == ".ggf":
        return "ggf"
    raise CliError(f"cannot tell the format of {path!r}; use --from/--to", EXIT_PARSE)


def cmd_convert(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    spec = gio.GainAssignmentSpec(gio.GainMode.ALL_ONE, seed=seed)
    name = args.input.partition(":")[0]
    if name in GENERATORS and not Path(args.input).exists():
        g = build_input(args.input, spec)
    else:
        fmt = _format_of(args.input, args.src_format)
        try:
            text = Path(args.input).read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read {args.input}: {exc.strerror or exc}", EXIT_PARSE) from None
        try:
            g = gio.parse_ggf(text) if fmt == "ggf" else gio.random_gains(gio.parse_graph6(text.strip()), spec)
        except (GainParseError, GraphError) as exc:
            raise CliError(f"parse error: {exc}", EXIT_PARSE) from None
    out_fmt = _format_of(args.output, args.dst_format)
    if out_fmt == "graph6":
        if not g.is_all_one(tol=1e-12):
            if not args.force:
                raise CliError("graph6 cannot store gains; refusing lossy export (use --force)", EXIT_LOSSY)
            print("warning: gains dropped in graph6 export", file=sys.stderr)
        payload = gio.encode_graph6(g) + "\n"
    else:
        payload = gio.write_ggf(g)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(payload)
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gainspec", description="Energy of complex unit gain graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full report for one graph")
    a.add_argument("input", help="GGF or graph6 file, or a generator such as cycle:n=5,theta=pi/2")
    a.add_argument("--json", action="store_true", help="machine-readable output")
    a.add_argument("--gains", default="all-one", help="gain mode for generators and graph6 input")
    a.add_argument("--seed", type=int, default=None, help="seed for random gains (default $GAINSPEC_SEED or 0)")
    a.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte identity)")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="sweep theorems over a corpus")
    v.add_argument("--n-min", type=int, default=1)
    v.add_argument("--n-max", type=int, default=8)
    v.add_argument("--gains", type=lambda s: [x.strip() for x in s.split(",") if x.strip()],
                   default=["all-one", "all-minus-one", "uniform", "gaussian"],
                   help="comma list of gain modes")
    v.add_argument("--theorem", action="append", help="theorem id (repeatable); SPECTRUM checks the eigensolver")
    v.add_argument("--family", choices=("all", "cycles"), default="all")
    v.add_argument("--bipartite-only", action="store_true")
    v.add_argument("--include-disconnected", action="store_true")
    v.add_argument("--samples", type=int, default=2, help="draws per random gain mode")
    v.add_argument("--out", help="write one JSON record per instance to this path")
    v.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--json", action="store_true")
    v.add_argument("--timing", action="store_true")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("convert", help="graph6 <-> GGF")
    c.add_argument("input")
    c.add_argument("output")
    c.add_argument("--from", dest="src_format", choices=("graph6", "ggf"))
    c.add_argument("--to", dest="dst_format", choices=("graph6", "ggf"))
    c.add_argument("--force", action="store_true", help="allow dropping gains when writing graph6")
    c.add_argument("--seed", type=int, default=None)
    c.set_defaults(func=cmd_convert)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"gainspec: {exc}", file=sys.stderr)
        return exc.code
    except comb.CapExceeded as exc:
        print(f"gainspec: {exc}", file=sys.stderr)
        return EXIT_CAP
    except EigenConvergenceError as exc:
        print(f"gainspec: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
