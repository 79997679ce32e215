"""``lrgakit`` command line.

Exit codes: 0 success, 1 a checked property was violated, 2 usage or input
error.  Structured reports are JSON, sweeps are CSV.  With ``--out DIR`` (or
``$LRGAKIT_OUT``) reports and a ``manifest.json`` go to that directory;
otherwise the report goes to stdout and the manifest to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
import tracemalloc
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import median
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .attention import LrgaParams, dense_attention_oracle, lrga_forward
from .checks import RIDGE_CASES, kernel_identity_suite, ridge_identity_suite
from .graph6 import Graph6Error, parse_graph6_lines
from .graphs import random_graph
from .mlp import INIT_SCHEME, MonomialTask, TrainConfig, sample_complexity_experiment
from .rgnn import PRNG_ALGORITHM, RandomFeatureConfig, factorization_error, hoeffding_failure_bound, sample_features
from .wl import iso_test

OUT_ENV = "LRGAKIT_OUT"
DENSE_MAX_N = 256


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seeds: list
    build: str
    prng: str
    started: float
    seconds: float = 0.0
    outputs: list = field(default_factory=list)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return "" if v is None else str(v)


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def to_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Emitter:
    def __init__(self, args, manifest: RunManifest):
        out = args.out or os.environ.get(OUT_ENV)
        self.dir = Path(out) if out else None
        self.manifest = manifest
        self.format = args.format

    def emit(self, name: str, text: str, stdout: bool = True):
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)
            path = self.dir / name
            path.write_text(text)
            self.manifest.outputs.append(str(path))
        elif stdout:
            sys.stdout.write(text)

    def table(self, stem: str, header, rows):
        if self.format == "json":
            self.emit(f"{stem}.json", to_json([dict(zip(header, r)) for r in rows]))
        else:
            self.emit(f"{stem}.csv", to_csv(header, rows))

    def close(self):
        self.manifest.seconds = time.time() - self.manifest.started
        text = to_json(asdict(self.manifest))
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)
            (self.dir / "manifest.json").write_text(text)
        else:
            sys.stderr.write(text)


# ---- subcommands --------------------------------------------------------------


def cmd_iso(args, em: _Emitter) -> int:
    graphs, names = [], []
    for path in args.files:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise UsageError(f"{path}: {exc}") from None
        try:
            found = parse_graph6_lines(text)
        except Graph6Error as exc:
            raise UsageError(f"{path}: {exc}") from None
        graphs += found
        names += [f"{path}#{k}" for k in range(len(found))]
    if len(graphs) < 2:
        raise UsageError("need at least two graphs")
    m = len(graphs)
    verdicts = [[None] * m for _ in range(m)]
    witness = [[None] * m for _ in range(m)]
    pairs = []
    for i in range(m):
        for j in range(i, m):
            v = iso_test(graphs[i], graphs[j], args.algorithm)
            verdicts[i][j] = verdicts[j][i] = v.verdict.value
            witness[i][j] = witness[j][i] = v.witness
            pairs.append(
                {
                    "i": i,
                    "j": j,
                    "verdict": v.verdict.value,
                    "witness": v.witness,
                    "histograms": [[[list(c) for c in a], [list(c) for c in b]] for a, b in v.histograms],
                }
            )
    report = {
        "algorithm": args.algorithm,
        "graphs": [{"name": nm, "n": g.n, "edges": len(g.edges)} for nm, g in zip(names, graphs)],
        "verdicts": verdicts,
        "witness": witness,
        "pairs": pairs,
    }
    em.emit("iso.json", to_json(report))
    return 0


def cmd_kernel_check(args, em: _Emitter) -> int:
    kern = kernel_identity_suite(args.cases, args.seed, args.max_degree, args.max_block_dim, perturb=args.perturb)
    ridge = ridge_identity_suite(RIDGE_CASES, args.points, args.seed, perturb=args.perturb)
    report = {"kernel_identity": kern, "ridge_identity": ridge, "perturb": args.perturb, "seed": args.seed}
    em.emit("kernel_check.json", to_json(report))
    return 0 if kern["pass"] and ridge["pass"] else 1


def time_forward(x: np.ndarray, params: LrgaParams, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        lrga_forward(x, params)
        times.append(time.perf_counter() - t)
    return median(times)


def peak_forward_bytes(x: np.ndarray, params: LrgaParams) -> int:
    tracemalloc.start()
    tracemalloc.reset_peak()
    try:
        base = tracemalloc.get_traced_memory()[0]
        lrga_forward(x, params)
        return tracemalloc.get_traced_memory()[1] - base
    finally:
        tracemalloc.stop()


def cmd_lrga_bench(args, em: _Emitter) -> int:
    if args.n_list != sorted(args.n_list):
        raise UsageError("--n-list must be ascending")
    rng = np.random.default_rng(args.seed)
    params = LrgaParams.random(args.d_in, args.kappa, rng)
    rows = []
    for n in args.n_list:
        x = rng.normal(size=(n, args.d_in))
        secs = time_forward(x, params, args.repeats)
        peak = peak_forward_bytes(x, params)
        dense_secs = dense_dev = None
        if n <= DENSE_MAX_N:
            t = time.perf_counter()
            dense = dense_attention_oracle(x, params)
            dense_secs = time.perf_counter() - t
            fast = lrga_forward(x, params)
            dense_dev = float(np.abs(fast - dense).max() / (1 + np.abs(dense).max()))
        rows.append([n, args.kappa, args.d_in, secs, peak, dense_secs, dense_dev])
    em.table("lrga_bench", ["n", "kappa", "d_in", "seconds", "peak_bytes", "dense_seconds", "dense_rel_dev"], rows)
    return 0


def cmd_factorize(args, em: _Emitter) -> int:
    g = random_graph(args.n, args.p, args.seed)
    rows, summary = [], []
    for d in args.d_list:
        cfg = RandomFeatureConfig.unit_uniform(d, args.seed) if args.dist == "uniform" else RandomFeatureConfig(d, seed=args.seed)
        devs = []
        for t in range(args.trials):
            r = sample_features(g.n, cfg, t)
            dev = factorization_error(g.adjacency, r, cfg.entry_variance)
            devs.append(dev)
            rows.append([args.n, d, args.seed, t, dev.gram_dev, dev.adj_dev])
        entry = {
            "d": d,
            "median_gram_dev": median(v.gram_dev for v in devs),
            "median_adj_dev": median(v.adj_dev for v in devs),
        }
        if args.dist == "uniform":
            entry["hoeffding_bound_t0.1"] = hoeffding_failure_bound(args.n, d, 0.1, cfg.bound)
        summary.append(entry)
    meds = [s["median_gram_dev"] for s in summary]
    decreasing = all(b < a for a, b in zip(meds, meds[1:]))
    em.table("factorize", ["n", "d", "seed", "trial", "gram_dev", "adj_dev"], rows)
    doc = {"distribution": args.dist, "n": args.n, "p": args.p, "per_d": summary, "median_decreasing": decreasing}
    em.emit("factorize_summary.json", to_json(doc), stdout=False)
    return 0 if decreasing else 1


def cmd_learn(args, em: _Emitter) -> int:
    if args.grid != sorted(args.grid):
        raise UsageError("--grid must be ascending")
    if any(m < 10 for m in args.grid):
        raise UsageError("--grid sizes must be at least 10")
    task = MonomialTask(tuple(args.delta), append_one=not args.no_append_one)
    seeds = list(range(args.seed, args.seed + args.n_seeds))
    cfg = TrainConfig(learning_rate=args.lr, steps=args.steps, batch_size=args.batch_size, seed=args.seed)
    table = sample_complexity_experiment(task, args.grid, seeds, args.width, cfg)
    rows = [[r.m, r.median_test_mse, r.bound] + list(r.test_mses) for r in table.rows]
    header = ["m", "median_test_mse", "bound"] + [f"test_mse_seed{s}" for s in seeds]
    em.table("learn", header, rows)
    meta = {
        "delta": args.delta,
        "width": args.width,
        "seeds": seeds,
        "config": asdict(cfg),
        "init_scheme": INIT_SCHEME,
        "initial_loss_only": args.steps == 0,
        "monotone": table.monotone,
        "inversions": table.inversions,
        "bound_note": "bound up to the unstated constant",
    }
    em.emit("learn_run.json", to_json(meta), stdout=False)
    if args.steps == 0:
        return 0
    return 0 if table.monotone else 1


# ---- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV}, else stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    p = argparse.ArgumentParser(prog="lrgakit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"lrgakit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("iso", parents=[common], help="pairwise isomorphism screening of graph6 files")
    s.add_argument("files", nargs="+")
    s.add_argument("--algorithm", choices=("wl1", "fwl2"), default="fwl2")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("kernel-check", parents=[common], help="kernel and ridge-decomposition identity suites")
    s.add_argument("--cases", type=int, default=1000)
    s.add_argument("--max-degree", type=int, default=4)
    s.add_argument("--max-block-dim", type=int, default=4)
    s.add_argument("--points", type=int, default=100)
    s.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_kernel_check)

    s = sub.add_parser("lrga-bench", parents=[common], help="LRGA forward timing and peak memory")
    s.add_argument("--n-list", type=_int_list, default=[1000, 10000, 20000])
    s.add_argument("--kappa", type=int, default=32)
    s.add_argument("--d-in", type=int, default=32)
    s.add_argument("--repeats", type=int, default=5)
    s.set_defaults(func=cmd_lrga_bench)

    s = sub.add_parser("factorize", parents=[common], help="random-feature concentration sweep")
    s.add_argument("--n", type=int, default=50)
    s.add_argument("--d-list", type=_int_list, default=[100, 1000, 10000])
    s.add_argument("--dist", choices=("uniform", "gaussian"), default="uniform")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--p", type=float, default=0.3, help="edge probability of the random graph")
    s.set_defaults(func=cmd_factorize)

    s = sub.add_parser("learn", parents=[common], help="monomial learnability sweep")
    s.add_argument("--delta", type=_int_list, required=True, help="monomial exponents, e.g. 2 or 1,1")
    s.add_argument("--grid", type=_int_list, default=[50, 200, 1000])
    s.add_argument("--n-seeds", type=int, default=3)
    s.add_argument("--width", type=int, default=512)
    s.add_argument("--lr", type=float, default=TrainConfig.learning_rate)
    s.add_argument("--steps", type=int, default=TrainConfig.steps)
    s.add_argument("--batch-size", type=int, default=None)
    s.add_argument("--no-append-one", action="store_true")
    s.set_defaults(func=cmd_learn)
    return p


DEFAULT_FORMATS = {"iso": "json", "kernel-check": "json"}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = DEFAULT_FORMATS.get(args.command, "csv")
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "out", "format")}
    manifest = RunManifest(
        command=args.command,
        parameters=params,
        seeds=[args.seed],
        build=f"lrgakit {__version__}; numpy {np.__version__}",
        prng=PRNG_ALGORITHM,
        started=time.time(),
    )
    em = _Emitter(args, manifest)
    try:
        code = args.func(args, em)
    except (UsageError, ValueError) as exc:
        parser.exit(2, f"lrgakit {args.command}: error: {exc}\n")
    em.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
