"""Command-line front end: ``qnrlab <subcommand> [flags]``.

Output is CSV on stdout (or ``--out``), JSON lines with ``--json``.  With
``--out`` a manifest ``<out>.manifest.json`` records argv, versions and the
output hash.  Exit codes: 0 ok, 2 domain error, 3 resource or precision
error, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import random
import sys
import tempfile
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from . import __version__
from .errors import DomainError, PrecisionError, ResourceError
from .records import ExperimentRecord, cached_primes, emit_csv, emit_jsonl, write_manifest

EXIT_OK, EXIT_DOMAIN, EXIT_RESOURCE, EXIT_USAGE = 0, 2, 3, 64

SUBCOMMANDS = ("scan-density", "beatty", "ps", "exppairs", "discrepancy", "pairs", "constants")

log = logging.getLogger("qnrlab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- helpers ----------------------------------------------------------------------

def _primes_from(args) -> List[int]:
    if args.prime_range:
        try:
            a, b = (int(x) for x in args.prime_range.split(":"))
        except ValueError:
            raise UsageError(f"--prime-range expects A:B, got {args.prime_range!r}")
        return [q for q in cached_primes(b) if q >= max(a, 3)]
    if args.prime:
        return list(args.prime)
    raise UsageError("one of --prime or --prime-range is required")


def _timed(fn: Callable[[], dict]):
    t0 = time.perf_counter()
    out = fn()
    return out, int((time.perf_counter() - t0) * 1000)


def _run_tasks(fn, items: Sequence, jobs: int) -> list:
    """Map ``fn`` over items; results come back in input order for any job count."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def _inf(v):
    return "inf" if v is None else v


# -- per-task workers (top level so they pickle) ---------------------------------

def _task_density(p: int, epsilon: float, grid: str):
    from .density import density_scan, hildebrand_ratio
    from .ntcore import least_nonresidue

    def go():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = density_scan(p, epsilon, grid)
        return {
            "window_lo": r.window[0], "window_hi": r.window[1], "points": r.points_scanned,
            "grid": r.grid, "min_density": r.min_density, "argmin_N": r.argmin_N,
            "max_abs_charsum_ratio": r.max_abs_charsum_ratio,
            "least_nonresidue": least_nonresidue(p),
            "hildebrand_ratio": hildebrand_ratio(p) if p >= 17 else None,
        }
    return _timed(go)


def _task_beatty(p: int, alpha: str, beta: str, prec: int, cap: int):
    from .sequences import BeattyParams, least_beatty_nonresidue

    params = BeattyParams.parse(alpha, beta, prec)
    return _timed(lambda: {"N": _inf(least_beatty_nonresidue(params, p, cap))})


def _task_theorem2(p: int, alpha: str, beta: str, prec: int, epsilon: float):
    from .analytic import theorem2_experiment
    from .sequences import BeattyParams

    params = BeattyParams.parse(alpha, beta, prec)

    def go():
        r = theorem2_experiment(p, params, epsilon)
        return {
            "N": r.N, "M": r.M, "sigma": r.sigma_target, "reflected": r.reflected,
            "W_plus": r.counts[1][0], "V_plus": r.counts[1][1],
            "W_minus": r.counts[-1][0], "V_minus": r.counts[-1][1],
            "witnesses": r.verified, "least_index": _inf(r.least_index), "H": _inf(r.H),
        }
    return _timed(go)


def _task_ps(p: int, c: str, cap: int):
    from .sequences import PSParams, least_ps_nonresidue

    return _timed(lambda: {"N": _inf(least_ps_nonresidue(PSParams.of(c), p, cap))})


def _task_theorem3(p: int, c: str, pair: str, epsilon: float, A: float, prec: int):
    from .sequences import PSParams, theorem3_pipeline

    def go():
        r = theorem3_pipeline(PSParams.of(c), p, pair, epsilon, A, prec)
        return {
            "X": r.X, "delta_hat": r.delta_hat, "J": r.J, "L": r.L, "M": r.M,
            "size_L": r.size_L, "size_M": r.size_M, "hits": r.hits, "mismatches": r.mismatches,
            "witnesses": r.verified, "least_witness": _inf(min(r.witnesses, default=None)),
        }
    return _timed(go)


def _task_pairs(p: int, N: int, M: int, sigma: int, alpha: str, beta: str, prec: int):
    from .analytic import pair_count_V
    from .sequences import BeattyParams

    params = BeattyParams.parse(alpha, beta, prec)

    def go():
        r = pair_count_V(p, N, M, sigma, params)
        return {"count_W": r.count_W, "count_V": r.count_V, "lambda": r.lam,
                "ratio": (r.count_V / r.count_W) if r.count_W else None}
    return _timed(go)


# -- subcommands ------------------------------------------------------------------

def _cmd_scan_density(args) -> List[ExperimentRecord]:
    primes = _primes_from(args)
    eps = 0.01 if args.epsilon is None else args.epsilon
    res = _run_tasks(partial(_task_density, epsilon=eps, grid=args.grid), primes, args.jobs)
    return [ExperimentRecord("scan-density", {"p": p, "epsilon": eps, "grid": args.grid}, out, ms)
            for p, (out, ms) in zip(primes, res)]


def _cmd_beatty(args) -> List[ExperimentRecord]:
    primes = _primes_from(args)
    base = {"alpha": args.alpha, "beta": args.beta, "precision_bits": args.precision_bits}
    if args.theorem2:
        eps = 0.4 if args.epsilon is None else args.epsilon
        fn = partial(_task_theorem2, alpha=args.alpha, beta=args.beta,
                     prec=args.precision_bits, epsilon=eps)
        base["epsilon"] = eps
    else:
        fn = partial(_task_beatty, alpha=args.alpha, beta=args.beta,
                     prec=args.precision_bits, cap=args.cap)
        base["cap"] = args.cap
    res = _run_tasks(fn, primes, args.jobs)
    return [ExperimentRecord("beatty", {"p": p, **base}, out, ms) for p, (out, ms) in zip(primes, res)]


def _cmd_ps(args) -> List[ExperimentRecord]:
    primes = _primes_from(args)
    if args.pipeline:
        eps = 0.3 if args.epsilon is None else args.epsilon
        pair = args.pair or "1/2,1/2"
        fn = partial(_task_theorem3, c=args.c, pair=pair, epsilon=eps, A=args.A,
                     prec=args.precision_bits)
        base = {"c": args.c, "pair": pair, "epsilon": eps, "A": args.A}
    else:
        fn = partial(_task_ps, c=args.c, cap=args.cap)
        base = {"c": args.c, "cap": args.cap}
    res = _run_tasks(fn, primes, args.jobs)
    return [ExperimentRecord("ps", {"p": p, **base}, out, ms) for p, (out, ms) in zip(primes, res)]


def _cmd_exppairs(args) -> List[ExperimentRecord]:
    from .exppairs import ExponentPair, search_best_c

    seeds = [ExponentPair.parse(s) for s in args.seed_pair] if args.seed_pair else None
    t0 = time.perf_counter()
    r = search_best_c(seeds, args.depth)
    ms = int((time.perf_counter() - t0) * 1000)
    out = {
        "best_kappa": r.best_pair.kappa, "best_lambda": r.best_pair.lam,
        "word": r.best_pair.word, "best_c": r.best_c, "best_c_float": float(r.best_c),
        "pairs_seen": r.pairs_seen, "per_depth": [str(c) for c in r.per_depth],
    }
    params = {"depth": args.depth, "seeds": args.seed_pair or ["0,1"]}
    return [ExperimentRecord("exppairs", params, out, ms)]


def _cmd_discrepancy(args) -> List[ExperimentRecord]:
    from .analytic import UnitSequence, erdos_turan_bound, star_discrepancy
    from .fixed import parse_real

    if args.alpha is not None:
        a, _ = parse_real(args.alpha, args.precision_bits)
        seq = UnitSequence.kronecker(a, args.terms)
        params = {"alpha": args.alpha, "terms": args.terms}
    else:
        if args.seed is None:
            raise UsageError("random sequences need --seed")
        rng = random.Random(args.seed)
        seq = UnitSequence.of([rng.random() for _ in range(args.terms)])
        params = {"seed": args.seed, "terms": args.terms}
    d = star_discrepancy(seq)
    recs = []
    for H in args.H:
        t0 = time.perf_counter()
        b = erdos_turan_bound(seq, H)
        ms = int((time.perf_counter() - t0) * 1000)
        recs.append(ExperimentRecord("discrepancy", {**params, "H": H},
                                     {"star_discrepancy": d, "erdos_turan": b, "dominates": b >= d}, ms))
    return recs


def _cmd_pairs(args) -> List[ExperimentRecord]:
    primes = _primes_from(args)
    if args.N is None or args.M is None:
        raise UsageError("pairs needs --N and --M")
    fn = partial(_task_pairs, N=args.N, M=args.M, sigma=args.sigma, alpha=args.alpha,
                 beta=args.beta, prec=args.precision_bits)
    res = _run_tasks(fn, primes, args.jobs)
    base = {"N": args.N, "M": args.M, "sigma": args.sigma, "alpha": args.alpha, "beta": args.beta}
    return [ExperimentRecord("pairs", {"p": p, **base}, out, ms) for p, (out, ms) in zip(primes, res)]


def _cmd_constants(args) -> List[ExperimentRecord]:
    from .density import BURGESS_EXPONENT, gs_curves, xi_constant

    if args.gs_curves:
        xi = xi_constant(args.tolerance)
        lo = math.exp(-0.5)
        k = args.points
        recs = []
        for i in range(k):
            a = lo + (1 - lo) * i / (k - 1) if k > 1 else 1.0
            t4, conj = gs_curves(min(a, 1.0), xi)
            recs.append(ExperimentRecord("constants", {"alpha": a, "curve": "gs"},
                                         {"theorem4": t4, "conjecture": conj}))
        return recs
    t0 = time.perf_counter()
    xi = xi_constant(args.tolerance)
    ms = int((time.perf_counter() - t0) * 1000)
    return [ExperimentRecord("constants", {"tolerance": args.tolerance},
                             {"xi": xi, "burgess_exponent": BURGESS_EXPONENT}, ms)]


COMMANDS = {
    "scan-density": _cmd_scan_density,
    "beatty": _cmd_beatty,
    "ps": _cmd_ps,
    "exppairs": _cmd_exppairs,
    "discrepancy": _cmd_discrepancy,
    "pairs": _cmd_pairs,
    "constants": _cmd_constants,
}


def _sigma(s: str) -> int:
    v = int(s)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("sigma must be +1 or -1")
    return v


def _int_list(s: str) -> List[int]:
    return [int(x) for x in s.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--prime", type=int, action="append")
    g.add_argument("--prime-range")
    g.add_argument("--epsilon", type=float)
    g.add_argument("--cap", type=int, default=10**6)
    g.add_argument("--precision-bits", type=int, default=192)
    g.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    g.add_argument("--seed", type=int)
    g.add_argument("--json", action="store_true")
    g.add_argument("--timings", action="store_true", help="include runtime_ms in JSON output")
    g.add_argument("--out")

    parser = _Parser(prog="qnrlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("scan-density", parents=[common])
    s.add_argument("--grid", choices=("auto", "exact", "geometric"), default="auto")

    s = sub.add_parser("beatty", parents=[common])
    s.add_argument("--alpha", default="sqrt2")
    s.add_argument("--beta", default="0")
    s.add_argument("--theorem2", action="store_true")

    s = sub.add_parser("ps", parents=[common])
    s.add_argument("--c", default="11/10")
    s.add_argument("--pipeline", action="store_true")
    s.add_argument("--pair")
    s.add_argument("--A", type=float, default=1.0)

    s = sub.add_parser("exppairs", parents=[common])
    s.add_argument("--depth", type=int, default=12)
    s.add_argument("--seed-pair", action="append")

    s = sub.add_parser("discrepancy", parents=[common])
    s.add_argument("--alpha")
    s.add_argument("--terms", type=int, default=1000)
    s.add_argument("--H", type=_int_list, default=[1, 5, 10, 50])

    s = sub.add_parser("pairs", parents=[common])
    s.add_argument("--N", type=int)
    s.add_argument("--M", type=int)
    s.add_argument("--sigma", type=_sigma, default=-1)
    s.add_argument("--alpha", default="sqrt2")
    s.add_argument("--beta", default="0")

    s = sub.add_parser("constants", parents=[common])
    s.add_argument("--xi", action="store_true")
    s.add_argument("--gs-curves", action="store_true")
    s.add_argument("--points", type=int, default=21)
    s.add_argument("--tolerance", type=float, default=1e-10)
    return parser


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout.buffer
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required: " + ", ".join(SUBCOMMANDS))
        t0 = time.perf_counter()
        records = COMMANDS[args.command](args)
        wall = int((time.perf_counter() - t0) * 1000)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ResourceError, PrecisionError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE

    data = emit_jsonl(records, args.timings) if args.json else emit_csv(records)
    if args.out:
        out = Path(args.out)
        out.write_bytes(data)
        write_manifest(Path(str(out) + ".manifest.json"), argv, data,
                       {"wall_ms": wall, "jobs": args.jobs, "seed": args.seed,
                        "runtime_ms": [r.runtime_ms for r in records]})
    else:
        stdout.write(data)
        stdout.flush()
    return EXIT_OK


def replay_manifest(path) -> bool:
    """Re-run the argv stored in a manifest and compare output hashes."""
    manifest = json.loads(Path(path).read_text())
    argv = list(manifest["argv"])
    if "--out" in argv:
        i = argv.index("--out")
        del argv[i : i + 2]
    argv = [a for a in argv if not a.startswith("--out=")]
    with tempfile.TemporaryDirectory() as d:
        target = Path(d) / "replay.out"
        if main(argv + ["--out", str(target)]) != EXIT_OK:
            return False
        digest = hashlib.sha256(target.read_bytes()).hexdigest()
    return digest == manifest["output_sha256"]


if __name__ == "__main__":
    sys.exit(main())
