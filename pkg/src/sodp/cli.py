"""Command-line driver: ``sodp <subcommand> [flags]``.

Exit status is 0 on success, 1 on usage errors and 2 on data or runtime
errors. Every CSV written starts with one ``#`` line holding the full run
configuration as JSON.
"""
from __future__ import annotations

import argparse
import contextlib
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .prime_store import CacheError, PrimeStore, build_primes, load_cache, save_cache
from .sources import DEFAULT_PRIME_COUNT, SourceError, SourceKind, SourceSpec

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

SWEEP_SOURCES = {
    "primes": SourceKind.PRIMES,
    "random-odd": SourceKind.RANDOM_ODD,
    "random-all": SourceKind.RANDOM_ALL,
    "products": SourceKind.PRIME_PRODUCTS,
    "chebyshev": SourceKind.CHEBYSHEV_BALANCED,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int(text: str) -> int:
    try:
        value = int(float(text)) if "e" in text.lower() else int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return value


def _int_list(text: str) -> list:
    return [_int(t) for t in text.split(",") if t]


def _float_list(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_int, default=ex.DEFAULT_SEED)
    common.add_argument("--base", type=_int, default=10)
    common.add_argument("--prime-count", type=_int, default=None,
                        help=f"population size (default: cache size, else {DEFAULT_PRIME_COUNT})")
    common.add_argument("--cache", type=Path, default=None,
                        help="prime cache file (default: $SODP_CACHE_DIR/primes-N.bin)")
    common.add_argument("--output", "-o", type=Path, default=None)
    common.add_argument("--fit-output", type=Path, default=None)
    common.add_argument("--plot-data", type=Path, default=None,
                        help="also write the figure's points in the sweep schema")
    common.add_argument("--threads", type=_int, default=None)

    p = _Parser(prog="sodp", description="Digit-sum parity experiments on primes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sieve", parents=[common], help="build and cache the first N primes")
    s.add_argument("--count", type=_int, default=None)

    sub.add_parser("census", parents=[common], help="exact parity counts over the store")

    s = sub.add_parser("sweep", parents=[common], help="trial sweep over sample sizes")
    s.add_argument("--source", choices=sorted(SWEEP_SOURCES), default="primes")
    s.add_argument("--sizes", type=_int_list, default=list(ex.TABLE_GRID))
    s.add_argument("--trials", type=_int, default=1000)
    s.add_argument("--range-max", type=_int, default=None)
    s.add_argument("--fit", action="store_true", help="attach the quadratic-in-ln(s) fit")

    s = sub.add_parser("distinguish", parents=[common], help="primes-vs-random decision")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--source", choices=("primes", "random-odd"), default=None)
    g.add_argument("--input", type=Path, default=None,
                   help="number set, one decimal integer per line")
    s.add_argument("--sample-size", type=_int, default=100_000)
    s.add_argument("--trials", type=_int, default=1000)
    s.add_argument("--threshold", type=float, default=5.0)
    s.add_argument("--range-max", type=_int, default=None)

    s = sub.add_parser("products", parents=[common], help="prime-product sweep")
    s.add_argument("--sizes", type=_int_list, default=list(ex.TABLE_GRID))
    s.add_argument("--trials", type=_int, default=100)

    s = sub.add_parser("bias-sweep", parents=[common], help="parity-biased random products")
    s.add_argument("--rates", type=_float_list, default=list(ex.BIAS_RATES))
    s.add_argument("--sample-size", type=_int, default=400_000)
    s.add_argument("--trials", type=_int, default=100)
    s.add_argument("--range-max", type=_int, default=None)

    s = sub.add_parser("mixed", parents=[common], help="random numbers tainted with primes")
    s.add_argument("--fractions", type=_float_list, default=list(ex.MIX_FRACTIONS))
    s.add_argument("--sample-size", type=_int, default=300_000)
    s.add_argument("--trials", type=_int, default=1000)
    s.add_argument("--range-max", type=_int, default=None)

    s = sub.add_parser("chebyshev", parents=[common], help="mod-4 balanced prime samples")
    s.add_argument("--sizes", type=_int_list, default=list(ex.TABLE_GRID))
    s.add_argument("--trials", type=_int, default=100)

    s = sub.add_parser("modexp", parents=[common], help="parity of p mod r")
    s.add_argument("--pool", type=_int, default=1000)
    s.add_argument("--subset", type=_int, default=100)
    s.add_argument("--randoms", type=_int, default=1_000_000)
    s.add_argument("--range-max", type=_int, default=None)

    s = sub.add_parser("bases", parents=[common], help="prime sweep over even bases")
    s.add_argument("--bases", type=_int_list, default=list(ex.EVEN_BASES))
    s.add_argument("--sample-size", type=_int, default=100_000)
    s.add_argument("--trials", type=_int, default=1000)
    return p


def _positive(name, value):
    if value is not None and value < 1:
        raise UsageError(f"--{name} must be positive")


def validate(args) -> None:
    """Reject bad configurations before any cache or sieve work."""
    if args.base < 2:
        raise UsageError("--base must be at least 2")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must fit in 64 bits")
    for name in ("prime_count", "threads", "trials", "sample_size", "count", "pool",
                 "subset", "randoms"):
        _positive(name.replace("_", "-"), getattr(args, name, None))
    rm = getattr(args, "range_max", None)
    if rm is not None and not 3 <= rm < 2**64:
        raise UsageError("--range-max must lie in [3, 2**64)")
    for name in ("sizes", "bases"):
        values = getattr(args, name, None)
        if values is not None:
            if not values or min(values) < 1:
                raise UsageError(f"--{name} needs positive values")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise UsageError(f"--{name} must be strictly increasing")
    if args.command == "bases":
        odd = [b for b in args.bases if b % 2 or b < 2]
        if odd:
            raise UsageError(f"--bases must be even and >= 2 (odd bases are degenerate): {odd}")
    if args.command == "chebyshev" and any(s % 2 for s in args.sizes):
        raise UsageError("--sizes must be even for balanced samples")
    if args.command == "bias-sweep":
        if not args.rates or any(not 0.5 <= r <= 1.0 for r in args.rates):
            raise UsageError("--rates must lie in [0.5, 1]")
        if any(b <= a for a, b in zip(args.rates, args.rates[1:])):
            raise UsageError("--rates must be strictly increasing")
    if args.command == "mixed":
        if not args.fractions or any(not 0.0 <= x <= 1.0 for x in args.fractions):
            raise UsageError("--fractions must lie in [0, 1]")
        if any(b <= a for a, b in zip(args.fractions, args.fractions[1:])):
            raise UsageError("--fractions must be strictly increasing")
    if args.command == "modexp" and not args.subset <= args.pool:
        raise UsageError("--subset cannot exceed --pool")
    if args.command == "distinguish" and args.input is None and args.source is None:
        args.source = "primes"
    if args.command == "sieve" and args.cache is None and not os.environ.get("SODP_CACHE_DIR"):
        raise UsageError("sieve needs --cache or SODP_CACHE_DIR")


def cache_path(args):
    if args.cache is not None:
        return args.cache
    root = os.environ.get("SODP_CACHE_DIR")
    if not root:
        return None
    count = args.prime_count or getattr(args, "count", None) or DEFAULT_PRIME_COUNT
    return Path(root) / f"primes-{count}.bin"


def open_store(args) -> PrimeStore:
    path = cache_path(args)
    if path is not None and path.exists():
        store = load_cache(path)
        if args.prime_count is not None and args.prime_count != store.count:
            raise SourceError(f"{path} holds {store.count} primes, --prime-count asks for "
                              f"{args.prime_count}")
        return store
    if args.cache is not None:
        raise FileNotFoundError(f"prime cache {args.cache} does not exist")
    return build_primes(args.prime_count or DEFAULT_PRIME_COUNT)


def config_of(args) -> dict:
    cfg = {}
    for key, value in sorted(vars(args).items()):
        if key in ("output", "fit_output", "plot_data", "threads"):
            continue
        cfg[key] = str(value) if isinstance(value, Path) else value
    cfg["cache"] = str(cache_path(args)) if cache_path(args) else None
    return cfg


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            yield fh


def _emit(args, meta, writer, obj, fit=None, extra=None):
    header = ex.metadata_line(meta | (extra or {}))
    with _sink(args.output) as fh:
        fh.write(header)
        writer(obj, fh)
        if fit is not None and args.fit_output is None:
            fh.write("\n")
            ex.write_fit_csv(fit, fh)
    if fit is not None and args.fit_output is not None:
        with _sink(args.fit_output) as fh:
            fh.write(header)
            ex.write_fit_csv(fit, fh)
    if args.plot_data is not None and writer is ex.write_sweep_csv:
        with _sink(args.plot_data) as fh:
            fh.write(header)
            writer(obj, fh)


def read_numbers(path) -> np.ndarray:
    values = []
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        raise ValueError(f"{path}: no numbers")
    if not data.endswith(b"\n"):
        data += b"\n"
    for lineno, line in enumerate(data[:-1].split(b"\n"), 1):
        if not line.isdigit():
            raise ValueError(f"{path}:{lineno}: expected a nonnegative decimal integer")
        value = int(line)
        if value >= 2**64:
            raise ValueError(f"{path}:{lineno}: value exceeds 64 bits")
        values.append(value)
    return np.array(values, dtype=np.uint64)


def run(args) -> None:
    cmd = args.command
    meta = config_of(args)
    if args.threads:
        import numba
        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))

    if cmd == "sieve":
        count = args.count or args.prime_count or DEFAULT_PRIME_COUNT
        args.prime_count = count
        path = cache_path(args)
        store = build_primes(count)
        save_cache(store, path)
        print(f"# wrote {store.count} primes (max {store.max_prime}) to {path}", file=sys.stderr)
        return

    if cmd == "distinguish" and args.input is not None:
        numbers = read_numbers(args.input)
        run_ = ex.distinguish_numbers(numbers, args.seed, args.sample_size, args.trials,
                                      args.threshold, args.base)
        _emit(args, meta, ex.write_distinguish_csv, run_)
        return

    needs_store = not (cmd in ("bias-sweep",) and args.range_max is not None)
    if cmd == "sweep" and args.source in ("random-odd", "random-all") and args.range_max:
        needs_store = False
    if cmd == "distinguish" and args.source == "random-odd" and args.range_max:
        needs_store = False
    store = open_store(args) if needs_store else None
    if store is not None:
        meta["prime_count"] = store.count
        meta["max_prime"] = store.max_prime

    if cmd == "census":
        _emit(args, meta, ex.write_census_csv, ex.full_census(store, args.base))
    elif cmd == "sweep":
        count = store.count if store is not None else DEFAULT_PRIME_COUNT
        spec = SourceSpec(SWEEP_SOURCES[args.source], prime_count=count,
                          range_max=args.range_max)
        sweep = ex.run_parity_sweep(store, args.sizes, args.trials, spec, args.base, args.seed)
        fit = ex.fit_zscore_curve(sweep) if args.fit else None
        _emit(args, meta, ex.write_sweep_csv, sweep, fit, {"run": sweep.meta})
    elif cmd == "distinguish":
        kind = SourceKind.PRIMES if args.source == "primes" else SourceKind.RANDOM_ODD
        count = store.count if store is not None else DEFAULT_PRIME_COUNT
        spec = SourceSpec(kind, prime_count=count, range_max=args.range_max)
        run_ = ex.distinguish(spec, args.seed, store, args.sample_size, args.trials,
                              args.threshold, args.base)
        _emit(args, meta, ex.write_distinguish_csv, run_)
        print(f"verdict: {run_.verdict}", file=sys.stderr)
    elif cmd == "products":
        sweep = ex.run_product_experiment(store, args.sizes, args.trials, args.seed, args.base)
        _emit(args, meta, ex.write_sweep_csv, sweep, None, {"run": sweep.meta})
    elif cmd == "bias-sweep":
        sweep = ex.run_bias_sweep(args.rates, args.sample_size, args.trials, args.range_max,
                                  args.seed, store, args.base)
        _emit(args, meta, ex.write_sweep_csv, sweep, None, {"run": sweep.meta})
    elif cmd == "mixed":
        sweep = ex.run_mixed_sweep(store, args.sample_size, args.fractions, args.trials,
                                   args.range_max, args.seed, args.base)
        _emit(args, meta, ex.write_sweep_csv, sweep, sweep.fit, {"run": sweep.meta})
    elif cmd == "chebyshev":
        sweep = ex.run_chebyshev_experiment(store, args.sizes, args.trials, args.seed,
                                            args.base)
        _emit(args, meta, ex.write_sweep_csv, sweep, None, {"run": sweep.meta})
    elif cmd == "modexp":
        summary = ex.run_mod_experiment(store, args.seed, args.pool, args.subset,
                                        args.randoms, args.range_max, args.base)
        sweep = ex.SweepResult(ex.Axis.SAMPLE_SIZE, [(summary.sample_size, summary)])
        _emit(args, meta, ex.write_sweep_csv, sweep)
    elif cmd == "bases":
        sweep = ex.run_base_sweep(store, args.bases, args.sample_size, args.trials, args.seed)
        _emit(args, meta, ex.write_sweep_csv, sweep, None, {"run": sweep.meta})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        validate(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sodp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        run(args)
    except (CacheError, SourceError, ValueError, OSError, OverflowError, MemoryError) as exc:
        print(f"sodp: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
