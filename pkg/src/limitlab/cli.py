"""Command-line harness: ``limitlab <command> ...``.

Data goes to CSV (or JSON with ``--format json``); when ``--out`` is given a
manifest ``<out>.manifest.json`` is written next to the data file.  Exit codes:
0 success, 1 partial result, 2 validation/domain error or failed check,
3 resource limit, 64 usage error.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from . import combinatorics as cb
from . import counters
from . import distributions as dist
from . import limitmetrics as lm
from . import steinlab as sl
from ._accel import backend_name, set_workers
from .errors import DomainError, LimitLabError, PartialResultError, ResourceError
from .rng import RngStream

EXIT_OK, EXIT_PARTIAL, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# serialisation


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return {"num": str(obj.numerator), "den": str(obj.denominator)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


class Table:
    """Column names plus rows, optionally with a JSON-only metadata block."""

    def __init__(self, columns, rows=(), meta=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.meta = meta or {}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(v) for v in r])
        return buf.getvalue()

    def to_json(self) -> str:
        body = {
            "meta": _jsonable(self.meta),
            "columns": self.columns,
            "rows": [_jsonable(r) for r in self.rows],
        }
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


def pmf_table(pmf: dist.IntegerPmf, meta=None) -> Table:
    rows = []
    for k, p in zip(pmf.support.tolist(), pmf.probabilities):
        if pmf.exact:
            p = Fraction(p)
            rows.append([k, p.numerator, p.denominator, float(p)])
        else:
            rows.append([k, "", "", float(p)])
    return Table(["k", "prob_num", "prob_den", "prob_float"], rows, meta)


def hist_rows(h: dist.EmpiricalDist, prefix=()):
    freq = h.frequencies
    rows = []
    for i, c in enumerate(h.counts.tolist()):
        if c == 0:
            continue
        v = h.support_min + i
        if h.binned:
            rows.append([*prefix, v * h.bin_width, (v + 1) * h.bin_width, c, float(freq[i])])
        else:
            rows.append([*prefix, v, c, float(freq[i])])
    return rows


def moments_meta(m: cb.MomentSummary) -> dict:
    return {
        "mean": m.mean,
        "variance": m.variance,
        "formula_unsafe": m.formula_unsafe,
        **{k: v for k, v in m.extras.items()},
    }


# --------------------------------------------------------------------------
# command implementations; each returns (Table, manifest extras)


def _rng(args, stream_id=0):
    return RngStream(args.seed, stream_id)


def cmd_descents(args):
    if args.mode == "exact":
        pmf = dist.eulerian_pmf(args.n)
        return pmf_table(pmf, {"n": args.n, **moments_meta(cb.descent_moments(args.n))}), {}
    h = dist.mc_histogram(dist.Statistic.descents(args.n), args.samples, _rng(args))
    return Table(["k", "count", "frequency"], hist_rows(h), h.provenance), {"streams": [0]}


def cmd_aps(args):
    p = cb._as_fraction(args.p)
    if args.mode == "moments":
        m = cb.ap_moments_unconditional(args.n, p, args.allow_composite)
        rows = [["mean", m.mean.numerator, m.mean.denominator, float(m.mean)],
                ["variance", m.variance.numerator, m.variance.denominator, float(m.variance)]]
        return Table(["quantity", "num", "den", "float"], rows, {"n": args.n, **moments_meta(m)}), {}
    if args.mode == "exact":
        pmf = dist.exhaustive_ap_pmf(args.n, p, args.allow_composite)
        return pmf_table(pmf, {"n": args.n, "p": p}), {}
    if args.n % 2 == 0:
        raise DomainError("AP sampling needs odd n")
    cb._check_prime(args.n, args.allow_composite)
    h = dist.mc_histogram(dist.Statistic.aps(args.n, float(p)), args.samples, _rng(args))
    return Table(["k", "count", "frequency"], hist_rows(h), h.provenance), {"streams": [0]}


def _k_values(args):
    if args.k_all:
        return list(range(args.n + 1))
    if args.k is None:
        raise UsageError("give --k or --k-all")
    return [args.k]


def cmd_conditional(args):
    ks = _k_values(args)
    if args.mode == "moments":
        rows = []
        for k in ks:
            m = cb.ap_moments_conditional(args.n, k, args.allow_composite)
            rows.append([k, m.mean.numerator, m.mean.denominator, m.variance.numerator,
                         m.variance.denominator, float(m.mean), float(m.variance)])
        cols = ["k", "mean_num", "mean_den", "var_num", "var_den", "mean_float", "var_float"]
        return Table(cols, rows, {"n": args.n}), {}
    if args.mode == "exact":
        rows = []
        for k in ks:
            pmf = dist.exhaustive_conditional_pmf(args.n, k, args.allow_composite)
            for r in pmf_table(pmf).rows:
                rows.append([k, *r])
        return Table(["size", "k", "prob_num", "prob_den", "prob_float"], rows, {"n": args.n}), {}
    cb._check_prime(args.n, args.allow_composite)
    rows, prov = [], []
    for k in ks:
        # one stream per subset size so each k is reproducible on its own
        h = dist.mc_histogram(dist.Statistic.aps_fixed_k(args.n, k), args.samples, _rng(args, k))
        rows.extend(hist_rows(h, prefix=(k,)))
        prov.append(h.provenance)
    return Table(["size", "k", "count", "frequency"], rows, {"runs": prov}), {"streams": ks}


def cmd_continuous(args):
    if args.mode == "moments":
        rep = cb.ap_moments_continuous(args.n, args.allow_composite).discrepancy()
        rows = [[key, v.numerator, v.denominator, float(v)] for key, v in rep.items()
                if isinstance(v, Fraction)]
        return Table(["quantity", "num", "den", "float"], rows, rep), {}
    cb._check_prime(args.n, args.allow_composite)
    st = dist.Statistic.aps_continuous_binned(args.n, args.bin_width)
    h = dist.mc_histogram(st, args.samples, _rng(args))
    return Table(["bin_lo", "bin_hi", "count", "frequency"], hist_rows(h), h.provenance), {"streams": [0]}


def cmd_identities(args):
    n = args.n
    rows = []
    if n % 2 == 1 and n > 3:
        for k in range(n + 1):
            v = cb.complement_identity(n, k)
            rows.append(["complement", k, v.numerator, v.denominator])
    table = cb.intersection_table(n, args.allow_composite)
    for i, c in enumerate(table.counts):
        rows.append(["pair_overlap", i, c, 1])
    for i, c in enumerate(cb.overlap_counts_inclusion_exclusion(n)):
        rows.append(["per_progression_overlap", i, c, 1])
    meta = {"n": n}
    if n <= 13:
        brute = counters.intersection_table_bruteforce(n)
        meta["bruteforce_pair_overlap"] = list(brute.counts)
        meta["table_matches_bruteforce"] = brute.counts == table.counts
    return Table(["identity", "index", "num", "den"], rows, meta), {}


def cmd_stein(args):
    what = args.what
    if what == "graph":
        g = sl.dependency_graph(args.n, args.allow_composite)
        rows = [[g.n, g.vertex_count, g.max_degree, g.D, str(g.degree_bound)]]
        return Table(["n", "vertex_count", "max_degree", "D", "degree_bound"], rows), {}
    if what == "chatterjee":
        b = sl.chatterjee_bound(args.n, cb._as_fraction(args.p), degree=args.degree,
                                allow_composite=args.allow_composite)
        r = sl.chatterjee_bound(args.n, cb._as_fraction(args.p), relaxed=True, degree=args.degree,
                                allow_composite=args.allow_composite)
        rows = [["exact_moments", b.wasserstein, b.kolmogorov], ["relaxed_moments", r.wasserstein, r.kolmogorov]]
        return Table(["moments", "wasserstein", "kolmogorov"], rows, b.as_dict()), {}
    if what == "exchangeable":
        rows, reports = [], []
        for k in _k_values(args):
            rep = sl.exchangeable_verify(
                args.n, k, swap=args.swap,
                samples=args.samples if args.n > sl.MAX_EXACT_SWAP_N else None,
                rng=_rng(args, k), allow_composite=args.allow_composite,
            )
            rows.append([k, str(rep.lambda_stated), str(rep.lambda_exact), str(rep.max_residual_stated),
                         str(rep.max_residual_exact), rep.mode])
            reports.append(rep.as_dict())
        cols = ["k", "lambda_stated", "lambda_exact", "max_residual_stated", "max_residual_exact", "mode"]
        return Table(cols, rows, {"reports": reports}), {}
    if what == "spacing":
        sp = sl.spacing_profile(args.n, allow_composite=args.allow_composite)
        rows = [[k, str(g), float(g), s, r] for k, g, s, r in zip(sp.k_values, sp.gaps, sp.sigmas, sp.ratios)]
        meta = {"cv_0.3n_0.7n": sp.coefficient_of_variation()}
        return Table(["k", "gap", "gap_float", "sigma", "ratio"], rows, meta), {}
    if what == "gap":
        xs = range(args.x_min, args.x_max + 1) if args.x is None else [args.x]
        rows = []
        for x in xs:
            r = sl.gap_diagnostic(args.n, x, allow_composite=args.allow_composite)
            ex = "" if r.exact_probability is None else float(r.exact_probability)
            rows.append([x, r.chebyshev, r.gaussian_tail, r.gaussian_density, r.gaussian_height, ex])
        cols = ["x", "chebyshev", "gaussian_tail", "gaussian_density", "gaussian_height", "exact"]
        return Table(cols, rows), {}
    if what == "peak":
        samples = None if args.exact or args.samples is None else args.samples
        r = sl.peak_height_check(args.n, samples, _rng(args), args.allow_composite)
        rows = [[r.n, r.k, r.x, r.probability, r.scaled, r.ci[0], r.ci[1], r.peak_constant,
                 r.gaussian_ceiling, int(r.closer_to_peak), r.mode]]
        cols = ["n", "k", "x", "probability", "scaled", "ci_lo", "ci_hi", "peak_constant",
                "gaussian_ceiling", "closer_to_peak", "mode"]
        return Table(cols, rows), {"streams": [0]}
    raise UsageError(f"unknown stein analysis {what!r}")


def _target_pmf(args):
    if args.statistic == "descents":
        m = cb.descent_moments(args.n)
        return dist.eulerian_pmf(args.n), m
    if args.statistic == "aps":
        p = cb._as_fraction(args.p)
        return dist.exhaustive_ap_pmf(args.n, p, args.allow_composite), \
            cb.ap_moments_unconditional(args.n, p, args.allow_composite)
    if args.k is None:
        raise UsageError("conditional statistic needs --k")
    return dist.exhaustive_conditional_pmf(args.n, args.k, args.allow_composite), \
        cb.ap_moments_conditional(args.n, args.k, args.allow_composite)


def cmd_metrics(args):
    what = args.what
    if what == "envelope":
        r = lm.small_t_envelope(args.n)
        rows = [[t, d, b, r.constant * b] for t, d, b in zip(r.t, r.abs_diff, r.envelope_base)]
        return Table(["t", "abs_diff", "envelope_base", "envelope"], rows, {"constant": r.constant}), {}
    if what == "descent-lemma":
        got = lm.conditional_descent_probabilities(4, 2)
        rows = [[a, b, v.numerator, v.denominator] for (a, b), v in got.items()]
        return Table(["left", "right", "num", "den"], rows), {}
    pmf, mom = _target_pmf(args)
    ref = dist.GaussianRef(float(mom.mean), math.sqrt(mom.variance))
    if what == "llt":
        e = lm.llt_error(pmf, ref)
        return Table(["n", "raw", "scaled", "argmax", "sd"], [[args.n, e.raw, e.scaled, e.argmax, e.sd]]), {}
    if what == "distance":
        z = lm.standardize(pmf, ref.mean, ref.sd)
        g = dist.GaussianRef(0.0, 1.0)
        k, w = lm.kolmogorov(z, g), lm.wasserstein_integer(z, g)
        rows = [[args.n, k, w, math.sqrt(2 / math.pi * w)]]
        return Table(["n", "kolmogorov", "wasserstein", "kolmogorov_bound"], rows), {}
    if what == "charfn":
        tmax = args.t_max if args.t_max is not None else 4.0
        grid = np.linspace(-tmax, tmax, args.points)
        prof = lm.char_fn(pmf, grid, standardize=True, mean=ref.mean, sd=ref.sd)
        return Table(["t", "re_phi", "im_phi", "gauss", "abs_diff"], list(prof.rows())), {}
    raise UsageError(f"unknown metric analysis {what!r}")


def cmd_scan(args):
    if args.n_list is None or len(args.n_list) < 3:
        raise UsageError("scan needs at least 3 values in --n-list")
    cfg = {"p": cb._as_fraction(args.p)} if args.metric.startswith(("aps", "chatterjee")) else {}
    if args.metric == "chatterjee_kolmogorov":
        cfg["degree"] = args.degree
    try:
        r = lm.scaling_scan(args.metric, args.n_list, **cfg)
    except PartialResultError as exc:
        rows = [[n, v, f] for n, v, f in exc.completed]
        table = Table(["n", "metric", "noise_floor"], rows, {"metric": args.metric, "error": str(exc)})
        return table, {"partial": True}
    rows = [[n, v, f] for n, v, f in zip(r.n_values, r.metric_values, r.noise_floors)]
    print(f"slope {r.slope!r} stderr {r.slope_stderr!r}", file=sys.stderr)
    meta = {"metric": r.metric, "slope": r.slope, "slope_stderr": r.slope_stderr, "config": r.config}
    return Table(["n", "metric", "noise_floor"], rows, meta), {}


def cmd_verify(args):
    from .verify import run_suite

    checks = run_suite(args.suite)
    rows = [[c.name, "pass" if c.ok else ("fail" if c.gate else "info"), c.detail, round(c.seconds, 3)]
            for c in checks]
    for c in checks:
        print(c.line(), file=sys.stderr)
    failed = [c.name for c in checks if c.gate and not c.ok]
    return Table(["check", "status", "detail", "seconds"], rows, {"suite": args.suite, "failed": failed}), \
        {"failed": bool(failed)}


COMMANDS = {
    "descents": cmd_descents,
    "aps": cmd_aps,
    "conditional": cmd_conditional,
    "continuous": cmd_continuous,
    "identities": cmd_identities,
    "stein": cmd_stein,
    "metrics": cmd_metrics,
    "scan": cmd_scan,
    "verify": cmd_verify,
}


# --------------------------------------------------------------------------
# argument parsing


def _default_seed() -> int:
    raw = os.environ.get("LIMITLAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"LIMITLAB_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="root seed (default: $LIMITLAB_SEED or 0)")
    common.add_argument("--workers", type=int, default=None, help="cap on worker threads")
    common.add_argument("--out", default=None, help="data file; a manifest is written alongside")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--allow-composite", action="store_true",
                        help="evaluate prime-only formulas at composite n and flag them")

    def sized(p, n_required=True):
        p.add_argument("--n", type=int, required=n_required)

    parser = _Parser(prog="limitlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"limitlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("descents", parents=[common], help="descent counts of random permutations")
    p.add_argument("mode", choices=("exact", "sample"))
    sized(p)
    p.add_argument("--samples", type=int, default=100000)

    p = sub.add_parser("aps", parents=[common], help="3-AP counts of p-random subsets")
    p.add_argument("mode", choices=("exact", "sample", "moments"))
    sized(p)
    p.add_argument("--p", default="1/2")
    p.add_argument("--samples", type=int, default=100000)

    p = sub.add_parser("conditional", parents=[common], help="3-AP counts of uniform k-subsets")
    p.add_argument("mode", choices=("exact", "sample", "moments"))
    sized(p)
    p.add_argument("--k", type=int)
    p.add_argument("--k-all", action="store_true", help="every k in 0..n")
    p.add_argument("--samples", type=int, default=10000)

    p = sub.add_parser("continuous", parents=[common], help="uniform-weight 3-AP sums")
    p.add_argument("mode", choices=("sample", "moments"))
    sized(p)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--bin-width", type=float, default=1.0)

    p = sub.add_parser("identities", parents=[common], help="complement identity and overlap tables")
    sized(p)

    p = sub.add_parser("stein", parents=[common], help="dependency graph, bounds and mixture diagnostics")
    p.add_argument("what", choices=("graph", "chatterjee", "exchangeable", "spacing", "gap", "peak"))
    sized(p)
    p.add_argument("--p", default="1/2")
    p.add_argument("--k", type=int)
    p.add_argument("--k-all", action="store_true")
    p.add_argument("--swap", choices=("member_nonmember", "all_pairs"), default="member_nonmember")
    p.add_argument("--degree", choices=("bound", "exact"), default="bound")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--exact", action="store_true", help="peak: use the exhaustive pmf (n <= 19)")
    p.add_argument("--x", type=int)
    p.add_argument("--x-min", type=int, default=0)
    p.add_argument("--x-max", type=int, default=0)

    p = sub.add_parser("metrics", parents=[common], help="LLT error, distances, characteristic functions")
    p.add_argument("what", choices=("llt", "distance", "charfn", "envelope", "descent-lemma"))
    sized(p, n_required=False)
    p.add_argument("--statistic", choices=("descents", "aps", "conditional"), default="descents")
    p.add_argument("--p", default="1/2")
    p.add_argument("--k", type=int)
    p.add_argument("--t-max", type=float)
    p.add_argument("--points", type=int, default=401)

    p = sub.add_parser("scan", parents=[common], help="metric over several n with a log-log slope")
    p.add_argument("--metric", required=True, choices=sorted(lm.METRICS))
    p.add_argument("--n-list", type=int, nargs="+")
    p.add_argument("--p", default="1/2")
    p.add_argument("--degree", choices=("bound", "exact"), default="bound")

    p = sub.add_parser("verify", parents=[common], help="exhaustive oracle suites")
    p.add_argument("--suite", choices=("identities", "moments", "stein", "metrics", "all"), default="all")
    return parser


def _validate(args):
    if getattr(args, "samples", None) is not None and args.samples < 1:
        raise DomainError("--samples must be positive")
    if getattr(args, "n", None) is None and args.command == "metrics" and args.what != "descent-lemma":
        raise UsageError("--n is required")
    if args.command == "metrics" and args.what == "descent-lemma":
        args.n = 4


def _write(args, table: Table, extras: dict, argv, started: float) -> None:
    text = table.to_json() if args.format == "json" else table.to_csv()
    if args.out is None:
        sys.stdout.write(text)
        return
    data = text.encode("utf-8")
    with open(args.out, "wb") as fh:
        fh.write(data)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "workers")}
    manifest = {
        "command_line": "limitlab " + " ".join(argv),
        "seed": args.seed,
        "stream_ids": extras.get("streams", []),
        "config": _jsonable(config),
        "config_hash": dist.config_hash(_jsonable(config)),
        "data_sha256": hashlib.sha256(data).hexdigest(),
        "artifact_version": __version__,
        "backend": backend_name(),
        "wall_time_s": round(time.perf_counter() - started, 6),
        "output_files": [os.path.abspath(args.out)],
        "results": _jsonable(table.meta),
    }
    with open(args.out + ".manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        _validate(args)
        set_workers(args.workers)
        table, extras = COMMANDS[args.command](args)
        _write(args, table, extras, argv, started)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except PartialResultError as exc:
        print(f"partial result: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, LimitLabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if extras.get("failed"):
        return EXIT_VALIDATION
    if extras.get("partial"):
        return EXIT_PARTIAL
    return EXIT_OK
