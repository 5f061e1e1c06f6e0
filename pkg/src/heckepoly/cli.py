"""Command-line front end.

    heckepoly eigenvalues --weight 12 --limit 1000
    heckepoly verify hecke|deligne|chebyshev|repidentity
    heckepoly moments --r 2 --method sieve
    heckepoly constant --prime-bound 100000
    heckepoly report

Exit codes: 0 success, 1 verification failure, 2 usage or validation error,
3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from heckepoly import cache, dirichlet, eigenform, lattice, moments, suites
from heckepoly.config import RunConfig, build_config
from heckepoly.errors import InvalidArgument, ResourceLimitError

log = logging.getLogger("heckepoly")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

_DEFAULT_LIMITS = {"eigenvalues": 1000, "hecke": 10**4, "deligne": 10**6, "repidentity": 1000, "chebyshev": 1000}


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_eigenvalues(cfg: RunConfig) -> int:
    limit = cfg.limit or _DEFAULT_LIMITS["eigenvalues"]
    table = cache.get_eigenform(cfg.weight, limit, cfg.cache_dir)
    tables = cache.get_tables(limit, cfg.cache_dir)
    out = _outdir(cfg)
    stem = f"eigenvalues_w{cfg.weight}_n{limit}"
    hecke = suites.hecke_suite(table, min(limit, 10**4))
    deligne = suites.deligne_suite(table, tables, limit)
    if cfg.out == "csv":
        eigenform.export_csv(table, out / f"{stem}.csv")
    else:
        _write_json(out / f"{stem}.json", {
            "weight": cfg.weight,
            "limit": limit,
            "a": [str(v) for v in table.a[1:]],
            "lambda": table.lambdas[1:].tolist(),
        })
    print(hecke.line())
    print(deligne.line())
    return EXIT_OK if hecke.ok and deligne.ok else EXIT_FAIL


def cmd_verify(cfg: RunConfig, target: str) -> int:
    limit = cfg.limit or _DEFAULT_LIMITS[target]
    if target == "chebyshev":
        results = [suites.chebyshev_suite(max_ell=12)]
        table = cache.get_eigenform(cfg.weight, limit, cfg.cache_dir)
        tables = cache.get_tables(limit, cfg.cache_dir)
        results.append(suites.fcrel_suite(table, tables, max_prime=min(limit, 1000)))
    elif target == "hecke":
        table = cache.get_eigenform(cfg.weight, limit, cfg.cache_dir)
        results = [suites.hecke_suite(table, limit)]
    elif target == "deligne":
        table = cache.get_eigenform(cfg.weight, limit, cfg.cache_dir)
        tables = cache.get_tables(limit, cfg.cache_dir)
        results = [suites.deligne_suite(table, tables, limit)]
    else:
        tables = cache.get_tables(limit + 1, cfg.cache_dir)
        spec = lattice.PolynomialSpec(cfg.poly)
        results = [suites.repidentity_suite(spec, limit, tables, cfg.n_threads)]
        d = results[0].details
        print(f"c = {d['c']}, {d['inconsistencies']} inconsistencies")
    for res in results:
        print(res.line())
    if cfg.out == "json":
        _write_json(_outdir(cfg) / f"verify_{target}.json",
                    {"target": target, "results": [{"name": r.name, "ok": r.ok, **r.details} for r in results]})
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def _schedule(cfg: RunConfig) -> list[int]:
    xs = moments.checkpoint_schedule(cfg.checkpoint_start, cfg.checkpoint_stop, cfg.checkpoints_per_decade)
    if cfg.limit:
        xs = [x for x in xs if x <= cfg.limit]
    if not xs:
        raise InvalidArgument("checkpoint schedule is empty")
    return xs


def moments_summary(series: moments.MomentSeries, C: float | None = None) -> dict:
    summary = {"r": series.r, "method": series.method, "weight": series.weight,
               "normalization": series.normalization, "n_checkpoints": len(series.checkpoints)}
    xs = series.xs
    if xs.size >= 5:
        try:
            fit = moments.growth_exponent(series)
            summary["growth_exponent"] = {"slope": fit.slope, "stderr": fit.stderr, "n_points": fit.n_points}
        except InvalidArgument as exc:
            summary["growth_exponent"] = {"error": str(exc)}
    if series.r % 2 == 0:
        try:
            main = moments.fit_main_term(series)
            summary["main_term"] = main.to_dict()
            if C is not None:
                summary["constant_comparison"] = moments.compare_constant(main.C_hat, C)
        except InvalidArgument as exc:
            summary["main_term"] = {"error": str(exc)}
    else:
        summary["note"] = "no main term (odd r)"
    if series.r >= 3:
        summary["prediction"] = moments.predicted_exponents(series.r).to_dict()
    return summary


def cmd_moments(cfg: RunConfig) -> int:
    if cfg.r < 1:
        raise InvalidArgument(f"r must be >= 1, got {cfg.r}")
    xs = _schedule(cfg)
    X = max(xs)
    table = cache.get_eigenform(cfg.weight, X, cfg.cache_dir)
    tables = cache.get_tables(max(X, 2), cfg.cache_dir)
    if cfg.method == "sieve":
        series = moments.moment_series_sieve(cfg.r, xs, tables, table, threads=cfg.n_threads)
    else:
        series = moments.moment_series_lattice(cfg.r, xs, tables, table,
                                               lattice.PolynomialSpec(cfg.poly), threads=cfg.n_threads)
    out = _outdir(cfg)
    stem = f"moments_r{cfg.r}_{cfg.method}_w{cfg.weight}"
    series.write_csv(out / f"{stem}.csv")
    summary = moments_summary(series)
    _write_json(out / f"{stem}.json", summary)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_constant(cfg: RunConfig) -> int:
    if cfg.prime_bound < 100:
        raise InvalidArgument(f"prime_bound must be >= 100, got {cfg.prime_bound}")
    edge = cfg.edge_prime_bound or cfg.prime_bound
    table = cache.get_eigenform(cfg.weight, max(cfg.prime_bound, edge), cfg.cache_dir)
    value = dirichlet.constant_C(table, cfg.prime_bound, edge)
    payload = value.to_dict()
    payload["S2_main_term_if_half"] = value.value / 2
    _write_json(_outdir(cfg) / f"constant_w{cfg.weight}_P{cfg.prime_bound}.json", payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    docs = {}
    for path in sorted(out.glob("*.json")):
        if path.name == "report.json":
            continue
        docs[path.stem] = json.loads(path.read_text())
    _write_json(out / "report.json", {"documents": docs})
    print(f"report.json: {len(docs)} documents")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--weight", type=int)
    common.add_argument("--limit", type=int, help="coefficient / table limit")
    common.add_argument("--r", type=int)
    common.add_argument("--method", choices=("sieve", "lattice"))
    common.add_argument("--poly", choices=lattice.KINDS)
    common.add_argument("--prime-bound", type=int, dest="prime_bound")
    common.add_argument("--edge-prime-bound", type=int, dest="edge_prime_bound")
    common.add_argument("--checkpoint-start", type=float, dest="checkpoint_start")
    common.add_argument("--checkpoint-stop", type=float, dest="checkpoint_stop")
    common.add_argument("--checkpoints-per-decade", type=int, dest="checkpoints_per_decade")
    common.add_argument("--out", choices=("csv", "json"))
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--threads", type=int, help="0 = all cores")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="heckepoly", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eigenvalues", parents=[common], help="coefficient table with Hecke/Deligne summary")
    v = sub.add_parser("verify", parents=[common], help="run one verification suite")
    v.add_argument("target", choices=("hecke", "deligne", "chebyshev", "repidentity"))
    sub.add_parser("moments", parents=[common], help="checkpointed S_r(X) with fits")
    sub.add_parser("constant", parents=[common], help="the Euler-product constant C")
    sub.add_parser("report", parents=[common], help="merge JSON summaries in the output dir")
    return parser


_CONFIG_KEYS = ("weight", "limit", "r", "method", "poly", "prime_bound", "edge_prime_bound",
                "checkpoint_start", "checkpoint_stop", "checkpoints_per_decade", "out",
                "cache_dir", "output_dir", "threads")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args.config, {k: getattr(args, k) for k in _CONFIG_KEYS})
        if args.command == "eigenvalues":
            return cmd_eigenvalues(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.target)
        if args.command == "moments":
            return cmd_moments(cfg)
        if args.command == "constant":
            return cmd_constant(cfg)
        return cmd_report(cfg)
    except InvalidArgument as exc:
        print(f"heckepoly: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"heckepoly: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
