"""Command-line interface.

Commands: count, scan, fit, theta, verify, ff-count.  Exit status 0 on
success, 1 when a verification fails, 2 on usage errors.  Artifacts are
canonical JSON/CSV (see reports.py); set ``timings: real`` in the config
to embed measured wall times instead of zeros.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import __version__, enumeration, reports, tamagawa, verify
from .cache import DiskCache
from .config import ExperimentConfig
from .finite_field import count_projective_hypersurface, tau_p
from .polynomial import primes_up_to


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maninlab",
        description="Heights, local Fourier transforms and point counts for "
        "blow-ups of P^n along (x0, f).",
    )
    parser.add_argument("--version", action="version", version=f"maninlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment config")
    common.add_argument("--f", dest="poly", help="polynomial text, e.g. x1^2+x2^2+x3^2")
    common.add_argument("--n", type=int, help="number of variables (inferred if omitted)")
    common.add_argument("--s0", type=float, help="height parameter on D0")
    common.add_argument("--s1", type=float, help="height parameter on D1")
    common.add_argument("--threads", type=int, help="worker processes for enumeration")
    common.add_argument("--seed", type=int, help="seed for the quasi-random streams")
    common.add_argument("--out", help="artifact path (stdout if omitted)")
    common.add_argument("--format", choices=["json", "csv"], help="artifact format")
    common.add_argument("--timings", choices=["zero", "real"], help="seconds column policy")

    sub = parser.add_subparsers(dest="command", required=True)
    p_count = sub.add_parser("count", parents=[common], help="count points of height <= B")
    p_count.add_argument("--B", type=float, help="height bound")
    p_count.add_argument("--points", help="also export the point list CSV here")

    p_scan = sub.add_parser("scan", parents=[common], help="count along a geometric grid")
    p_scan.add_argument("--grid", help="start:stop:steps (geometric)")
    p_scan.add_argument("--no-cache", action="store_true")

    p_fit = sub.add_parser("fit", parents=[common], help="fit N(B)/B = theta log B + c")
    p_fit.add_argument("--scan", dest="scan_file", help="existing scan CSV to fit")
    p_fit.add_argument("--grid", help="grid to scan when no file is given")
    p_fit.add_argument("--no-cache", action="store_true")

    p_theta = sub.add_parser("theta", parents=[common], help="assemble the predicted constant")
    p_theta.add_argument("--pmax", type=int, help="Euler product cutoff")
    p_theta.add_argument("--no-cache", action="store_true")

    p_verify = sub.add_parser("verify", parents=[common], help="run identity checks")
    p_verify.add_argument(
        "which",
        choices=["volumes", "fourier-trivial", "fourier-char", "hensel", "bounds", "all"],
    )
    p_verify.add_argument("--p", type=int, action="append", help="restrict to this prime (repeatable)")

    p_ff = sub.add_parser("ff-count", parents=[common], help="finite-field count tables")
    p_ff.add_argument("--p", type=int, action="append", help="specific prime (repeatable)")
    p_ff.add_argument("--pmax", type=int, help="all good primes up to this bound")
    return parser


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.poly:
        cfg.polynomial = args.poly
    if args.n is not None:
        cfg.n = args.n
    for name in ("s0", "s1", "threads", "seed", "out", "format", "timings"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    for name in ("B", "grid", "pmax"):
        v = getattr(args, name, None)
        if v is not None:
            if name == "pmax":
                cfg.p_max = v
            else:
                setattr(cfg, name, v)
    cfg.__post_init__()
    return cfg


def _emit(cfg: ExperimentConfig, payload, csv_header=None, csv_rows=None) -> None:
    out = cfg.out
    if cfg.format == "csv" and csv_rows is not None:
        text = reports.csv_text(csv_header, csv_rows)
    else:
        text = reports.canonical_json(payload)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _records_payload(cfg, records):
    return {
        "s": list(records[0].s) if records else list(cfg.s()),
        "records": [
            {
                "B": r.B,
                "N": r.N,
                "seconds": r.wall_time if cfg.timings == "real" else 0.0,
            }
            for r in records
        ],
    }


def _cmd_count(args) -> int:
    cfg = _load_config(args)
    f = cfg.form()
    rec = enumeration.count_bounded(
        f, cfg.B, cfg.s(), threads=cfg.threads, max_candidates=cfg.max_candidates
    )
    payload = {"B": rec.B, "N": rec.N, "s": list(rec.s)}
    payload["seconds"] = rec.wall_time if cfg.timings == "real" else 0.0
    _emit(
        cfg,
        payload,
        csv_header=["B", "N", "seconds"],
        csv_rows=reports.count_records_rows([rec], cfg.timings),
    )
    if args.points:
        pts = enumeration.points_with_heights(f, cfg.B, cfg.s(), max_candidates=cfg.max_candidates)
        reports.write_csv(
            args.points,
            ["b"] + [f"a{i + 1}" for i in range(f.n)] + ["H"],
            reports.point_rows(pts, f.n),
        )
    return 0


def _scan_records(cfg: ExperimentConfig, use_cache: bool = True):
    f = cfg.form()
    grid = cfg.grid_values()
    cache = DiskCache(cfg.cache_dir)
    key = cache.key(
        "scan",
        {
            "polynomial": str(f),
            "n": f.n,
            "s": [str(v) for v in cfg.s()],
            "grid": [reports.fmt12(b) for b in grid],
            "max_candidates": cfg.max_candidates,
        },
    )
    if use_cache:
        hit = cache.load(key)
        if hit is not None:
            return [
                enumeration.CountRecord(B=b, N=n, s=tuple(cfg.s()), wall_time=0.0)
                for b, n in hit
            ]
    records = enumeration.scan(
        f, grid, cfg.s(), threads=cfg.threads, max_candidates=cfg.max_candidates
    )
    if use_cache:
        cache.store(key, [[r.B, r.N] for r in records])
    return records


def _cmd_scan(args) -> int:
    cfg = _load_config(args)
    records = _scan_records(cfg, use_cache=not args.no_cache)
    _emit(
        cfg,
        _records_payload(cfg, records),
        csv_header=["B", "N", "seconds"],
        csv_rows=reports.count_records_rows(records, cfg.timings),
    )
    return 0


def _cmd_fit(args) -> int:
    cfg = _load_config(args)
    if args.scan_file:
        records = []
        with open(args.scan_file, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                records.append(
                    enumeration.CountRecord(
                        B=float(row["B"]), N=int(row["N"]), s=tuple(cfg.s())
                    )
                )
    else:
        records = _scan_records(cfg, use_cache=not args.no_cache)
    fit = enumeration.fit_manin(records)
    _emit(
        cfg,
        {
            "theta_hat": fit.theta_hat,
            "c_hat": fit.c_hat,
            "residual": fit.residual,
            "grid": list(fit.grid),
        },
    )
    return 0


def _cmd_theta(args) -> int:
    cfg = _load_config(args)
    f = cfg.form()
    cache = DiskCache(cfg.cache_dir)
    key = cache.key(
        "theta",
        {
            "polynomial": str(f),
            "n": f.n,
            "p_max": cfg.p_max,
            "qmc_samples": cfg.qmc_samples,
            "qmc_replicates": cfg.qmc_replicates,
            "seed": cfg.seed,
            "bad": sorted(cfg.bad_primes),
        },
    )
    payload = None if args.no_cache else cache.load(key)
    if payload is None:
        bad, certified = tamagawa.detect_bad_primes(f, cfg.bad_prime_search_bound)
        bad |= set(cfg.bad_primes)
        bk = tamagawa.tamagawa_number(
            f,
            p_max=cfg.p_max,
            bad=bad,
            qmc_samples=cfg.qmc_samples,
            qmc_replicates=cfg.qmc_replicates,
            seed=cfg.seed,
            budget=cfg.budget,
        )
        payload = {
            "tau_infinity": bk.tau_infinity,
            "tau_infinity_err": bk.tau_infinity_err,
            "local_table": [[p, str(v), factor] for p, v, factor in bk.local],
            "p_max": bk.p_max,
            "tail_estimate": bk.tail_estimate,
            "tau": bk.tau,
            "alpha_cone": str(bk.alpha_cone),
            "brauer": bk.brauer,
            "theta": bk.theta,
            "regularized_product": bk.regularized_product,
            "raw_product": bk.raw_product,
            "bad_primes": sorted(bad),
            "flags": {k: str(v) for k, v in bk.flags.items()},
        }
        if not args.no_cache:
            cache.store(key, payload)
    _emit(cfg, payload)
    return 0


def _cmd_verify(args) -> int:
    cfg = _load_config(args)
    f = cfg.form()
    bad, _ = tamagawa.detect_bad_primes(f, cfg.bad_prime_search_bound)
    bad |= set(cfg.bad_primes)
    good = [p for p in (3, 5, 7) if p not in bad]
    ps = args.p if args.p else good
    which = args.which
    reps = []
    if which in ("volumes", "all"):
        reps.append(verify.verify_volumes(f, ps=ps, bad=bad, budget=cfg.budget))
    if which in ("hensel", "all"):
        reps.append(verify.verify_hensel(f, ps=ps, budget=cfg.budget))
        reps.append(verify.verify_mean_value())
    if which in ("fourier-trivial", "all"):
        reps.append(
            verify.verify_fourier_trivial(
                f, ps=ps, truncation=cfg.truncation, bad=bad, budget=cfg.budget
            )
        )
    if which in ("fourier-char", "all"):
        reps.append(
            verify.verify_fourier_char(
                f,
                ps=ps,
                bad=bad,
                truncation=cfg.char_truncation,
                budget=cfg.budget,
            )
        )
    if which in ("bounds", "all"):
        reps.append(verify.verify_bounds(f, bad=bad, budget=cfg.budget))
    combined = reps[0]
    for r in reps[1:]:
        combined = combined.merged(r)
    combined.title = f"verify {which}"
    for line in combined.summary_lines():
        print(line)
    if cfg.out:
        reports.write_json(cfg.out, combined.as_dict())
    return 0 if combined.passed else 1


def _cmd_ff_count(args) -> int:
    cfg = _load_config(args)
    f = cfg.form()
    bad, _ = tamagawa.detect_bad_primes(f, cfg.bad_prime_search_bound)
    if args.p:
        ps = args.p
    else:
        pmax = args.pmax or 50
        ps = [p for p in primes_up_to(pmax) if p not in bad]
    rows = []
    payload = []
    for p in ps:
        cnt = count_projective_hypersurface(f, p, budget=cfg.budget)
        tp = tau_p(f, p, budget=cfg.budget)
        rows.append([p, cnt, str(tp)])
        payload.append({"p": p, "count": cnt, "tau_p": str(tp)})
    _emit(cfg, {"table": payload}, csv_header=["p", "count", "tau_p"], csv_rows=rows)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code or 0)
    handlers = {
        "count": _cmd_count,
        "scan": _cmd_scan,
        "fit": _cmd_fit,
        "theta": _cmd_theta,
        "verify": _cmd_verify,
        "ff-count": _cmd_ff_count,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
