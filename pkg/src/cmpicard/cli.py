"""Command line front end: parameter scans over orders and per-module reports."""

import argparse
import csv
import io
import logging
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import log

import numpy as np

from . import catalog
from .cache import Cache, canonical
from .errors import DomainError, PrecisionError, ResourceError
from .kernel.groups import image_order_of_multiplication

log_ = logging.getLogger("cmpicard")

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
ORACLE_CAP = 4000  # skip the brute-force Picard oracle beyond this ideal-norm bound
SPOT_CHECK_FRACTION = 0.05

SCAN_COLUMNS = [
    "d", "gamma", "galois_type", "conductor", "norm_f", "disc", "disc_law", "pic_order", "pic_structure",
    "pic_oracle", "image4", "orbit_bound", "reflex_image", "orbit_r8", "orbit_r7", "orbit_r4", "image4_r8",
    "checks",
]


@dataclass
class ScanConfig:
    d_values: list
    gamma_bound: int = 2
    gammas: list = None  # explicit gamma coordinates, overriding the box
    conductor_max: int = 30
    prime_cap: int = 50
    tolerance: float = 0.1
    out: str = "scan.csv"
    cache: str = None
    workers: int = 1
    conductors: list = None  # explicit conductor texts, overriding --conductor-max
    skipped: list = field(default_factory=list)

    def __post_init__(self):
        if self.conductor_max < 0 or self.prime_cap <= 0 or self.gamma_bound <= 0 or self.workers <= 0:
            raise DomainError("caps and worker counts must be positive")
        if not 0 < self.tolerance < 1:
            raise DomainError("tolerance must lie in (0, 1)")


def order_key(d, gamma, flabel):
    return {"d": d, "gamma": list(gamma), "f": flabel}


def compute_order_payload(d, gamma, flabel, prime_cap):
    """Every invariant the scan reports for one order, as plain JSON data."""
    from .galois import cm_types, galois_type, orbit_lower_bound, reflex_data, reflex_image_oracle
    from .orders import make_order, oracle_bound, pic_mod_base, picard_bruteforce_oracle

    L = catalog.cm_field(d, tuple(gamma))
    R = make_order(L, catalog.conductor_from_label(flabel))
    kind = galois_type(L)
    pic = R.picard_structure
    bound = oracle_bound(R)
    oracle = picard_bruteforce_oracle(R, bound) if bound <= ORACLE_CAP else None
    orbit, reflex = None, None
    for phi in cm_types(L):
        rd = reflex_data(L, phi)
        ob = orbit_lower_bound(R, rd)
        orbit = ob if orbit is None else min(orbit, ob)
        if kind != "D4":
            try:
                im = reflex_image_oracle(R, rd, prime_cap).order
            except DomainError:
                continue
            reflex = im if reflex is None else min(reflex, im)
    return {
        "galois_type": kind,
        "norm_f": R.index,
        "disc": str(R.discriminant),
        "disc_law": R.discriminant == R.index ** 2 * L.abs_discriminant,
        "pic_order": R.picard_order,
        "pic_structure": list(pic.elementary_divisors),
        "pic_oracle": oracle,
        "image4": image_order_of_multiplication(pic_mod_base(R), 4),
        "orbit_bound": orbit,
        "reflex_image": reflex,
    }


def _payload_job(item):
    d, gamma, flabel, prime_cap = item
    try:
        return item, compute_order_payload(d, gamma, flabel, prime_cap), None
    except (DomainError, ResourceError, PrecisionError) as exc:
        return item, None, f"{type(exc).__name__}: {exc}"


def _fmt(x):
    return "" if x is None else f"{x:.12g}"


def payload_checks(p):
    bad = []
    if not p["disc_law"]:
        bad.append("disc_law")
    struct = 1
    for e in p["pic_structure"]:
        struct *= e
    if struct != p["pic_order"]:
        bad.append("pic_structure")
    if p["pic_oracle"] is not None and p["pic_oracle"] != p["pic_order"]:
        bad.append("pic_oracle")
    if p["reflex_image"] is not None and p["reflex_image"] < p["orbit_bound"]:
        bad.append("reflex_vs_orbit")
    return bad


def scan_row(d, gamma, flabel, p):
    disc = abs(int(p["disc"]))
    checks = payload_checks(p)
    return {
        "d": d, "gamma": f"{gamma[0]},{gamma[1]}", "galois_type": p["galois_type"], "conductor": flabel,
        "norm_f": p["norm_f"], "disc": p["disc"], "disc_law": str(p["disc_law"]).lower(),
        "pic_order": p["pic_order"], "pic_structure": "x".join(map(str, p["pic_structure"])) or "1",
        "pic_oracle": "" if p["pic_oracle"] is None else p["pic_oracle"], "image4": p["image4"],
        "orbit_bound": p["orbit_bound"], "reflex_image": "" if p["reflex_image"] is None else p["reflex_image"],
        "orbit_r8": _fmt(p["orbit_bound"] / disc ** (1 / 8)), "orbit_r7": _fmt(p["orbit_bound"] / disc ** (1 / 7)),
        "orbit_r4": _fmt(p["orbit_bound"] / disc ** (1 / 4)), "image4_r8": _fmt(p["image4"] / disc ** (1 / 8)),
        "checks": "ok" if not checks else ";".join(checks),
    }


def scan_items(cfg):
    items = []
    for d in cfg.d_values:
        K = catalog.check_base(d)
        gammas = cfg.gammas or catalog.gamma_box(K, cfg.gamma_bound)
        for g in gammas:
            g = catalog.field_key(K, g)
            if cfg.conductors is not None:
                ideals = [catalog.parse_conductor(K, c) for c in cfg.conductors]
            else:
                ideals = catalog.conductors_up_to(K, cfg.conductor_max)
            for I in ideals:
                items.append((d, tuple(g), catalog.conductor_label(I), cfg.prime_cap))
    return sorted(set(items))


def run_scan(cfg, spot_seed=0):
    """Compute (or read from cache) every order of the scan; returns (rows, summary, failures)."""
    cache = Cache(cfg.cache)
    todo, results = [], {}
    for item in scan_items(cfg):
        d, g, fl, cap = item
        hit = cache.get(order_key(d, g, fl) | {"prime_cap": cap})
        if hit is None:
            todo.append(item)
        else:
            results[item] = hit
    hits = sorted(results)
    rng = random.Random(spot_seed)
    sample = [it for it in hits if rng.random() < SPOT_CHECK_FRACTION]
    if hits and not sample:
        sample = [hits[0]]
    mismatches = []
    for item in sample:
        _, fresh, err = _payload_job(item)
        if err is None and canonical(fresh) != canonical(results[item]):
            mismatches.append(item)

    if cfg.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            outcomes = list(pool.map(_payload_job, todo))
    else:
        outcomes = [_payload_job(it) for it in todo]
    # results come back in submission order, and only this process writes the cache
    for item, payload, err in outcomes:
        if err is not None:
            log_.warning("skipping order %s: %s", item[:3], err)
            cfg.skipped.append((item, err))
            continue
        d, g, fl, cap = item
        cache.put(order_key(d, g, fl) | {"prime_cap": cap}, payload)
        results[item] = payload

    rows = [scan_row(d, g, fl, results[(d, g, fl, cap)]) for d, g, fl, cap in sorted(results)]
    failures = [r for r in rows if r["checks"] != "ok"]
    failures += [{"conductor": it[2], "checks": "cache_mismatch"} for it in mismatches]
    return rows, summarize(rows), failures


def summarize(rows):
    out = {"orders": len(rows)}
    if not rows:
        return out
    for col in ("orbit_r8", "orbit_r7", "orbit_r4", "image4_r8"):
        out["min_" + col] = min(float(r[col]) for r in rows)
    x = np.array([log(abs(int(r["disc"]))) for r in rows])
    y = np.array([log(r["orbit_bound"]) for r in rows])
    if len(set(x)) > 1:
        slope, intercept = np.polyfit(x, y, 1)
        out["fit_exponent"] = float(slope)
        out["fit_constant"] = float(np.exp(intercept))
    return out


def write_csv(rows, path):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SCAN_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def format_summary(summary):
    return "\n".join(f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in summary.items())


# subcommands

def _field(args):
    K = catalog.check_base(args.d)
    if args.gamma is None:
        raise DomainError("--gamma is required")
    return catalog.cm_field(args.d, catalog.field_key(K, catalog.parse_gamma(K, args.gamma)))


def _order(args):
    from .orders import make_order
    L = _field(args)
    f = 1 if args.conductor is None else catalog.parse_conductor(L.base, args.conductor)
    return make_order(L, f)


def cmd_scan(args):
    gammas = None
    if args.gamma:
        K = catalog.check_base(args.d[0])
        gammas = [catalog.parse_gamma(K, g) for g in args.gamma.split(";")]
    cfg = ScanConfig(args.d, args.gamma_bound, gammas, args.conductor_max, args.prime_cap, args.tolerance,
                     args.out, args.cache, args.workers,
                     args.conductors.split(";") if args.conductors else None)
    rows, summary, failures = run_scan(cfg)
    try:
        write_csv(rows, cfg.out)
        with open(cfg.out + ".summary", "w") as fh:
            fh.write(format_summary(summary) + "\n")
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    print(format_summary(summary))
    for item, err in cfg.skipped:
        print(f"skipped {item[:3]}: {err}")
    for f in failures:
        print(f"FAILED {f['conductor']}: {f['checks']}")
    return EXIT_INVARIANT if failures else EXIT_OK


def cmd_orbit_bound(args):
    from .galois import cm_types, galois_type, orbit_lower_bound, reflex_data, reflex_image_oracle
    R = _order(args)
    L = R.field
    kind = galois_type(L)
    ok = True
    print(f"galois_type={kind} disc={R.discriminant} pic_order={R.picard_order}")
    for phi in cm_types(L):
        rd = reflex_data(L, phi)
        ob = orbit_lower_bound(R, rd)
        line = f"phi={phi[0]},{phi[1]} orbit_bound={ob}"
        if kind != "D4":
            im = reflex_image_oracle(R, rd, args.prime_cap)
            ok &= im.order >= ob
            line += f" reflex_image={im.order} stabilized={str(im.stabilized).lower()}"
        print(line)
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_hecke(args):
    from .hecke import orbit_growth, p1_size, sl2_transitive, standard_lattice, tp_neighbors
    from .kernel.integers import is_prime
    K = catalog.check_base(args.d)
    if not is_prime(args.p):
        raise DomainError(f"{args.p} is not prime")
    size = p1_size(K, args.p)
    trans = sl2_transitive(K, args.p)
    print(f"p1_size={size} transitive={str(trans).lower()}")
    ok = trans
    if args.depth:
        growth = orbit_growth(K, args.p, args.depth)
        print("orbit_growth=" + ",".join(map(str, growth)))
        nb = tp_neighbors(K, standard_lattice(K, args.p))
        ok &= sum(m for _, m in nb) == size
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_chebotarev(args):
    from .chebotarev import chebotarev_report, count_totally_split_poly
    L = _field(args)
    rep = chebotarev_report(L, args.x)
    poly = count_totally_split_poly(L, args.x)
    print(f"count={rep.count} li_over_n={_fmt(rep.li_over_n)} lmo_lower={_fmt(rep.lmo_lower)} "
          f"threshold={_fmt(rep.threshold)} lower_bound_holds={str(rep.lower_bound_holds).lower()} "
          f"interval_holds={'' if rep.interval_holds is None else str(rep.interval_holds).lower()}")
    return EXIT_OK if poly == rep.count else EXIT_INVARIANT


def cmd_zeta(args):
    from .zeta import residue_report
    R = _order(args)
    P = max(args.prime_cap, 100)
    rep = residue_report(R, P)
    print(f"rhs_formula={_fmt(rep.rhs_formula)} euler_estimate={_fmt(rep.euler_estimate)} "
          f"oscillation={_fmt(rep.oscillation)} local_ratio={rep.local_ratio} "
          f"regulator={_fmt(rep.regulator)} regulator_prime={_fmt(rep.regulator_prime)} prime_bound={P}")
    return EXIT_OK if rep.relative_deviation <= args.tolerance else EXIT_INVARIANT


def cmd_cache_verify(args):
    if not args.cache or not os.path.exists(args.cache):
        raise DomainError("--cache must name an existing cache file")
    cache = Cache(args.cache)
    recs = sorted(cache, key=lambda r: canonical(r["key"]))
    rng = random.Random(0)
    sample = [r for r in recs if rng.random() < SPOT_CHECK_FRACTION] or recs[:1]
    bad = 0
    for rec in sample:
        k = rec["key"]
        _, fresh, err = _payload_job((k["d"], tuple(k["gamma"]), k["f"], k["prime_cap"]))
        if err is not None or canonical(fresh) != canonical(rec["payload"]):
            bad += 1
    print(f"records={len(recs)} corrupt={cache.corrupt} recomputed={len(sample)} mismatched={bad}")
    return EXIT_INVARIANT if bad else EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="cmpicard", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, gamma=True):
        p.add_argument("--d", type=int, required=True)
        if gamma:
            p.add_argument("--gamma", help='"a,b" on the basis (1, w), or an expression in s = sqrt(d)')
        p.add_argument("--tolerance", type=float, default=0.1)

    p = sub.add_parser("scan")
    p.add_argument("--d", type=lambda s: [int(x) for x in s.split(",")], required=True)
    p.add_argument("--gamma", help="semicolon separated list; default is the box given by --gamma-bound")
    p.add_argument("--gamma-bound", type=int, default=2)
    p.add_argument("--conductor-max", type=int, default=30)
    p.add_argument("--conductors", help='semicolon separated conductors, as labels "a:b:c" or generators')
    p.add_argument("--prime-cap", type=int, default=50)
    p.add_argument("--tolerance", type=float, default=0.1)
    p.add_argument("--out", default="scan.csv")
    p.add_argument("--cache")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("orbit-bound")
    common(p)
    p.add_argument("--conductor")
    p.add_argument("--prime-cap", type=int, default=50)
    p.set_defaults(func=cmd_orbit_bound)

    p = sub.add_parser("hecke")
    common(p, gamma=False)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--depth", type=int, default=0)
    p.set_defaults(func=cmd_hecke)

    p = sub.add_parser("chebotarev")
    common(p)
    p.add_argument("--x", type=int, default=100)
    p.set_defaults(func=cmd_chebotarev)

    p = sub.add_parser("zeta")
    common(p)
    p.add_argument("--conductor")
    p.add_argument("--prime-cap", type=int, default=10 ** 5)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("cache-verify")
    p.add_argument("--cache", required=True)
    p.set_defaults(func=cmd_cache_verify)
    return ap


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ResourceError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
