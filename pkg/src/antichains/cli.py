"""Command-line front end.  Exit status: 0 all checks pass, 1 a check failed, 2 bad config or refusal."""
import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from math import comb

import mpmath
import numpy as np

from . import __version__
from . import asymptotics as asy
from . import containers as ct
from . import isoperimetry as iso
from . import llt
from . import polymer as pm
from . import sampler as smp
from .counting import (InstanceTooLarge, SubposetSpec, count_antichains_layered,
                       count_by_slicing, defect_distribution_exact, distribution_mean,
                       macmahon_box)

COMMANDS = ("count", "identities", "clusters", "asympt", "isoperimetry", "scd",
            "containers", "llt", "clt-sim", "all-acceptance")


class Refusal(Exception):
    pass


def _plain(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 30)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in items]
    return x


def _constants_version(path):
    try:
        return iso.load_constants(path)["version"]
    except (OSError, ValueError):
        return None


def _need(args, name, default=None):
    v = getattr(args, name.replace("-", "_"))
    if v is None:
        if default is None:
            raise Refusal(f"--{name} is required for {args.command}")
        return default
    return v


# ---- commands: each returns (passed, payload, rows-or-None) ----

def cmd_count(args):
    t, n = _need(args, "t", 3), _need(args, "n", 3)
    spec = SubposetSpec.full(t, n)
    res = count_antichains_layered(spec)
    checks = {}
    if n == 2:
        checks["central_binomial"] = res.count == comb(2 * t, t)
    if n == 3:
        checks["plane_partitions"] = res.count == macmahon_box(t, t, t)
    try:
        checks["slicing"] = res.count == count_by_slicing(t, n)
    except InstanceTooLarge:
        pass
    return all(checks.values()), {"t": t, "n": n, "count": res.count, "method": res.method,
                                  "oracle_checks": checks}, None


def cmd_identities(args):
    n = _need(args, "n", 2)
    if n > 3:
        raise Refusal("exact partition functions are enumerated only for n <= 3")
    lhs, rhs = pm.central_identity(n)
    out = {"n": n, "central": {"lhs": lhs, "rhs": rhs, "xi": pm.partition_function_exact(pm.CentralModel(n)),
                               "passed": lhs == rhs}}
    ok = lhs == rhs
    for variant in ("w", "w_prime"):
        a, b = pm.three_layer_identity(n, (), variant)
        out[f"three_layer_{variant}"] = {"lhs": a, "rhs": b, "passed": a == b}
        ok &= a == b
    return ok, out, None


def cmd_clusters(args):
    n = _need(args, "n", 4)
    kmax = args.cluster_size_max or 2
    if kmax > 3:
        raise Refusal("cluster sums are implemented for sizes up to 3")
    model = pm.CentralModel(n)
    out = {"n": n, "sizes": {}}
    ok = True
    for k in range(1, kmax + 1):
        entry = {"signed": pm.cluster_sum(model, k)}
        if k == 1:
            entry["closed_form"] = asy.t1(n)
        elif k == 2:
            entry["closed_form"] = asy.t2(n)
        else:
            entry["absolute"] = pm.cluster_sum(model, k, absolute=True)
        if "closed_form" in entry:
            entry["passed"] = entry["signed"] == entry["closed_form"]
            ok &= entry["passed"]
        out["sizes"][str(k)] = entry
    return ok, out, None


def cmd_asympt(args):
    ns = _n_range(args, 1)
    rows = []
    ok = True
    for n in ns:
        a, b = asy.t1(n), asy.t2(n)
        same = a == asy.first_term_via_2f1(n)
        ok &= same
        rows.append({"n": n, "T1": a, "T2": b, "closed_form": float(asy.closed_form_first_term(n)),
                     "ratio": float(asy.to_mpf(a) / asy.closed_form_first_term(n)),
                     "hypergeometric_match": same})
    return ok, {"rows": rows}, rows


def cmd_isoperimetry(args):
    t, n = _need(args, "t", 3), _need(args, "n", 3)
    cl = iso.verify_clements_lindstrom(t, n, seed=args.seed)
    out = {"t": t, "n": n,
           "clements_lindstrom": {"mode": cl.mode, "checked": cl.subsets_checked,
                                  "violations": cl.violations, "witness": cl.witness},
           "log_concave": iso.layers_log_concave(t, n)}
    ok = cl.ok and out["log_concave"]
    m = iso.middle_rank(t, n)
    if m >= 1:
        out["middle_ratio"] = iso.layer_ratio(t, n, m)
        out["implied_constant"] = iso.implied_constant(t, n)
    if t == 3 and n >= 2:
        fm = iso.fully_matched_count(n)
        out["fully_matched"] = vars(fm)
        ok &= fm.ok
    if (t - 1) * n % 2:
        tm = iso.two_middle_layers_check(t, n)
        out["two_middle_layers"] = vars(tm)
        ok &= tm.ok
    if args.constants_file:
        out["constants_written"] = iso.write_constants(args.constants_file)
    return ok, out, None


def cmd_scd(args):
    t, n = _need(args, "t", 3), _need(args, "n", 3)
    rep = iso.check_scd(t, n)
    return rep.ok, vars(rep), None


def cmd_containers(args):
    n = _need(args, "n", 5)
    runs = args.samples or 100
    inst = ct.BipartiteInstance.from_layers(n, n - 1)
    audit = ct.degree_audit(n)
    phi, psi = ct.default_phi(n), ct.default_psi(inst, n)
    if phi < 1 or psi < 1:
        raise Refusal(f"n={n} is too small for phi >= 1 and psi >= 1")
    bad = {"kappa": 0, "phi": 0, "psi": 0, "cover": 0}
    retries = []
    for s in range(runs):
        rng = random.Random(args.seed * 100_003 + s)
        A = ct.random_two_linked(inst, min(4, len(inst.X)), rng)
        bad["kappa"] += ct.kappa(inst, A) > ct.kappa_bound(inst, A)
        pa = ct.phi_approximation(inst, A, phi, seed=args.seed * 100_003 + s)
        retries.append(pa.retries)
        bad["phi"] += not all(pa.checks.values())
        bad["cover"] += not pa.cover.within_bound
        bad["psi"] += not ct.psi_approximation(inst, A, pa.F, psi).ok
    out = {"n": n, "runs": runs, "phi": phi, "psi": psi, "order": inst.order,
           "degree_audit": vars(audit), "failures": bad, "max_retries": max(retries)}
    return audit.ok and not any(bad.values()), out, None


def cmd_llt(args):
    t = _need(args, "t", 3)
    rows = []
    for n in _n_range(args, 10):
        rows.extend(llt.error_profile(t, n))
    ok = all(llt.total_probability(t, n) == 1 for n in {r["n"] for r in rows})
    extra = {}
    n_last = rows[-1]["n"]
    if iso.middle_rank(t, n_last) >= 1:
        rep = llt.llt_layer_ratio(t, n_last)
        extra = {"predicted_ratio": rep.predicted, "exact_ratio": rep.exact,
                 "relative_error": rep.relative_error, "x_values": [rep.x_lower, rep.x_upper]}
    return ok, {"t": t, "rows": rows, "ratio": extra}, rows


def cmd_clt_sim(args):
    n = _need(args, "n", 3)
    st = smp.sample_defects(n, samples=args.samples or 10_000, burn_in=args.burn_in, seed=args.seed)
    rec = st.record()
    ok = True
    if n <= 4:
        exact = float(distribution_mean(defect_distribution_exact(n)))
        rec["exact_mean"] = exact
        rec["within_3se"] = abs(rec["cumulants"][0] - exact) <= 3 * rec["mean_se"]
        ok = rec["within_3se"]
    rec["T1"] = asy.t1(n)
    if st.samples >= 10_000:
        rec["normality"] = vars(smp.normality_diagnostics(st))
    rows = [{"defects": k, "count": v} for k, v in sorted(rec["histogram"].items())]
    return ok, rec, rows


def cmd_all_acceptance(args):
    from .acceptance import run_all
    results = run_all(echo=lambda line: print(line, file=sys.stderr))
    payload = {"criteria": [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results]}
    rows = [{"criterion": r.number, "title": r.title, "passed": r.passed} for r in results]
    return all(r.passed for r in results), payload, rows


def _n_range(args, default):
    if args.n_max is not None:
        lo = args.n if args.n is not None else 1
        return list(range(lo, args.n_max + 1))
    return [args.n if args.n is not None else default]


HANDLERS = {"count": cmd_count, "identities": cmd_identities, "clusters": cmd_clusters,
            "asympt": cmd_asympt, "isoperimetry": cmd_isoperimetry, "scd": cmd_scd,
            "containers": cmd_containers, "llt": cmd_llt, "clt-sim": cmd_clt_sim,
            "all-acceptance": cmd_all_acceptance}

GRID_COMMANDS = {"asympt", "llt"}


def build_parser():
    p = argparse.ArgumentParser(prog="antichains", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--t", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--cluster-size-max", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--constants-file")
    return p


def _to_csv(rows):
    buf = io.StringIO()
    cols = list(rows[0]) if rows else []
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _plain(v) for k, v in r.items()})
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    config = {k: v for k, v in vars(args).items()}
    config["version"] = __version__
    try:
        passed, payload, rows = HANDLERS[args.command](args)
    except (Refusal, InstanceTooLarge, ValueError) as e:
        print(f"refused: {e}", file=sys.stderr)
        return 2
    fmt = args.format or ("csv" if args.command in GRID_COMMANDS else "json")
    if fmt == "csv":
        if rows is None:
            rows = [{"key": k, "value": json.dumps(_plain(v), sort_keys=True)} for k, v in payload.items()]
        text = f"# config: {json.dumps(_plain(config), sort_keys=True)}\n" \
               f"# constants_version: {_constants_version(args.constants_file)}\n" \
               f"# verdict: {'PASS' if passed else 'FAIL'}\n" + _to_csv(rows)
    else:
        report = {"config": config, "constants_version": _constants_version(args.constants_file),
                  "verdict": "PASS" if passed else "FAIL", "result": payload}
        text = json.dumps(_plain(report), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
