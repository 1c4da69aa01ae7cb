"""
Command-line front end.

Exit codes: 0 success, 2 bad arguments, 3 I/O or numerical failure,
4 peak search hit the window boundary.  Option values come from, in order of
precedence, the command line, a JSON ``--config`` file, and built-in defaults
(HeNe laser, 100 mm lens, 8 um pixels, 520 um beam).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from pathlib import Path

import numpy as np

from .exceptions import PcgError, WindowMissError
from .experiment import (
    PhysicalSetup,
    ScanSettings,
    iter_entropy_scan,
    optimal_period_search,
    scan_points,
    scan_to_json,
    write_scan_csv,
)
from .grid import MOMENTUM, POSITION, GaussianSpec
from .masks import PcgBasis
from .probability import conditional_matrix, row_entropies
from .theory import (
    MubConfig,
    StandardCgConfig,
    allowed_m_residues,
    equivalent_forms_check,
    is_unbiased_config,
    standard_cg_distribution,
)

DEFAULTS = {
    "m": 1,
    "tx_um": 192.0,
    "sigma_um": 520.0,
    "fe_mm": 100.0,
    "lambda_nm": 633.0,
    "pixel_um": 8.0,
    "xcen_um": 0.0,
    "pcen": None,
    "method": "series",
    "out": None,
    "format": "csv",
    "jobs": 1,
    "full": False,
    "step_um": None,
    "fine": False,
    "max_tp_um": None,
    "sx_um": None,
    "window_um": None,
    "scan_dir": None,
    "delta_um": 1.0,
    "delta_product": 2 * math.pi / 8,
    "l_max": 200,
    "selftest_configs": 8,
}

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_WINDOW = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser, physics=True):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON file of option values")
    p.add_argument("--out", default=S, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=S)
    if physics:
        p.add_argument("--m", type=int, default=S)
        p.add_argument("--tx-um", dest="tx_um", type=float, default=S)
        p.add_argument("--sigma-um", dest="sigma_um", type=float, default=S)
        p.add_argument("--fe-mm", dest="fe_mm", type=float, default=S)
        p.add_argument("--lambda-nm", dest="lambda_nm", type=float, default=S)
        p.add_argument("--pixel-um", dest="pixel_um", type=float, default=S)
        p.add_argument("--xcen-um", dest="xcen_um", type=float, default=S)
        p.add_argument("--pcen", type=float, default=S,
                       help="momentum mask origin in rad/um")
        p.add_argument("--method", choices=("series", "quadrature", "both"), default=S)
        p.add_argument("--jobs", type=int, default=S)
        p.add_argument("--full", action="store_true", default=S)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcg-mub",
        description="Periodic coarse-grained measurements and their mutual unbiasedness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    p = sub.add_parser("allowed-m", help="residues m' giving unbiased measurements")
    p.add_argument("--d", type=int, required=True)

    p = sub.add_parser("check-config", help="periods and unbiasedness of (d, m, T_x)")
    p.add_argument("--d", type=int, default=S)
    _common(p)

    p = sub.add_parser("conditional", help="d x d matrix p(l|k) and its entropies")
    p.add_argument("--d", type=int, default=S)
    _common(p)

    p = sub.add_parser("scan-tp", help="entropies over the measurement period")
    p.add_argument("--d", type=int, default=S)
    p.add_argument("--tp-min-um", dest="tp_min_um", type=float, required=True)
    p.add_argument("--tp-max-um", dest="tp_max_um", type=float, required=True)
    p.add_argument("--step-um", dest="step_um", type=float, default=S)
    p.add_argument("--fine", action="store_true", default=S,
                   help="continuous theory curve: no pixel snapping, default step 1 um")
    p.add_argument("--max-tp-um", dest="max_tp_um", type=float, default=S,
                   help="detection-range cap on the period")
    _common(p)

    p = sub.add_parser("find-peak", help="optimal measurement period for m = 1")
    p.add_argument("--d", type=int, nargs="+", default=S)
    p.add_argument("--sx-um", dest="sx_um", type=float, default=S,
                   help="fixed preparation bin width; T_x = d * sx")
    p.add_argument("--window-um", dest="window_um", type=float, nargs=2, default=S)
    p.add_argument("--step-um", dest="step_um", type=float, default=S)
    p.add_argument("--scan-dir", dest="scan_dir", default=S,
                   help="also write each search scan as scan_d<d>.csv here")
    _common(p)

    p = sub.add_parser("standard-cg", help="momentum bins of the flat state (biased case)")
    p.add_argument("--delta-um", dest="delta_um", type=float, default=S)
    p.add_argument("--delta-product", dest="delta_product", type=float, default=S,
                   help="product of position and momentum bin widths")
    p.add_argument("--l-max", dest="l_max", type=int, default=S)
    _common(p, physics=False)

    p = sub.add_parser("selftest", help="quick numerical self-checks")
    p.add_argument("--configs", dest="selftest_configs", type=int, default=S)
    _common(p, physics=False)
    return parser


def resolve(ns: argparse.Namespace) -> dict:
    """Merge defaults < config file < command line."""
    cli = vars(ns).copy()
    cfg = {}
    path = cli.pop("config", None)
    if path:
        try:
            cfg = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    opts = {**DEFAULTS, **cfg, **cli}
    for key in ("tx_um", "sigma_um", "fe_mm", "lambda_nm", "pixel_um", "delta_um", "delta_product"):
        if opts.get(key) is not None and not opts[key] > 0:
            raise UsageError(f"--{key.replace('_', '-')} must be positive")
    if opts.get("m") is not None and opts["m"] < 1:
        raise UsageError("--m must be >= 1")
    ds = opts.get("d")
    if ds is not None:
        for d in np.atleast_1d(ds):
            if d < 2:
                raise UsageError("--d must be >= 2")
    return opts


def _setup(o) -> PhysicalSetup:
    return PhysicalSetup(o["fe_mm"], o["lambda_nm"], o["pixel_um"])


def _need_d(o) -> int:
    if o.get("d") is None:
        raise UsageError("--d is required")
    d = o["d"]
    if isinstance(d, list):
        if len(d) != 1:
            raise UsageError("this command takes a single --d")
        d = d[0]
    return int(d)


class _Output:
    """Writes to ``--out`` or stdout; text is LF-terminated UTF-8."""

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if self.path:
            self.fh = open(self.path, "w", encoding="utf-8", newline="\n")
        else:
            self.fh = sys.stdout
        return self.fh

    def __exit__(self, *exc):
        if self.path:
            self.fh.close()
        else:
            self.fh.flush()


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def cmd_allowed_m(o) -> int:
    d = _need_d(o)
    print(" ".join(str(m) for m in allowed_m_residues(d)))
    return EXIT_OK


def cmd_check_config(o) -> int:
    d = _need_d(o)
    cfg = MubConfig.from_m(d, o["m"], o["tx_um"])
    setup = _setup(o)
    lines = [
        f"d={d} m={cfg.m} m_residue={cfg.m_residue}",
        f"unbiased={str(cfg.is_unbiased()).lower()}",
        f"tx_um={_fmt(cfg.tx)} sx_um={_fmt(cfg.sx)}",
        f"tp={_fmt(cfg.tp)} sp={_fmt(cfg.sp)} tau_p_um={_fmt(cfg.tau_p)}",
        f"tp_phys_um={_fmt(setup.predicted_period(d, cfg.tx, cfg.m))}",
        f"equivalent_forms={str(equivalent_forms_check(cfg)).lower()}",
    ]
    print("\n".join(lines))
    return EXIT_OK


def _bases(o, d):
    cfg = MubConfig.from_m(d, o["m"], o["tx_um"])
    p_cen = 0.0 if o["pcen"] is None else o["pcen"]
    return (PcgBasis(d, cfg.tx, o["xcen_um"], POSITION), PcgBasis(d, cfg.tp, p_cen, MOMENTUM))


def cmd_conditional(o) -> int:
    d = _need_d(o)
    g = GaussianSpec(o["sigma_um"])
    bx, bp = _bases(o, d)
    methods = ("series", "quadrature") if o["method"] == "both" else (o["method"],)
    mats = {m: conditional_matrix(g, bx, bp, m, jobs=o["jobs"]) for m in methods}
    mat = mats[methods[0]]
    ent = row_entropies(mat)
    summary = [f"e_min={ent.min():.6f}", f"e_max={ent.max():.6f}"]
    if len(mats) == 2:
        gap = float(np.max(np.abs(mats["series"] - mats["quadrature"])))
        summary.append(f"max_discrepancy={gap:.3e}")

    if o["format"] == "json":
        doc = {"d": d, "m": o["m"], "tx_um": o["tx_um"], "method": methods[0],
               "matrix": [[float(_fmt(v)) for v in r] for r in mat],
               "entropies": [float(_fmt(e)) for e in ent]}
        if len(mats) == 2:
            doc["quadrature_matrix"] = [[float(_fmt(v)) for v in r] for r in mats["quadrature"]]
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", *[f"p_{l}" for l in range(d)], "entropy"])
        for k, (row, e) in enumerate(zip(mat, ent)):
            w.writerow([k, *[_fmt(v) for v in row], _fmt(e)])
        text = buf.getvalue()
    with _Output(o["out"]) as fh:
        fh.write(text)
    prefix = "" if o["out"] else "# "
    print("\n".join(prefix + s for s in summary))
    return EXIT_OK


def _emit_scan(o, settings: ScanSettings, points, fh):
    """Stream rows; on failure mark the output incomplete and re-raise."""
    rows = []
    try:
        for row in iter_entropy_scan(settings, points, o["jobs"]):
            rows.append(row)
    except Exception:
        _write_rows(o, fh, rows, settings.d, incomplete=True)
        raise
    _write_rows(o, fh, rows, settings.d)
    return rows


def _write_rows(o, fh, rows, d, incomplete=False):
    if o["format"] == "json":
        fh.write(scan_to_json(rows, d, full=o["full"], incomplete=incomplete))
    else:
        write_scan_csv(fh, rows, d, incomplete=incomplete)


def cmd_scan_tp(o) -> int:
    d = _need_d(o)
    setup = _setup(o)
    lo, hi = o["tp_min_um"], o["tp_max_um"]
    if not (lo > 0 and hi >= lo):
        raise UsageError(f"empty scan range [{lo}, {hi}]")
    fine = o["fine"]
    step = o["step_um"] or (1.0 if fine else d * setup.slm_pixel_um)
    if not fine and step < setup.slm_pixel_um:
        raise UsageError("--step-um must be at least one pixel unless --fine is given")
    points = scan_points((lo, hi), step, None if fine else setup, o["max_tp_um"])
    if not points:
        raise UsageError("scan range is empty after applying --max-tp-um")
    settings = ScanSettings(d, o["tx_um"], GaussianSpec(o["sigma_um"]), setup, o["xcen_um"],
                            o["pcen"], _single_method(o), keep_matrix=o["full"])
    with _Output(o["out"]) as fh:
        _emit_scan(o, settings, points, fh)
    return EXIT_OK


def _single_method(o) -> str:
    if o["method"] == "both":
        raise UsageError("--method both is only available for 'conditional'")
    return o["method"]


def cmd_find_peak(o) -> int:
    if o.get("d") is None:
        raise UsageError("--d is required")
    ds = [int(d) for d in np.atleast_1d(o["d"])]
    setup = _setup(o)
    g = GaussianSpec(o["sigma_um"])
    results = []
    for d in ds:
        tx = d * o["sx_um"] if o["sx_um"] else o["tx_um"]
        window = tuple(o["window_um"]) if o["window_um"] else None
        res = optimal_period_search(d, tx, g, setup, window, o["step_um"], method=_single_method(o),
                                    x_cen=o["xcen_um"], p_cen=o["pcen"], jobs=o["jobs"])
        results.append((d, tx, res))
        if o["scan_dir"]:
            Path(o["scan_dir"]).mkdir(parents=True, exist_ok=True)
            path = Path(o["scan_dir"]) / f"scan_d{d}.csv"
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                write_scan_csv(fh, res.rows, d)

    with _Output(o["out"]) as fh:
        if len(ds) == 1:
            d, _, res = results[0]
            _write_rows(o, fh, res.rows, d)
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["d", "tx_um", "tp_pred_um", "tp_opt_um", "e_min", "e_max"])
            for d, tx, res in results:
                w.writerow([d, _fmt(tx), _fmt(setup.predicted_period(d, tx)), _fmt(res.tp_opt),
                            _fmt(res.e_min), _fmt(float(np.max(res.entropies)))])
    prefix = "" if o["out"] else "# "
    for d, tx, res in results:
        print(f"{prefix}d={d} tp_opt_um={_fmt(res.tp_opt)} "
              f"tp_pred_um={_fmt(setup.predicted_period(d, tx))} e_min={res.e_min:.6f}")
    return EXIT_OK


def cmd_standard_cg(o) -> int:
    delta_x = o["delta_um"]
    cfg = StandardCgConfig(delta_x, o["delta_product"] / delta_x)
    labels = range(-o["l_max"], o["l_max"] + 1)
    probs = standard_cg_distribution(cfg, labels)
    centre = probs[o["l_max"] - 1: o["l_max"] + 3]
    with _Output(o["out"]) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["l", "p_l"])
        for l, p in zip(labels, probs):
            w.writerow([l, _fmt(p)])
    prefix = "" if o["out"] else "# "
    print(f"{prefix}total={probs.sum():.9f} central_spread={centre.max() - centre.min():.6f}")
    return EXIT_OK


def cmd_selftest(o) -> int:
    """Fast checks; randomised configurations are seeded from PCG_MUB_SEED."""
    seed = int(os.environ.get("PCG_MUB_SEED", "12345"))
    rng = random.Random(seed)
    g = GaussianSpec(520.0)
    checks = []
    lists = {7: [1, 2, 3, 4, 5, 6], 8: [1, 3, 5, 7], 9: [1, 2, 4, 5, 7, 8], 10: [1, 3, 7, 9]}
    checks.append(("allowed residues d=7..10",
                   all(allowed_m_residues(d) == v for d, v in lists.items())))
    checks.append(("coprimality d<=60, m<=200", all(
        is_unbiased_config(d, m) == (m % d != 0 and math.gcd(m, d) == 1)
        for d in range(2, 61) for m in range(1, 201))))
    cfg = MubConfig.from_m(4, 1, 192.0)
    mat = conditional_matrix(g, PcgBasis(4, 192.0), PcgBasis(4, cfg.tp, 0.0, MOMENTUM))
    checks.append(("d=4 m=1 uniform rows", float(np.max(np.abs(mat - 0.25))) <= 1e-8))
    worst = 0.0
    for _ in range(o["selftest_configs"]):
        d = rng.randint(2, 8)
        m = rng.randint(1, 2 * d - 1)
        tx = rng.choice([192.0, 48.0 * d])
        tp = MubConfig.from_m(d, m, tx).tp
        bx = PcgBasis(d, tx, rng.uniform(0, tx))
        bp = PcgBasis(d, tp, rng.uniform(0, tp), MOMENTUM)
        s = conditional_matrix(g, bx, bp, "series")
        q = conditional_matrix(g, bx, bp, "quadrature")
        worst = max(worst, float(np.max(np.abs(s - q))))
    checks.append((f"series vs quadrature ({o['selftest_configs']} configs, seed {seed})",
                   worst <= 1e-6))
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(ok for _, ok in checks) else 1


COMMANDS = {
    "allowed-m": cmd_allowed_m,
    "check-config": cmd_check_config,
    "conditional": cmd_conditional,
    "scan-tp": cmd_scan_tp,
    "find-peak": cmd_find_peak,
    "standard-cg": cmd_standard_cg,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        opts = resolve(ns)
        return COMMANDS[opts["command"]](opts)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pcg-mub: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WindowMissError as exc:
        print(f"pcg-mub: {exc}", file=sys.stderr)
        return EXIT_WINDOW
    except (PcgError, OSError, ValueError, ArithmeticError) as exc:
        print(f"pcg-mub: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
