"""Command-line front-end: ``cantor-hfun {steps,curve,asymptotics,validate,premap}``.

CSV goes to ``--output`` (default stdout); JSON metadata to ``--metadata``.
Failures print a JSON object on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import sys
import warnings
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import bie, reference
from .asymfit import exact_C0, fit_exp_growth, fit_power_law, sample_near_threshold
from .conformal import find_preimage
from .exceptions import AccuracyWarning, HFunctionError
from .geometry import Basepoint, cantor_level, gap_schedule
from .hfun import build_curve, build_pipeline, step_heights
from .snapshot import load_snapshot, save_snapshot

log = logging.getLogger("cantor_hfun")

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_ERROR = 2


@dataclass
class RunConfig:
    level: int = 1
    basepoint: str = "left"
    n: int = bie.DEFAULT_N
    eps: float = 1e-14
    max_iter: int = 100
    tol: float = bie.DEFAULT_TOL
    samples_per_slit: int = 31
    asym_eps: float = 1e-6
    asym_count: int = 20
    output: Optional[str] = None
    metadata: Optional[str] = None
    snapshot: Optional[str] = None
    levels: List[int] = field(default_factory=lambda: [1, 2, 3, 4])
    tamper_radius: float = 0.0

    def validate(self) -> None:
        for name in ("eps", "tol", "asym_eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 1 or self.samples_per_slit < 1 or self.asym_count < 3:
            raise ValueError("max-iter and samples-per-slit must be >= 1, asym-count >= 3")
        Basepoint.parse(self.basepoint)


@contextlib.contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_json(path, payload) -> None:
    if path is None:
        return
    with _sink(path) as fh:
        json.dump(payload, fh, indent=1, default=float)
        fh.write("\n")


def _fmt(x) -> str:
    return f"{x:.12g}"


def _pipeline(cfg: RunConfig, level=None):
    level = cfg.level if level is None else level
    slits = cantor_level(level)
    pre = None
    if cfg.snapshot and level == cfg.level:
        pre = load_snapshot(cfg.snapshot, level, cfg.n, cfg.eps)
        if pre is not None:
            log.info("loaded preimage snapshot %s", cfg.snapshot)
    return build_pipeline(slits, cfg.basepoint, n=cfg.n, eps=cfg.eps, max_iter=cfg.max_iter,
                          tol=cfg.tol, preimage=pre)


def cmd_steps(cfg: RunConfig) -> dict:
    slits = cantor_level(cfg.level)
    bp = Basepoint.parse(cfg.basepoint)
    sched = gap_schedule(slits, bp)
    omega = step_heights(_pipeline(cfg).sigma0, bp) if sched.steps else np.array([])
    with _sink(cfg.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["level", "mode", "k", "r_lo", "r_hi", "omega"])
        for (lo, hi, k), om in zip(sched.steps, omega):
            w.writerow([cfg.level, bp.value, k, _fmt(lo), _fmt(hi), _fmt(om)])
    return {"level": cfg.level, "mode": bp.value, "m": slits.m, "rows": len(sched.steps),
            "zero_threshold": sched.zero_interval[1], "one_threshold": sched.one_threshold}


def cmd_curve(cfg: RunConfig) -> dict:
    pipe = _pipeline(cfg)
    curve = build_curve(pipe, samples_per_slit=cfg.samples_per_slit)
    with _sink(cfg.output) as fh:
        curve.to_csv(fh)
    meta = curve.metadata()
    meta.update(level=cfg.level, n=cfg.n, preimage_criterion=pipe.preimage.criterion,
                preimage_iterations=pipe.preimage.iterations,
                map_residual=pipe.map.max_imag_residual(),
                partition_of_unity_zeta0=abs(float(pipe.sigma0.sum()) - 1))
    return meta


def cmd_asymptotics(cfg: RunConfig) -> dict:
    bp = Basepoint.parse(cfg.basepoint)
    fits = {}
    with _sink(cfg.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["level", "mode", "C", "beta", "E"])
        for level in cfg.levels:
            pipe = _pipeline(cfg, level)
            res = fit_power_law(sample_near_threshold(pipe, cfg.asym_eps, cfg.asym_count),
                                bp.threshold_lo)
            fits[level] = res
            w.writerow([level, bp.value, _fmt(res.C), _fmt(res.beta), f"{res.E:.6g}"])
    meta = {"mode": bp.value, "eps": cfg.asym_eps, "count": cfg.asym_count,
            "fits": {str(k): v.to_dict() for k, v in fits.items()}}
    if bp is Basepoint.LEFT_EXTERIOR:
        c0 = exact_C0()[0]
        levels = [0] + [lv for lv in fits if lv != 0]
        values = [c0] + [fits[lv].C for lv in levels[1:]]
        if len(levels) >= 3:
            g = fit_exp_growth(levels, values)
            meta["growth_fit"] = {**g.to_dict(), "levels": levels, "C_20": float(g.predict(20))}
        ref = fit_exp_growth(range(len(reference.C_LEFT)), reference.C_LEFT)
        meta["growth_fit_reference"] = {**ref.to_dict(), "C_20": float(ref.predict(20))}
    return meta


def cmd_validate(cfg: RunConfig) -> dict:
    from .validation import run_checks

    slits = cantor_level(cfg.level)
    pre = load_snapshot(cfg.snapshot, cfg.level, cfg.n, cfg.eps) if cfg.snapshot else None
    checks = run_checks(slits, cfg.basepoint, n=cfg.n, eps=cfg.eps, max_iter=cfg.max_iter,
                        tol=cfg.tol, preimage=pre, tamper_radius=cfg.tamper_radius)
    with _sink(cfg.output) as fh:
        for c in checks:
            fh.write(c.line() + "\n")
    failed = [c.name for c in checks if c.gating and not c.passed]
    return {"level": cfg.level, "mode": Basepoint.parse(cfg.basepoint).value,
            "checks": [c.to_dict() for c in checks], "failed": failed}


def cmd_premap(cfg: RunConfig) -> dict:
    if not cfg.snapshot:
        raise ValueError("premap needs --snapshot PATH")
    slits = cantor_level(cfg.level)
    res = find_preimage(slits, eps=cfg.eps, max_iter=cfg.max_iter, n=cfg.n, tol=cfg.tol)
    save_snapshot(cfg.snapshot, res, slits, cfg.n, cfg.eps)
    return {"level": cfg.level, "n": cfg.n, "eps": cfg.eps, "criterion": res.criterion,
            "iterations": res.iterations, "snapshot": cfg.snapshot}


def cmd_oracle(cfg: RunConfig) -> dict:
    from .oracle import collocation_solve, indicator_data

    pipe = _pipeline(cfg)
    ref = [collocation_solve(pipe.domain, indicator_data(pipe.m, k))(pipe.zeta0)
           for k in range(pipe.m)]
    out = {"sigma_pipeline": pipe.sigma0.tolist(), "sigma_oracle": ref}
    json.dump(out, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return out


COMMANDS = {"steps": cmd_steps, "curve": cmd_curve, "asymptotics": cmd_asymptotics,
            "validate": cmd_validate, "premap": cmd_premap, "oracle": cmd_oracle}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cantor-hfun",
                                     description="h-functions of Cantor-level slit domains")
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    d = RunConfig()
    common.add_argument("--level", type=int, default=d.level)
    common.add_argument("--basepoint", default=d.basepoint, help="left (z0=-3/2) or center (z0=0)")
    common.add_argument("--n", type=int, default=d.n, help="nodes per circle")
    common.add_argument("--eps", type=float, default=d.eps, help="preimage stopping criterion")
    common.add_argument("--max-iter", type=int, default=d.max_iter)
    common.add_argument("--tol", type=float, default=d.tol, help="GMRES tolerance")
    common.add_argument("--samples-per-slit", type=int, default=d.samples_per_slit)
    common.add_argument("--asym-eps", type=float, default=d.asym_eps)
    common.add_argument("--asym-count", type=int, default=d.asym_count)
    common.add_argument("--output", "-o", default=None, help="CSV path (default stdout)")
    common.add_argument("--metadata", default=None, help="JSON metadata path")
    common.add_argument("--snapshot", default=None, help="preimage snapshot JSON")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {"steps": "step heights over the gaps", "curve": "full sampled h-curve",
             "asymptotics": "near-threshold power-law fits",
             "validate": "run the invariant suite", "premap": "compute and store a preimage snapshot"}
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text)
        if name == "asymptotics":
            p.add_argument("--levels", type=int, nargs="+", default=d.levels)
        if name == "validate":
            p.add_argument("--tamper-radius", type=float, default=0.0, help=argparse.SUPPRESS)
    # debugging aid, not listed in the help
    sub.add_parser("oracle", parents=[common])
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "oracle"]
    return parser


def _config(args) -> RunConfig:
    names = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in names})
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", AccuracyWarning)
            meta = COMMANDS[args.command](cfg)
        notes = [str(w.message) for w in caught if issubclass(w.category, AccuracyWarning)]
        meta = dict(meta, warnings=notes)
        _write_json(cfg.metadata, meta)
    except (HFunctionError, ValueError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_ERROR
    if notes or meta.get("failed"):
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
