"""Command-line front end: discretize | bode | design | step | report."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import report as case
from .config import ConfigError, ProjectConfig
from .designer import DesignGoal, design
from .errors import ControlError
from .freqresp import bode_sweep
from .polytf import Domain, TransferFunction, series
from .records import (
    bode_rows,
    csv_text,
    design_record,
    load_controller,
    step_rows,
    write_json,
    write_text,
)
from .simkit import LoopConfig, loop_step_metrics, simulate_step
from .xform import bilinear_z_to_w

log = logging.getLogger("digictl")


def _sig4(x: float) -> float:
    return float(f"{x:.4g}")


def _plant_for_design(cfg: ProjectConfig, plane: str) -> TransferFunction:
    pz = cfg.plant_z()
    return pz if plane == "z" else bilinear_z_to_w(pz)


def _design_from_args(cfg: ProjectConfig, args):
    method = args.method
    wc = args.wc if args.wc is not None else case.CROSSOVER[method]
    goal = DesignGoal(args.pm, wc, cfg.sample_period)
    a0 = args.a0 if args.a0 is not None else case.A0
    ki = args.ki if args.ki is not None else case.PID_KI
    return design(method, _plant_for_design(cfg, args.plant_eval), goal, a0=a0, ki=ki)


def _controller(cfg: ProjectConfig, args) -> TransferFunction:
    if args.controller:
        return load_controller(args.controller)
    if args.method:
        return _design_from_args(cfg, args).d_z
    raise ValueError("give --controller <design.json> or --method <lag|lead|pi|pid>")


def cmd_discretize(cfg: ProjectConfig, args) -> int:
    pz = cfg.plant_z().normalized()
    num, den = pz.num.descending(), pz.den.descending()
    out = {
        "sample_period": cfg.sample_period,
        "num": num,
        "den": den,
        "num_4sf": [_sig4(c) for c in num],
        "den_4sf": [_sig4(c) for c in den],
    }
    write_json(out, args.out, sys.stdout)
    return 0


def cmd_bode(cfg: ProjectConfig, args) -> int:
    if args.system == "plant-s":
        tf = cfg.plant_s()
    elif args.system == "plant-z":
        tf = cfg.plant_z()
    elif args.system == "unity":
        tf = TransferFunction.gain(1.0, Domain.z(cfg.sample_period))
    else:
        tf = series(_controller(cfg, args), cfg.plant_z())
    points = bode_sweep(tf, args.wmin, args.wmax, args.points)
    write_text(csv_text(bode_rows(points, tf.domain)), args.out, sys.stdout)
    return 0


def cmd_design(cfg: ProjectConfig, args) -> int:
    if not args.method:
        raise ValueError("design needs --method <lag|lead|pi|pid>")
    d = _design_from_args(cfg, args)
    write_json(design_record(d, cfg.plant_z()), args.out, sys.stdout)
    return 0


def cmd_step(cfg: ProjectConfig, args) -> int:
    controller = _controller(cfg, args)
    duration = args.duration
    if duration is None:
        duration = case.DURATION.get(args.method or "", 150.0)
    lc = LoopConfig(
        controller=controller,
        plant=cfg.plant_z(),
        step_amplitude=cfg.step_amplitude,
        duration=duration,
        T=cfg.sample_period,
        sensor_gain=cfg.kpot if args.feedback == "sensor" else 1.0,
        kpot=cfg.kpot,
    )
    t, y = simulate_step(lc)
    write_text(csv_text(step_rows(t, y, cfg.kpot)), args.out, sys.stdout)
    metrics = loop_step_metrics(lc, y).as_dict()
    if args.metrics:
        write_json(metrics, args.metrics, sys.stdout)
    elif args.out:
        write_json(metrics, Path(args.out).with_suffix(".metrics.json"), sys.stdout)
    else:
        sys.stderr.write(json.dumps(metrics) + "\n")
    return 0


def cmd_report(cfg: ProjectConfig, args) -> int:
    out = Path(args.out or "report")
    out.mkdir(parents=True, exist_ok=True)
    study = case.run_case_study(cfg)
    T = cfg.sample_period
    wmax = min(args.wmax, 0.999 * math.pi / T)
    write_text(csv_text(bode_rows(bode_sweep(cfg.plant_s(), args.wmin, wmax, args.points), Domain.s())), out / "bode_plant_s.csv")
    write_text(csv_text(bode_rows(bode_sweep(study.plant_z, args.wmin, wmax, args.points), study.plant_z.domain)), out / "bode_uncompensated.csv")
    for m in case.METHODS:
        d = study.designs[m]
        write_json(design_record(d, study.plant_z), out / f"design_{m}.json")
        loop = series(d.d_z, study.plant_z)
        write_text(csv_text(bode_rows(bode_sweep(loop, args.wmin, wmax, args.points), loop.domain)), out / f"bode_{m}.csv")
        t, y = study.steps[m]
        write_text(csv_text(step_rows(t, y, cfg.kpot)), out / f"step_{m}.csv")
        write_json(study.metrics[m].as_dict(), out / f"step_{m}.metrics.json")
    text = case.summary_text(study)
    write_text(text, out / "summary.txt")
    sys.stdout.write(text)
    if not study.passed:
        log.error("one or more acceptance rows failed; see %s", out / "summary.txt")
        return 1
    return 0


COMMANDS = {
    "discretize": cmd_discretize,
    "bode": cmd_bode,
    "design": cmd_design,
    "step": cmd_step,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="digictl", description="Digital controller synthesis for a sampled robot-arm joint")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config (defaults reproduce the arm case study)")
    parser.add_argument("--method", choices=case.METHODS)
    parser.add_argument("--pm", type=float, default=case.PHASE_MARGIN, help="target phase margin, deg")
    parser.add_argument("--wc", type=float, help="w-plane crossover frequency, rad/s")
    parser.add_argument("--a0", type=float, help="lag/lead DC gain")
    parser.add_argument("--ki", type=float, help="PID integral gain")
    parser.add_argument("--plant-eval", choices=("z", "w"), default="z",
                        help="sample the plant on the unit circle (z) or on the bilinear w-plane (w)")
    parser.add_argument("--controller", help="design JSON produced by the design command")
    parser.add_argument("--system", choices=("plant-s", "plant-z", "open-loop", "unity"), default="plant-z")
    parser.add_argument("--wmin", type=float, default=0.01)
    parser.add_argument("--wmax", type=float, default=31.0)
    parser.add_argument("--points", type=int, default=400)
    parser.add_argument("--duration", type=float, help="simulation length, s")
    parser.add_argument("--feedback", choices=("sensor", "unity"), default="sensor",
                        help="apply kpot in the feedback path (sensor) or close the loop with unity gain")
    parser.add_argument("--metrics", help="metrics JSON path for the step command")
    parser.add_argument("--out", help="output path (directory for report)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="digictl: %(message)s")
    try:
        cfg = ProjectConfig.load(args.config)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 2
    except (ControlError, ValueError, OSError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
