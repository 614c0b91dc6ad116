"""
spingate - Command Line Interface
Simulate parallel pulses, tabulate exchange curves, design XOR gates and run the verification suite

Usage:
    python spingate.py simulate --pulse pulse.env --out results
    python spingate.py exchange --preset gaas --sweep B=0:10:0.1 --out results
    python spingate.py design-xor --family proportional --n 2 --m 1 --out results
    python spingate.py verify --out results
"""

import argparse
import logging
import math
import os
import sys
from typing import List, Optional

import numpy as np

from algebra import fidelity_phase_invariant
from config import LOG_DIR, MATERIAL_PRESETS, ORACLE_ATOL, ORACLE_RTOL, THREADS, VERSION
from designer import (
    DesignError,
    DesignInfeasibleError,
    design_adiabatic_xor,
    design_constant_xor,
    design_proportional_xor,
    xor_target,
)
from dynamics import free_evolution, propagator_tol, propagator_trajectory
from exchange import DotParameters, ExchangeBreakdown, FieldPair, equal_field_exchange, exchange_sweep, symmetry_defect
from oracle import IntegratorConfig
from outputs import write_csv, write_json
from pulse_file import PulseFileError, load_pulse
from pulses import ConstantShape
from verification import run_suite

logger = logging.getLogger("spingate")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


def setup_logging(log_dir: str = LOG_DIR, verbose: bool = False):
    """Log to logs/spingate.log and the console"""
    os.makedirs(log_dir, exist_ok=True)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(log_dir, 'spingate.log'), encoding='utf-8'),
            logging.StreamHandler()
        ],
        force=True
    )


def parse_sweep(text: str) -> List[float]:
    """Parse 'B=lo:hi:step' into the inclusive grid lo, lo+step, ..., hi"""
    name, _, grid = text.partition("=")
    if name.strip() != "B" or grid.count(":") != 2:
        raise ValueError(f"Sweep must look like B=lo:hi:step, got {text!r}")
    lo, hi, step = (float(x) for x in grid.split(":"))
    if step <= 0 or hi < lo:
        raise ValueError(f"Sweep needs step > 0 and hi >= lo, got {text!r}")
    count = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(count)]


def _integrator(args) -> IntegratorConfig:
    return IntegratorConfig(rtol=args.rtol, atol=args.atol)


# ============================================================================
# Subcommands
# ============================================================================

def cmd_simulate(args) -> int:
    profile, spec = load_pulse(args.pulse)
    samples = args.samples or int(spec.number("samples", 101))
    if samples < 2:
        raise PulseFileError(f"need at least 2 samples, got {samples}", "samples", spec.lines.get("samples"))
    target_name = spec.text("target", "none")
    target = {"xor": xor_target(), "sqrt_swap": free_evolution(math.pi / 4.0)}.get(target_name)

    times = np.linspace(0.0, profile.t_end, samples)
    cfg = _integrator(args)
    results = propagator_trajectory(profile, times, cfg)
    tol = propagator_tol(profile, cfg)

    header = ["t"]
    for i in range(1, 5):
        for j in range(1, 5):
            header += [f"R{i}{j}_re", f"R{i}{j}_im"]
    header.append("unitarity_defect")
    if target is not None:
        header.append("fidelity")

    rows = []
    for result in results:
        row = [result.t]
        for z in result.propagator.ravel():
            row += [float(z.real), float(z.imag)]
        row.append(result.unitarity_defect)
        if target is not None:
            row.append(fidelity_phase_invariant(result.propagator, target, tol))
        rows.append(row)

    out = os.path.join(args.out, "trajectory.csv")
    config = {"command": "simulate", "pulse": spec.values, "samples": samples,
              "rtol": args.rtol, "atol": args.atol}
    write_csv(out, header, rows, config)
    print(f"✅ {profile.family} trajectory with {len(rows)} samples written to {out}")
    if target is not None:
        print(f"📊 Final fidelity against {target_name}: {rows[-1][-1]:.12f}")
    return EXIT_OK


def cmd_exchange(args) -> int:
    params = DotParameters.from_preset(args.preset)
    grid = parse_sweep(args.sweep)
    fields = [FieldPair(b, b + args.b2_offset) for b in grid]
    breakdowns = exchange_sweep(params, fields, args.threads)

    header = list(ExchangeBreakdown.CSV_COLUMNS) + ["symmetry_defect", "J_equal_meV"]
    rows = [list(item.csv_row()) + [symmetry_defect(params, field), equal_field_exchange(params, item.b1)]
            for item, field in zip(breakdowns, fields)]
    out = os.path.join(args.out, "exchange.csv")
    config = {"command": "exchange", "preset": args.preset, "sweep": args.sweep, "b2_offset": args.b2_offset}
    write_csv(out, header, rows, config)
    print(f"✅ {len(rows)} exchange points written to {out} (d = {params.d:.4f})")
    return EXIT_OK


def cmd_design(args) -> int:
    cfg = _integrator(args)
    g_factor = MATERIAL_PRESETS[args.preset]["g1"]
    if args.family == "proportional":
        design = design_proportional_xor(args.n, args.m, ConstantShape(args.q), cfg=cfg, g_factor=g_factor)
    elif args.family == "constant":
        design = design_constant_xor(args.j, args.n, args.m, cfg=cfg, g_factor=g_factor)
    else:
        if args.c is None:
            raise DesignError("--c is required for the adiabatic family")
        design = design_adiabatic_xor(args.c, args.n, args.m, t_window=args.t_window, cfg=cfg, g_factor=g_factor)

    out = os.path.join(args.out, "gate_design.json")
    config = {"command": "design-xor", "family": args.family, "preset": args.preset, "n": args.n, "m": args.m,
              "c": args.c, "q": args.q, "j": args.j, "rtol": args.rtol, "atol": args.atol}
    write_json(out, design.to_dict(), config)
    print(f"✅ {design.family} XOR: T = {design.T:.6g} ps, fidelity = {design.achieved_fidelity:.12f}")
    if design.oracle_fidelity is not None:
        print(f"📊 Re-simulated fidelity: {design.oracle_fidelity:.12f}")
    for note in design.notes:
        print(f"⚠️  {note}")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(quick=args.quick, cfg=_integrator(args))
    out = os.path.join(args.out, "verify_report.json")
    write_json(out, report.to_dict(), {"command": "verify", "quick": args.quick,
                                       "rtol": args.rtol, "atol": args.atol})
    for check in report.checks:
        mark = "✅" if check.passed else ("❌" if check.required else "⚠️ ")
        print(f"{mark} {check.name}: {check.value:.3e} (threshold {check.threshold:.1e})")
    print(f"📊 Report written to {out}")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


# ============================================================================
# Entry point
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Parallel-pulse gate design for two exchange-coupled spins"
    )
    parser.add_argument("--version", action="version", version=f"spingate {VERSION}")
    parser.add_argument("--rtol", type=float, default=ORACLE_RTOL, help="Integrator relative tolerance")
    parser.add_argument("--atol", type=float, default=ORACLE_ATOL, help="Integrator absolute tolerance")
    parser.add_argument("--log-dir", type=str, default=LOG_DIR, help="Directory for spingate.log")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Propagator trajectory of a pulse file")
    simulate.add_argument("--pulse", required=True, help="Pulse definition file (KEY=VALUE)")
    simulate.add_argument("--out", required=True, help="Output directory")
    simulate.add_argument("--samples", type=int, help="Number of time samples (default: file or 101)")
    simulate.set_defaults(handler=cmd_simulate)

    exchange = sub.add_parser("exchange", help="Exchange energy over a field sweep")
    exchange.add_argument("--preset", default="gaas", choices=sorted(MATERIAL_PRESETS), help="Material preset")
    exchange.add_argument("--sweep", required=True, help="Field grid B=lo:hi:step (tesla)")
    exchange.add_argument("--b2-offset", type=float, default=0.0, help="B2 - B1 (tesla)")
    exchange.add_argument("--threads", type=int, default=THREADS, help="Worker threads")
    exchange.add_argument("--out", required=True, help="Output directory")
    exchange.set_defaults(handler=cmd_exchange)

    design = sub.add_parser("design-xor", help="Design a parallel XOR pulse")
    design.add_argument("--family", required=True, choices=["proportional", "constant", "adiabatic"])
    design.add_argument("--n", type=int, required=True, help="Integer n >= 1")
    design.add_argument("--m", type=int, default=0, help="Integer m >= 0")
    design.add_argument("--c", type=float, help="Constant B- for the adiabatic family (rad/ps)")
    design.add_argument("--q", type=float, default=0.5, help="Constant q level for the proportional family (rad/ps)")
    design.add_argument("--j", type=float, default=0.5, help="Constant J for the constant family (rad/ps)")
    design.add_argument("--t-window", type=float, help="Longest acceptable gate time (ps)")
    design.add_argument("--preset", default="gaas", choices=sorted(MATERIAL_PRESETS),
                        help="Material preset whose g-factor sets the B+ hardware cap")
    design.add_argument("--out", required=True, help="Output directory")
    design.set_defaults(handler=cmd_design)

    verify = sub.add_parser("verify", help="Run the verification suite")
    verify.add_argument("--out", required=True, help="Output directory")
    verify.add_argument("--quick", action="store_true", help="Smaller random sample of closed-form checks")
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_dir, args.verbose)
    logger.info(f"spingate {VERSION}: {args.command}")
    try:
        return args.handler(args)
    except DesignInfeasibleError as e:
        print(f"❌ Design infeasible: {e}")
        logger.error(f"Design infeasible: {e}")
        return EXIT_INFEASIBLE
    except (PulseFileError, DesignError, ValueError) as e:
        print(f"❌ {e}")
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
