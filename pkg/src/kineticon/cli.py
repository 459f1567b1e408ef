"""Command-line front end.

Exit codes: 0 success, 2 invalid input (config, parameters, strict-mode
validity), 3 some points failed or a single-point solve did not converge,
4 I/O error.
"""

import argparse
import json
import sys
import warnings

from . import cavity, circuit, materials, quantum, resonator, sweep
from .errors import (
    BifurcationError,
    ConfigValidationError,
    ConvergenceError,
    KineticonError,
    ValidityWarning,
)

EXIT_OK, EXIT_INVALID, EXIT_POINTS, EXIT_IO = 0, 2, 3, 4


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="JSON sweep config")
    p.add_argument("--out", metavar="PATH", help="write data here instead of stdout")
    p.add_argument("--format", choices=sweep.FORMATS, help="output format (default csv)")
    p.add_argument("--strict", action="store_true", help="treat validity warnings as errors")
    p.add_argument("--dim", type=int, metavar="N", help="Fock-space truncation override")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="kineticon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("qubit", parents=[common], help="single-point circuit and spectrum report")
    q.add_argument("--L0k-nH", type=float, default=1.0)
    q.add_argument("--f-r-GHz", type=float, default=100.0)
    q.add_argument("--Istar-uA", type=float, default=10.0)
    q.add_argument("--levels", type=int, default=6, help="number of levels to print")

    sub.add_parser("sweep", parents=[common], help="config-driven design-space sweep")

    r = sub.add_parser("resonator", parents=[common], help="S21 and power-dependent shift")
    r.add_argument("--power", type=float, action="append", default=[], metavar="W",
                   help="drive power for a Duffing solve (repeatable)")
    r.add_argument("--points", type=int, default=2001)

    c = sub.add_parser("cavity", parents=[common], help="rectangular cavity modes")
    c.add_argument("--a-mm", type=float, default=1.0)
    c.add_argument("--b-mm", type=float, default=2.54)
    c.add_argument("--d-mm", type=float, default=1.4)
    c.add_argument("--eps-eff", type=float, default=1.0)
    c.add_argument("--max-index", type=int, default=2)
    c.add_argument("--target-GHz", type=float, help="report the TE101 loading for this target")

    m = sub.add_parser("materials", parents=[common], help="list or inspect materials")
    m.add_argument("name", nargs="?")
    return parser


def _read(path):
    with open(path) as fh:
        return fh.read()


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _run_config(args, allowed=None):
    cfg = sweep.parse_config(_read(args.config))
    if allowed and cfg.mode not in allowed:
        raise ConfigValidationError([f"'{args.command}' accepts modes {sorted(allowed)}, got {cfg.mode}"])
    result = sweep.run_sweep(cfg, strict=args.strict)
    fmt = args.format or cfg.output_format
    path = args.out or cfg.output_path
    if path is None:
        sys.stdout.write(sweep.render(result, fmt))
    else:
        sweep.emit(result, path, fmt)
    if result.failed:
        print(f"{result.failed} of {len(result.rows)} points failed", file=sys.stderr)
        return EXIT_POINTS
    return EXIT_OK


def cmd_qubit(args):
    c = circuit.KineticonCircuit.from_frequency(args.L0k_nH * 1e-9, args.f_r_GHz * 1e9, args.Istar_uA * 1e-6)
    d = circuit.derive(c)
    spec = quantum.spectrum(d.f_r, d.lam, dim=args.dim or quantum.DEFAULT_DIM)
    lines = [
        f"L0k          {c.L0k:.6g} H",
        f"C            {c.C:.6g} F",
        f"I*           {c.Istar:.6g} A",
        f"f_r          {d.f_r:.9g} Hz",
        f"Z0           {d.Z0:.6g} ohm",
        f"I_zpf        {d.I_zpf:.6g} A",
        f"lambda       {d.lam:.6g}",
        f"alpha (pert) {circuit.alpha_perturbative(c):.6g}",
        f"f01          {spec.f01:.9g} Hz",
        f"f12          {spec.f12:.9g} Hz",
        f"alpha (diag) {spec.alpha_rel:.6g}",
        f"dim          {spec.dim}",
        "levels (Hz):",
    ]
    lines += [f"  {n:3d} {E:.12g}" for n, E in enumerate(spec.levels[: args.levels])]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_resonator(args):
    if args.config:
        return _run_config(args, {"resonator_s21", "duffing_power"})
    net = resonator.fabry_perot()
    f0 = resonator.small_signal_f0(net)
    B = sweep._bandwidth(net, f0)
    print(f"f0 {f0:.9g} Hz  B {B:.6g} Hz  Q {f0 / B:.6g}", file=sys.stderr)
    status = EXIT_OK
    for p in args.power:
        try:
            res = resonator.duffing_shift(net, p)
        except (BifurcationError, ConvergenceError) as exc:
            print(f"P={p:.4g} W: {exc}", file=sys.stderr)
            status = EXIT_POINTS
            continue
        ok = resonator.readout_ok(abs(res.delta_f), res.n_photons, B)
        print(f"P={p:.4g} W: df={res.delta_f:.6g} Hz  n={res.n_photons:.6g}  readout_ok={ok}", file=sys.stderr)
    cfg = sweep.SweepConfig(
        mode="resonator_s21",
        axes=(sweep.Axis("f_hz", f0 - 5 * B, f0 + 5 * B, args.points),),
        fixed=dict(sweep.NETWORK_DEFAULTS),
        materials=(),
        source={"mode": "resonator_s21", "span_hz": [f0 - 5 * B, f0 + 5 * B], "points": args.points},
    )
    result = sweep.run_sweep(cfg, strict=args.strict)
    _emit(result, args)
    return status


def cmd_cavity(args):
    if args.config:
        return _run_config(args, {"cavity_modes", "coupled_s21"})
    box = cavity.RectCavity(args.a_mm * 1e-3, args.b_mm * 1e-3, args.d_mm * 1e-3, args.eps_eff)
    if args.target_GHz is not None:
        eps = cavity.loading_for_target(box, 1, 0, 1, "TE", args.target_GHz * 1e9)
        print(f"TE101 loading for {args.target_GHz:g} GHz: eps_eff = {eps:.9g}", file=sys.stderr)
    rows = cavity.mode_table(box, args.max_index)
    result = sweep.SweepResult(("family", "m", "n", "p", "f_hz"), rows, [""] * len(rows), (len(rows),), {})
    _emit(result, args)
    return EXIT_OK


def cmd_materials(args):
    extra = []
    if args.config:
        doc = json.loads(_read(args.config))
        records = doc.get("materials", []) if isinstance(doc, dict) else []
        extra = [materials.material_from_config(r) for r in records if isinstance(r, dict)]
    reg = materials.MaterialRegistry(extra)
    names = [args.name] if args.name else sorted(reg)
    lines = ["name,Tc_K,Delta_meV,gap_GHz,N0_per_eV_um3,rho_n_uohm_cm,xi"]
    for name in names:
        m = reg[name]
        lines.append(
            ",".join(
                [
                    m.name,
                    f"{m.Tc:.6g}",
                    f"{m.Delta * 1e3:.6g}",
                    f"{m.gap_frequency / 1e9:.6g}",
                    "" if m.N0 is None else f"{m.N0:.6g}",
                    "" if m.rho_n is None else f"{m.rho_n / 1e-8:.6g}",
                    f"{m.xi:g}",
                ]
            )
        )
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args):
    if not args.config:
        print("kineticon sweep: --config is required", file=sys.stderr)
        return EXIT_INVALID
    return _run_config(args)


def _emit(result, args):
    fmt = args.format or "csv"
    if args.out:
        sweep.emit(result, args.out, fmt)
    else:
        sys.stdout.write(sweep.render(result, fmt))


COMMANDS = {
    "qubit": cmd_qubit,
    "sweep": cmd_sweep,
    "resonator": cmd_resonator,
    "cavity": cmd_cavity,
    "materials": cmd_materials,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.dim is not None and args.dim < 4:
        print("kineticon: --dim must be at least 4", file=sys.stderr)
        return EXIT_INVALID
    try:
        with warnings.catch_warnings():
            if args.strict:
                warnings.simplefilter("error", ValidityWarning)
            return COMMANDS[args.command](args)
    except ConfigValidationError as exc:
        print("invalid config:", file=sys.stderr)
        for err in exc.errors:
            print(f"  - {err}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, BifurcationError) as exc:
        print(f"kineticon: {exc}", file=sys.stderr)
        return EXIT_POINTS
    except (KineticonError, ValidityWarning, json.JSONDecodeError) as exc:
        print(f"kineticon: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"kineticon: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
