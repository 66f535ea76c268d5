"""Command-line interface: sweeps, tables, and figure reproduction.

Every command reads a device card, writes a UTF-8 CSV (comma separated,
``#``-prefixed metadata lines carrying the seed, version, and card hash)
and, with ``--plot``, a vector figure next to the table.  Exit codes:
0 success, 1 card/argument validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coupling import DressedFrame
from .cr import CrDrive, anticrossing_amplitude, echoed_cr_frequency, pauli_coefficients
from .device import DeviceModel, bundled_card_path, card_hash, load_card
from .errors import CardValidationError, ZzsimError
from .gates import error_vs_flux_sweep, error_vs_gatelength, gate_error_at, optimized_target, zx90_ideal
from .noise import QuantumChannel, unitary_channel
from .pulses import schedule_from_gate_length
from .rb import build_clifford_group, simulate_rb

__all__ = ["main"]

CR_RATE_DEFAULT_FLUX = (0.5, 0.5026, 0.5036, 0.505)
GATE_ERROR_DEFAULT_TG = (200.0, 300.0, 440.0, 560.0)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--card", type=str, default=None,
                        help="device card path (default: bundled paper-device)")
    parser.add_argument("--out", type=str, default=None, help="output CSV path")
    parser.add_argument("--plot", action="store_true", help="render a figure next to the CSV")
    parser.add_argument("--seed", type=int, default=12345, help="random seed recorded in outputs")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")


def _resolve_out(path_str: str | None, default_name: str) -> Path:
    outdir = os.environ.get("ZZSIM_OUTDIR")
    path = Path(path_str) if path_str else Path(default_name)
    if not path.is_absolute() and outdir:
        path = Path(outdir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, meta: dict, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for key, val in meta.items():
            fh.write(f"# {key}: {val}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if not np.isfinite(x):
            return ""
        return f"{x:.10g}"
    return str(x)


def _figure_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".pdf")


def _plot_lines(csv_path: Path, groups: dict, xlabel: str, ylabel: str,
                title: str, logy: bool = False, hline: float | None = None):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for label, (x, y, style) in groups.items():
        ax.plot(x, y, style, label=str(label), markersize=4)
    if hline is not None:
        ax.axhline(hline, color="gray", lw=0.8, ls=":")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(groups) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(_figure_path(csv_path))
    plt.close(fig)


def _flux_grid(args) -> np.ndarray:
    return np.linspace(args.f_start, args.f_stop, args.f_points)


def _meta(args, card: dict, extra: dict | None = None) -> dict:
    meta = {
        "tool": f"zzsim {__version__}",
        "command": " ".join(sys.argv[1:]) if sys.argv[1:] else "",
        "card": card.get("name", "unnamed"),
        "card_hash": card_hash(card),
        "seed": args.seed,
    }
    if extra:
        meta.update(extra)
    return meta


# -- commands -----------------------------------------------------------


def cmd_spectrum(args, model: DeviceModel, card: dict) -> int:
    grid = _flux_grid(args)
    rows = []
    for f in grid:
        s1, s2 = model.spectra(float(f))
        rows.append([
            _fmt(float(f)),
            _fmt(s1.omega01), _fmt(s1.transition(1)), _fmt(s1.delta),
            _fmt(s2.omega01), _fmt(s2.delta),
        ])
    path = _resolve_out(args.out, "spectrum.csv")
    _write_csv(path, _meta(args, card), [
        "f", "omega1_01_ghz", "omega1_12_ghz", "delta1_ghz",
        "omega2_01_ghz", "delta2_ghz",
    ], rows)
    if args.plot and len(grid):
        w1 = [float(r[1]) for r in rows]
        w2 = [float(r[4]) for r in rows]
        _plot_lines(path, {
            "CSFQ 0-1": (grid, w1, "-"),
            "transmon 0-1": (grid, w2, "--"),
        }, "flux bias f", "transition frequency (GHz)", "qubit spectrum vs flux")
    print(f"wrote {path}")
    return 0


def _zero_crossings(f: np.ndarray, z: np.ndarray) -> list[float]:
    out = []
    for i in range(len(f) - 1):
        if np.isfinite(z[i]) and np.isfinite(z[i + 1]) and z[i] * z[i + 1] < 0:
            frac = z[i] / (z[i] - z[i + 1])
            out.append(float(f[i] + frac * (f[i + 1] - f[i])))
    return out


def cmd_zz_sweep(args, model: DeviceModel, card: dict) -> int:
    grid = _flux_grid(args)
    exact = np.full(len(grid), np.nan)
    pert = np.full(len(grid), np.nan)
    failures = []
    for i, f in enumerate(grid):
        try:
            exact[i] = model.static_zz(float(f))
            pert[i] = model.static_zz_pert(float(f))
        except ZzsimError as exc:
            failures.append((float(f), str(exc)))
    if failures and not np.isfinite(exact).any():
        for f, msg in failures:
            print(f"zz-sweep failed at f={f}: {msg}", file=sys.stderr)
        return 2
    crossings = _zero_crossings(grid, exact)
    rows = [[_fmt(float(f)), _fmt(exact[i] * 1e6), _fmt(pert[i] * 1e6)]
            for i, f in enumerate(grid)]
    path = _resolve_out(args.out, "zz_sweep.csv")
    meta = _meta(args, card, {
        "zero_crossings_f": ", ".join(f"{c:.6f}" for c in crossings) or "none",
    })
    _write_csv(path, meta, ["f", "zeta_exact_khz", "zeta_perturbative_khz"], rows)
    if args.plot:
        _plot_lines(path, {
            "exact": (grid, exact * 1e6, "-"),
            "second order": (grid, pert * 1e6, "--"),
        }, "flux bias f", "static ZZ (kHz)", "static ZZ vs flux", hline=0.0)
    for f, msg in failures:
        print(f"zz-sweep point f={f} failed: {msg}", file=sys.stderr)
    print(f"wrote {path}; zero crossings at {crossings}")
    return 0


def cmd_cr_rate(args, model: DeviceModel, card: dict) -> int:
    flux_points = args.f or list(CR_RATE_DEFAULT_FLUX)
    rows = []
    curves = {}
    meta_extra = {}
    failures = []
    for f in flux_points:
        d = model.dressed(float(f))
        drive = CrDrive(omega=0.0, omega_d=d.omega2, phi0=model.phi0,
                        phi1=model.phi1, r=0.0)
        try:
            om_ac = anticrossing_amplitude(d, drive, omega_max=args.omega_max)
            meta_extra[f"anticrossing_mhz_f={f:g}"] = f"{om_ac:.2f}"
        except ZzsimError as exc:
            om_ac = None
            failures.append((float(f), str(exc)))
        omegas = np.linspace(0.0, args.omega_max, args.omega_points)
        f_ecr = np.full(len(omegas), np.nan)
        for i, om in enumerate(omegas):
            try:
                from dataclasses import replace

                b = pauli_coefficients(d, replace(drive, omega=float(om)))
                f_ecr[i] = echoed_cr_frequency(b)
            except ZzsimError:
                continue
        for om, fe in zip(omegas, f_ecr):
            rows.append([_fmt(float(f)), _fmt(float(om)), _fmt(fe)])
        curves[f"f={f:g}"] = (omegas, f_ecr, "-")
    path = _resolve_out(args.out, "cr_rate.csv")
    _write_csv(path, _meta(args, card, meta_extra),
               ["f", "omega_mhz", "f_ecr_mhz"], rows)
    if args.plot:
        _plot_lines(path, curves, "CR amplitude (MHz)", "echoed CR rate (MHz)",
                    "echoed CR rate vs amplitude")
    for f, msg in failures:
        print(f"cr-rate note at f={f}: {msg}", file=sys.stderr)
    print(f"wrote {path}")
    return 0


def cmd_gate_error(args, model: DeviceModel, card: dict) -> int:
    grid = _flux_grid(args)
    t_gs = args.t_g or list(GATE_ERROR_DEFAULT_TG)
    points = error_vs_flux_sweep(
        model, t_gs, [float(f) for f in grid],
        metric=args.metric, threads=args.threads,
        force_zero_zz=args.no_zz, force_zero_crosstalk=args.no_crosstalk,
    )
    n_failed = sum(1 for p in points if p.error is not None)
    if n_failed == len(points):
        for p in points:
            print(f"gate-error failed at f={p.f}, t_g={p.t_g}: {p.error}", file=sys.stderr)
        return 2
    rows = []
    for p in points:
        rows.append([
            _fmt(p.t_g), _fmt(p.f),
            _fmt(p.breakdown.get("coherence")), _fmt(p.breakdown.get("zz")),
            _fmt(p.breakdown.get("full")), _fmt(p.omega), _fmt(p.r),
            _fmt(None if p.zeta0 is None else p.zeta0 * 1e6),
            _fmt(None if p.zeta_drive is None else p.zeta_drive * 1e6),
            _fmt(p.t2_q1_eff), p.error or "",
        ])
    path = _resolve_out(args.out, "gate_error.csv")
    _write_csv(path, _meta(args, card), [
        "t_g_ns", "f", "eps_coherence", "eps_zz", "eps_full", "omega_mhz",
        "r_crosstalk", "zeta0_khz", "zeta_drive_khz", "t2_q1_eff_us", "error",
    ], rows)
    if args.plot:
        groups = {}
        for t_g in t_gs:
            sel = [p for p in points if p.t_g == t_g and p.error is None]
            groups[f"t_g={t_g:g} ns"] = (
                [p.f for p in sel], [p.breakdown.get("full") for p in sel], "-o",
            )
            groups[f"coherence {t_g:g} ns"] = (
                [p.f for p in sel], [p.breakdown.get("coherence") for p in sel], "--",
            )
        _plot_lines(path, groups, "flux bias f", "error per gate",
                    "two-qubit gate error vs flux", logy=True)
    for p in points:
        if p.error is not None:
            print(f"gate-error point f={p.f}, t_g={p.t_g} failed: {p.error}",
                  file=sys.stderr)
    print(f"wrote {path} ({n_failed} failed points)")
    return 0


def cmd_predict(args, model: DeviceModel, card: dict) -> int:
    scenarios = model.scenarios()
    wanted = args.scenario or list(scenarios)
    missing = [s for s in wanted if s not in scenarios]
    if missing:
        raise CardValidationError(f"card has no scenario {missing[0]!r}")
    t_gs = np.linspace(args.t_g_start, args.t_g_stop, args.t_g_points)
    rows = []
    meta_extra = {}
    curves = {}
    for label in wanted:
        sweep, t_opt = error_vs_gatelength(
            model, scenarios[label], t_gs, metric=args.metric
        )
        meta_extra[f"optimum_tg_ns_{label}"] = f"{t_opt:g}"
        for row in sweep:
            rows.append([label, _fmt(row["t_g"]), _fmt(row["epsilon"]),
                         _fmt(row["coherence"])])
        curves[label] = (
            [r["t_g"] for r in sweep], [r["epsilon"] for r in sweep], "-",
        )
        curves[f"{label} limit"] = (
            [r["t_g"] for r in sweep], [r["coherence"] for r in sweep], "--",
        )
    path = _resolve_out(args.out, "predict.csv")
    _write_csv(path, _meta(args, card, meta_extra),
               ["scenario", "t_g_ns", "epsilon", "coherence_limit"], rows)
    if args.plot:
        _plot_lines(path, curves, "gate length (ns)", "error per gate",
                    "two-qubit gate error vs gate length", logy=True)
    print(f"wrote {path}; optima: {meta_extra}")
    return 0


def cmd_rb(args, model: DeviceModel, card: dict) -> int:
    from .device import DeviceScenario  # noqa: F401  (type context)

    f = args.f
    t_g = args.t_g
    schedule = schedule_from_gate_length(t_g)
    coh = model.coherence_at(f)
    d = model.dressed(f)
    drive = model.drive_for(f, schedule, with_crosstalk=True)
    from .gates import echoed_sequence_channel

    gate_channel = echoed_sequence_channel(drive, schedule, coh, d)
    _, target = optimized_target(gate_channel, zx90_ideal())
    error_channel = gate_channel @ unitary_channel(target.conj().T, "undo")
    group = build_clifford_group(2)
    lengths = [int(x) for x in args.lengths.split(",")]
    fit = simulate_rb(
        group, error_channel, lengths, n_seeds=args.seeds, seed=args.seed,
        n_shots=args.shots,
    )
    rows = [[_fmt(int(m)), _fmt(float(s))] for m, s in zip(fit.lengths, fit.survival)]
    path = _resolve_out(args.out, "rb.csv")
    meta = _meta(args, card, {
        "t_g_ns": t_g, "f": f, "omega_mhz": f"{drive.omega:.3f}",
        "fit_a": f"{fit.a:.6f}", "fit_b": f"{fit.b:.6f}",
        "fit_alpha": f"{fit.alpha:.6f}", "fit_alpha_std": f"{fit.alpha_std:.2e}",
        "error_per_gate": f"{fit.epsilon:.6e}",
    })
    _write_csv(path, meta, ["n_cliffords", "target_ground_population"], rows)
    if args.plot:
        m = np.asarray(fit.lengths, dtype=float)
        smooth = np.linspace(m.min(), m.max(), 200)
        _plot_lines(path, {
            "simulated": (m, fit.survival, "o"),
            "fit": (smooth, fit.a * fit.alpha**smooth + fit.b, "-"),
        }, "number of Cliffords", "target ground population",
            f"two-qubit RB ({t_g:g} ns gate)")
    print(f"wrote {path}; alpha={fit.alpha:.5f}, error per gate={fit.epsilon:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zzsim",
        description="CSFQ-transmon cross-resonance device simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="qubit transition frequencies vs flux")
    _add_common(p)
    p.add_argument("--f-start", type=float, default=0.45)
    p.add_argument("--f-stop", type=float, default=0.55)
    p.add_argument("--f-points", type=int, default=101)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("zz-sweep", help="static ZZ vs flux with zero crossings")
    _add_common(p)
    p.add_argument("--f-start", type=float, default=0.49)
    p.add_argument("--f-stop", type=float, default=0.51)
    p.add_argument("--f-points", type=int, default=81)
    p.set_defaults(func=cmd_zz_sweep)

    p = sub.add_parser("cr-rate", help="echoed CR rate vs drive amplitude")
    _add_common(p)
    p.add_argument("--f", type=float, action="append",
                   help="flux point (repeatable)")
    p.add_argument("--omega-max", type=float, default=250.0)
    p.add_argument("--omega-points", type=int, default=51)
    p.set_defaults(func=cmd_cr_rate)

    p = sub.add_parser("gate-error", help="gate error vs flux per gate length")
    _add_common(p)
    p.add_argument("--t-g", type=float, action="append",
                   help="gate length in ns (repeatable)")
    p.add_argument("--f-start", type=float, default=0.49)
    p.add_argument("--f-stop", type=float, default=0.51)
    p.add_argument("--f-points", type=int, default=41)
    p.add_argument("--metric", choices=("average", "ground_state"), default="average")
    p.add_argument("--no-zz", action="store_true",
                   help="zero the conditional-phase error")
    p.add_argument("--no-crosstalk", action="store_true",
                   help="drop the crosstalk drive")
    p.set_defaults(func=cmd_gate_error)

    p = sub.add_parser("predict", help="gate error vs gate length per scenario")
    _add_common(p)
    p.add_argument("--scenario", type=str, action="append",
                   help="scenario label from the card (repeatable)")
    p.add_argument("--t-g-start", type=float, default=160.0)
    p.add_argument("--t-g-stop", type=float, default=1000.0)
    p.add_argument("--t-g-points", type=int, default=43)
    p.add_argument("--metric", choices=("average", "ground_state"), default="average")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("rb", help="two-qubit randomized benchmarking of the device gate")
    _add_common(p)
    p.add_argument("--t-g", type=float, default=200.0)
    p.add_argument("--f", type=float, default=0.5)
    p.add_argument("--lengths", type=str, default="1,2,4,8,16,32,64")
    p.add_argument("--seeds", type=int, default=20, help="random sequences per length")
    p.add_argument("--shots", type=int, default=None,
                   help="binomial shot sampling (default: exact populations)")
    p.set_defaults(func=cmd_rb)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        card_path = args.card if args.card else bundled_card_path()
        card = load_card(card_path)
        model = DeviceModel(card)
    except (CardValidationError, FileNotFoundError, OSError) as exc:
        print(f"card error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args, model, card)
    except CardValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except ZzsimError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
