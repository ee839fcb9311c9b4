"""Command-line interface: resonance tables, scans, synthesis, filters.

Interface units are ordinary frequencies in kHz, times in microseconds,
and angles in degrees; CSV output stores 12 significant digits.  Exit
codes: 0 success, 1 file I/O failure, 2 usage error, 3 domain/physics
error (invalid parameters or a failed precondition such as a missing
resonance).
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from .coherence import SpinRegister, entangling_iterations, selectivity_scan
from .filters import (SpectrumTable, chi_integral, filter_cpmg_closed,
                      filter_fid, filter_general, filter_hybrid, filter_uddn)
from .gates import synthesize_crx, synthesize_rx_unconditional
from .resonance import locate, sweep, timing_robustness
from .sequences import (HybridSpec, cpmg_fractions, hybrid_fractions,
                        iterated_fractions, udd_fractions)
from .spin_model import (FieldConfig, HyperfineParams, khz_to_rad,
                         read_register, US)

_PROTOCOLS = ("cpmg", "udd2", "udd3", "udd4", "udd5", "udd6")


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _spin(args) -> HyperfineParams:
    return HyperfineParams(a_par=khz_to_rad(args.apar_khz),
                           a_perp=khz_to_rad(args.aperp_khz), label="spin")


def _field(args) -> FieldConfig:
    return FieldConfig(omega_larmor=khz_to_rad(args.larmor_khz))


def _add_spin_args(sub) -> None:
    sub.add_argument("--apar-khz", type=float, required=True,
                     help="parallel hyperfine component, kHz")
    sub.add_argument("--aperp-khz", type=float, required=True,
                     help="transverse hyperfine component, kHz")
    sub.add_argument("--larmor-khz", type=float, required=True,
                     help="nuclear Larmor frequency, kHz")


def _add_io_args(sub) -> None:
    sub.add_argument("--out", help="write the delimited table to this CSV path")
    sub.add_argument("--plot", help="render a PNG figure to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddgates",
        description="Resonance analysis and gate synthesis for pulsed "
                    "electron-nuclear spin systems")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("resonance",
                        help="analytic + refined resonance table")
    p.add_argument("--protocol", choices=("cpmg", "udd3", "udd4"),
                   default="cpmg")
    p.add_argument("--kind", choices=("conditional", "unconditional", "set2"),
                   default="conditional")
    p.add_argument("--kmax", type=int, default=3,
                   help="largest resonance order to tabulate")
    p.add_argument("--window", type=float, default=0.02,
                   help="relative refinement window")
    _add_spin_args(p)
    _add_io_args(p)

    p = subs.add_parser("sweep", help="branch-axis geometry vs unit time")
    p.add_argument("--protocol", choices=_PROTOCOLS, default="cpmg")
    p.add_argument("--tmin-us", type=float, required=True)
    p.add_argument("--tmax-us", type=float, required=True)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--iterations", type=int, default=0,
                   help="iteration count (0 = smallest valid)")
    _add_spin_args(p)
    _add_io_args(p)

    p = subs.add_parser("selectivity",
                        help="recovery probability Px vs unit time for a register")
    p.add_argument("--register", required=True,
                   help="CSV with header label,apar_khz,aperp_khz")
    p.add_argument("--larmor-khz", type=float, required=True)
    p.add_argument("--protocol", choices=_PROTOCOLS + ("hybrid",),
                   default="cpmg")
    p.add_argument("--hybrid-ncpmg", type=int, default=8)
    p.add_argument("--hybrid-nudd", type=int, default=1)
    p.add_argument("--udd-order", type=int, default=4)
    p.add_argument("--target", required=True,
                   help="register label whose resonance is targeted")
    p.add_argument("--k", type=int, default=1, help="resonance order")
    p.add_argument("--iterations", type=int, default=0,
                   help="fixed iteration count (0 = maximal-entanglement choice)")
    p.add_argument("--span-pct", type=float, default=2.0,
                   help="scan +- this percentage around the target resonance")
    p.add_argument("--points", type=int, default=801)
    _add_io_args(p)

    p = subs.add_parser("synthesize", help="iterated-unit gate synthesis")
    p.add_argument("--gate", choices=("crx", "rx"), default="crx")
    p.add_argument("--angle-deg", type=float, default=90.0)
    p.add_argument("--protocol", choices=("cpmg", "hybrid"), default="cpmg")
    p.add_argument("--udd-order", type=int, default=4)
    _add_spin_args(p)
    _add_io_args(p)

    p = subs.add_parser("filter", help="filter-function comparison table")
    p.add_argument("--cpmg-n", type=int, required=True,
                   help="CPMG unit count")
    p.add_argument("--cpmg-t-us", type=float, required=True,
                   help="CPMG total sequence time, microseconds")
    p.add_argument("--udd-order", type=int, default=4)
    p.add_argument("--udd-n", type=int, required=True,
                   help="UDD unit count")
    p.add_argument("--udd-t-us", type=float, required=True,
                   help="UDD total sequence time, microseconds")
    p.add_argument("--hybrid-ncpmg", type=int, default=0,
                   help="hybrid CPMG block units (0 = mirror --cpmg-n, no UDD tail)")
    p.add_argument("--hybrid-nudd", type=int, default=0)
    p.add_argument("--hybrid-t-us", type=float, default=0.0,
                   help="hybrid total time (0 = mirror --cpmg-t-us)")
    p.add_argument("--wmin-khz", type=float, default=1.0)
    p.add_argument("--wmax-khz", type=float, required=True)
    p.add_argument("--points", type=int, default=2001)
    _add_io_args(p)

    p = subs.add_parser("chi", help="noise-overlap attenuation integral")
    p.add_argument("--spectrum", required=True,
                   help="CSV with header omega_over_2pi_khz,s_value")
    p.add_argument("--protocol", choices=_PROTOCOLS + ("hybrid",),
                   default="cpmg")
    p.add_argument("--n", type=int, required=True, help="unit count")
    p.add_argument("--udd-order", type=int, default=4)
    p.add_argument("--hybrid-ncpmg", type=int, default=8)
    p.add_argument("--hybrid-nudd", type=int, default=1)
    p.add_argument("--t-us", type=float, required=True,
                   help="total sequence time, microseconds")
    p.add_argument("--wmax-khz", type=float, required=True)
    _add_io_args(p)

    p = subs.add_parser("robustness",
                        help="axes dot vs relative timing error per protocol")
    p.add_argument("--entries", default="cpmg:conditional:1,udd4:set2:1",
                   help="comma list of protocol:kind:k")
    p.add_argument("--eps-pct", type=float, default=0.3)
    p.add_argument("--points", type=int, default=201)
    _add_spin_args(p)
    _add_io_args(p)

    return parser


def _sequence_fractions(protocol: str, n: int, order: int, n_cpmg: int,
                        n_udd: int):
    """Global fraction list and pulse count of an n-unit sequence."""
    if protocol == "cpmg":
        return cpmg_fractions(n), 2 * n
    if protocol.startswith("udd"):
        unit_order = int(protocol[3:])
        fr = iterated_fractions(udd_fractions(unit_order), n)
        return fr, unit_order * n
    if protocol == "hybrid":
        fr = hybrid_fractions(n_cpmg, order, n_udd)
        return fr, 2 * n_cpmg + order * n_udd
    raise ValueError(f"unknown protocol: {protocol!r}")


def _cmd_resonance(args) -> int:
    kind = "udd4_set2" if args.kind == "set2" else args.kind
    p, f = _spin(args), _field(args)
    if args.kmax < 1:
        raise ValueError("kmax must be >= 1")
    rows = []
    for k in range(1, args.kmax + 1):
        point = locate(args.protocol, kind, k, p, f, window=args.window)
        rows.append((k, point.t_analytic, point.t_refined, point.phi_refined,
                     point.dot_refined, point.n0x_refined, point.phi_analytic))
    print(f"# {args.protocol} {kind} resonances "
          f"(A_par={args.apar_khz} kHz, A_perp={args.aperp_khz} kHz, "
          f"omega_L={args.larmor_khz} kHz)")
    print("k  t_analytic_us  t_refined_us  phi_refined_rad  dot  n0x")
    for k, t_an, t_ref, phi, dot, n0x, _ in rows:
        print(f"{k}  {t_an / US:.6f}  {t_ref / US:.6f}  {phi:.6f}  "
              f"{dot:+.6f}  {n0x:+.6f}")
    if args.out:
        _write_csv(args.out,
                   ["k", "t_analytic_us", "t_refined_us", "phi_rad", "dot",
                    "n0x", "phi_analytic_rad"],
                   [[k, _fmt(t_an / US), _fmt(t_ref / US), _fmt(phi),
                     _fmt(dot), _fmt(n0x), _fmt(phi_an)]
                    for k, t_an, t_ref, phi, dot, n0x, phi_an in rows])
    if args.plot:
        from .plotting import plot_columns
        ks = [r[0] for r in rows]
        plot_columns(args.plot, ks,
                     {"t_refined [us]": [r[2] / US for r in rows],
                      "phi_refined [rad]": [r[3] for r in rows]},
                     "resonance order k", "refined resonance",
                     title=f"{args.protocol} {kind}")
    return 0


def _cmd_sweep(args) -> int:
    p, f = _spin(args), _field(args)
    result = sweep(p, f, args.protocol, args.tmin_us * US, args.tmax_us * US,
                   args.points, args.iterations)
    print(f"# sweep {args.protocol}: {args.points} points in "
          f"[{args.tmin_us}, {args.tmax_us}] us; min dot "
          f"{result.dot.min():+.6f} at t = {result.t[result.dot.argmin()] / US:.6f} us")
    if args.out:
        _write_csv(args.out, ["t_us", "dot", "phi_rad", "n0x", "n1x"],
                   [[_fmt(t / US), _fmt(d), _fmt(ph), _fmt(a), _fmt(b)]
                    for t, d, ph, a, b in zip(result.t, result.dot,
                                              result.phi, result.n0x,
                                              result.n1x)])
    if args.plot:
        from .plotting import plot_columns
        plot_columns(args.plot, result.t / US,
                     {"dot": result.dot, "n0x": result.n0x,
                      "n1x": result.n1x},
                     "unit time [us]", "branch-axis geometry",
                     title=f"{args.protocol} sweep")
    return 0


def _cmd_selectivity(args) -> int:
    spins = read_register(args.register)
    field = FieldConfig(omega_larmor=khz_to_rad(args.larmor_khz))
    register = SpinRegister(tuple(spins), field)
    target = register.by_label(args.target)

    if args.protocol == "hybrid":
        protocol = HybridSpec(args.hybrid_ncpmg, args.udd_order,
                              args.hybrid_nudd)
        seed_protocol = "cpmg"
    else:
        protocol = args.protocol
        seed_protocol = args.protocol

    if seed_protocol in ("cpmg", "udd3", "udd4"):
        point = locate(seed_protocol, "conditional", args.k, target, field)
        t_center = point.t_refined
    else:
        # no closed form: seed from the shared CPMG timing family
        point = locate("cpmg", "conditional", args.k, target, field)
        t_center = point.t_refined

    iterations = args.iterations
    if iterations == 0:
        iterations = entangling_iterations(target, field, protocol, t_center)

    span = args.span_pct / 100.0
    curve = selectivity_scan(register, protocol, t_center * (1.0 - span),
                             t_center * (1.0 + span), args.points, iterations)
    i_min = int(curve.px_joint.argmin())
    print(f"# selectivity: target {args.target!r}, iterations {iterations}, "
          f"center {t_center / US:.6f} us")
    print(f"# joint Px minimum {curve.px_joint[i_min]:.6f} at "
          f"t = {curve.t[i_min] / US:.6f} us")
    header = ["t_us", "px_joint"] + [f"px_{lab}" for lab in curve.labels]
    if args.out:
        rows = []
        for i, t in enumerate(curve.t):
            row = [_fmt(t / US), _fmt(curve.px_joint[i])]
            row += [_fmt(curve.px_by_spin[lab][i]) for lab in curve.labels]
            rows.append(row)
        _write_csv(args.out, header, rows)
    if args.plot:
        from .plotting import plot_columns
        series = {"joint": curve.px_joint}
        series.update({lab: curve.px_by_spin[lab] for lab in curve.labels})
        plot_columns(args.plot, curve.t / US, series, "unit time [us]",
                     "Px", title=f"{args.protocol} selectivity, N={iterations}")
    return 0


def _cmd_synthesize(args) -> int:
    p, f = _spin(args), _field(args)
    angle = math.radians(args.angle_deg)
    if args.gate == "crx":
        report = synthesize_crx(p, f, angle, protocol=args.protocol,
                                udd_order=args.udd_order)
    else:
        report = synthesize_rx_unconditional(p, f, angle)
    print(f"gate={args.gate} target_angle_deg={args.angle_deg}")
    print(f"protocol={report.protocol}")
    print(f"n_cpmg={report.n_cpmg} n_udd={report.n_udd} "
          f"udd_order={report.udd_order}")
    print(f"unit_time_us={report.unit_time / US:.6f} "
          f"udd_unit_time_us={report.udd_unit_time / US:.6f}")
    print(f"total_time_us={report.total_time / US:.6f}")
    print(f"fidelity={report.fidelity:.9f}")
    print(f"flagged={report.flagged}")
    if args.out:
        _write_csv(args.out,
                   ["protocol", "t_us", "n_cpmg", "n_udd", "total_time_us",
                    "fidelity"],
                   [[report.protocol, _fmt(report.unit_time / US),
                     report.n_cpmg, report.n_udd,
                     _fmt(report.total_time / US), _fmt(report.fidelity)]])
    if args.plot:
        from .plotting import plot_columns
        from .gates import average_fidelity, crx_target, rx, two_qubit_gate
        from .sequences import conditional_evolution, pair_power
        if args.gate == "crx":
            target = crx_target(angle)
        else:
            target = np.kron(np.eye(2, dtype=complex), rx(angle))
        base = conditional_evolution(p, f, "cpmg",
                                     report.point_cpmg.t_refined, 1)
        ns = np.arange(1, min(500, max(2 * report.n_cpmg, 40)) + 1)
        fids = [average_fidelity(two_qubit_gate(pair_power(base, int(n))),
                                 target) for n in ns]
        plot_columns(args.plot, ns, {"fidelity": np.array(fids)},
                     "CPMG iterations N", "average gate fidelity",
                     title=f"{args.gate} synthesis scan")
    return 0


def _cmd_filter(args) -> int:
    if args.points < 2:
        raise ValueError("points must be >= 2")
    freq_khz = np.linspace(args.wmin_khz, args.wmax_khz, args.points)
    omega = khz_to_rad(1.0) * freq_khz
    t_c = args.cpmg_t_us * US
    t_u = args.udd_t_us * US
    n_hc = args.hybrid_ncpmg if args.hybrid_ncpmg > 0 else args.cpmg_n
    n_hu = args.hybrid_nudd
    t_h = args.hybrid_t_us * US if args.hybrid_t_us > 0 else t_c

    f_c = filter_cpmg_closed(args.cpmg_n, omega * t_c)
    f_u = filter_uddn(args.udd_order, args.udd_n, omega * t_u)
    f_h = filter_hybrid(n_hc, args.udd_order, n_hu, omega * t_h)
    f_free = filter_fid(omega * t_c)
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = np.where(f_c > 0.0, f_u / f_c, np.inf)

    print(f"# filter comparison: cpmg n={args.cpmg_n} T={args.cpmg_t_us} us "
          f"vs udd{args.udd_order} n={args.udd_n} T={args.udd_t_us} us")
    print(f"# band mean F_cpmg={f_c.mean():.6f} mean quotient="
          f"{np.mean(quotient[np.isfinite(quotient)]):.6f}")
    if args.out:
        _write_csv(args.out,
                   ["omega_over_2pi_khz", "F_cpmg", "F_udd", "F_hybrid",
                    "F_fid", "quotient"],
                   [[_fmt(fk), _fmt(a), _fmt(b), _fmt(c), _fmt(d), _fmt(q)]
                    for fk, a, b, c, d, q in zip(freq_khz, f_c, f_u, f_h,
                                                 f_free, quotient)])
    if args.plot:
        from .plotting import plot_columns
        plot_columns(args.plot, freq_khz,
                     {"CPMG": f_c, f"UDD{args.udd_order}": f_u,
                      "hybrid": f_h, "free": f_free},
                     "frequency [kHz]", "filter value", logy=True,
                     title="decoupling filters")
    return 0


def _cmd_chi(args) -> int:
    spectrum = SpectrumTable.from_csv(args.spectrum)
    fr, pulses = _sequence_fractions(args.protocol, args.n, args.udd_order,
                                     args.hybrid_ncpmg, args.hybrid_nudd)
    t_total = args.t_us * US
    omega_max = khz_to_rad(args.wmax_khz)
    chi = chi_integral(spectrum, fr, t_total, omega_max, total_pulses=pulses)
    coherence = math.exp(-chi)
    print(f"protocol={args.protocol} n_units={args.n} t_us={args.t_us}")
    print(f"chi={chi:.9e}")
    print(f"coherence_factor={coherence:.9f}")
    if args.out:
        _write_csv(args.out,
                   ["protocol", "n_units", "t_us", "chi", "coherence_factor"],
                   [[args.protocol, args.n, _fmt(args.t_us), _fmt(chi),
                     _fmt(coherence)]])
    if args.plot:
        from .plotting import plot_columns
        grid = np.linspace(spectrum.omega[0], omega_max, 2000)
        integrand = (spectrum.interp(grid) / grid ** 2
                     * filter_general(fr, grid * t_total, pulses))
        plot_columns(args.plot, grid / khz_to_rad(1.0),
                     {"S/w^2 F(wT)": integrand}, "frequency [kHz]",
                     "integrand", logy=False, title="chi integrand")
    return 0


def _cmd_robustness(args) -> int:
    p, f = _spin(args), _field(args)
    entries = []
    for item in args.entries.split(","):
        parts = item.strip().split(":")
        if len(parts) != 3:
            raise ValueError("entries must be protocol:kind:k")
        protocol, kind, k = parts[0], parts[1], int(parts[2])
        if kind == "set2":
            kind = "udd4_set2"
        entries.append((f"{protocol}_{parts[1]}_k{k}", protocol, kind, k))
    curves = timing_robustness(p, f, entries, epsilon=args.eps_pct / 100.0,
                               points=args.points)
    print("# timing robustness around refined resonances")
    for c in curves:
        print(f"# {c.label}: t_ref = {c.t_ref / US:.6f} us, "
              f"dot range [{c.dot.min():+.4f}, {c.dot.max():+.4f}]")
    if args.out:
        header = ["eps_pct"] + [f"dot_{c.label}" for c in curves]
        rows = []
        for i, e in enumerate(curves[0].epsilon):
            rows.append([_fmt(100.0 * e)] + [_fmt(c.dot[i]) for c in curves])
        _write_csv(args.out, header, rows)
    if args.plot:
        from .plotting import plot_columns
        plot_columns(args.plot, 100.0 * curves[0].epsilon,
                     {c.label: c.dot for c in curves},
                     "unit-time error [%]", "axes dot",
                     title="timing robustness")
    return 0


_COMMANDS = {
    "resonance": _cmd_resonance,
    "sweep": _cmd_sweep,
    "selectivity": _cmd_selectivity,
    "synthesize": _cmd_synthesize,
    "filter": _cmd_filter,
    "chi": _cmd_chi,
    "robustness": _cmd_robustness,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
