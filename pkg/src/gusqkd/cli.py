"""Command-line front end over the library.

Intensity flags take TOTAL mean photon numbers over both time slots
(``--two-mu 0.5`` means 0.25 photons per slot). Phase differences accept
``pi/2``-style literals or radians.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import re
import secrets
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import svgplot
from .attack import chi_envelope, eve_overlap, holevo_chi, max_qber
from .channel import ChannelParams
from .decoy import STATS_COLUMNS, IntensitySet, ObservedStats
from .errors import ConfigurationError, DomainError, SimulationError
from .keyrate import analytic_report, key_rate_report, reports_to_csv
from .simulator import SessionConfig, per_k_yield_check, run_session
from .states import GusParams, basis_overlap
from .usd import DEFAULT_EFFICIENCY_THRESHOLD, usd_pure_coherent, usd_result
from .validation import class_z_scores

DEFAULT_LENGTHS = "0:150:5"
DEFAULT_TWO_MU = (0.1, 0.25, 0.5, 0.9)
DEFAULT_DELTA_PHI = ("pi/2", "pi/4")
FIG2_N_STATES = (2, 4, 8, 16)
Z_THRESHOLD = 5.0

_PI_LITERAL = re.compile(r"^\s*(?:(\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$", re.IGNORECASE)


def parse_angle(text: str) -> float:
    """``pi/2``, ``3pi/4``, ``pi`` or a plain number of radians."""
    m = _PI_LITERAL.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def parse_grid(text: str) -> list[float]:
    """Comma list (``0,25,50``) or inclusive range ``start:stop:step``."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(count)]
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a grid: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("grid is empty")
    return values


def _angles(text: str) -> list[float]:
    return [parse_angle(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _num(v) -> str:
    return str(v) if isinstance(v, (int, np.integer)) else repr(float(v))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, (int, float, np.number)) and not isinstance(v, bool) else v for v in row])
    return buf.getvalue()


def _channel(args, length: float | None = None) -> ChannelParams:
    return ChannelParams(
        args.attenuation, args.length if length is None else length, args.eta, args.dark_count, args.misalignment
    )


def _intensities(args, two_mu: float | None = None) -> IntensitySet:
    probs = tuple(float(p) for p in args.class_probabilities.split(","))
    return IntensitySet(args.two_mu if two_mu is None else two_mu, args.two_nu1, args.two_nu2, probs)


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _sweep_reports(args, lengths, two_mus, delta_phis):
    grid = [(length, mean, dphi) for dphi in delta_phis for mean in two_mus for length in lengths]
    sifting = (2 / args.n_states) if args.sifting_factor else None

    def row(point):
        length, mean, dphi = point
        return analytic_report(
            GusParams(args.n_states, dphi),
            _channel(args, length),
            _intensities(args, mean),
            use_envelope=args.envelope,
            sifting_factor=sifting,
            leakage_efficiency=args.leakage_efficiency,
        )

    # map keeps grid order whatever order the rows finish in
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        return list(pool.map(row, grid))


def _fig3_svg(reports, two_mus, delta_phis) -> str:
    panels = []
    for quantity, label in (("secret_per_sifted", "R'/P(mu)"), ("normalized_rate", "R'/(eta T)")):
        for dphi in delta_phis:
            panel = svgplot.Panel(f"{label}, dphi = {dphi:.4f} rad", "L (km)", label, log_y=True)
            for mean in two_mus:
                pts = [r for r in reports if r.delta_phi == dphi and r.total_mean == mean]
                panel.series.append(
                    svgplot.Series(f"2mu = {mean:g}", [r.length_km for r in pts], [getattr(r, quantity) for r in pts])
                )
            panels.append(panel)
    return svgplot.render(panels, columns=len(delta_phis))


# ---- subcommands -------------------------------------------------------------


def cmd_usd(args) -> str:
    means = args.two_mu_grid
    rows = []
    for n in args.n_states_list:
        for mean in means:
            res = usd_result(n, mean)
            rows.append(
                [n, mean, res.p_exact, res.p_tail_bound, usd_pure_coherent(n, mean), "1" if res.is_safe(args.threshold) else "0"]
            )
    if args.format == "svg":
        return _usd_svg(args.n_states_list, means, rows, log_y=True)
    return _csv(("n_states", "two_mu", "usd_exact", "usd_tail_bound", "usd_pure_coherent", "usd_safe"), rows)


def _usd_svg(n_list, means, rows, log_y: bool) -> str:
    panel = svgplot.Panel("Unambiguous discrimination", "2mu", "success probability", log_y=log_y)
    for i, n in enumerate(n_list):
        color = svgplot.PALETTE[i % len(svgplot.PALETTE)]
        exact = [r[2] for r in rows if r[0] == n]
        bound = [r[3] for r in rows if r[0] == n]
        panel.series.append(svgplot.Series(f"N = {n}", list(means), exact, color=color))
        panel.series.append(svgplot.Series(f"N = {n} bound", list(means), bound, dashed=True, color=color))
    return svgplot.render([panel])


def cmd_attack_bound(args) -> str:
    c = basis_overlap(args.delta_phi, args.photons) if args.overlap is None else args.overlap
    if not 0 < c < 1:
        raise DomainError(f"basis overlap must lie in (0, 1), got {c}")
    qs = np.linspace(0.0, max_qber(c), args.points)
    chi = holevo_chi(c, qs)
    env = [chi_envelope(c, float(q)) for q in qs]
    rows = [[float(q), float(eve_overlap(c, float(q))), float(x), e] for q, x, e in zip(qs, chi, env)]
    if args.format == "svg":
        panel = svgplot.Panel(f"Holevo bound, c = {c:.4f}", "QBER", "bits")
        panel.series.append(svgplot.Series("chi", list(map(float, qs)), list(map(float, chi))))
        panel.series.append(svgplot.Series("running max", list(map(float, qs)), env, dashed=True))
        return svgplot.render([panel])
    return _csv(("q", "ancilla_overlap", "chi", "chi_envelope"), rows)


def cmd_keyrate_sweep(args) -> str:
    reports = _sweep_reports(args, args.lengths, args.two_mu_list, args.delta_phi_list)
    if args.format == "svg":
        return _fig3_svg(reports, args.two_mu_list, args.delta_phi_list)
    return reports_to_csv(reports)


def cmd_reproduce_fig2(args) -> str:
    means = [i * 0.01 for i in range(501)]
    rows = []
    for n in FIG2_N_STATES:
        for mean in means:
            res = usd_result(n, mean)
            rows.append([n, mean, res.p_exact, res.p_tail_bound])
    if args.format == "svg":
        return _usd_svg(FIG2_N_STATES, means, rows, log_y=False)
    return _csv(("n_states", "two_mu", "usd_exact", "usd_tail_bound"), rows)


def cmd_reproduce_fig3(args) -> str:
    lengths = parse_grid(DEFAULT_LENGTHS)
    delta_phis = [parse_angle(v) for v in DEFAULT_DELTA_PHI]
    reports = _sweep_reports(args, lengths, list(DEFAULT_TWO_MU), delta_phis)
    if args.format == "svg":
        return _fig3_svg(reports, list(DEFAULT_TWO_MU), delta_phis)
    return reports_to_csv(reports)


def _analysis_sections(stats: ObservedStats, args, gus, channel, intensities) -> list[str]:
    sifting = (2 / gus.n_states) if args.sifting_factor else None
    report = key_rate_report(stats, intensities, gus, channel, args.envelope, sifting, args.leakage_efficiency)
    bound_row = [report.p0_lower, report.p1_lower, report.q1_upper, "1" if report.feasible else "0", "; ".join(report.diagnostics)]
    return [
        stats.to_csv(),
        _csv(("p0_lower", "p1_lower", "q1_upper", "feasible", "diagnostic"), [bound_row]),
        reports_to_csv([report]),
    ]


def cmd_simulate(args) -> str:
    if args.format != "csv":
        raise ConfigurationError("simulate only writes CSV")
    gus = GusParams(args.n_states, args.delta_phi)
    channel, intensities = _channel(args), _intensities(args)
    config = SessionConfig(gus, intensities, channel, int(args.pulses), _resolve_seed(args), args.block_size)
    result = run_session(config, workers=args.workers)
    stats = result.stats
    sections = _analysis_sections(stats, args, gus, channel, intensities)
    z = class_z_scores(stats, intensities, gus, channel)
    class_z = max(abs(v) for pair in z.values() for v in pair)
    k_check = per_k_yield_check(result, channel, gus, Z_THRESHOLD)
    sections.append(
        _csv(
            ("check", "max_abs_z", "threshold", "consistent"),
            [
                ["class_statistics", class_z, Z_THRESHOLD, "1" if class_z < Z_THRESHOLD else "0"],
                ["per_photon_number", k_check.max_abs_z, Z_THRESHOLD, "1" if k_check.consistent else "0"],
            ],
        )
    )
    return "\n".join(sections)


def cmd_analyze(args) -> str:
    if args.format != "csv":
        raise ConfigurationError("analyze only writes CSV")
    with open(args.stats, encoding="utf-8") as fh:
        stats = ObservedStats.from_csv(fh.read())
    gus = GusParams(args.n_states, args.delta_phi)
    return "\n".join(_analysis_sections(stats, args, gus, _channel(args), _intensities(args)))


# ---- argument parsing --------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", default="-", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("--seed", type=int, default=None, help="RNG seed; drawn from OS entropy and reported when absent")


def _physics(p: argparse.ArgumentParser, single_point: bool) -> None:
    p.add_argument("--n-states", type=int, default=8)
    p.add_argument("--eta", type=float, default=0.1, help="detector efficiency")
    p.add_argument("--attenuation", type=float, default=0.2, help="fiber loss in dB/km")
    p.add_argument("--dark-count", type=float, default=1e-6, help="dark count probability per window")
    p.add_argument("--misalignment", type=float, default=0.0, help="misalignment error probability")
    p.add_argument("--two-nu1", type=float, default=0.05, help="total mean photon number of decoy 1")
    p.add_argument("--two-nu2", type=float, default=1e-3, help="total mean photon number of decoy 2")
    p.add_argument("--class-probabilities", default="0.8,0.1,0.1", help="signal,decoy1,decoy2 selection probabilities")
    p.add_argument("--envelope", action="store_true", help="use the running maximum of the Holevo bound")
    p.add_argument("--sifting-factor", action="store_true", help="scale the normalized rate by 2/N")
    p.add_argument("--leakage-efficiency", type=float, default=1.0, help="error-correction inefficiency f")
    if single_point:
        p.add_argument("--two-mu", type=float, default=0.5, help="total mean photon number of signal pulses")
        p.add_argument("--delta-phi", type=parse_angle, default=math.pi / 2, help="pi/2, pi/4 or radians")
        p.add_argument("--length", type=float, default=0.0, help="fiber length in km")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gusqkd",
        description="Decoy-state QKD with geometrically uniform states. "
        "Intensity flags take TOTAL mean photon numbers (2mu), not per-slot values.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("usd", help="unambiguous discrimination probability versus 2mu")
    _common(p)
    p.add_argument("--n-states", dest="n_states_list", type=_ints, default=[2, 4, 8, 16])
    p.add_argument("--two-mu", dest="two_mu_grid", type=parse_grid, default=parse_grid("0:5:0.05"))
    p.add_argument("--threshold", type=float, default=DEFAULT_EFFICIENCY_THRESHOLD, help="system efficiency for usd_safe")
    p.set_defaults(func=cmd_usd)

    p = sub.add_parser("attack-bound", help="ancilla overlap and Holevo bound versus QBER")
    _common(p)
    p.add_argument("--delta-phi", type=parse_angle, default=math.pi / 2)
    p.add_argument("--photons", type=int, default=1, help="photon number k of the attacked block")
    p.add_argument("--overlap", type=float, default=None, help="basis overlap c, overriding --delta-phi/--photons")
    p.add_argument("--points", type=int, default=101)
    p.set_defaults(func=cmd_attack_bound)

    p = sub.add_parser("keyrate-sweep", help="analytic key-rate report over a parameter grid")
    _common(p)
    _physics(p, single_point=False)
    p.add_argument("--lengths", type=parse_grid, default=parse_grid(DEFAULT_LENGTHS), help="km; list or start:stop:step")
    p.add_argument("--two-mu", dest="two_mu_list", type=parse_grid, default=list(DEFAULT_TWO_MU))
    p.add_argument("--delta-phi", dest="delta_phi_list", type=_angles, default=[parse_angle(v) for v in DEFAULT_DELTA_PHI])
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_keyrate_sweep)

    p = sub.add_parser("simulate", help="Monte-Carlo session followed by the decoy analysis of its counts")
    _common(p)
    _physics(p, single_point=True)
    p.add_argument("--pulses", type=float, default=1e6)
    p.add_argument("--block-size", type=int, default=1 << 20)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="decoy bounds and key rate from an observed-statistics CSV")
    _common(p)
    _physics(p, single_point=True)
    p.add_argument("--stats", required=True, help="CSV with columns " + ",".join(STATS_COLUMNS))
    p.set_defaults(func=cmd_analyze)

    for name, func, help_text in (
        ("reproduce-fig2", cmd_reproduce_fig2, "USD curves for N = 2, 4, 8, 16"),
        ("reproduce-fig3", cmd_reproduce_fig3, "key-rate figures of merit versus distance"),
    ):
        p = sub.add_parser(name, help=help_text)
        _common(p)
        if name == "reproduce-fig3":
            _physics(p, single_point=False)
            p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except (DomainError, ConfigurationError, SimulationError, OSError) as exc:
        print(f"gusqkd {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
