"""
Command-line surface of the Lotka-Volterra insurance games.

    python lv_game.py equilibria --model competitive --a12 0.5 --a21 0.5 --rho 1
    python lv_game.py regime --mode competitive --a12 1.5 --a21 0.5
    python lv_game.py regress --input fixtures/market_series.csv

Exit codes: 0 success, 1 validation or usage error, 2 I/O error.
"""
import argparse
import logging
import os
import sys

from dotenv import load_dotenv

import analytic
import equilibria
import market_data
import model_core
import premium_game
import settings as run_settings
import simulate
import stability
from errors import InvalidConfig, LVGameError
from model_core import Mode, ModelSpec, NondimParams, Variant
from report_exporter import ReportExporter

logger = logging.getLogger('lv_game')

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
DEFAULT_SERIES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures", "market_series.csv")

# flag dest -> [model] key
MODEL_FLAGS = {
    "model": "variant", "mode": "mode",
    "a12": "a12", "a21": "a21", "rho": "rho",
    "rho1": "rho1", "rho2": "rho2", "K": "K", "K1": "K1", "K2": "K2", "c1": "c1", "c2": "c2",
    "delta": "delta", "epsilon": "epsilon", "alpha": "alpha", "beta": "beta",
    "rhos": "rhos", "Ks": "Ks", "matrix": "matrix",
}

# flag dest -> settings key
SETTING_FLAGS = {
    "t_end": "t_end", "step": "step", "blowup_threshold": "blowup_threshold",
    "seed": "seed", "jitter": "jitter", "workers": "workers",
    "tol": "attractor_tol", "residual_tol": "residual_tol",
    "precision": "csv_precision", "output_dir": "output_dir",
    "base": "base", "scale": "scale", "claim_base": "claim_base", "claim_scale": "claim_scale",
    "exposure_weights": "exposure_weights",
}


class UsageError(LVGameError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors through an exception instead of exiting"""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _common_flags():
    parent = ArgumentParser(add_help=False, allow_abbrev=False)
    parent.add_argument('--config', help='INI file with [model], [integration], [mapping] sections')
    parent.add_argument('--output-dir', dest='output_dir', help='Directory for output files (default: stdout)')
    parent.add_argument('--precision', type=int, help='Significant digits in CSV/JSON output (default 6)')
    parent.add_argument('--verbose', action='store_true', help='Log at DEBUG level')
    return parent


def _model_flags():
    parent = ArgumentParser(add_help=False, allow_abbrev=False)
    parent.add_argument('--model', choices=run_settings.MODEL_NAMES,
                        help='Model family (competitive/cooperative are the nondimensional games)')
    parent.add_argument('--mode', choices=[m.value for m in Mode], help='Interaction mode of nondim/nplayer/regime')
    for name in ("a12", "a21", "rho", "rho1", "rho2", "K", "K1", "K2", "c1", "c2",
                 "delta", "epsilon", "alpha", "beta"):
        parent.add_argument(f'--{name}', type=float, help=f'Model parameter {name}')
    parent.add_argument('--rhos', help='nplayer growth rates, comma separated')
    parent.add_argument('--Ks', help='nplayer market thresholds, comma separated')
    parent.add_argument('--matrix', help='nplayer interaction matrix, rows split by ";"')
    parent.add_argument('--residual-tol', dest='residual_tol', type=float,
                        help='Fixed-point residual tolerance (default 1e-10)')
    return parent


def _integration_flags():
    parent = ArgumentParser(add_help=False, allow_abbrev=False)
    parent.add_argument('--t-end', dest='t_end', type=float, help='Final time (default 100)')
    parent.add_argument('--step', type=float, help='RK4 step (default 1e-3)')
    parent.add_argument('--blowup-threshold', dest='blowup_threshold', type=float,
                        help='Blow-up state bound (default 1e9)')
    parent.add_argument('--tol', type=float, help='Attractor tolerance (default 1e-3)')
    return parent


def build_parser() -> ArgumentParser:
    common, model, integration = _common_flags(), _model_flags(), _integration_flags()
    parser = ArgumentParser(prog='lv_game', description='Lotka-Volterra insurance games', allow_abbrev=False)
    commands = parser.add_subparsers(dest='command', required=True, metavar='command')

    commands.add_parser('equilibria', parents=[common, model], allow_abbrev=False,
                        help='Enumerate and classify the steady points')

    p = commands.add_parser('simulate', parents=[common, model, integration], allow_abbrev=False,
                            help='Integrate one trajectory to CSV')
    p.add_argument('--initial', required=True, help='Initial state, comma separated')

    p = commands.add_parser('portrait', parents=[common, model, integration], allow_abbrev=False,
                            help='Integrate a grid of initial conditions')
    p.add_argument('--ranges', help='Per-axis low:high, comma separated (default 0.1:1.5 per axis)')
    p.add_argument('--counts', help='Per-axis lattice counts, comma separated (default 5 per axis)')
    p.add_argument('--points', help='Explicit initial conditions, rows split by ";" (overrides the lattice)')
    p.add_argument('--workers', type=int, help='Worker threads (default 1)')
    p.add_argument('--seed', type=int, help='Seed for --jitter')
    p.add_argument('--jitter', type=float, help='Uniform jitter half-width of the initial conditions')

    p = commands.add_parser('regime', parents=[common], allow_abbrev=False,
                            help='Regime case label of a two-player game')
    p.add_argument('--mode', choices=[m.value for m in Mode], default=Mode.COMPETITIVE.value)
    p.add_argument('--a12', type=float, required=True)
    p.add_argument('--a21', type=float, required=True)

    p = commands.add_parser('game', parents=[common, model], allow_abbrev=False,
                            help='n-player Nash premium report')
    p.add_argument('--players', type=int, help='Symmetric game with this many players (uses --symmetric-a)')
    p.add_argument('--symmetric-a', dest='symmetric_a', type=float, help='Scaled interaction of the symmetric game')
    p.add_argument('--market', help='CSV player,market_premium[,claim_exposure]')
    p.add_argument('--nash-table', dest='nash_table',
                   help='CSV player,nash_premium,claim_exposure used instead of solving a model')
    for name in ("base", "scale", "claim_base", "claim_scale"):
        p.add_argument(f'--{name.replace("_", "-")}', dest=name, type=float, help=f'Premium mapping {name}')
    p.add_argument('--exposure-weights', dest='exposure_weights', help='Per-player exposure weights, comma separated')

    p = commands.add_parser('regress', parents=[common], allow_abbrev=False,
                            help='Premium/claim regression report')
    p.add_argument('--input', default=DEFAULT_SERIES, help='CSV year,net_written_premium,net_claims_incurred')

    p = commands.add_parser('analytic', parents=[common], allow_abbrev=False,
                            help='Sample a closed-form curve')
    p.add_argument('--curve', required=True, choices=['logistic', 'risk', 'return', 'threshold', 'decoupled'])
    p.add_argument('--t-end', dest='t_end', type=float, help='Sampling horizon (default 100)')
    p.add_argument('--count', type=int, default=101, help='Number of samples (default 101)')
    for name in ("N0", "K", "rho", "amplitude", "rate", "N10", "N20", "K1", "K2", "rho1", "rho2"):
        p.add_argument(f'--{name}', type=float, help=f'Curve parameter {name}')

    return parser


def configure_logging(level_name: str):
    level = getattr(logging, str(level_name).upper(), None)
    if not isinstance(level, int):
        raise InvalidConfig(f"[output] log_level: unknown level {level_name!r}")
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def resolve_settings(args):
    """Defaults < environment < config file < flags"""
    settings, model = run_settings.load_settings(args.config)
    flags = {key: getattr(args, dest) for dest, key in SETTING_FLAGS.items() if hasattr(args, dest)}
    settings = run_settings.apply_overrides(settings, flags, "flags")
    if args.verbose:
        settings["log_level"] = "DEBUG"

    model = dict(model)
    for dest, key in MODEL_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            model[key] = value
    return settings, model


def _spec(model) -> ModelSpec:
    return model_core.validate(run_settings.model_from_config(model))


def _model_name(spec: ModelSpec) -> str:
    if spec.variant is Variant.NONDIM:
        return spec.params.mode.value
    return spec.variant.value


def cmd_equilibria(args, settings, model, exporter):
    spec = _spec(model)
    points = equilibria.enumerate_equilibria(spec, settings["residual_tol"])
    reports = stability.analyze(spec, points)
    case = reports[0].regime_case if reports else None
    exporter.write_json("equilibria.json", {
        "model": _model_name(spec),
        "regime_case": case.value if case else None,
        "points": [report.to_dict() for report in reports],
    })
    return 0


def _vector(text, where):
    return run_settings.parse_vector(text, where)


def cmd_simulate(args, settings, model, exporter):
    spec = _spec(model)
    config = run_settings.integration_config(settings)
    initial = _vector(args.initial, "--initial")
    trajectory = simulate.integrate(spec, initial, config)
    if trajectory.status is simulate.TrajectoryStatus.INVALID:
        raise InvalidConfig(f"--initial {args.initial}: initial state must be finite and nonnegative")

    exporter.write_trajectory("trajectory.csv", trajectory)
    if exporter.is_writing_files():
        summary = {
            "initial": list(initial),
            "status": trajectory.status.value,
            "blowup_time": trajectory.blowup_time,
            "final_state": trajectory.final_state.tolist(),
            "samples": len(trajectory.times),
        }
        if spec.variant is Variant.PREDATOR_PREY and (trajectory.states > 0).all():
            summary["first_integral_drift"] = simulate.first_integral_drift(trajectory, spec.params)
        exporter.write_json("summary.json", summary)
    logger.info(f"Trajectory {trajectory.status.value} with {len(trajectory.times)} samples")
    return 0


def _grid(args, dimension) -> simulate.PortraitGrid:
    if args.points:
        points = run_settings.parse_matrix(args.points, "--points")
        return simulate.PortraitGrid(points=points)
    if args.ranges:
        ranges = []
        for part in args.ranges.split(","):
            try:
                low, high = (float(v) for v in part.split(":"))
            except ValueError:
                raise InvalidConfig(f"--ranges: expected low:high, got {part!r}")
            ranges.append((low, high))
    else:
        ranges = [(0.1, 1.5)] * dimension
    counts = [int(c) for c in _vector(args.counts, "--counts")] if args.counts else [5] * len(ranges)
    return simulate.PortraitGrid(ranges=tuple(ranges), counts=tuple(counts))


def cmd_portrait(args, settings, model, exporter):
    spec = _spec(model)
    config = run_settings.integration_config(settings)
    grid = _grid(args, spec.dimension())
    try:
        candidates = [p for p in equilibria.enumerate_equilibria(spec, settings["residual_tol"])
                      if p.is_true_fixed_point]
    except LVGameError as e:
        logger.warning(f"No equilibrium candidates for attractor detection: {e}")
        candidates = []

    trajectories = simulate.phase_portrait(spec, grid, config, workers=settings["workers"])
    attractors = []
    for trajectory in trajectories:
        found = simulate.detect_attractor(trajectory, candidates, settings["attractor_tol"])
        attractors.append(candidates[found].name if isinstance(found, int) else found)

    initials = grid.initial_conditions()
    exporter.write_portrait(trajectories, initials, attractors)
    counts = {label: attractors.count(label) for label in sorted(set(attractors))}
    logger.info(f"Portrait of {len(trajectories)} trajectories: {counts}")
    return 0


def cmd_regime(args, settings, model, exporter):
    params = NondimParams(a12=args.a12, a21=args.a21, rho=1.0, mode=Mode(args.mode))
    model_core.validate(ModelSpec(Variant.NONDIM, params))
    case = stability.regime_case(params)
    if exporter.is_writing_files():
        exporter.write_json("regime.json", {"a12": args.a12, "a21": args.a21, "mode": args.mode, "case": case.value})
    else:
        exporter.stream.write(case.value + "\n")
    return 0


def cmd_game(args, settings, model, exporter):
    mapping = run_settings.premium_mapping(settings)
    if args.nash_table:
        result = premium_game.load_nash_table(args.nash_table)
    elif args.players:
        if args.symmetric_a is None:
            raise InvalidConfig("--players needs --symmetric-a")
        spec = premium_game.symmetric_game(args.players, args.symmetric_a, run_settings.parse_mode(model),
                                           rho=run_settings.model_number(model, "rho", 1.0),
                                           K=run_settings.model_number(model, "K", 1.0))
        result = premium_game.nash_premiums(spec, mapping)
    else:
        spec = _spec(model)
        result = premium_game.nash_premiums(spec, mapping)

    if args.market:
        premiums, exposures = premium_game.load_market_csv(args.market)
        result = premium_game.compare_to_market(result, premiums)
        if exposures is not None:
            result = premium_game.compare_exposures_to_market(result, exposures)
    exporter.write_json("game.json", result.to_dict())
    return 0


def cmd_regress(args, settings, model, exporter):
    series = market_data.load_series(args.input)
    report = market_data.premium_claim_report(series)
    exporter.write_json("report.json", report.to_dict())
    if exporter.is_writing_files():
        exporter.write_table("premium_claim.csv", market_data.plot_csv(series))
    return 0


def cmd_analytic(args, settings, model, exporter):
    def need(name):
        value = getattr(args, name)
        if value is None:
            raise InvalidConfig(f"--curve {args.curve} needs --{name}")
        return value

    if args.curve == "threshold":
        amplitude = need("amplitude")
        exporter.write_json("threshold.json", {
            "amplitude": amplitude,
            "threshold": analytic.threshold_constant(amplitude),
            "guideline": "act when the zero-interaction curve crosses A / e",
        })
        return 0

    names = {
        "logistic": ("N0", "K", "rho"),
        "risk": ("amplitude", "rate"),
        "return": ("amplitude", "rate"),
        "decoupled": ("N10", "N20", "K1", "K2", "rho1", "rho2"),
    }[args.curve]
    times, values = analytic.sample_curve(args.curve, settings["t_end"], args.count,
                                          **{name: need(name) for name in names})
    trajectory = simulate.Trajectory(times=times, states=values.reshape(len(times), -1),
                                     status=simulate.TrajectoryStatus.COMPLETED)
    exporter.write_trajectory("curve.csv", trajectory)
    return 0


COMMANDS = {
    "equilibria": cmd_equilibria,
    "simulate": cmd_simulate,
    "portrait": cmd_portrait,
    "regime": cmd_regime,
    "game": cmd_game,
    "regress": cmd_regress,
    "analytic": cmd_analytic,
}


def run(argv=None) -> int:
    """Parse argv, run one subcommand and return the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return 1
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else 0

    try:
        settings, model = resolve_settings(args)
        configure_logging(settings["log_level"])
        exporter = ReportExporter(settings["output_dir"], settings["csv_precision"])
        return COMMANDS[args.command](args, settings, model, exporter)
    except LVGameError as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    except OSError as e:
        logger.error(f"I/O error in {args.command}: {e}")
        return 2


def main():
    load_dotenv()
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
