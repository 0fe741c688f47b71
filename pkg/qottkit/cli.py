"""
Command-line interface for qottkit.

Every command builds a `ReportEnvelope` and prints it as JSON (or its checks as
CSV). The exit code is 0 iff every check passes; usage errors exit with 2.

Commands:
    verify-maskers: Masking, entropy, duality and sharing audits per family.
    protocol run: One transcript plus an optional Monte Carlo campaign.
    montecarlo: Acceptance or repetition campaigns.
    src: The shared randomness cost comparison.
    baseline run: The classical one-time table commitment.
    fixture export / fixture inspect: Write and describe fixture directories.
    schema: Print the report schema.

Example:
    ```
    qottkit verify-maskers --d 2,3,5
    qottkit protocol run --p 5 --J 1,2 --strategy wrong-index --trials 10000 --seed 7
    qottkit src --p 5 --J 1,2 --format csv
    ```
"""

import argparse
import json
import logging
import sys
import time
from typing import Optional, Sequence

import numpy as np

from qottkit.channels import depolarizing_channel
from qottkit.gates import fourier
from qottkit.maskers import MASKING_TOLERANCE, RECOVERY_TOLERANCE
from qottkit.protocol import (
    DetectorModel,
    HonestStrategy,
    PostCommitChannelStrategy,
    WrongIndicesStrategy,
)
from qottkit.qott import TWIRL_TOLERANCE, QottParams
from qottkit.qudits import TOLERANCE_DERIVED, TOLERANCE_STATE, PureState, Register
from qottkit.reports import (
    CheckResult,
    ReportEnvelope,
    equality_check,
    load_schema,
    lower_bound_check,
    render_csv,
    render_json,
    upper_bound_check,
)
from qottkit.simulator import QottSimulator

_logger = logging.getLogger(__name__)

MAX_CLI_DIMENSION = 7
"""Largest dimension accepted by `verify-maskers`."""

VERIFIED_FAMILIES = ("four-qudit", "qotp", "minimal", "minimal-dual")

STRATEGIES = ("honest", "wrong-index", "guess", "tamper", "generic")

TAMPER_STRENGTH = 0.5
"""Depolarizing strength of the `tamper` strategy."""

HIDING_TOLERANCE = 1e-12


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _plus_state(p: int) -> PureState:
    """F|0⟩, the uniform superposition."""
    return PureState(register=Register.of(I=p), amplitudes=fourier(p).matrix[:, 0])


def _simulator(args: argparse.Namespace) -> QottSimulator:
    kwargs = {}
    for name in ("seed", "trials", "workers"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    return QottSimulator(**kwargs)


def _emit(args: argparse.Namespace, report: ReportEnvelope) -> int:
    report = report.model_copy(
        update={"command": list(args.argv), "wall_time_s": time.perf_counter() - args.started}
    )
    text = render_csv(report) if args.format == "csv" else render_json(report) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    failed = [check.name for check in report.checks if not check.ok]
    if failed:
        _logger.warning(f"Failed checks: {failed}")
    return 0 if report.passed else 1


#########################
#       Commands        #
#########################


def _audit_masker(maskers, masker, name: str, expected: bool) -> tuple[list[CheckResult], dict]:
    report = masker.verify()
    checks = [
        CheckResult(
            name=f"{name}.masking",
            value=report.max_deviation,
            bound=0.0,
            tolerance=MASKING_TOLERANCE,
            passed=report.passed,
            expected_failure=expected,
        )
    ]
    entry = {"masking": report.to_dict()}
    if not report.passed:
        return checks, entry

    audit = maskers.entropy_audit(masker)
    residual = max(maskers.dual_masker(masker, hidden).residual for hidden in ("A", "B"))
    qss = maskers.qss23_check(masker)
    checks += [
        lower_bound_check(f"{name}.entropy", audit.safe_entropy, audit.general_bound, TOLERANCE_DERIVED),
        upper_bound_check(f"{name}.duality", residual, 0.0, RECOVERY_TOLERANCE),
        CheckResult(
            name=f"{name}.qss23",
            value=min(qss.recovery_fidelities.values()),
            bound=1.0,
            tolerance=RECOVERY_TOLERANCE,
            passed=qss.passed,
        ),
    ]
    entry.update(entropy=audit.to_dict(), duality_residual=residual, qss23=qss.to_dict())
    return checks, entry


def cmd_verify_maskers(args: argparse.Namespace) -> int:
    simulator = _simulator(args)
    maskers = simulator.maskers
    checks: list[CheckResult] = []
    data: dict[str, dict] = {}
    for d in args.d:
        for family in VERIFIED_FAMILIES:
            name = f"{family}.d{d}"
            # the minimal construction only masks at odd d
            expected = family.startswith("minimal") and d % 2 == 0
            try:
                found, data[name] = _audit_masker(maskers, maskers.get_masker(family, d), name, expected)
                checks += found
            except ValueError as e:
                _logger.error(f"Error verifying {family} at d={d}: {e}")
                checks.append(CheckResult(name=f"{name}.error", passed=False, expected_failure=expected))
                data[name] = {"error": str(e)}
    return _emit(
        args,
        ReportEnvelope(
            command=[],
            seed=None,
            parameters={"d": args.d, "families": list(VERIFIED_FAMILIES)},
            checks=checks,
            data=data,
        ),
    )


def _build_strategy(simulator: QottSimulator, params: QottParams, name: str, seed: int):
    secret = _plus_state(params.p)
    protocol = simulator.protocol
    if name == "honest":
        return HonestStrategy(secret=secret)
    if name == "wrong-index":
        return WrongIndicesStrategy(secret=secret, offset=(1, 0))
    if name == "guess":
        return protocol.guessing_strategy(params, secret, guess=params.J[0])
    if name == "tamper":
        tamper = depolarizing_channel(params.masker.dims["A"], TAMPER_STRENGTH, label="A")
        return PostCommitChannelStrategy(secret=secret, tamper=tamper)
    if name == "generic":
        rng = simulator.rng(seed, (1,))
        return protocol.random_generic_strategy(params, rng, offset=(1, 0))
    raise ValueError(f"Unknown strategy {name!r}")


def _cheating(name: str) -> bool:
    return name in ("wrong-index", "guess", "generic")


def _campaign_checks(prefix: str, report, cheating: bool) -> list[CheckResult]:
    checks = [
        CheckResult(
            name=f"{prefix}.agreement",
            value=report.estimate,
            bound=report.exact,
            tolerance=3 * report.exact_sigma,
            passed=report.within_3_sigma,
        )
    ]
    if cheating:
        checks.append(
            CheckResult(
                name=f"{prefix}.binding",
                value=report.estimate,
                bound=report.bound,
                tolerance=3 * _bound_sigma(report.bound, report.trials),
                passed=report.within_bound,
            )
        )
    return checks


def _bound_sigma(bound: float, trials: int) -> float:
    return float(np.sqrt(max(bound * (1 - bound), 0.0) / trials))


def cmd_protocol_run(args: argparse.Namespace) -> int:
    simulator = _simulator(args)
    params = simulator.qott.params(args.p, args.J, args.family)
    detector = DetectorModel(epsilon=args.epsilon)
    strategy = _build_strategy(simulator, params, args.strategy, simulator.seed)
    protocol = simulator.protocol

    transcript = protocol.run(
        params, strategy, detector, seed=simulator.seed, full_branches=args.full_branches
    )
    checks: list[CheckResult] = []
    data = {"transcript": transcript.to_dict()}
    exact = protocol.average_acceptance(params, strategy, detector)
    if args.strategy == "honest":
        checks.append(equality_check("honest.accept", transcript.accept_probability, 1.0, 1e-10))
        if transcript.output_fidelity is not None:
            checks.append(
                lower_bound_check("honest.fidelity", transcript.output_fidelity, 1.0, TOLERANCE_DERIVED)
            )
    elif _cheating(args.strategy):
        bound = 1 / len(params.J) + detector.epsilon
        checks.append(upper_bound_check(f"{args.strategy}.exact", exact, bound, TOLERANCE_DERIVED))
    else:
        report = protocol.post_commit_tamper(strategy.tamper, strategy.secret, params, seed=simulator.seed)
        checks.append(
            equality_check(
                "tamper.formula",
                report.accept_probability,
                report.formula_accept_probability,
                TOLERANCE_DERIVED,
            )
        )
        data["tamper"] = report.to_dict()
    data["exact_acceptance"] = exact

    if args.trials:
        campaign = protocol.monte_carlo(
            params, strategy, detector, trials=args.trials, seed=simulator.seed
        )
        checks.extend(_campaign_checks(f"{args.strategy}.montecarlo", campaign, _cheating(args.strategy)))
        data["montecarlo"] = campaign.to_dict()

    return _emit(
        args,
        ReportEnvelope(
            command=[],
            seed=simulator.seed,
            parameters={
                "p": params.p,
                "J": list(params.J),
                "family": args.family,
                "strategy": args.strategy,
                "epsilon": args.epsilon,
                "trials": args.trials,
            },
            checks=checks,
            data=data,
        ),
    )


def cmd_montecarlo(args: argparse.Namespace) -> int:
    simulator = _simulator(args)
    params = simulator.qott.params(args.p, args.J, args.family)
    detector = DetectorModel(epsilon=args.epsilon)
    strategy = _build_strategy(simulator, params, args.strategy, simulator.seed)
    protocol = simulator.protocol
    trials = args.trials or simulator.trials

    checks: list[CheckResult] = []
    if args.repetitions > 1:
        report = protocol.repetition_mode(
            args.repetitions, strategy, params, detector, trials=trials, seed=simulator.seed
        )
        if _cheating(args.strategy):
            checks.append(
                CheckResult(
                    name=f"{args.strategy}.repetition.n{args.repetitions}",
                    value=report.estimate,
                    bound=report.bound,
                    tolerance=3 * _bound_sigma(report.bound, report.trials),
                    passed=report.within_bound,
                )
            )
    else:
        report = protocol.monte_carlo(params, strategy, detector, trials=trials, seed=simulator.seed)
        checks.extend(_campaign_checks(f"{args.strategy}.montecarlo", report, _cheating(args.strategy)))

    return _emit(
        args,
        ReportEnvelope(
            command=[],
            seed=simulator.seed,
            parameters={
                "p": params.p,
                "J": list(params.J),
                "family": args.family,
                "strategy": args.strategy,
                "epsilon": args.epsilon,
                "trials": trials,
                "repetitions": args.repetitions,
            },
            checks=checks,
            data={"campaign": report.to_dict()},
        ),
    )


def cmd_src(args: argparse.Namespace) -> int:
    simulator = _simulator(args)
    report = simulator.qott.src_report(args.p, args.J, rivest_field=args.rivest_field)
    params = simulator.qott.params(args.p, args.J)
    checks = [
        equality_check(f"src.{row.scheme}", row.computed_bits, row.formula_bits, TOLERANCE_DERIVED)
        for row in report.rows
    ]
    checks.append(upper_bound_check("twirl", params.twirl_check(), 0.0, TWIRL_TOLERANCE))
    return _emit(
        args,
        ReportEnvelope(
            command=[],
            seed=None,
            parameters={"p": args.p, "J": list(params.J), "rivest_field": report.rivest_field},
            checks=checks,
            data={"src": report.to_dict()},
        ),
    )


def cmd_baseline_run(args: argparse.Namespace) -> int:
    simulator = _simulator(args)
    baseline = simulator.baseline
    p = args.p
    transcript = baseline.run(p, args.message % p, seed=simulator.seed)
    checks = [
        CheckResult(name="baseline.honest", value=float(transcript.accept), bound=1.0, passed=transcript.accept),
        upper_bound_check("baseline.hiding", baseline.hiding_information(p), 0.0, HIDING_TOLERANCE),
        equality_check("baseline.binding", baseline.binding_success(p), 1 / p, HIDING_TOLERANCE),
        equality_check("baseline.src", baseline.src_classical(p), 3 * np.log2(p), TOLERANCE_DERIVED),
    ]
    return _emit(
        args,
        ReportEnvelope(
            command=[],
            seed=simulator.seed,
            parameters={"p": p, "message": args.message % p},
            checks=checks,
            data={"transcript": transcript.to_dict()},
        ),
    )


def cmd_fixture_export(args: argparse.Namespace) -> int:
    simulator = _simulator(args)
    if args.kind == "masker":
        masker = simulator.maskers.get_masker(args.family, args.d)
        path = simulator.exports.export_masker(masker, args.directory)
        loaded = simulator.imports.load_masker(path)
        same = loaded.fingerprint() == masker.fingerprint()
        parameters = {"kind": "masker", "family": args.family, "d": args.d}
    else:
        params = simulator.qott.params(args.p, args.J, args.family)
        commodity = simulator.qott.build_qott(params, seed=simulator.seed)
        path = simulator.exports.export_commodity(commodity, args.directory)
        loaded = simulator.imports.load_commodity(path)
        same = bool(
            np.max(np.abs(loaded.state.amplitudes - commodity.state.amplitudes)) <= TOLERANCE_STATE
        )
        parameters = {"kind": "commodity", "p": args.p, "J": list(params.J), "family": args.family}
    return _emit(
        args,
        ReportEnvelope(
            command=[],
            seed=simulator.seed,
            parameters=parameters,
            checks=[CheckResult(name="fixture.reload", passed=same)],
            data={"path": str(path), "files": simulator.imports.inspect(path)},
        ),
    )


def cmd_fixture_inspect(args: argparse.Namespace) -> int:
    simulator = _simulator(args)
    return _emit(
        args,
        ReportEnvelope(
            command=[],
            parameters={"path": args.path},
            data={"inspect": simulator.imports.inspect(args.path)},
        ),
    )


def cmd_schema(args: argparse.Namespace) -> int:
    sys.stdout.write(json.dumps(load_schema(), indent=2) + "\n")
    return 0


#########################
#        Parser         #
#########################


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qottkit", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default: QOTTKIT_SEED)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )

    qott_args = argparse.ArgumentParser(add_help=False)
    qott_args.add_argument("--p", type=int, required=True)
    qott_args.add_argument("--J", type=_int_list, required=True)
    qott_args.add_argument("--family", default="minimal")

    attack_args = argparse.ArgumentParser(add_help=False)
    attack_args.add_argument("--strategy", choices=STRATEGIES, default="honest")
    attack_args.add_argument("--epsilon", type=float, default=0.0)
    attack_args.add_argument("--workers", type=int, default=None)

    sv = sub.add_parser("verify-maskers", parents=[common])
    sv.add_argument("--d", type=_int_list, required=True)
    sv.set_defaults(func=cmd_verify_maskers)

    sp = sub.add_parser("protocol").add_subparsers(dest="action", required=True)
    spr = sp.add_parser("run", parents=[common, qott_args, attack_args])
    spr.add_argument("--trials", type=int, default=None, help="Monte Carlo trials; none by default")
    spr.add_argument("--full-branches", action="store_true")
    spr.set_defaults(func=cmd_protocol_run)

    sm = sub.add_parser("montecarlo", parents=[common, qott_args, attack_args])
    sm.add_argument("--trials", type=int, default=None)
    sm.add_argument("--repetitions", type=int, default=1)
    sm.set_defaults(func=cmd_montecarlo)

    ss = sub.add_parser("src", parents=[common])
    ss.add_argument("--p", type=int, required=True)
    ss.add_argument("--J", type=_int_list, required=True)
    ss.add_argument("--rivest-field", type=int, default=None)
    ss.set_defaults(func=cmd_src)

    sb = sub.add_parser("baseline").add_subparsers(dest="action", required=True)
    sbr = sb.add_parser("run", parents=[common])
    sbr.add_argument("--p", type=int, required=True)
    sbr.add_argument("--message", type=int, default=1)
    sbr.set_defaults(func=cmd_baseline_run)

    sf = sub.add_parser("fixture").add_subparsers(dest="action", required=True)
    sfe = sf.add_parser("export").add_subparsers(dest="kind", required=True)
    sfm = sfe.add_parser("masker", parents=[common])
    sfm.add_argument("--family", default="minimal")
    sfm.add_argument("--d", type=int, required=True)
    sfm.add_argument("directory")
    sfm.set_defaults(func=cmd_fixture_export)
    sfc = sfe.add_parser("commodity", parents=[common, qott_args])
    sfc.add_argument("directory")
    sfc.set_defaults(func=cmd_fixture_export)
    sfi = sf.add_parser("inspect", parents=[common])
    sfi.add_argument("path")
    sfi.set_defaults(func=cmd_fixture_inspect)

    sc = sub.add_parser("schema")
    sc.set_defaults(func=cmd_schema)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "d", None) is not None and isinstance(args.d, list):
        if any(d < 2 or d > MAX_CLI_DIMENSION for d in args.d):
            parser.error(f"--d values must lie in 2..{MAX_CLI_DIMENSION}")
    logging.basicConfig(
        level=getattr(logging, getattr(args, "log_level", "WARNING")),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args.argv = argv
    args.started = time.perf_counter()
    try:
        return int(args.func(args))
    except ValueError as e:
        _logger.error(f"Error running {args.command}: {e}")
        sys.stderr.write(f"qottkit: error: {e}\n")
        return 2
