"""
Command-line runner.

Loads a scenario file, applies flag overrides, runs one scenario and writes
its JSON report (and optionally the delivery trace). Exit codes: 0 on
completion, 2 on configuration errors, 3 when a scenario precondition fails,
4 when the report cannot be written.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import structlog
import yaml
from pydantic import ValidationError

from .attacks.report import AttackReport
from .attacks.scenarios import (
    amplification_sweep,
    crawl_scenario,
    eclipse_via_seed,
    flood_demo,
    getheaders_reflection,
    mempool_reflection,
    spoof_vs_hardened,
    sweep_report,
    sync_demo,
)
from .config.config import get_environment_config
from .config.logging_config import configure_logging
from .config.scenario_config import SCENARIO_NAMES, ScenarioConfig, load_scenario_config
from .exceptions import ConfigError, ReportWriteError, ScenarioPreconditionFailed
from .netsim.network import Network
from .wire.sizing import FRAMING_PRESETS, SizeMode

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_PRECONDITION_FAILED = 3
EXIT_REPORT_WRITE_FAILED = 4


def execute(cfg: ScenarioConfig) -> Tuple[AttackReport, Optional[Network]]:
    """Run the configured scenario. Returns the report and, when there is one, the network it ran on."""
    t = cfg.topology
    if cfg.scenario == "amplification_sweep":
        reports = amplification_sweep(
            cfg.sim, t.mempool_sizes,
            tx_payload_len=t.tx_payload_len, hardened=t.hardened,
            enforce_preconditions=t.enforce_preconditions,
        )
        return sweep_report(reports), None

    net = Network(cfg.sim)
    if cfg.scenario == "getheaders_reflection":
        report = getheaders_reflection(
            net, t.reflector_chain_height,
            headers_returned=t.headers_returned, hardened=t.hardened,
            enforce_preconditions=t.enforce_preconditions,
        )
    elif cfg.scenario == "mempool_reflection":
        report = mempool_reflection(
            net, t.mempool_size,
            tx_payload_len=t.tx_payload_len, hardened=t.hardened,
            enforce_preconditions=t.enforce_preconditions,
        )
    elif cfg.scenario == "spoof_vs_hardened":
        report = spoof_vs_hardened(
            net, t.guesses, nonce_bits=t.nonce_bits, enforce_preconditions=t.enforce_preconditions,
        )
    elif cfg.scenario == "eclipse_via_seed":
        report = eclipse_via_seed(
            net, compromised=t.compromised_seed,
            honest_count=t.honest_count, attacker_count=t.attacker_count,
            seed_services=t.seed_services, compromised_seeds=t.compromised_seeds,
            attacker_share_in_honest_pool=t.attacker_share_in_honest_pool,
        )
    elif cfg.scenario == "crawl":
        report = crawl_scenario(
            net, t.node_count, vulnerable_count=t.vulnerable_count, census_threshold=t.min_accepted_version,
        )
    elif cfg.scenario == "flood_demo":
        report = flood_demo(net, t.node_count)
    else:
        report = sync_demo(net, t.blocks_behind)
    return report, net


def emit_report(report: AttackReport, path: Union[str, Path]) -> None:
    """Write the report JSON. Raises ReportWriteError on any filesystem failure."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json(), encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(path, str(e)) from e
    logger.info("Report written", path=str(path), scenario=report.scenario)


def run_scenario(cfg: ScenarioConfig) -> int:
    logger.info("Running scenario", scenario=cfg.scenario, seed=cfg.sim.seed,
                size_mode=cfg.sim.size_model.mode.value,
                framing_overhead=cfg.sim.size_model.framing_overhead_per_message)
    try:
        report, net = execute(cfg)
    except ScenarioPreconditionFailed as e:
        logger.error("Scenario precondition failed", scenario=cfg.scenario, error=str(e))
        return EXIT_PRECONDITION_FAILED
    except ConfigError as e:
        logger.error("Invalid scenario configuration", scenario=cfg.scenario, error=str(e))
        return EXIT_CONFIG_ERROR

    try:
        emit_report(report, cfg.output.report)
        if cfg.output.trace is not None and net is not None:
            try:
                net.trace.write(cfg.output.trace)
            except OSError as e:
                raise ReportWriteError(cfg.output.trace, str(e)) from e
    except ReportWriteError as e:
        logger.error("Failed to write results", error=str(e))
        return EXIT_REPORT_WRITE_FAILED
    return EXIT_OK


def _framing_overhead(value: str) -> int:
    if value in FRAMING_PRESETS:
        return FRAMING_PRESETS[value]
    try:
        overhead = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected one of {sorted(FRAMING_PRESETS)} or a non-negative integer, got {value!r}"
        ) from None
    if overhead < 0:
        raise argparse.ArgumentTypeError(f"framing overhead must be non-negative, got {overhead}")
    return overhead


def _assignment(value: str) -> Tuple[str, Any]:
    key, sep, raw = value.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {value!r}")
    return key, yaml.safe_load(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reflectsim",
        description="Simulate Bitcoin P2P reflection attacks and the nonce-hardened handshake",
    )
    parser.add_argument("--scenario", choices=SCENARIO_NAMES, help="Scenario to run (overrides the config file)")
    parser.add_argument("--config", type=Path, help="Scenario file (.yaml, .yml or .json)")
    parser.add_argument("--seed", type=int, help="Simulator seed")
    parser.add_argument("--size-model", choices=[m.value for m in SizeMode], help="Message size accounting")
    parser.add_argument("--framing-overhead", type=_framing_overhead,
                        help=f"Per-message framing bytes: {' | '.join(sorted(FRAMING_PRESETS))} | <int>")
    parser.add_argument("--report", type=Path, help="Report JSON path")
    parser.add_argument("--trace", type=Path, help="Write the delivery trace (JSON lines) to this path")
    parser.add_argument("--set", dest="assignments", action="append", type=_assignment, default=[],
                        metavar="KEY=VALUE", help="Override any config key, e.g. topology.mempool_size=28758")
    parser.add_argument("--log-level", help="Log level (default from REFLECTSIM_LOG_LEVEL)")
    parser.add_argument("--log-format", choices=["json", "console"], help="Log output format")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "scenario": args.scenario,
        "sim.seed": args.seed,
        "sim.size_model.mode": args.size_model,
        "sim.size_model.framing_overhead_per_message": args.framing_overhead,
        "output.report": str(args.report) if args.report else None,
        "output.trace": str(args.trace) if args.trace else None,
    }
    for key, value in args.assignments:
        overrides[key] = value
    return overrides


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        env = get_environment_config()
        configure_logging(args.log_level or env["log_level"], args.log_format or env["log_format"])
    except (ValidationError, ValueError) as e:
        print(f"reflectsim: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        cfg = load_scenario_config(args.config, overrides_from_args(args))
    except ConfigError as e:
        logger.error("Invalid configuration", error=str(e))
        return EXIT_CONFIG_ERROR

    if cfg.output.report is None:
        report = Path(env["output_dir"]) / f"{cfg.scenario}.json"
        cfg = cfg.model_copy(update={"output": cfg.output.model_copy(update={"report": report})})

    # Traces are opt-in; recording is skipped unless one will be written.
    if cfg.output.trace is None and cfg.sim.record_trace:
        cfg = cfg.model_copy(update={"sim": cfg.sim.model_copy(update={"record_trace": False})})
    return run_scenario(cfg)


if __name__ == "__main__":
    sys.exit(main())
