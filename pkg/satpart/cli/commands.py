"""
satpart commands: encode, estimate, optimize, solve and verify.

Every command returns a CommandResult; ``main`` renders it as text or as the JSON document
``{"command": ..., "result": ...}`` and maps exceptions to exit codes.
"""
import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from monitoring import get_logger, setup_monitoring, track_errors, track_performance
from satpart.cli.parser import parse_args
from satpart.config import RunConfig
from satpart.encoders.instances import cross_check, load_meta, make_instance, reproduces_keystream, weaken
from satpart.encoders.meta import InstanceMeta, strip_meta
from satpart.estimator.decomposition import DecompositionSet
from satpart.estimator.supb import sample_supb
from satpart.formula.cnf import Cnf
from satpart.formula.dimacs import emit_dimacs, emit_model, parse_model, read_dimacs, write_dimacs
from satpart.optimizer.annealing import AnnealingSchedule, simulated_annealing
from satpart.optimizer.evaluators import EstimationEvaluator, SearchBudget
from satpart.optimizer.search_space import SearchPoint
from satpart.optimizer.tabu import tabu_search
from satpart.optimizer.trace import load_best_dset
from satpart.orchestrator.journal import Journal, JournalState, read_journal
from satpart.orchestrator.runs import aggregate_one_core_cost, run_estimation, run_solving
from satpart.orchestrator.work import SolveProgress
from satpart.solver.checker import first_violated_clause
from satpart.solver.outcome import Budget
from satpart.utils.exceptions import (
    AssignmentError,
    CheckpointCorruptedError,
    ConfigurationError,
    DimacsParseError,
    EncodingError,
    EnumerationCapExceeded,
    EstimationError,
    OrchestratorError,
    SatPartError,
    SearchError,
    SolverInternalError,
    UsageError,
    VerificationFailed,
    WeakeningError,
)
from satpart.utils.ranges import format_ranges, parse_ranges

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_RESOURCE = 3

USAGE_ERRORS = (UsageError, ConfigurationError, DimacsParseError, AssignmentError, EncodingError,
                WeakeningError, SearchError, EstimationError)
VERIFICATION_ERRORS = (VerificationFailed, CheckpointCorruptedError, SolverInternalError)
RESOURCE_ERRORS = (EnumerationCapExceeded, OrchestratorError)


@dataclass
class CommandResult:
    payload: Dict[str, Any]
    lines: List[str] = field(default_factory=list)
    exit_code: int = EXIT_OK


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, VERIFICATION_ERRORS):
        return EXIT_VERIFICATION
    if isinstance(error, RESOURCE_ERRORS):
        return EXIT_RESOURCE
    return EXIT_USAGE


def load_config(args: argparse.Namespace) -> RunConfig:
    flags = {name: getattr(args, name) for name in RunConfig.field_names() if hasattr(args, name)}
    if flags.get("metric") == "wall":
        flags["metric"] = "wall_seconds"
    return RunConfig.load(args.config, flags)


def load_instance(args: argparse.Namespace) -> Tuple[Cnf, Optional[InstanceMeta]]:
    if not args.cnf:
        raise UsageError(f"{args.command} needs --cnf")
    cnf = read_dimacs(args.cnf)
    return cnf, load_meta(cnf)


def free_starting_vars(meta: Optional[InstanceMeta]) -> Tuple[int, ...]:
    """Starting variables not fixed by weakening."""
    if meta is None:
        raise UsageError("the instance has no meta comments; pass --vars, --vars-file or --from-trace")
    width = len(meta.starting_vars)
    return meta.starting_vars[:width - meta.weakened_K]


def read_vars_file(path: str) -> List[int]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [line.split("#", 1)[0] for line in text.splitlines()]
    tokens = ",".join(",".join(line.split()) for line in lines if line.strip())
    return parse_ranges(tokens)


def resolve_dset(args: argparse.Namespace, cnf: Cnf, meta: Optional[InstanceMeta]) -> DecompositionSet:
    if getattr(args, "from_trace", None):
        dset = load_best_dset(args.from_trace)
    elif getattr(args, "vars_file", None):
        dset = DecompositionSet.of(read_vars_file(args.vars_file))
    elif getattr(args, "vars", None):
        dset = DecompositionSet.of(parse_ranges(args.vars))
    else:
        dset = DecompositionSet.of(free_starting_vars(meta))
    dset.validate(cnf.var_count)
    return dset


def subproblem_budget(config: RunConfig) -> Budget:
    return Budget(max_conflicts=config.max_conflicts, max_wall_seconds=config.max_wall_seconds)


@track_errors("cmd_encode")
def cmd_encode(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Write a DIMACS state-recovery instance with its meta comments."""
    cnf, meta = make_instance(config.cipher, config.keystream_len, config.seed)
    if config.weaken_k:
        cnf, meta = weaken(cnf, meta, config.weaken_k, config.extend_weakening)
    if args.unsafe_witness:
        cnf = cnf.with_comments(strip_meta(cnf.comments) + meta.to_comments(include_witness=True))
    if args.out:
        write_dimacs(args.out, cnf)
    elif args.json:
        raise UsageError("encode --json needs --out for the DIMACS file")
    else:
        sys.stdout.write(emit_dimacs(cnf))

    payload = {
        "cipher": meta.cipher.value if meta.cipher else None,
        "keystream_len": meta.keystream_len,
        "starting_vars": format_ranges(meta.starting_vars),
        "free_starting_vars": len(free_starting_vars(meta)),
        "weakened_K": meta.weakened_K,
        "extended": meta.extended,
        "variables": cnf.var_count,
        "clauses": cnf.clause_count,
        "out": args.out,
    }
    lines = [
        f"{payload['cipher']}: {cnf.var_count} variables, {cnf.clause_count} clauses, "
        f"{payload['free_starting_vars']} free starting variables",
    ] if args.out else []
    return CommandResult(payload, lines)


@track_errors("cmd_estimate")
def cmd_estimate(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Estimate F for one decomposition set."""
    cnf, meta = load_instance(args)
    dset = resolve_dset(args, cnf, meta)
    journal = Journal(args.journal) if args.journal else None
    try:
        estimate = run_estimation(
            cnf,
            dset,
            config.sample_size,
            config.seed,
            budget=subproblem_budget(config),
            workers=config.workers,
            metric=config.metric,
            gamma=config.gamma,
            convention=config.ci_convention,
            journal=journal,
            max_retries=config.max_retries,
        )
    finally:
        if journal is not None:
            journal.close()

    payload = {"vars": format_ranges(dset.members), "d": dset.d, **estimate.to_dict()}
    lines = [
        f"F = {estimate.f_value:.6g} {estimate.metric} (d = {dset.d}, N = {estimate.n})",
        f"CI({estimate.gamma:g}, {estimate.convention}) = [{estimate.ci[0]:.6g}, {estimate.ci[1]:.6g}]",
        f"censored: {estimate.censored_count}",
    ]
    if estimate.low_confidence:
        lines.append("warning: low confidence (N < 2)")
    if estimate.lower_bound:
        lines.append("warning: censored observations, F is a lower bound")
    return CommandResult(payload, lines, EXIT_OK if estimate.valid else EXIT_RESOURCE)


@track_errors("cmd_optimize")
def cmd_optimize(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Search the subsets of a universe of variables for the smallest F."""
    cnf, meta = load_instance(args)
    universe = resolve_dset(args, cnf, meta).members
    if args.start:
        start = SearchPoint.from_dset(DecompositionSet.from_members(universe, parse_ranges(args.start)))
    else:
        start = SearchPoint((1 << len(universe)) - 1, len(universe))

    evaluator = EstimationEvaluator(
        cnf,
        universe,
        config.sample_size,
        config.seed,
        budget=subproblem_budget(config),
        workers=config.workers,
        metric=config.metric,
        gamma=config.gamma,
        convention=config.ci_convention,
        max_retries=config.max_retries,
    )
    budget = SearchBudget(config.max_evaluations, config.max_search_seconds)
    journal = Journal(args.journal) if args.journal else None
    try:
        if config.algorithm == "annealing":
            schedule = AnnealingSchedule(config.t0, config.q_mult, config.t_inf, config.cooling)
            result = simulated_annealing(evaluator, start, schedule, budget, config.seed, config.radius, journal)
        else:
            result = tabu_search(evaluator, start, budget, config.seed, config.radius, journal)
    finally:
        if journal is not None:
            journal.close()

    best_vars = format_ranges(result.best.point.members(universe))
    payload = {"best_vars": best_vars, **result.to_dict()}
    lines = [
        f"best set ({result.best.point.size} vars): {best_vars}",
        f"F_best = {result.best.f_value:.6g} after {result.evaluations} evaluations ({result.stop_reason})",
    ]
    return CommandResult(payload, lines)


def _progress_bar(total: int, enabled: bool) -> Tuple[Optional[tqdm], Optional[Callable[[SolveProgress], None]]]:
    if not enabled:
        return None, None
    bar = tqdm(total=total, desc="subproblems", unit="item", file=sys.stderr, leave=False)

    def update(progress: SolveProgress) -> None:
        bar.n = progress.completed
        bar.set_postfix(sat=progress.sat_found, in_flight=progress.in_flight)
        bar.refresh()

    return bar, update


def _prior_estimate(path: str) -> Optional[Dict[str, Any]]:
    state = JournalState.load(path)
    return state.estimates[-1] if state.estimates else None


@track_errors("cmd_solve")
@track_performance("cmd_solve")
def cmd_solve(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Solve the whole family, verify the models and compare the one-core cost with a prior F."""
    cnf, meta = load_instance(args)
    dset = resolve_dset(args, cnf, meta)
    bar, progress = _progress_bar(1 << dset.d, not args.json and dset.d <= config.enumeration_cap)
    try:
        report = run_solving(
            cnf,
            dset,
            workers=config.workers,
            stop_on_sat=config.stop_on_sat,
            checkpoint_path=args.journal,
            budget=subproblem_budget(config),
            metric=config.metric,
            cap=config.enumeration_cap,
            max_retries=config.max_retries,
            progress_callback=progress,
            proof_dir=args.proof_dir,
        )
    finally:
        if bar is not None:
            bar.close()

    failures = []
    for item_id, model in zip(report.sat_items, report.sat_models):
        if first_violated_clause(cnf, model) is not None:
            failures.append(f"model of item {item_id} falsifies a clause")
        elif meta is not None and meta.cipher is not None and not reproduces_keystream(model, meta):
            failures.append(f"model of item {item_id} does not reproduce the keystream")
    if args.models_out and report.sat_models:
        Path(args.models_out).write_text("".join(emit_model(model) for model in report.sat_models), encoding="utf-8")

    one_core = aggregate_one_core_cost(report)
    payload = report.to_dict()
    payload["verified_models"] = len(report.sat_models) - len(failures)
    lines = [
        f"{'SAT' if report.satisfiable else 'no model'}: {report.completed}/{report.total} subproblems, "
        f"{len(report.sat_models)} models, {len(report.undecided)} undecided",
        f"one-core cost: {one_core:.6g} {report.metric}",
    ]
    if args.estimate_journal:
        prior = _prior_estimate(args.estimate_journal)
        if prior is not None:
            f_value = float(prior["f_value"])
            deviation = abs(one_core - f_value) / one_core if one_core else None
            payload["prior_estimate"] = {"f_value": f_value, "ci": prior["ci"], "relative_deviation": deviation}
            lines.append(f"prior F = {f_value:.6g}" + (f", deviation {deviation:.1%}" if deviation is not None else ""))
    lines.extend(f"verification failed: {failure}" for failure in failures)

    if failures:
        raise VerificationFailed("; ".join(failures))
    exit_code = EXIT_OK
    if not report.satisfiable and report.undecided:
        exit_code = EXIT_RESOURCE
    return CommandResult(payload, lines, exit_code)


@dataclass
class VerificationReport:
    checks: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(check["ok"] for check in self.checks)

    def add(self, name: str, ok: bool, **details: Any) -> None:
        self.checks.append({"name": name, "ok": ok, **details})

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "checks": self.checks}


def _verify_model(report: VerificationReport, cnf: Cnf, meta: Optional[InstanceMeta], path: str) -> None:
    model = parse_model(Path(path).read_text(encoding="utf-8"), cnf.var_count)
    violated = first_violated_clause(cnf, model)
    report.add("model", violated is None, violated_clause=violated)
    if meta is not None and meta.cipher is not None:
        report.add("keystream", reproduces_keystream(model, meta))


def _verify_journal(report: VerificationReport, path: str) -> None:
    try:
        records = read_journal(path)
    except CheckpointCorruptedError as e:
        report.add("journal", False, line=e.line_number, error=e.message)
        return
    state = JournalState.replay(records)
    report.add("journal", state.duplicates == 0, records=len(records), items=len(state.items), duplicates=state.duplicates)


@track_errors("cmd_verify")
def cmd_verify(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    """Run every requested check; any failure gives exit code 2."""
    report = VerificationReport()
    cnf = meta = None
    if args.cnf:
        cnf, meta = load_instance(args)
    if args.model:
        if cnf is None:
            raise UsageError("verify --model needs --cnf")
        _verify_model(report, cnf, meta, args.model)
    if args.supb_trials:
        if cnf is None:
            raise UsageError("verify --supb-trials needs --cnf")
        if args.vars:
            varset = DecompositionSet.of(parse_ranges(args.vars))
        elif meta is not None:
            varset = DecompositionSet.of(meta.starting_vars)
        else:
            raise UsageError("verify --supb-trials needs --vars or an instance with meta comments")
        supb = sample_supb(cnf, varset, args.supb_trials, config.seed)
        report.add("supb", supb.certified, **supb.to_dict())
    if args.oracle_trials:
        cipher = meta.cipher if meta is not None and meta.cipher is not None and not args.cipher else config.cipher
        length = config.keystream_len or (meta.keystream_len if meta is not None and not args.cipher else None)
        crossed = cross_check(cipher, args.oracle_trials, config.seed, length)
        details = crossed.to_dict()
        details.pop("ok")
        report.add("encoder", crossed.ok, **details)
    if args.journal:
        _verify_journal(report, args.journal)
    if not report.checks:
        raise UsageError("verify needs at least one of --model, --supb-trials, --oracle-trials, --journal")

    lines = [f"{'PASS' if check['ok'] else 'FAIL'} {check['name']}" for check in report.checks]
    return CommandResult(report.to_dict(), lines, EXIT_OK if report.ok else EXIT_VERIFICATION)


COMMAND_HANDLERS = {
    "encode": cmd_encode,
    "estimate": cmd_estimate,
    "optimize": cmd_optimize,
    "solve": cmd_solve,
    "verify": cmd_verify,
}


def render(command: str, result: CommandResult, as_json: bool) -> None:
    if as_json:
        json.dump({"command": command, "result": result.payload}, sys.stdout, indent=2, sort_keys=True, default=str)
        sys.stdout.write("\n")
    else:
        for line in result.lines:
            print(line)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args = parse_args(list(argv) if argv is not None else None)
        config = load_config(args)
    except SatPartError as e:
        print(f"satpart: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_monitoring(config)
    logger.debug("Configuration loaded", command=args.command, **config.to_dict())
    try:
        result = COMMAND_HANDLERS[args.command](args, config)
    except SatPartError as e:
        code = exit_code_for(e)
        logger.debug("Command failed", command=args.command, error_type=type(e).__name__, exit_code=code)
        if args.json:
            json.dump({"command": args.command, "error": {"type": type(e).__name__, "message": str(e)}}, sys.stdout)
            sys.stdout.write("\n")
        print(f"satpart {args.command}: {e}", file=sys.stderr)
        return code
    except KeyboardInterrupt:
        print(f"satpart {args.command}: interrupted", file=sys.stderr)
        return EXIT_RESOURCE

    render(args.command, result, args.json)
    return result.exit_code
