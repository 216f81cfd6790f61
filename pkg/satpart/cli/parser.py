"""
Command-line argument parsing.

Flags that mirror RunConfig fields default to None so that only values given on the command line
override the config file and environment layers.
"""
import argparse
from typing import List, Optional

from satpart import __version__
from satpart.utils.exceptions import UsageError

COMMANDS = ("encode", "estimate", "optimize", "solve", "verify")


class SatPartArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str):
        raise UsageError(message)


def _shared_flags() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key=value configuration file")
    shared.add_argument("--cnf", help="DIMACS instance")
    shared.add_argument("--seed", type=int, help="64-bit root seed")
    shared.add_argument("--workers", type=int, help="worker threads")
    shared.add_argument("--metric", choices=["conflicts", "wall"], help="cost metric")
    shared.add_argument("--json", action="store_true", help="print a JSON document on stdout")
    shared.add_argument("--journal", help="journal file (checkpoint for solve, trace for optimize)")
    shared.add_argument("--log-level", dest="log_level", help="logging level (default WARNING)")
    shared.add_argument("--max-retries", dest="max_retries", type=int, help="re-dispatch attempts per failed item")
    return shared


def _decomposition_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--vars", help='decomposition set as ranges, e.g. "1-12,20"')
    group.add_argument("--vars-file", dest="vars_file", help="file listing the decomposition set")
    group.add_argument("--from-trace", dest="from_trace", help="best set of an optimize journal")


def _budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-conflicts", dest="max_conflicts", type=int, help="conflict limit per subproblem")
    parser.add_argument("--max-wall-seconds", dest="max_wall_seconds", type=float, help="time limit per subproblem")


def _estimation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-n", "--sample-size", dest="sample_size", type=int, help="random sample size N")
    parser.add_argument("--gamma", type=float, help="confidence level")
    parser.add_argument("--convention", dest="ci_convention", choices=["one_sided", "two_sided"], help="quantile convention")


def build_parser() -> SatPartArgumentParser:
    shared = _shared_flags()
    parser = SatPartArgumentParser(
        prog="satpart",
        description="SAT partitioning: runtime prediction, decomposition search and partitioned solving.",
    )
    parser.add_argument("--version", action="version", version=f"satpart {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=SatPartArgumentParser)

    encode = commands.add_parser("encode", parents=[shared], help="generate a cipher state-recovery instance")
    encode.add_argument("--cipher", choices=["a51", "bivium", "grain"], help="cipher to encode")
    encode.add_argument("--len", dest="keystream_len", type=int, help="keystream length")
    encode.add_argument("--weaken", dest="weaken_k", type=int, help="fix the last K starting variables")
    encode.add_argument("--extend", dest="extend_weakening", action="store_const", const=True,
                        help="let --weaken continue into the first register")
    encode.add_argument("--out", help="output DIMACS path (default stdout)")
    encode.add_argument("--unsafe-witness", dest="unsafe_witness", action="store_true",
                        help="also write the secret state as a meta comment")

    estimate = commands.add_parser("estimate", parents=[shared], help="Monte Carlo predictive function")
    _decomposition_flags(estimate)
    _estimation_flags(estimate)
    _budget_flags(estimate)

    optimize = commands.add_parser("optimize", parents=[shared], help="minimise F by annealing or tabu search")
    _decomposition_flags(optimize)
    _estimation_flags(optimize)
    _budget_flags(optimize)
    optimize.add_argument("--algorithm", choices=["annealing", "tabu"], help="search algorithm")
    optimize.add_argument("--start", help="starting set inside the universe (default the whole universe)")
    optimize.add_argument("--t0", type=float, help="initial temperature")
    optimize.add_argument("--q-mult", dest="q_mult", type=float, help="cooling multiplier")
    optimize.add_argument("--t-inf", dest="t_inf", type=float, help="final temperature")
    optimize.add_argument("--cooling", choices=["per_evaluation", "per_transition"], help="when to cool")
    optimize.add_argument("--radius", type=int, help="neighbourhood radius")
    optimize.add_argument("--max-evaluations", dest="max_evaluations", type=int, help="F evaluation limit")
    optimize.add_argument("--max-search-seconds", dest="max_search_seconds", type=float, help="search time limit")

    solve = commands.add_parser("solve", parents=[shared], help="solve every member of a decomposition family")
    _decomposition_flags(solve)
    _budget_flags(solve)
    solve.add_argument("--exhaustive", dest="stop_on_sat", action="store_const", const=False,
                       help="keep solving after the first model")
    solve.add_argument("--enumeration-cap", dest="enumeration_cap", type=int, help="largest allowed d")
    solve.add_argument("--models-out", dest="models_out", help="write found models to this file")
    solve.add_argument("--proof-dir", dest="proof_dir", help="write one proof log per subproblem")
    solve.add_argument("--estimate-journal", dest="estimate_journal", help="journal of a prior estimate to compare")

    verify = commands.add_parser("verify", parents=[shared], help="run model, SUPB, encoder and journal checks")
    verify.add_argument("--vars", help="SUPB candidate set (default the instance starting variables)")
    verify.add_argument("--model", help="model file to check against --cnf")
    verify.add_argument("--supb-trials", dest="supb_trials", type=int, help="random full assignments for SUPB")
    verify.add_argument("--oracle-trials", dest="oracle_trials", type=int, help="random states for encoder cross-check")
    verify.add_argument("--cipher", choices=["a51", "bivium", "grain"], help="cipher for the cross-check")
    verify.add_argument("--len", dest="keystream_len", type=int, help="keystream length for the cross-check")

    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse the command line.

    Raises:
        UsageError: unknown flags, bad values or no command
    """
    args = build_parser().parse_args(argv)
    if not args.command:
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    return args
