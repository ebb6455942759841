"""Command-line interface"""
import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from src.config import Settings, load_settings
from src.discovery.fci import run_fci
from src.discovery.loci import LociConfig, LociResult, derivation_of, run, run_from_facts
from src.errors import (
    ContractViolationError,
    InconsistentInputError,
    InvalidArgumentError,
    NotFoundError,
    ResourceLimitError,
    RuleConflictError,
)
from src.fixtures import list_fixtures, load_fixture
from src.generator.campaign import CampaignSpec, compare_on_dag, first_difference, run_campaign
from src.generator.random_dag import DagSpec, random_dag
from src.generator.report_builder import ReportBuilder
from src.graphs.projection import project_to_mag
from src.graphs.text_format import Graph, format_graph, load_graph, to_dot, to_json
from src.logic.trace import format_trace, trace_to_dict
from src.models.graph import CausalDag, NodeId
from src.models.statement import SELECTION, CausalAtom
from src.oracles.dag_oracle import DagOracle
from src.oracles.fact_log import parse_fact_log

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_INCONSISTENT = 4
EXIT_INTERNAL = 5

EXPORT_FORMATS = ("dot", "json", "native")
EXPORT_VIEWS = ("input", "mag", "pag")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = load_settings(_overrides(args), args.config)
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.handler(args, settings)
    except NotFoundError as e:
        print(f"Not found: {e}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except InconsistentInputError as e:
        print(f"Inconsistent input: {e}", file=sys.stderr)
        for trace in e.traces:
            print(format_trace(trace), end="", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (RuleConflictError, ContractViolationError) as e:
        print(f"Internal error: {e}", file=sys.stderr)
        for line in getattr(e, "log_excerpt", ()):
            print(f"  {line}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InvalidArgumentError, ResourceLimitError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loci",
        description="Causal discovery by logical inference over minimal independences",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s gen --n-observed 6 --n-latent 2 --seed 7     random DAG to stdout
  %(prog)s run --fixture y_structure --algo both        run LoCI and FCI, write artifacts
  %(prog)s run --replay outputs/facts.log --replay-fraction 0.5
  %(prog)s compare --trials 1000 --workers 4            equivalence campaign
  %(prog)s trace "Z=>Y" --fixture y_structure           derivation of one atom
  %(prog)s export --fixture y_structure --view pag --format dot
        """,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--max-cond", type=int, default=None, help="largest conditioning set")
    common.add_argument(
        "--batch-closure", action="store_true", default=None, help="close once after the search"
    )
    common.add_argument(
        "--strict-blocking",
        action="store_true",
        default=None,
        help="confirm blocking premises with extra queries",
    )
    common.add_argument(
        "--keep-wide-disjunctions",
        action="store_true",
        default=None,
        help="keep disjunctions over more than 2 node targets",
    )
    common.add_argument("--config", default=None, help="dotenv-style file with LOCI_* keys")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    common.add_argument("--output-dir", default=None, help="artifact directory (default outputs)")

    subparsers = parser.add_subparsers(dest="command", required=True)

    gen = subparsers.add_parser("gen", parents=[common], help="generate a random DAG")
    gen.add_argument("--n-observed", type=int, default=6)
    gen.add_argument("--n-latent", type=int, default=1)
    gen.add_argument("--n-selection", type=int, default=0)
    gen.add_argument("--edge-probability", type=float, default=0.35)
    gen.add_argument("--selection-children", action="store_true", help="let selection nodes have children")
    gen.add_argument("--out", default=None, help="write to a file instead of stdout")
    gen.set_defaults(handler=cmd_gen)

    run_cmd = subparsers.add_parser("run", parents=[common], help="run LoCI and/or FCI")
    _add_source(run_cmd)
    run_cmd.add_argument("--algo", choices=["loci", "fci", "both"], default="both")
    run_cmd.add_argument("--replay", default=None, help="fact log to replay instead of a graph")
    run_cmd.add_argument("--replay-fraction", type=float, default=1.0, help="share of facts replayed")
    run_cmd.add_argument("--budget", type=int, default=None, help="stop after this many independences")
    run_cmd.set_defaults(handler=cmd_run)

    compare = subparsers.add_parser("compare", parents=[common], help="equivalence campaign")
    compare.add_argument("--trials", type=int, default=None)
    compare.add_argument("--workers", type=int, default=None)
    compare.add_argument("--fixture", default=None, help="compare on one bundled DAG instead")
    compare.add_argument("--mine-fixtures", default=None, help="save rule-triggering DAGs here")
    compare.add_argument(
        "--require-coverage", action="store_true", help="fail when an orientation rule never fired"
    )
    compare.set_defaults(handler=cmd_compare)

    trace = subparsers.add_parser("trace", parents=[common], help="print the derivation of an atom")
    trace.add_argument("atom", help="e.g. 'X=>Y' or 'X=>S'")
    _add_source(trace)
    trace.add_argument("--replay", default=None, help="fact log to replay instead of a graph")
    trace.add_argument("--json", action="store_true", help="print the trace document")
    trace.set_defaults(handler=cmd_trace)

    export = subparsers.add_parser("export", parents=[common], help="export a graph")
    _add_source(export)
    export.add_argument("--view", choices=EXPORT_VIEWS, default="input", help="graph to export")
    export.add_argument("--format", choices=EXPORT_FORMATS, default="native")
    export.add_argument("--out", default=None, help="write to a file instead of stdout")
    export.set_defaults(handler=cmd_export)
    return parser


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------


def cmd_gen(args, settings: Settings) -> int:
    spec = DagSpec(
        n_observed=args.n_observed,
        n_latent=args.n_latent,
        n_selection=args.n_selection,
        edge_probability=args.edge_probability,
        selection_sinks=not args.selection_children,
    )
    dag = random_dag(spec, settings.seed if settings.seed is not None else 0)
    _emit(format_graph(dag), args.out)
    return EXIT_OK


def cmd_run(args, settings: Settings) -> int:
    config = _loci_config(settings, budget=args.budget)
    builder = ReportBuilder(output_dir=settings.output_dir)

    print("=" * 60)
    print("LoCI causal discovery")
    print("=" * 60)

    if args.replay:
        if args.algo != "loci":
            raise InvalidArgumentError("replay runs LoCI only; pass --algo loci")
        result = _replay(args.replay, args.replay_fraction, config, settings.seed)
        builder.write_run(loci=result)
        _print_loci(result)
        print(f"Artifacts: {settings.output_dir}")
        return EXIT_OK

    dag = _require_dag(_load_source(args))
    loci_result = fci_result = None
    if args.algo in ("loci", "both"):
        loci_result = run(DagOracle(dag), config)
        _print_loci(loci_result)
    if args.algo in ("fci", "both"):
        fci_result = run_fci(DagOracle(dag), config.max_cond)
        print(f"FCI: {len(fci_result.log)} rule applications, {fci_result.oracle_query_count} queries")
    builder.write_run(loci=loci_result, fci=fci_result)
    print(f"Artifacts: {settings.output_dir}")

    if loci_result is not None and fci_result is not None:
        difference = first_difference(loci_result.pag, fci_result.pag, "loci", "fci")
        if difference:
            print(f"PAGs differ: {difference}")
            return EXIT_MISMATCH
        print("PAGs are identical")
    return EXIT_OK


def cmd_compare(args, settings: Settings) -> int:
    config = _loci_config(settings)
    builder = ReportBuilder(output_dir=settings.output_dir)

    if args.fixture:
        trial = compare_on_dag(load_fixture(args.fixture), config)
        print(f"{args.fixture}: {'equal' if trial.ok else 'MISMATCH'}")
        if not trial.ok:
            print(f"  {trial.first_difference or trial.error or 'unsound statements'}")
            for atom in trial.unsound:
                print(f"  unsound: {atom}")
        return EXIT_OK if trial.ok else EXIT_MISMATCH

    spec = CampaignSpec(
        trials=args.trials if args.trials is not None else settings.trials,
        seed=settings.seed if settings.seed is not None else 0,
        loci=config,
    )
    workers = args.workers if args.workers is not None else settings.workers
    mine = Path(args.mine_fixtures) if args.mine_fixtures else None

    print("=" * 60)
    print(f"Equivalence campaign: {spec.trials} trials, seed {spec.seed}")
    print("=" * 60)
    report = run_campaign(spec, workers=workers, mine_fixtures=mine)
    filepath = builder.write_campaign(report)

    summary = report.summary()
    print(f"Equal: {summary['equal']} / {summary['trials']}")
    print(f"Brute-force checked: {summary['brute_force_checked']}")
    print(f"Report: {filepath}")
    missing = report.missing_coverage()
    if missing:
        print(f"Rules never fired: {', '.join(missing)}")
    if not report.ok:
        return EXIT_MISMATCH
    if args.require_coverage and missing:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_trace(args, settings: Settings) -> int:
    config = _loci_config(settings)
    if args.replay:
        result = _replay(args.replay, 1.0, config, settings.seed)
    else:
        result = run(DagOracle(_require_dag(_load_source(args))), config)
    atom = parse_atom(args.atom, result.observed)
    trace = derivation_of(result, atom)
    if args.json:
        print(json.dumps(trace_to_dict(trace), indent=2))
    else:
        print(format_trace(trace), end="")
    return EXIT_OK


def cmd_export(args, settings: Settings) -> int:
    graph = _load_source(args)
    if args.view == "mag":
        graph = project_to_mag(_require_dag(graph))
    elif args.view == "pag":
        graph = run(DagOracle(_require_dag(graph)), _loci_config(settings)).pag
    if args.format == "dot":
        text = to_dot(graph)
    elif args.format == "json":
        text = to_json(graph) + "\n"
    else:
        text = format_graph(graph)
    _emit(text, args.out)
    return EXIT_OK


def parse_atom(text: str, observed: Sequence[NodeId]) -> CausalAtom:
    """Parse ``X=>Y`` or ``X=>S`` against the run's observed nodes.

    Raises:
        InvalidArgumentError: Not of the form ``A=>B``.
        NotFoundError: A label that is not an observed node.
    """
    parts = [p.strip() for p in text.split("=>")]
    if len(parts) != 2 or not all(parts):
        raise InvalidArgumentError(f"expected an atom like 'X=>Y', got {text!r}")
    by_label = {n.label: n for n in observed}

    def lookup(label: str) -> NodeId:
        if label not in by_label:
            raise NotFoundError(f"no observed node labelled {label!r}")
        return by_label[label]

    source = lookup(parts[0])
    if parts[1] == SELECTION.value and parts[1] not in by_label:
        return CausalAtom(source, SELECTION)
    return CausalAtom(source, lookup(parts[1]))


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


def _add_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("graph", nargs="?", default=None, help="graph file in the native format")
    parser.add_argument(
        "--fixture", default=None, help=f"bundled DAG: {', '.join(list_fixtures())}"
    )


def _overrides(args) -> dict:
    return {
        "seed": args.seed,
        "max_cond": args.max_cond,
        "batch_closure": args.batch_closure,
        "strict_blocking": args.strict_blocking,
        "keep_wide_disjunctions": args.keep_wide_disjunctions,
        "output_dir": args.output_dir,
        "log_level": args.log_level.upper() if args.log_level else None,
    }


def _loci_config(settings: Settings, budget: Optional[int] = None) -> LociConfig:
    return LociConfig(
        max_cond=settings.max_cond,
        anytime_budget=budget,
        keep_wide_disjunctions=settings.keep_wide_disjunctions,
        seed=settings.seed,
        batch_closure=settings.batch_closure,
        strict_blocking=settings.strict_blocking,
    )


def _load_source(args) -> Graph:
    if args.fixture and args.graph:
        raise InvalidArgumentError("pass either a graph file or --fixture, not both")
    if args.fixture:
        return load_fixture(args.fixture)
    if args.graph:
        return load_graph(args.graph)
    raise InvalidArgumentError("no input: pass a graph file or --fixture")


def _require_dag(graph: Graph) -> CausalDag:
    if not isinstance(graph, CausalDag):
        raise InvalidArgumentError("this command needs a DAG; got a mixed graph")
    return graph


def _replay(path: str, fraction: float, config: LociConfig, seed: Optional[int]) -> LociResult:
    if not 0.0 < fraction <= 1.0:
        raise InvalidArgumentError(f"--replay-fraction must lie in (0, 1], got {fraction}")
    log = parse_fact_log(Path(path).read_text(encoding="utf-8"))
    facts = log.independences
    complete = log.complete
    if fraction < 1.0:
        keep = sorted(random.Random(seed or 0).sample(range(len(facts)), round(len(facts) * fraction)))
        facts = [facts[i] for i in keep]
        complete = False
        logger.info("Replaying %d of %d independences", len(facts), len(log.independences))
    return run_from_facts(
        facts, log.observed, config, complete=complete, selection_sinks=log.selection_sinks
    )


def _print_loci(result: LociResult) -> None:
    counts = result.statements.summary()
    print(
        f"LoCI: {len(result.ci_facts)} independences, {counts['facts']} causal facts, "
        f"{counts['negatives']} refuted, {counts['disjunctions']} open disjunctions"
    )
    if not result.complete:
        print("   (fact set incomplete: output is sound but may miss orientations)")
    print()
    print(format_graph(result.pag), end="")
    print()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"Wrote {out}")
    else:
        print(text, end="")


if __name__ == "__main__":
    sys.exit(main())
