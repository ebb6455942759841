"""Markdown and JSON artifacts for runs and campaigns"""
import json
import logging
import os
from typing import Dict, List, Optional

from src.discovery.fci import FciResult
from src.discovery.loci import LociResult, summary_dict
from src.generator.campaign import CampaignReport, TrialResult
from src.graphs.text_format import format_graph
from src.logic.trace import trace_to_dict
from src.oracles.fact_log import format_fact_log

logger = logging.getLogger(__name__)

COVERAGE_NOTES = {
    "R0b": "unshielded colliders",
    "R1": "noncolliders away from arrowheads",
    "R2": "arrowheads that avoid a directed cycle",
    "R3": "arrowheads into double-triangle apex",
    "R4a": "discriminating path, Z a noncollider",
    "R4b": "discriminating path, Z a collider",
    "R5": "uncovered circle paths",
    "R6": "tails after an undirected edge",
    "R7": "tails after a partially undirected edge",
    "R8": "tails closing a directed chain",
    "R9": "tails from uncovered potentially directed paths",
    "R10": "tails from two such paths",
}


class ReportBuilder:
    """Write run and campaign artifacts under one output directory.

    Deterministic files never carry timestamps; wall-clock numbers go to
    ``timings.json`` only.
    """

    def __init__(self, output_dir: str = "outputs"):
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)

    def write_run(
        self,
        loci: Optional[LociResult] = None,
        fci: Optional[FciResult] = None,
    ) -> List[str]:
        """Write the artifacts of one run.

        Args:
            loci: LoCI result; yields ``pag.loci.txt``, ``facts.log``,
                ``statements.log``, ``traces.json``.
            fci: FCI result; yields ``pag.fci.txt`` and ``fci_rules.log``.

        Returns:
            Paths of the written files, ``summary.json`` last.
        """
        written = []
        summary: Dict[str, dict] = {}
        if loci is not None:
            written.append(self._write("pag.loci.txt", format_graph(loci.pag)))
            written.append(
                self._write(
                    "facts.log",
                    format_fact_log(
                        loci.ci_facts,
                        loci.observed,
                        complete=loci.complete,
                        selection_sinks=loci.selection_sinks,
                    ),
                )
            )
            written.append(self._write("statements.log", _lines(loci.statements.statement_log())))
            written.append(self._write_json("traces.json", self._traces(loci)))
            summary["loci"] = summary_dict(loci)
            summary["loci"].pop("elapsed_seconds")
        if fci is not None:
            written.append(self._write("pag.fci.txt", format_graph(fci.pag)))
            written.append(self._write("fci_rules.log", _lines(fci.log_lines())))
            summary["fci"] = {
                "oracle_queries": fci.oracle_query_count,
                "rule_applications": len(fci.log),
                "edges": len(fci.pag.edges()),
            }
        if loci is not None and fci is not None:
            summary["equal"] = format_graph(loci.pag) == format_graph(fci.pag)
        written.append(self._write_json("summary.json", summary))
        logger.info("Wrote %d run artifacts to %s", len(written), self.output_dir)
        return written

    def write_campaign(self, report: CampaignReport) -> str:
        """Write ``campaign.md``, ``campaign.json``, ``timings.json`` and one
        directory per mismatching trial.

        Returns:
            File path of ``campaign.md``.
        """
        self._write_json("campaign.json", report.to_dict())
        self._write_json("timings.json", report.timings())
        for trial in report.mismatches:
            self._write_mismatch(trial)
        filepath = self._write("campaign.md", self._build_markdown(report))
        logger.info("Campaign report written to %s", filepath)
        return filepath

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------

    def _build_markdown(self, report: CampaignReport) -> str:
        lines = self._render_header(report)
        lines.extend(self._render_coverage(report.coverage()))
        if report.mismatches:
            lines.append("## Mismatches")
            lines.append("")
            for trial in report.mismatches:
                lines.extend(self._render_mismatch(trial))
        lines.extend(self._render_stats(report))
        return "\n".join(lines)

    @staticmethod
    def _render_header(report: CampaignReport) -> List[str]:
        spec = report.spec
        summary = report.summary()
        verdict = "all trials equal" if report.ok else f"{summary['mismatched']} mismatched"
        return [
            f"# Equivalence campaign | seed {spec.seed}",
            "",
            f"> Trials: {summary['trials']} ({verdict})",
            f"> Observed {spec.n_observed[0]}-{spec.n_observed[1]}, "
            f"latent {spec.n_latent[0]}-{spec.n_latent[1]}, "
            f"selection {spec.n_selection[0]}-{spec.n_selection[1]}, "
            f"edge probability {', '.join(str(p) for p in spec.edge_probabilities)}",
            "",
            "---",
            "",
        ]

    @staticmethod
    def _render_coverage(coverage: Dict[str, int]) -> List[str]:
        lines = ["## Rule coverage", "", "| Rules | Firings | Orients |", "|---|---|---|"]
        for group, count in coverage.items():
            marker = "" if count else " (never fired)"
            lines.append(f"| {group} | {count}{marker} | {COVERAGE_NOTES.get(group, '')} |")
        lines.append("")
        return lines

    @staticmethod
    def _render_mismatch(trial: TrialResult) -> List[str]:
        lines = [f"### Trial {trial.index} (seed {trial.seed})", ""]
        if trial.error:
            lines.append(f"- Error: `{trial.error}`")
        if trial.first_difference:
            lines.append(f"- First difference: {trial.first_difference}")
        for atom in trial.unsound:
            lines.append(f"- Unsound: `{atom}`")
        lines.append(f"- Artifacts: `trial_{trial.index}/`")
        lines.append("")
        return lines

    @staticmethod
    def _render_stats(report: CampaignReport) -> List[str]:
        summary = report.summary()
        return [
            "---",
            "",
            "## Totals",
            "",
            f"- Equal: {summary['equal']} / {summary['trials']}",
            f"- Brute-force checked: {summary['brute_force_checked']} "
            f"(equal {summary['brute_force_equal']})",
            f"- Trials with unsound statements: {summary['unsound_trials']}",
            f"- Errors: {summary['errors']}",
            f"- Oracle queries, LoCI: {summary['loci_queries_total']} "
            f"(mean {summary['loci_queries_mean']})",
            f"- Oracle queries, FCI: {summary['fci_queries_total']} "
            f"(mean {summary['fci_queries_mean']})",
            "",
        ]

    def _write_mismatch(self, trial: TrialResult) -> None:
        directory = os.path.join(self.output_dir, f"trial_{trial.index}")
        os.makedirs(directory, exist_ok=True)
        artifacts = trial.artifacts or {"dag.txt": trial.dag_text}
        for name, content in artifacts.items():
            with open(os.path.join(directory, name), "w", encoding="utf-8") as f:
                f.write(content)

    @staticmethod
    def _traces(result: LociResult) -> Dict[str, dict]:
        statements = result.statements
        return {
            str(s): trace_to_dict(s.trace)
            for s in [*statements.facts(), *statements.negatives(), *statements.disjunctions()]
        }

    def _write(self, filename: str, content: str) -> str:
        filepath = os.path.join(self.output_dir, filename)
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(content)
        return filepath

    def _write_json(self, filename: str, document) -> str:
        return self._write(filename, json.dumps(document, indent=2, sort_keys=True) + "\n")


def _lines(lines: List[str]) -> str:
    return "\n".join(lines) + "\n" if lines else ""
