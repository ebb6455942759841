"""Export of derivation traces as documents and indented text"""
from typing import Dict, List

from src.models.statement import DerivationTrace


def trace_to_dict(trace: DerivationTrace) -> dict:
    """Flatten a trace DAG into ``{"root": id, "steps": [...]}``.

    Ids follow a depth-first preorder from the root, premises in order, so
    the document is stable for the same inputs. Shared steps appear once.
    """
    ids: Dict[int, int] = {}
    order: List[DerivationTrace] = []
    stack = [trace]
    while stack:
        step = stack.pop()
        if id(step) in ids:
            continue
        ids[id(step)] = len(order)
        order.append(step)
        stack.extend(reversed(step.premises))

    steps = []
    for step in order:
        entry = {
            "id": ids[id(step)],
            "step": step.step.value,
            "conclusion": step.conclusion,
            "premises": [ids[id(p)] for p in step.premises],
        }
        if step.fact is not None:
            entry["fact"] = str(step.fact)
        if step.destroyer is not None:
            entry["destroyer"] = step.destroyer.label
        if step.blocking is not None:
            entry["blocking"] = [n.label for n in step.blocking]
        steps.append(entry)
    return {"root": 0, "steps": steps}


def format_trace(trace: DerivationTrace, indent: str = "  ") -> str:
    """Indented tree; a step met a second time is printed as a back-reference."""
    document = trace_to_dict(trace)
    steps = document["steps"]
    lines: List[str] = []
    printed = set()

    def emit(step_id: int, depth: int) -> None:
        step = steps[step_id]
        prefix = indent * depth
        if step_id in printed:
            lines.append(f"{prefix}#{step_id} (see above)")
            return
        printed.add(step_id)
        lines.append(f"{prefix}#{step_id} [{step['step']}] {step['conclusion']}")
        for premise in step["premises"]:
            emit(premise, depth + 1)

    emit(document["root"], 0)
    return "\n".join(lines) + "\n"
