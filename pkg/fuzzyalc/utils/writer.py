"""
Serialization of knowledge bases and interpretations, plus report output
"""

import json
import logging
import os
from typing import Any, Dict

from fuzzyalc import config
from fuzzyalc.degrees import format_degree
from fuzzyalc.semantics import FiniteInterpretation, SatisfactionReport
from fuzzyalc.syntax import GciGeq, KnowledgeBase, render_axiom

logger = logging.getLogger(__name__)


def serialize_kb(kb: KnowledgeBase, unicode: bool = False) -> str:
    """
    Canonical knowledge-base text. Adjacent halves of an expanded
    equivalence are written back as one ``==`` line; the ASCII form parses
    back to an equal knowledge base.
    """
    lines = ["abox:"]
    lines.extend(render_axiom(axiom, unicode) for axiom in kb.abox)
    lines.append("tbox:")
    tbox = kb.tbox
    index = 0
    while index < len(tbox):
        axiom = tbox[index]
        if index + 1 < len(tbox) and _is_equivalence_pair(axiom, tbox[index + 1]):
            lines.append(render_axiom(axiom.origin, unicode))
            index += 2
            continue
        lines.append(render_axiom(axiom, unicode))
        index += 1
    return "\n".join(lines) + "\n"


def _is_equivalence_pair(first: GciGeq, second: GciGeq) -> bool:
    origin = first.origin
    return (origin is not None and second.origin == origin
            and first.sub == origin.left and first.sup == origin.right
            and second.sub == origin.right and second.sup == origin.left
            and first.degree == 1 and second.degree == 1)


def serialize_interpretation(interpretation: FiniteInterpretation) -> str:
    """Canonical interpretation text: names sorted, entries in domain order"""
    lines = [f"domain: {' '.join(interpretation.domain)}"]
    if interpretation.individuals:
        lines.append("individuals:")
        lines.extend(f"  {name} = {element}" for name, element in interpretation.individuals.items())
    for name, values in interpretation.concepts.items():
        lines.append(f"concept {name}:")
        default = interpretation.concept_defaults[name]
        if default != 0:
            lines.append(f"  default = {format_degree(default)}")
        lines.extend(f"  {element} = {format_degree(value)}" for element, value in values.items())
    for name, values in interpretation.roles.items():
        lines.append(f"role {name}:")
        default = interpretation.role_defaults[name]
        if default != 0:
            lines.append(f"  default = {format_degree(default)}")
        lines.extend(f"  ({x}, {y}) = {format_degree(value)}" for (x, y), value in values.items())
    return "\n".join(lines) + "\n"


def interpretation_to_dict(interpretation: FiniteInterpretation) -> Dict[str, Any]:
    return {
        "domain": list(interpretation.domain),
        "individuals": dict(interpretation.individuals),
        "concepts": {
            name: {
                "default": format_degree(interpretation.concept_defaults[name]),
                "values": {x: format_degree(v) for x, v in values.items()},
            }
            for name, values in interpretation.concepts.items()
        },
        "roles": {
            name: {
                "default": format_degree(interpretation.role_defaults[name]),
                "values": [[x, y, format_degree(v)] for (x, y), v in values.items()],
            }
            for name, values in interpretation.roles.items()
        },
    }


def satisfaction_to_dict(report: SatisfactionReport) -> Dict[str, Any]:
    return {
        "satisfied": report.satisfied,
        "axioms": [
            {
                "axiom": render_axiom(result.axiom),
                "satisfied": result.satisfied,
                "achieved": format_degree(result.achieved),
                "required": format_degree(result.required),
            }
            for result in report.results
        ],
    }


def to_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=config.JSON_INDENT, ensure_ascii=False)


def write_text(path: str, text: str):
    """Write a text file, creating parent directories"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    logger.info(f"Saved {path}")
