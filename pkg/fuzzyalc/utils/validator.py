"""
Structural validation of knowledge bases against interpretations
"""

import logging
from typing import List, Sequence, Tuple

from fuzzyalc.syntax import Axiom, KnowledgeBase, render_axiom

logger = logging.getLogger(__name__)


class KnowledgeBaseValidator:
    """Checks that run before model checking, in the (is_valid, errors) style"""

    def validate_coverage(self, kb: KnowledgeBase, interpretation) -> Tuple[bool, List[str]]:
        """
        Every individual of the knowledge base must be mapped to a domain
        element. Concept and role names the interpretation does not list are
        reported as warnings only, since they read as constant 0.

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        signature = kb.signature

        for individual in sorted(signature.individuals):
            if individual not in interpretation.individuals:
                errors.append(f"Individual {individual} is not mapped to a domain element")

        for name in sorted(signature.concepts):
            if not interpretation.knows_concept(name):
                logger.warning(f"Concept {name} is not listed in the interpretation; reading it as 0")
        for name in sorted(signature.roles):
            if not interpretation.knows_role(name):
                logger.warning(f"Role {name} is not listed in the interpretation; reading it as 0")

        is_valid = len(errors) == 0
        if not is_valid:
            logger.warning(f"Interpretation does not cover the knowledge base: {errors}")
        return is_valid, errors

    def report_duplicates(self, axioms: Sequence[Axiom]) -> List[Axiom]:
        """Axioms that occur more than once; they are kept, only reported"""
        seen = set()
        duplicates = []
        for axiom in axioms:
            if axiom in seen:
                duplicates.append(axiom)
                logger.warning(f"Duplicate axiom found: {render_axiom(axiom)}")
            else:
                seen.add(axiom)
        return duplicates
