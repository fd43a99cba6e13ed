"""
Text parsing for knowledge bases and finite interpretations

Knowledge-base files are line oriented: an "abox:" or "tbox:" header opens
a section and every following non-blank line holds one axiom. Axioms and
concepts are parsed with a Lark LALR grammar; interpretation files are
parsed line by line with regular expressions.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from fuzzyalc import config
from fuzzyalc.degrees import parse_degree
from fuzzyalc.errors import DegreeError, InterpretationError, KbSyntaxError
from fuzzyalc.semantics import FiniteInterpretation
from fuzzyalc.syntax import BOTTOM, TOP, And, Atomic, Concept, ConceptEq, ConceptGeq, ConceptLeq, Equivalence, \
    Exists, Forall, GciGeq, KnowledgeBase, Not, Or, RoleGeq, expand_shorthands
from fuzzyalc.utils.validator import KnowledgeBaseValidator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a problem in the originating text"""

    line: int
    column: int
    length: int = 1


AXIOM_GRAMMAR = r"""
    axiom: "(" NAME ":" concept ")" (RELATION DEGREE)?                -> concept_assertion
         | "(" "(" NAME "," NAME ")" ":" NAME ")" (RELATION DEGREE)?   -> role_assertion
         | "(" concept SUB concept ")" (RELATION DEGREE)?              -> graded_gci
         | concept SUB concept                                         -> bare_gci
         | concept EQUIV concept                                       -> equivalence

    ?concept: disj
    ?disj: conj
         | conj "or" disj              -> disjunction
    ?conj: unary
         | unary "and" conj            -> conjunction
    ?unary: "not" unary                -> negation
          | "forall" NAME "." unary    -> forall
          | "exists" NAME "." unary    -> exists
          | primary
    ?primary: "Top"                    -> top
            | "Bot"                    -> bottom
            | NAME                     -> atomic
            | "(" concept ")"

    SUB: "sub"
    EQUIV.2: "=="
    RELATION: ">=" | "<=" | "="
    NAME: /[A-Za-z][A-Za-z0-9_]*(?:'[0-9]*)?/
    DEGREE: /[0-9]+\/[0-9]+|[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+/

    %import common.WS_INLINE
    %ignore WS_INLINE
"""

_SECTION_PATTERN = re.compile(r'^\s*(abox|tbox)\s*:\s*$', re.IGNORECASE)

_TERMINAL_TEXT = {
    "LPAR": "(", "RPAR": ")", "COLON": ":", "COMMA": ",", "DOT": ".",
    "SUB": "sub", "EQUIV": "==", "RELATION": ">=, <= or =", "NAME": "name", "DEGREE": "degree",
    "AND": "and", "OR": "or", "NOT": "not", "FORALL": "forall", "EXISTS": "exists",
    "TOP": "Top", "BOT": "Bot", "$END": "end of line",
}


class _ParseIssue(Exception):
    """Raised inside the tree transformer; unwrapped into KbSyntaxError"""

    def __init__(self, message: str, token: Optional[Token]):
        super().__init__(message)
        self.message = message
        self.token = token


@v_args(inline=True)
class _AxiomBuilder(Transformer):
    """Turns parse trees into syntax objects"""

    def __init__(self, allow_fresh: bool):
        super().__init__()
        self.allow_fresh = allow_fresh

    def _name(self, token: Token) -> str:
        name = str(token)
        if config.FRESH_MARKER in name and not self.allow_fresh:
            raise _ParseIssue(f"name {name!r} uses the reserved fresh-name marker", token)
        return name

    def _degree(self, token: Token) -> Fraction:
        try:
            return parse_degree(str(token))
        except DegreeError as e:
            raise _ParseIssue(str(e), token)

    def top(self):
        return TOP

    def bottom(self):
        return BOTTOM

    def atomic(self, name):
        return Atomic(self._name(name))

    def negation(self, operand):
        return Not(operand)

    def conjunction(self, left, right):
        return And(left, right)

    def disjunction(self, left, right):
        return Or(left, right)

    def forall(self, role, filler):
        return Forall(self._name(role), filler)

    def exists(self, role, filler):
        return Exists(self._name(role), filler)

    def concept_assertion(self, individual, concept, relation=None, degree=None):
        name = self._name(individual)
        if relation is None:
            return ConceptGeq(name, concept, Fraction(1))
        value = self._degree(degree)
        if relation == ">=":
            return ConceptGeq(name, concept, value)
        if relation == "<=":
            return ConceptLeq(name, concept, value)
        return ConceptEq(name, concept, value)

    def role_assertion(self, subject, obj, role, relation=None, degree=None):
        if relation is None:
            return RoleGeq(self._name(subject), self._name(obj), self._name(role), Fraction(1))
        if relation != ">=":
            raise _ParseIssue("role upper bounds are not in the language: "
                              "role assertions only take a lower bound (>=)", relation)
        return RoleGeq(self._name(subject), self._name(obj), self._name(role), self._degree(degree))

    def graded_gci(self, sub, _keyword, sup, relation=None, degree=None):
        if relation is None:
            return GciGeq(sub, sup, Fraction(1))
        if relation != ">=":
            raise _ParseIssue("inclusion axioms only take a lower bound (>=)", relation)
        return GciGeq(sub, sup, self._degree(degree))

    def bare_gci(self, sub, _keyword, sup):
        return GciGeq(sub, sup, Fraction(1))

    def equivalence(self, left, _keyword, right):
        return Equivalence(left, right)


class KnowledgeBaseParser:
    """Parses knowledge-base text and single concept expressions"""

    def __init__(self):
        self.lark = Lark(AXIOM_GRAMMAR, start=["axiom", "concept"], parser="lalr", lexer="basic")
        self.validator = KnowledgeBaseValidator()

    def parse_kb(self, text: str, allow_fresh: bool = False) -> KnowledgeBase:
        """
        Parse a knowledge-base file and expand its shorthands.

        Raises KbSyntaxError (with a SourceSpan) on any malformed input.
        """
        section = None
        items = []
        for lineno, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.split("#", 1)[0]
            if not line.strip():
                continue
            header = _SECTION_PATTERN.match(line)
            if header:
                section = header.group(1).lower()
                continue
            column = len(line) - len(line.lstrip()) + 1
            if section is None:
                raise KbSyntaxError("axiom outside of an 'abox:' or 'tbox:' section",
                                    SourceSpan(lineno, column, len(line.strip())))
            item = self._parse_line(line, lineno, "axiom", allow_fresh)
            is_abox_item = isinstance(item, (ConceptGeq, ConceptLeq, ConceptEq, RoleGeq))
            if section == "abox" and not is_abox_item:
                raise KbSyntaxError("inclusion or equivalence inside the abox section",
                                    SourceSpan(lineno, column, len(line.strip())))
            if section == "tbox" and is_abox_item:
                raise KbSyntaxError("assertion inside the tbox section",
                                    SourceSpan(lineno, column, len(line.strip())))
            items.append(item)
        kb = expand_shorthands(items)
        self.validator.report_duplicates(kb.axioms)
        logger.debug(f"Parsed knowledge base: {len(kb.abox)} ABox and {len(kb.tbox)} TBox axioms")
        return kb

    def parse_concept(self, text: str, allow_fresh: bool = False) -> Concept:
        if "\n" in text.strip():
            raise KbSyntaxError("a concept expression must fit on one line", SourceSpan(1, 1, len(text)))
        return self._parse_line(text, 1, "concept", allow_fresh)

    def _parse_line(self, line: str, lineno: int, start: str, allow_fresh: bool):
        try:
            tree = self.lark.parse(line, start=start)
        except UnexpectedInput as e:
            raise self._syntax_error(e, line, lineno) from None
        try:
            return _AxiomBuilder(allow_fresh).transform(tree)
        except VisitError as e:
            issue = e.orig_exc
            if isinstance(issue, _ParseIssue):
                token = issue.token
                span = SourceSpan(lineno, getattr(token, "column", None) or 1, max(1, len(str(token or ""))))
                raise KbSyntaxError(issue.message, span) from None
            raise KbSyntaxError(f"could not build syntax tree: {issue}", SourceSpan(lineno, 1, len(line))) from None
        except RecursionError:
            raise KbSyntaxError("expression is nested too deeply", SourceSpan(lineno, 1, len(line))) from None

    def _syntax_error(self, error: UnexpectedInput, line: str, lineno: int) -> KbSyntaxError:
        if isinstance(error, UnexpectedToken):
            token = error.token
            if token.type == "$END":
                column, length = len(line.rstrip()) + 1, 1
                message = "unexpected end of line"
            else:
                column, length = token.column or 1, max(1, len(str(token)))
                message = f"unexpected {str(token)!r}"
            expected = error.expected
        elif isinstance(error, UnexpectedCharacters):
            column, length = error.column or 1, 1
            character = line[column - 1] if 0 < column <= len(line) else ""
            message = f"unexpected character {character!r}"
            expected = error.allowed or ()
        elif isinstance(error, UnexpectedEOF):
            column, length = len(line.rstrip()) + 1, 1
            message = "unexpected end of line"
            expected = error.expected
        else:
            column, length = 1, max(1, len(line))
            message = "syntax error"
            expected = ()
        return KbSyntaxError(message, SourceSpan(lineno, column, length),
                             [_TERMINAL_TEXT.get(name, name) for name in (expected or ())])


_ELEMENT = r'[A-Za-z0-9_]+'
_CONCEPT_NAME = r"[A-Za-z][A-Za-z0-9_]*(?:'[0-9]*)?"

_DOMAIN_HEADER = re.compile(r'^\s*domain\s*:(.*)$', re.IGNORECASE)
_INDIVIDUALS_HEADER = re.compile(r'^\s*individuals\s*:\s*$', re.IGNORECASE)
_CONCEPT_HEADER = re.compile(rf'^\s*concept\s+({_CONCEPT_NAME})\s*:\s*$', re.IGNORECASE)
_ROLE_HEADER = re.compile(rf'^\s*role\s+({_CONCEPT_NAME})\s*:\s*$', re.IGNORECASE)
_DEFAULT_ENTRY = re.compile(r'^\s*default\s*=\s*(\S+)\s*$', re.IGNORECASE)
_INDIVIDUAL_ENTRY = re.compile(rf'^\s*({_CONCEPT_NAME})\s*=\s*({_ELEMENT})\s*$')
_ELEMENT_ENTRY = re.compile(rf'^\s*({_ELEMENT})\s*=\s*(\S+)\s*$')
_PAIR_ENTRY = re.compile(rf'^\s*\(\s*({_ELEMENT})\s*,\s*({_ELEMENT})\s*\)\s*=\s*(\S+)\s*$')
_ELEMENT_LIST = re.compile(_ELEMENT)


class InterpretationParser:
    """Parses the finite-interpretation file format"""

    def parse(self, text: str) -> FiniteInterpretation:
        domain: List[str] = []
        domain_line = None
        individuals: Dict[str, str] = {}
        concepts: Dict[str, Dict[str, Fraction]] = {}
        roles: Dict[str, Dict[Tuple[str, str], Fraction]] = {}
        concept_defaults: Dict[str, Fraction] = {}
        role_defaults: Dict[str, Fraction] = {}
        section: Optional[Tuple[str, Optional[str]]] = None

        for lineno, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.split("#", 1)[0]
            if not line.strip():
                continue

            match = _DOMAIN_HEADER.match(line)
            if match:
                if domain_line is not None:
                    raise KbSyntaxError("domain declared twice", SourceSpan(lineno, 1, len(line)))
                domain_line = lineno
                section = ("domain", None)
                self._add_elements(domain, match.group(1), line, match.start(1), lineno)
                continue
            if _INDIVIDUALS_HEADER.match(line):
                section = ("individuals", None)
                continue
            match = _CONCEPT_HEADER.match(line)
            if match:
                name = match.group(1)
                if name in concepts:
                    raise KbSyntaxError(f"concept {name} listed twice", self._span(line, lineno, match, 1))
                concepts[name] = {}
                concept_defaults[name] = Fraction(0)
                section = ("concept", name)
                continue
            match = _ROLE_HEADER.match(line)
            if match:
                name = match.group(1)
                if name in roles:
                    raise KbSyntaxError(f"role {name} listed twice", self._span(line, lineno, match, 1))
                roles[name] = {}
                role_defaults[name] = Fraction(0)
                section = ("role", name)
                continue

            if section is None:
                raise KbSyntaxError("entry outside of any section", SourceSpan(lineno, 1, len(line.strip())))
            kind, name = section
            if kind != "domain" and domain_line is None:
                raise KbSyntaxError("the domain must be declared before it is used", SourceSpan(lineno, 1, 1))

            if kind == "domain":
                self._add_elements(domain, line, line, 0, lineno)
            elif kind == "individuals":
                match = self._expect(_INDIVIDUAL_ENTRY, line, lineno, "individual = element")
                self._check_element(domain, line, lineno, match, 2)
                if match.group(1) in individuals:
                    raise KbSyntaxError(f"individual {match.group(1)} mapped twice",
                                        self._span(line, lineno, match, 1))
                individuals[match.group(1)] = match.group(2)
            elif kind == "concept":
                default = _DEFAULT_ENTRY.match(line)
                if default:
                    concept_defaults[name] = self._degree(line, lineno, default, 1)
                    continue
                match = self._expect(_ELEMENT_ENTRY, line, lineno, "element = degree")
                self._check_element(domain, line, lineno, match, 1)
                if match.group(1) in concepts[name]:
                    raise KbSyntaxError(f"duplicate entry for {match.group(1)}", self._span(line, lineno, match, 1))
                concepts[name][match.group(1)] = self._degree(line, lineno, match, 2)
            else:
                default = _DEFAULT_ENTRY.match(line)
                if default:
                    role_defaults[name] = self._degree(line, lineno, default, 1)
                    continue
                match = self._expect(_PAIR_ENTRY, line, lineno, "(element, element) = degree")
                self._check_element(domain, line, lineno, match, 1)
                self._check_element(domain, line, lineno, match, 2)
                pair = (match.group(1), match.group(2))
                if pair in roles[name]:
                    raise KbSyntaxError(f"duplicate entry for {pair}", self._span(line, lineno, match, 1))
                roles[name][pair] = self._degree(line, lineno, match, 3)

        if not domain:
            span = SourceSpan(domain_line or 1, 1, 7)
            raise KbSyntaxError("domain must be nonempty", span)
        try:
            return FiniteInterpretation(tuple(domain), concepts, roles, individuals, concept_defaults, role_defaults)
        except InterpretationError as e:
            raise KbSyntaxError(str(e), SourceSpan(domain_line or 1, 1, 1)) from None

    def _add_elements(self, domain: List[str], chunk: str, line: str, offset: int, lineno: int):
        cleaned = chunk.replace(",", " ")
        position = 0
        for part in cleaned.split():
            position = cleaned.index(part, position)
            column = offset + position + 1
            if not re.fullmatch(_ELEMENT, part) or part.lower() == "default":
                raise KbSyntaxError(f"invalid element name {part!r}", SourceSpan(lineno, column, len(part)))
            if part in domain:
                raise KbSyntaxError(f"element {part} listed twice", SourceSpan(lineno, column, len(part)))
            domain.append(part)
            position += len(part)

    def _expect(self, pattern, line: str, lineno: int, shape: str):
        match = pattern.match(line)
        if not match:
            column = len(line) - len(line.lstrip()) + 1
            raise KbSyntaxError(f"malformed entry, expected '{shape}'", SourceSpan(lineno, column, len(line.strip())),
                                [shape])
        return match

    def _check_element(self, domain: List[str], line: str, lineno: int, match, group: int):
        if match.group(group) not in domain:
            raise KbSyntaxError(f"unknown element {match.group(group)!r}", self._span(line, lineno, match, group))

    def _degree(self, line: str, lineno: int, match, group: int) -> Fraction:
        try:
            return parse_degree(match.group(group))
        except DegreeError as e:
            raise KbSyntaxError(str(e), self._span(line, lineno, match, group)) from None

    @staticmethod
    def _span(line: str, lineno: int, match, group: int) -> SourceSpan:
        return SourceSpan(lineno, match.start(group) + 1, max(1, len(match.group(group))))


_KB_PARSER: Optional[KnowledgeBaseParser] = None


def _kb_parser() -> KnowledgeBaseParser:
    global _KB_PARSER
    if _KB_PARSER is None:
        _KB_PARSER = KnowledgeBaseParser()
    return _KB_PARSER


def parse_kb(text: str, allow_fresh: bool = False) -> KnowledgeBase:
    return _kb_parser().parse_kb(text, allow_fresh)


def parse_concept(text: str, allow_fresh: bool = False) -> Concept:
    return _kb_parser().parse_concept(text, allow_fresh)


def parse_interpretation(text: str) -> FiniteInterpretation:
    return InterpretationParser().parse(text)


def read_kb(path: str, allow_fresh: bool = False) -> KnowledgeBase:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_kb(f.read(), allow_fresh)


def read_interpretation(path: str) -> FiniteInterpretation:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_interpretation(f.read())
