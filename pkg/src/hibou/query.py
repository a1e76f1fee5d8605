"""Conjunctive queries over entailed facts.

Query text is a comma-separated list of atoms::

    Type(?x, Patient), PropertyValue(?x, reco, ?t)
    SubClassOf(?c, Treatment)

Three atom kinds: Type (instance check), PropertyValue (entailed role edge
between individuals, or asserted data value), SubClassOf (entailed
subsumption).  Terms are variables (``?name``) or constants; class
variables range over declared class names, individual variables over ABox
individuals.  Evaluation is a naive nested-loop join in atom order; results
are deduplicated and sorted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .errors import SyntaxParseError, UnknownNameError
from .hfs import format_literal
from .model import Atomic, LiteralValue, NAME_RE, Ontology, THING_NAME
from .reasoner import Taxonomy, entails_instance, entails_subclass

MAX_VARIABLES = 8


@dataclass(frozen=True)
class Var:
    name: str


Term = Union[Var, str]
ValueTerm = Union[Var, str, bool, int, float]


@dataclass(frozen=True)
class TypeAtom:
    term: Term
    cls: Term


@dataclass(frozen=True)
class PropertyValueAtom:
    subject: Term
    prop: str
    value: ValueTerm
    value_is_literal: bool


@dataclass(frozen=True)
class SubClassOfAtom:
    sub: Term
    sup: Term


Atom = Union[TypeAtom, PropertyValueAtom, SubClassOfAtom]


@dataclass(frozen=True)
class Query:
    atoms: tuple[Atom, ...]

    def variables(self) -> list[str]:
        out: set[str] = set()
        for atom in self.atoms:
            for term in _atom_terms(atom):
                if isinstance(term, Var):
                    out.add(term.name)
        return sorted(out)


def _atom_terms(atom: Atom) -> tuple:
    if isinstance(atom, TypeAtom):
        return (atom.term, atom.cls)
    if isinstance(atom, PropertyValueAtom):
        return (atom.subject, atom.value)
    return (atom.sub, atom.sup)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_query(text: str) -> Query:
    if not text.strip():
        raise SyntaxParseError("empty query")
    raw_tokens = _tokenize_query(text)
    atoms: list[Atom] = []
    pos = 0

    def expect(kind: str) -> _QTok:
        nonlocal pos
        if pos >= len(raw_tokens):
            raise SyntaxParseError("unexpected end of query")
        tok = raw_tokens[pos]
        if tok.kind != kind:
            raise SyntaxParseError(f"expected {kind}, got {tok.text!r}")
        pos += 1
        return tok

    def term() -> tuple[object, bool]:
        """Returns (value, is_literal)."""
        nonlocal pos
        if pos >= len(raw_tokens):
            raise SyntaxParseError("unexpected end of query")
        tok = raw_tokens[pos]
        pos += 1
        if tok.kind == "var":
            return Var(tok.text), False
        if tok.kind == "name":
            return tok.text, False
        if tok.kind in ("number", "string", "bool"):
            return tok.value, True
        raise SyntaxParseError(f"unexpected token {tok.text!r}")

    while pos < len(raw_tokens):
        head = expect("name")
        expect("(")
        if head.text == "Type":
            t, t_lit = term()
            c, c_lit = term()
            if t_lit or c_lit:
                raise SyntaxParseError("Type takes a term and a class term")
            atoms.append(TypeAtom(t, c))
        elif head.text == "PropertyValue":
            s, s_lit = term()
            p, p_lit = term()
            if s_lit or p_lit or isinstance(p, Var) or not isinstance(p, str):
                raise SyntaxParseError("PropertyValue property must be a name")
            v, v_lit = term()
            atoms.append(PropertyValueAtom(s, p, v, v_lit))
        elif head.text == "SubClassOf":
            a, a_lit = term()
            b, b_lit = term()
            if a_lit or b_lit:
                raise SyntaxParseError("SubClassOf takes two class terms")
            atoms.append(SubClassOfAtom(a, b))
        else:
            raise SyntaxParseError(f"unknown atom kind {head.text}")
        expect(")")

    if not atoms:
        raise SyntaxParseError("empty query")
    query = Query(tuple(atoms))
    if len(query.variables()) > MAX_VARIABLES:
        raise SyntaxParseError(f"more than {MAX_VARIABLES} variables")
    return query


@dataclass(frozen=True)
class _QTok:
    kind: str  # "var" | "name" | "number" | "string" | "bool" | "(" | ")"
    text: str
    value: object


_BREAK = set(' \t\r\n(),"')


def _tokenize_query(text: str) -> list[_QTok]:
    out: list[_QTok] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n,":
            i += 1
            continue
        if ch in "()":
            out.append(_QTok(ch, ch, ch))
            i += 1
            continue
        if ch == '"':
            j = i + 1
            chars: list[str] = []
            while True:
                if j >= n or text[j] == "\n":
                    raise SyntaxParseError("unterminated string literal in query")
                if text[j] == "\\" and j + 1 < n and text[j + 1] in ('"', "\\"):
                    chars.append(text[j + 1])
                    j += 2
                    continue
                if text[j] == '"':
                    j += 1
                    break
                chars.append(text[j])
                j += 1
            out.append(_QTok("string", "".join(chars), "".join(chars)))
            i = j
            continue
        if ch == "?":
            j = i + 1
            while j < n and text[j] not in _BREAK and text[j] != "?":
                j += 1
            name = text[i + 1 : j]
            if not NAME_RE.match(name):
                raise SyntaxParseError(f"bad variable name {name!r}")
            out.append(_QTok("var", name, name))
            i = j
            continue
        j = i
        while j < n and text[j] not in _BREAK and text[j] != "?":
            j += 1
        word = text[i:j]
        i = j
        if word == "true":
            out.append(_QTok("bool", word, True))
        elif word == "false":
            out.append(_QTok("bool", word, False))
        else:
            stripped = word[1:] if word and word[0] in "+-" else word
            if stripped and stripped.replace(".", "", 1).isdigit() and not stripped.startswith(".") and not stripped.endswith("."):
                out.append(_QTok("number", word, float(word) if "." in word else int(word)))
            elif NAME_RE.match(word):
                out.append(_QTok("name", word, word))
            else:
                raise SyntaxParseError(f"unrecognized query token {word!r}")
    return out


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def answer(taxonomy: Taxonomy, onto: Ontology, query: Query) -> list[dict[str, LiteralValue]]:
    """All assignments making every atom entailed, deduplicated and sorted."""
    _check_names(onto, query)
    class_universe = sorted(onto.classes)
    individual_universe = sorted(onto.abox.individuals)
    object_pairs: dict[str, list[tuple[str, str]]] = {}
    proxy_to_ind = {proxy: ind for ind, proxy in taxonomy.individual_proxies.items()}
    for source, role, target in sorted(taxonomy.role_edges):
        s_ind = proxy_to_ind.get(source)
        t_ind = proxy_to_ind.get(target)
        if s_ind is not None and t_ind is not None:
            object_pairs.setdefault(role, []).append((s_ind, t_ind))

    solutions: list[dict[str, LiteralValue]] = []

    def walk(atom_idx: int, binding: dict[str, LiteralValue]) -> None:
        if atom_idx == len(query.atoms):
            if binding not in solutions:
                solutions.append(dict(binding))
            return
        atom = query.atoms[atom_idx]
        for extension in _matches(taxonomy, onto, atom, binding, class_universe, individual_universe, object_pairs):
            merged = dict(binding)
            merged.update(extension)
            walk(atom_idx + 1, merged)

    walk(0, {})
    solutions.sort(key=_solution_key)
    return solutions


def _solution_key(solution: dict[str, LiteralValue]) -> tuple:
    return tuple((var, _canonical(solution[var])) for var in sorted(solution))


def _canonical(value: LiteralValue) -> str:
    if isinstance(value, str):
        return value
    return format_literal(value)


def _check_names(onto: Ontology, query: Query) -> None:
    for atom in query.atoms:
        if isinstance(atom, TypeAtom):
            if isinstance(atom.term, str) and atom.term not in onto.abox.individuals:
                raise UnknownNameError(f"unknown individual {atom.term}")
            if isinstance(atom.cls, str) and atom.cls != THING_NAME and atom.cls not in onto.classes:
                raise UnknownNameError(f"unknown class {atom.cls}")
        elif isinstance(atom, PropertyValueAtom):
            if not onto.is_property(atom.prop):
                raise UnknownNameError(f"unknown property {atom.prop}")
            if isinstance(atom.subject, str) and atom.subject not in onto.abox.individuals:
                raise UnknownNameError(f"unknown individual {atom.subject}")
            if (
                atom.prop in onto.object_props
                and isinstance(atom.value, str)
                and not atom.value_is_literal
                and not isinstance(atom.value, Var)
                and atom.value not in onto.abox.individuals
            ):
                raise UnknownNameError(f"unknown individual {atom.value}")
        else:
            for cls in (atom.sub, atom.sup):
                if isinstance(cls, str) and cls != THING_NAME and cls not in onto.classes:
                    raise UnknownNameError(f"unknown class {cls}")


def _resolve(term: object, binding: dict[str, LiteralValue]) -> object:
    if isinstance(term, Var):
        return binding.get(term.name, term)
    return term


def _matches(
    taxonomy: Taxonomy,
    onto: Ontology,
    atom: Atom,
    binding: dict[str, LiteralValue],
    class_universe: list[str],
    individual_universe: list[str],
    object_pairs: dict[str, list[tuple[str, str]]],
):
    if isinstance(atom, TypeAtom):
        term = _resolve(atom.term, binding)
        cls = _resolve(atom.cls, binding)
        ind_candidates = individual_universe if isinstance(term, Var) else [term]
        cls_candidates = class_universe if isinstance(cls, Var) else [cls]
        for ind in ind_candidates:
            for c in cls_candidates:
                if entails_instance(taxonomy, Atomic(c), ind):
                    ext: dict[str, LiteralValue] = {}
                    if isinstance(term, Var):
                        ext[term.name] = ind
                    if isinstance(cls, Var):
                        ext[cls.name] = c
                    yield ext
    elif isinstance(atom, PropertyValueAtom):
        subject = _resolve(atom.subject, binding)
        value = _resolve(atom.value, binding)
        if atom.prop in onto.object_props:
            for s_ind, t_ind in object_pairs.get(atom.prop, []):
                if not isinstance(subject, Var) and subject != s_ind:
                    continue
                if not isinstance(value, Var) and value != t_ind:
                    continue
                ext = {}
                if isinstance(subject, Var):
                    ext[subject.name] = s_ind
                if isinstance(value, Var):
                    ext[value.name] = t_ind
                yield ext
        else:
            for (prop, ind), lit in sorted(onto.abox.data_assertions.items(), key=lambda kv: (kv[0][0], kv[0][1])):
                if prop != atom.prop:
                    continue
                if not isinstance(subject, Var) and subject != ind:
                    continue
                if not isinstance(value, Var) and not _literal_eq(value, lit):
                    continue
                ext = {}
                if isinstance(subject, Var):
                    ext[subject.name] = ind
                if isinstance(value, Var):
                    ext[value.name] = lit
                yield ext
    else:
        sub = _resolve(atom.sub, binding)
        sup = _resolve(atom.sup, binding)
        sub_candidates = class_universe if isinstance(sub, Var) else [sub]
        sup_candidates = class_universe if isinstance(sup, Var) else [sup]
        for c in sub_candidates:
            for d in sup_candidates:
                if entails_subclass(taxonomy, c, d):
                    ext = {}
                    if isinstance(sub, Var):
                        ext[sub.name] = c
                    if isinstance(sup, Var):
                        ext[sup.name] = d
                    yield ext


def _literal_eq(a: object, b: object) -> bool:
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def bindings_to_json(solutions: list[dict[str, LiteralValue]]) -> str:
    return json.dumps(solutions, sort_keys=True, separators=(",", ":")) + "\n"
