"""Hibou Functional Syntax (HFS): tokenizer, parser and serializer.

HFS is a line-oriented functional text format for ontologies.  ``#`` starts
a comment running to end of line, tokens are whitespace-separated and every
construct is one parenthesized form::

    Ontology(onc)
    Class(Patient)  ObjectProperty(reco)  DataProperty(age)
    SubClassOf(ElderlyPatient ObjectSomeValuesFrom(reco Chemotherapy))
    DataPropertyRange(age Interval(0 130))
    ClassAssertion(Patient i)
    DataPropertyAssertion(age i 76)

Declarations may appear anywhere in the document (two-pass resolution).
Serialization is deterministic: declarations sorted by kind then name,
axioms and assertions in insertion order, UTF-8, LF newlines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import (
    DuplicateDataAssertionError,
    DuplicateDeclarationError,
    EmptyIntervalError,
    Location,
    RangeViolationError,
    SyntaxParseError,
    UndeclaredNameError,
)
from .model import (
    Atomic,
    Axiom,
    BoolEq,
    ClassExpr,
    DataPropertyDomain,
    DataPropertyRange,
    DataSome,
    EquivalentClasses,
    Facet,
    IntersectionOf,
    Interval,
    LiteralValue,
    NAME_RE,
    facet_contains,
    ObjectPropertyDomain,
    ObjectSome,
    OneOf,
    Ontology,
    SubClassOf,
    THING,
    THING_NAME,
)

# ---------------------------------------------------------------------------
# Tokenizer (shared with the UI-config dialect)
# ---------------------------------------------------------------------------

WORD_CHARS_BREAK = set(' \t\r\n()"#')


@dataclass(frozen=True)
class Token:
    kind: str  # "name" | "number" | "string" | "bool" | "inf" | "(" | ")"
    text: str
    value: object
    loc: Location


def _classify_word(word: str, loc: Location) -> Token:
    if word in ("-inf", "+inf"):
        return Token("inf", word, float("-inf") if word == "-inf" else float("inf"), loc)
    if word == "true":
        return Token("bool", word, True, loc)
    if word == "false":
        return Token("bool", word, False, loc)
    stripped = word[1:] if word and word[0] in "+-" else word
    if stripped and stripped.replace(".", "", 1).isdigit() and not stripped.startswith(".") and not stripped.endswith("."):
        if "." in stripped:
            return Token("number", word, float(word), loc)
        return Token("number", word, int(word), loc)
    if NAME_RE.match(word):
        return Token("name", word, word, loc)
    raise SyntaxParseError(f"unrecognized token {word!r}", loc)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        loc = Location(line, col)
        if ch in "()":
            tokens.append(Token(ch, ch, ch, loc))
            i += 1
            col += 1
            continue
        if ch == '"':
            i += 1
            col += 1
            chars: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise SyntaxParseError("unterminated string literal", loc)
                c = text[i]
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in ('"', "\\"):
                        raise SyntaxParseError("bad escape in string literal", Location(line, col))
                    chars.append(text[i + 1])
                    i += 2
                    col += 2
                    continue
                if c == '"':
                    i += 1
                    col += 1
                    break
                chars.append(c)
                i += 1
                col += 1
            tokens.append(Token("string", "".join(chars), "".join(chars), loc))
            continue
        start = i
        while i < n and text[i] not in WORD_CHARS_BREAK:
            i += 1
        word = text[start:i]
        col += len(word)
        tokens.append(_classify_word(word, loc))
    return tokens


# ---------------------------------------------------------------------------
# Generic form reader: Name( arg arg ... ) with nesting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Form:
    head: str
    args: tuple["FormArg", ...]
    loc: Location


FormArg = Union[Token, Form]


def read_forms(tokens: list[Token]) -> list[Form]:
    pos = 0

    def read_form() -> Form:
        nonlocal pos
        head = tokens[pos]
        if head.kind != "name":
            raise SyntaxParseError(f"expected a construct name, got {head.text!r}", head.loc)
        pos += 1
        if pos >= len(tokens) or tokens[pos].kind != "(":
            raise SyntaxParseError(f"expected '(' after {head.text}", head.loc)
        pos += 1
        args: list[FormArg] = []
        while True:
            if pos >= len(tokens):
                raise SyntaxParseError(f"unclosed form {head.text}(...", head.loc)
            tok = tokens[pos]
            if tok.kind == ")":
                pos += 1
                return Form(head.text, tuple(args), head.loc)
            if tok.kind == "name" and pos + 1 < len(tokens) and tokens[pos + 1].kind == "(":
                args.append(read_form())
            elif tok.kind == "(":
                raise SyntaxParseError("unexpected '('", tok.loc)
            else:
                args.append(tok)
                pos += 1

    forms: list[Form] = []
    while pos < len(tokens):
        forms.append(read_form())
    return forms


def _expect_arity(form: Form, lo: int, hi: int | None = None) -> None:
    hi = lo if hi is None else hi
    if not (lo <= len(form.args) <= (hi if hi >= 0 else len(form.args))):
        want = str(lo) if lo == hi else f"{lo}..{'*' if hi < 0 else hi}"
        raise SyntaxParseError(f"{form.head} expects {want} arguments, got {len(form.args)}", form.loc)


def _name_arg(form: Form, idx: int) -> Token:
    arg = form.args[idx]
    if isinstance(arg, Form) or arg.kind != "name":
        loc = arg.loc if isinstance(arg, Token) else arg.loc
        raise SyntaxParseError(f"{form.head} argument {idx + 1} must be a name", loc)
    return arg


DECLARATION_HEADS = {"Class": "class", "ObjectProperty": "object-property", "DataProperty": "data-property"}


# ---------------------------------------------------------------------------
# Ontology parser
# ---------------------------------------------------------------------------


class _OntologyBuilder:
    def __init__(self, forms: list[Form]):
        self.forms = forms
        self.kinds: dict[str, str] = {}
        self.decl_loc: dict[str, Location] = {}
        self.onto: Ontology | None = None
        self.domains_seen: dict[str, Location] = {}
        self.ranges_seen: dict[str, Location] = {}
        self.data_assert_locs: dict[tuple[str, str], Location] = {}

    # -- pass 1: header and declarations -------------------------------------

    def collect_declarations(self) -> None:
        header: Form | None = None
        for form in self.forms:
            if form.head == "Ontology":
                if header is not None:
                    raise SyntaxParseError("duplicate Ontology(...) header", form.loc)
                _expect_arity(form, 1)
                header = form
            elif form.head in DECLARATION_HEADS:
                _expect_arity(form, 1)
                tok = _name_arg(form, 0)
                if tok.text == THING_NAME:
                    raise SyntaxParseError("Thing is reserved and cannot be declared", tok.loc)
                if tok.text in self.kinds:
                    raise DuplicateDeclarationError(
                        f"{tok.text} already declared as {self.kinds[tok.text]}", tok.loc
                    )
                self.kinds[tok.text] = DECLARATION_HEADS[form.head]
                self.decl_loc[tok.text] = tok.loc
        if header is None and not self.forms:
            raise SyntaxParseError("empty document", Location(1, 1))
        name = _name_arg(header, 0).text if header is not None else "unnamed"
        self.onto = Ontology(name=name)
        for declared, kind in self.kinds.items():
            {"class": self.onto.classes, "object-property": self.onto.object_props, "data-property": self.onto.data_props}[kind].add(declared)

    # -- expression/facet resolution -----------------------------------------

    def class_name(self, tok: Token) -> str:
        if tok.text == THING_NAME:
            return THING_NAME
        kind = self.kinds.get(tok.text)
        if kind is None:
            raise UndeclaredNameError(f"undeclared class {tok.text}", tok.loc)
        if kind != "class":
            raise UndeclaredNameError(f"{tok.text} is declared as {kind}, expected a class", tok.loc)
        return tok.text

    def prop_name(self, tok: Token, kind: str) -> str:
        actual = self.kinds.get(tok.text)
        if actual is None:
            raise UndeclaredNameError(f"undeclared property {tok.text}", tok.loc)
        if actual != kind:
            raise UndeclaredNameError(f"{tok.text} is declared as {actual}, expected {kind}", tok.loc)
        return tok.text

    def expr(self, arg: FormArg) -> ClassExpr:
        if isinstance(arg, Token):
            if arg.kind != "name":
                raise SyntaxParseError(f"expected a class expression, got {arg.text!r}", arg.loc)
            if arg.text == THING_NAME:
                return THING
            return Atomic(self.class_name(arg))
        form = arg
        if form.head == "ObjectIntersectionOf":
            _expect_arity(form, 2, -1)
            return IntersectionOf(tuple(self.expr(a) for a in form.args))
        if form.head == "ObjectSomeValuesFrom":
            _expect_arity(form, 2)
            prop = self.prop_name(_name_arg(form, 0), "object-property")
            return ObjectSome(prop, self.expr(form.args[1]))
        if form.head == "DataSomeValuesFrom":
            _expect_arity(form, 2)
            prop = self.prop_name(_name_arg(form, 0), "data-property")
            return DataSome(prop, self.facet(form.args[1]))
        raise SyntaxParseError(f"unknown expression construct {form.head}", form.loc)

    def facet(self, arg: FormArg) -> Facet:
        if not isinstance(arg, Form):
            raise SyntaxParseError(f"expected a facet, got {arg.text!r}", arg.loc)
        form = arg
        if form.head == "Interval":
            _expect_arity(form, 2)
            lo_tok, hi_tok = form.args
            lo = self._bound(lo_tok, low=True)
            hi = self._bound(hi_tok, low=False)
            try:
                return Interval(lo, hi)
            except EmptyIntervalError as exc:
                raise EmptyIntervalError(exc.message, form.loc) from None
        if form.head == "OneOf":
            _expect_arity(form, 1, -1)
            values: list[str] = []
            for a in form.args:
                if isinstance(a, Form) or a.kind != "string":
                    loc = a.loc
                    raise SyntaxParseError("OneOf takes string literals", loc)
                values.append(a.value)  # type: ignore[arg-type]
            return OneOf(tuple(values))
        if form.head == "BoolEq":
            _expect_arity(form, 1)
            a = form.args[0]
            if isinstance(a, Form) or a.kind != "bool":
                raise SyntaxParseError("BoolEq takes true or false", form.loc)
            return BoolEq(bool(a.value))
        raise SyntaxParseError(f"unknown facet construct {form.head}", form.loc)

    def _bound(self, arg: FormArg, low: bool) -> float:
        if isinstance(arg, Form):
            raise SyntaxParseError("interval bound must be a number", arg.loc)
        if arg.kind == "number":
            return arg.value  # type: ignore[return-value]
        if arg.kind == "inf":
            if low and arg.text == "-inf":
                return float("-inf")
            if not low and arg.text == "+inf":
                return float("inf")
            raise SyntaxParseError(f"{arg.text} is not a valid {'lower' if low else 'upper'} bound", arg.loc)
        raise SyntaxParseError("interval bound must be a number", arg.loc)

    def individual(self, tok: Token) -> str:
        if tok.text == THING_NAME:
            raise SyntaxParseError("Thing cannot name an individual", tok.loc)
        kind = self.kinds.get(tok.text)
        if kind is not None:
            raise DuplicateDeclarationError(
                f"individual {tok.text} collides with a declared {kind}", tok.loc
            )
        return tok.text

    def literal(self, arg: FormArg) -> LiteralValue:
        if isinstance(arg, Form):
            raise SyntaxParseError("expected a literal", arg.loc)
        if arg.kind in ("number", "string", "bool"):
            return arg.value  # type: ignore[return-value]
        raise SyntaxParseError(f"expected a literal, got {arg.text!r}", arg.loc)

    # -- pass 2: axioms and assertions ---------------------------------------

    def build(self) -> Ontology:
        assert self.onto is not None
        o = self.onto
        for form in self.forms:
            if form.head in DECLARATION_HEADS or form.head == "Ontology":
                continue
            if form.head == "SubClassOf":
                _expect_arity(form, 2)
                o.axioms.append(SubClassOf(self.expr(form.args[0]), self.expr(form.args[1])))
            elif form.head == "EquivalentClasses":
                _expect_arity(form, 2)
                o.axioms.append(EquivalentClasses(self.expr(form.args[0]), self.expr(form.args[1])))
            elif form.head == "ObjectPropertyDomain":
                _expect_arity(form, 2)
                tok = _name_arg(form, 0)
                prop = self.prop_name(tok, "object-property")
                self._note_domain(prop, tok.loc)
                o.axioms.append(ObjectPropertyDomain(prop, self.expr(form.args[1])))
            elif form.head == "DataPropertyDomain":
                _expect_arity(form, 2)
                tok = _name_arg(form, 0)
                prop = self.prop_name(tok, "data-property")
                self._note_domain(prop, tok.loc)
                o.axioms.append(DataPropertyDomain(prop, self.expr(form.args[1])))
            elif form.head == "DataPropertyRange":
                _expect_arity(form, 2)
                tok = _name_arg(form, 0)
                prop = self.prop_name(tok, "data-property")
                if prop in self.ranges_seen:
                    raise DuplicateDeclarationError(f"property {prop} already has a declared range", tok.loc)
                self.ranges_seen[prop] = tok.loc
                o.axioms.append(DataPropertyRange(prop, self.facet(form.args[1])))
            elif form.head == "ClassAssertion":
                _expect_arity(form, 2)
                expr = self.expr(form.args[0])
                ind = self.individual(_name_arg(form, 1))
                o.abox.add_class_assertion(expr, ind)
            elif form.head == "ObjectPropertyAssertion":
                _expect_arity(form, 3)
                prop = self.prop_name(_name_arg(form, 0), "object-property")
                subject = self.individual(_name_arg(form, 1))
                target = self.individual(_name_arg(form, 2))
                o.abox.add_object_assertion(prop, subject, target)
            elif form.head == "DataPropertyAssertion":
                _expect_arity(form, 3)
                tok = _name_arg(form, 0)
                prop = self.prop_name(tok, "data-property")
                ind = self.individual(_name_arg(form, 1))
                value = self.literal(form.args[2])
                try:
                    o.abox.add_data_assertion(prop, ind, value)
                except DuplicateDataAssertionError as exc:
                    raise DuplicateDataAssertionError(exc.message, tok.loc) from None
                self.data_assert_locs[(prop, ind)] = tok.loc
            else:
                raise SyntaxParseError(f"unknown construct {form.head}", form.loc)

        for (prop, ind), value in o.abox.data_assertions.items():
            rng = o.range_of(prop)
            if rng is not None and not facet_contains(rng, value):
                raise RangeViolationError(
                    f"value {format_literal(value)} for ({prop}, {ind}) violates the declared range",
                    self.data_assert_locs[(prop, ind)],
                )
        return o

    def _note_domain(self, prop: str, loc: Location) -> None:
        if prop in self.domains_seen:
            raise DuplicateDeclarationError(f"property {prop} already has a declared domain", loc)
        self.domains_seen[prop] = loc


def parse_ontology(text: str) -> Ontology:
    """Parse an HFS document into an Ontology, enforcing all invariants."""
    forms = read_forms(tokenize(text))
    builder = _OntologyBuilder(forms)
    builder.collect_declarations()
    return builder.build()


# ---------------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------------


def format_number(v: float | int) -> str:
    if v == float("inf"):
        return "+inf"
    if v == float("-inf"):
        return "-inf"
    if isinstance(v, bool):  # defensive; bools are not numbers here
        raise TypeError("bool is not a number")
    if isinstance(v, int):
        return str(v)
    if v.is_integer():
        return str(int(v))
    text = repr(v)
    if "e" in text or "E" in text:
        text = format(v, ".17f").rstrip("0").rstrip(".")
    return text


def format_string(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_literal(v: LiteralValue) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return format_number(v)
    return format_string(v)


def facet_to_text(f: Facet) -> str:
    if isinstance(f, Interval):
        return f"Interval({format_number(f.lo)} {format_number(f.hi)})"
    if isinstance(f, OneOf):
        return "OneOf(" + " ".join(format_string(s) for s in f.values) + ")"
    return f"BoolEq({'true' if f.value else 'false'})"


def expr_to_text(e: ClassExpr) -> str:
    if isinstance(e, Atomic):
        return e.name
    if isinstance(e, IntersectionOf):
        return "ObjectIntersectionOf(" + " ".join(expr_to_text(m) for m in e.members) + ")"
    if isinstance(e, ObjectSome):
        return f"ObjectSomeValuesFrom({e.prop} {expr_to_text(e.filler)})"
    return f"DataSomeValuesFrom({e.prop} {facet_to_text(e.facet)})"


def axiom_to_text(ax: Axiom) -> str:
    if isinstance(ax, SubClassOf):
        return f"SubClassOf({expr_to_text(ax.sub)} {expr_to_text(ax.sup)})"
    if isinstance(ax, EquivalentClasses):
        return f"EquivalentClasses({expr_to_text(ax.a)} {expr_to_text(ax.b)})"
    if isinstance(ax, ObjectPropertyDomain):
        return f"ObjectPropertyDomain({ax.prop} {expr_to_text(ax.domain)})"
    if isinstance(ax, DataPropertyDomain):
        return f"DataPropertyDomain({ax.prop} {expr_to_text(ax.domain)})"
    return f"DataPropertyRange({ax.prop} {facet_to_text(ax.range)})"


def serialize_ontology(o: Ontology) -> str:
    lines = [f"Ontology({o.name})"]
    lines += [f"Class({c})" for c in sorted(o.classes)]
    lines += [f"ObjectProperty({p})" for p in sorted(o.object_props)]
    lines += [f"DataProperty({p})" for p in sorted(o.data_props)]
    lines += [axiom_to_text(ax) for ax in o.axioms]
    lines += [f"ClassAssertion({expr_to_text(e)} {i})" for e, i in o.abox.class_assertions]
    lines += [f"ObjectPropertyAssertion({p} {s} {t})" for p, s, t in o.abox.object_assertions]
    lines += [
        f"DataPropertyAssertion({p} {i} {format_literal(v)})" for (p, i), v in o.abox.data_assertions.items()
    ]
    return "\n".join(lines) + "\n"
