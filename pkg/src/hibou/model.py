"""Ontology data model: class expressions, facets, axioms, assertions.

The model covers a tractable description-logic fragment: atomic classes,
conjunction, object existentials and data-facet existentials, plus an ABox
with single-valued data properties.  ``Thing`` is modelled as the reserved
atomic name ``"Thing"`` so the reasoner can treat it uniformly.

Values are immutable after construction (frozen expression nodes; ontologies
are built once by the parser or ``merge`` and then shared read-only).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import (
    DuplicateDataAssertionError,
    DuplicateDeclarationError,
    EmptyIntervalError,
    KindConflictError,
    RangeViolationError,
    UndeclaredNameError,
    UnknownNameError,
)

ClassName = str
PropName = str
IndName = str
LiteralValue = Union[bool, int, float, str]

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
THING_NAME = "Thing"


# ---------------------------------------------------------------------------
# Facets (concrete-domain constraints on data values)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Closed numeric interval; ``lo`` may be -inf and ``hi`` may be +inf."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise EmptyIntervalError(f"empty interval [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class OneOf:
    """Enumeration of string literals (stored sorted and deduplicated)."""

    values: tuple[str, ...]

    def __post_init__(self) -> None:
        canonical = tuple(sorted(set(self.values)))
        if canonical != self.values:
            object.__setattr__(self, "values", canonical)
        if not self.values:
            raise ValueError("OneOf needs at least one literal")


@dataclass(frozen=True)
class BoolEq:
    value: bool


Facet = Union[Interval, OneOf, BoolEq]


def facet_contains(f: Facet, v: LiteralValue) -> bool:
    """True iff literal *v* satisfies facet *f*."""
    if isinstance(f, Interval):
        return isinstance(v, (int, float)) and not isinstance(v, bool) and f.lo <= v <= f.hi
    if isinstance(f, OneOf):
        return isinstance(v, str) and v in f.values
    return isinstance(v, bool) and v == f.value


def facet_implies(f: Facet, g: Facet) -> bool:
    """True iff every value satisfying *f* also satisfies *g*.

    Facets of different kinds never imply each other (their value spaces are
    disjoint: numbers, strings, booleans).
    """
    if isinstance(f, Interval) and isinstance(g, Interval):
        return g.lo <= f.lo and f.hi <= g.hi
    if isinstance(f, OneOf) and isinstance(g, OneOf):
        return set(f.values) <= set(g.values)
    if isinstance(f, BoolEq) and isinstance(g, BoolEq):
        return f.value == g.value
    return False


def facet_kind(f: Facet) -> str:
    if isinstance(f, Interval):
        return "numeric"
    if isinstance(f, OneOf):
        return "enum"
    return "boolean"


# ---------------------------------------------------------------------------
# Class expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atomic:
    name: ClassName


THING = Atomic(THING_NAME)


@dataclass(frozen=True)
class IntersectionOf:
    members: tuple["ClassExpr", ...]

    def __post_init__(self) -> None:
        if len(self.members) < 2:
            raise ValueError("IntersectionOf needs at least two members")


@dataclass(frozen=True)
class ObjectSome:
    prop: PropName
    filler: "ClassExpr"


@dataclass(frozen=True)
class DataSome:
    prop: PropName
    facet: Facet


ClassExpr = Union[Atomic, IntersectionOf, ObjectSome, DataSome]


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubClassOf:
    sub: ClassExpr
    sup: ClassExpr


@dataclass(frozen=True)
class EquivalentClasses:
    a: ClassExpr
    b: ClassExpr


@dataclass(frozen=True)
class ObjectPropertyDomain:
    prop: PropName
    domain: ClassExpr


@dataclass(frozen=True)
class DataPropertyDomain:
    prop: PropName
    domain: ClassExpr


@dataclass(frozen=True)
class DataPropertyRange:
    prop: PropName
    range: Facet


Axiom = Union[SubClassOf, EquivalentClasses, ObjectPropertyDomain, DataPropertyDomain, DataPropertyRange]


# ---------------------------------------------------------------------------
# ABox and Ontology
# ---------------------------------------------------------------------------


@dataclass
class ABox:
    individuals: set[IndName] = field(default_factory=set)
    class_assertions: list[tuple[ClassExpr, IndName]] = field(default_factory=list)
    object_assertions: list[tuple[PropName, IndName, IndName]] = field(default_factory=list)
    data_assertions: dict[tuple[PropName, IndName], LiteralValue] = field(default_factory=dict)

    def add_class_assertion(self, expr: ClassExpr, ind: IndName) -> None:
        self.individuals.add(ind)
        if (expr, ind) not in self.class_assertions:
            self.class_assertions.append((expr, ind))

    def add_object_assertion(self, prop: PropName, subject: IndName, target: IndName) -> None:
        self.individuals.add(subject)
        self.individuals.add(target)
        if (prop, subject, target) not in self.object_assertions:
            self.object_assertions.append((prop, subject, target))

    def add_data_assertion(self, prop: PropName, ind: IndName, value: LiteralValue) -> None:
        key = (prop, ind)
        if key in self.data_assertions:
            raise DuplicateDataAssertionError(f"duplicate data assertion for ({prop}, {ind})")
        self.individuals.add(ind)
        self.data_assertions[key] = value


@dataclass
class Ontology:
    name: str
    classes: set[ClassName] = field(default_factory=set)
    object_props: set[PropName] = field(default_factory=set)
    data_props: set[PropName] = field(default_factory=set)
    axioms: list[Axiom] = field(default_factory=list)
    abox: ABox = field(default_factory=ABox)

    # -- lookups ------------------------------------------------------------

    def kind_of(self, name: str) -> str | None:
        if name in self.classes:
            return "class"
        if name in self.object_props:
            return "object-property"
        if name in self.data_props:
            return "data-property"
        return None

    def is_property(self, name: str) -> bool:
        return name in self.object_props or name in self.data_props

    def domain_of(self, prop: PropName) -> ClassExpr | None:
        for ax in self.axioms:
            if isinstance(ax, (ObjectPropertyDomain, DataPropertyDomain)) and ax.prop == prop:
                return ax.domain
        return None

    def range_of(self, prop: PropName) -> Facet | None:
        for ax in self.axioms:
            if isinstance(ax, DataPropertyRange) and ax.prop == prop:
                return ax.range
        return None

    def desugared_axioms(self) -> Iterator[SubClassOf]:
        """SubClassOf view of the TBox with EquivalentClasses expanded."""
        for ax in self.axioms:
            if isinstance(ax, SubClassOf):
                yield ax
            elif isinstance(ax, EquivalentClasses):
                yield SubClassOf(ax.a, ax.b)
                yield SubClassOf(ax.b, ax.a)


def walk_expr(expr: ClassExpr) -> Iterator[ClassExpr]:
    """Yield *expr* and all its subexpressions, pre-order."""
    yield expr
    if isinstance(expr, IntersectionOf):
        for m in expr.members:
            yield from walk_expr(m)
    elif isinstance(expr, ObjectSome):
        yield from walk_expr(expr.filler)


def check_ontology(o: Ontology) -> None:
    """Enforce the structural invariants on a programmatically built ontology.

    The parser performs the same checks inline (with source locations); this
    is the location-free variant used after ``merge`` and by tests.
    """
    for name in sorted(o.classes | o.object_props | o.data_props):
        if not NAME_RE.match(name) or name == THING_NAME:
            raise DuplicateDeclarationError(f"illegal declared name {name!r}")
    for pair in ((o.classes, o.object_props), (o.classes, o.data_props), (o.object_props, o.data_props)):
        clash = pair[0] & pair[1]
        if clash:
            raise KindConflictError(f"name declared with two kinds: {sorted(clash)[0]}")

    def check_expr(expr: ClassExpr) -> None:
        for sub in walk_expr(expr):
            if isinstance(sub, Atomic):
                if sub.name != THING_NAME and sub.name not in o.classes:
                    raise UndeclaredNameError(f"undeclared class {sub.name}")
            elif isinstance(sub, ObjectSome):
                if sub.prop not in o.object_props:
                    raise UndeclaredNameError(f"undeclared object property {sub.prop}")
            elif isinstance(sub, DataSome):
                if sub.prop not in o.data_props:
                    raise UndeclaredNameError(f"undeclared data property {sub.prop}")

    domains_seen: set[PropName] = set()
    ranges_seen: set[PropName] = set()
    for ax in o.axioms:
        if isinstance(ax, SubClassOf):
            check_expr(ax.sub)
            check_expr(ax.sup)
        elif isinstance(ax, EquivalentClasses):
            check_expr(ax.a)
            check_expr(ax.b)
        elif isinstance(ax, (ObjectPropertyDomain, DataPropertyDomain)):
            expected = o.object_props if isinstance(ax, ObjectPropertyDomain) else o.data_props
            if ax.prop not in expected:
                raise UndeclaredNameError(f"undeclared property {ax.prop}")
            if ax.prop in domains_seen:
                raise DuplicateDeclarationError(f"property {ax.prop} has two declared domains")
            domains_seen.add(ax.prop)
            check_expr(ax.domain)
        elif isinstance(ax, DataPropertyRange):
            if ax.prop not in o.data_props:
                raise UndeclaredNameError(f"undeclared data property {ax.prop}")
            if ax.prop in ranges_seen:
                raise DuplicateDeclarationError(f"property {ax.prop} has two declared ranges")
            ranges_seen.add(ax.prop)

    declared = o.classes | o.object_props | o.data_props
    for ind in sorted(o.abox.individuals):
        if not NAME_RE.match(ind) or ind == THING_NAME:
            raise DuplicateDeclarationError(f"illegal individual name {ind!r}")
        if ind in declared:
            raise DuplicateDeclarationError(f"individual {ind} collides with a declared {o.kind_of(ind)}")
    for expr, ind in o.abox.class_assertions:
        check_expr(expr)
        if ind not in o.abox.individuals:
            raise UndeclaredNameError(f"unknown individual {ind}")
    for prop, subject, target in o.abox.object_assertions:
        if prop not in o.object_props:
            raise UndeclaredNameError(f"undeclared object property {prop}")
    for (prop, ind), value in o.abox.data_assertions.items():
        if prop not in o.data_props:
            raise UndeclaredNameError(f"undeclared data property {prop}")
        rng = o.range_of(prop)
        if rng is not None and not facet_contains(rng, value):
            raise RangeViolationError(f"value {value!r} for ({prop}, {ind}) violates the declared range")


def merge(base: Ontology, extension: Ontology) -> Ontology:
    """Union of two ontologies; extension declarations/axioms follow base's.

    Redeclaring a base name with the same kind is allowed; a different kind is
    a conflict.  Duplicate axioms and assertions are deduplicated.
    """
    for name in sorted(extension.classes | extension.object_props | extension.data_props):
        base_kind = base.kind_of(name)
        ext_kind = extension.kind_of(name)
        if base_kind is not None and base_kind != ext_kind:
            raise KindConflictError(f"{name} declared as {base_kind} in base but {ext_kind} in extension")

    merged = Ontology(
        name=base.name,
        classes=base.classes | extension.classes,
        object_props=base.object_props | extension.object_props,
        data_props=base.data_props | extension.data_props,
        axioms=list(base.axioms),
    )
    for ax in extension.axioms:
        if ax not in merged.axioms:
            merged.axioms.append(ax)

    merged.abox.individuals = set(base.abox.individuals)
    merged.abox.class_assertions = list(base.abox.class_assertions)
    merged.abox.object_assertions = list(base.abox.object_assertions)
    merged.abox.data_assertions = dict(base.abox.data_assertions)
    merged.abox.individuals |= extension.abox.individuals
    for expr, ind in extension.abox.class_assertions:
        merged.abox.add_class_assertion(expr, ind)
    for prop, s, t in extension.abox.object_assertions:
        merged.abox.add_object_assertion(prop, s, t)
    for (prop, ind), value in extension.abox.data_assertions.items():
        existing = merged.abox.data_assertions.get((prop, ind))
        if existing is None:
            merged.abox.add_data_assertion(prop, ind, value)
        elif existing != value:
            raise DuplicateDataAssertionError(
                f"conflicting data values for ({prop}, {ind}): {existing!r} vs {value!r}"
            )
    check_ontology(merged)
    return merged


@dataclass(frozen=True)
class DecisionConfig:
    """Distinguished names driving recommendation: the patient class, the
    treatment class, and the object property linking patients to recommended
    treatments."""

    patient_class: ClassName = "Patient"
    treatment_class: ClassName = "Treatment"
    reco_prop: PropName = "reco"

    def check(self, o: Ontology) -> None:
        for cls in (self.patient_class, self.treatment_class):
            if cls not in o.classes:
                raise UnknownNameError(f"decision config class {cls} is not declared")
        if self.reco_prop not in o.object_props:
            raise UnknownNameError(f"decision config property {self.reco_prop} is not an object property")

    def is_declared_in(self, o: Ontology) -> bool:
        return (
            self.patient_class in o.classes
            and self.treatment_class in o.classes
            and self.reco_prop in o.object_props
        )
