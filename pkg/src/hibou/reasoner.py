"""Saturation-based classification, subsumption and instance checking.

The ontology fragment (atomic classes, conjunction, object existentials,
data facets) is normalized into four axiom shapes over atomic names::

    NF1  A ⊑ B          NF2  A1 ⊓ A2 ⊑ B
    NF3  A ⊑ ∃r.B       NF4  ∃r.A ⊑ B

where the names include the original class names plus fresh names, one
proxy name per individual and one proxy name per distinct (data property,
facet) pair.  Saturation computes the least fixpoint of the completion
rules with a worklist and per-name indexes; the result is an immutable
``Taxonomy`` safe for concurrent queries.  Re-reasoning after an ABox
change builds a fresh Taxonomy.

Internal names contain ``:`` so they can never collide with declared names
(which match ``[A-Za-z_][A-Za-z0-9_]*``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import UnknownIndividualError, UnknownNameError
from .model import (
    Atomic,
    ClassExpr,
    DataSome,
    Facet,
    IntersectionOf,
    LiteralValue,
    ObjectSome,
    Ontology,
    THING_NAME,
    facet_contains,
    facet_implies,
)

IND_PREFIX = "ind:"
FACET_PREFIX = "facet:"
GEN_PREFIX = "gen:"


def is_internal_name(name: str) -> bool:
    return ":" in name


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NF1:
    sub: str
    sup: str


@dataclass(frozen=True)
class NF2:
    left1: str
    left2: str
    sup: str


@dataclass(frozen=True)
class NF3:
    sub: str
    role: str
    filler: str


@dataclass(frozen=True)
class NF4:
    role: str
    filler: str
    sup: str


NormalAxiom = NF1 | NF2 | NF3 | NF4


@dataclass
class NormalizedOntology:
    ontology: Ontology
    axioms: list[NormalAxiom] = field(default_factory=list)
    facet_proxies: dict[str, tuple[str, Facet]] = field(default_factory=dict)
    individual_proxies: dict[str, str] = field(default_factory=dict)

    def universe(self) -> set[str]:
        names = {THING_NAME}
        names |= self.ontology.classes
        names |= set(self.individual_proxies.values())
        names |= set(self.facet_proxies.keys())
        for ax in self.axioms:
            if isinstance(ax, NF1):
                names |= {ax.sub, ax.sup}
            elif isinstance(ax, NF2):
                names |= {ax.left1, ax.left2, ax.sup}
            elif isinstance(ax, NF3):
                names |= {ax.sub, ax.filler}
            else:
                names |= {ax.filler, ax.sup}
        return names


class _Normalizer:
    def __init__(self, onto: Ontology):
        self.onto = onto
        self.out = NormalizedOntology(ontology=onto)
        self._gen_count = 0
        self._proxy_by_key: dict[tuple[str, Facet], str] = {}

    def _fresh(self) -> str:
        name = f"{GEN_PREFIX}{self._gen_count}"
        self._gen_count += 1
        return name

    def _facet_proxy(self, prop: str, facet: Facet) -> str:
        key = (prop, facet)
        proxy = self._proxy_by_key.get(key)
        if proxy is None:
            proxy = f"{FACET_PREFIX}{len(self._proxy_by_key)}"
            self._proxy_by_key[key] = proxy
            self.out.facet_proxies[proxy] = key
        return proxy

    def _name_for_lhs(self, expr: ClassExpr) -> str:
        """Atomic name X such that the emitted axioms entail expr ⊑ X."""
        if isinstance(expr, Atomic):
            return expr.name
        if isinstance(expr, DataSome):
            return self._facet_proxy(expr.prop, expr.facet)
        if isinstance(expr, IntersectionOf):
            acc = self._name_for_lhs(expr.members[0])
            for member in expr.members[1:]:
                nxt = self._name_for_lhs(member)
                fresh = self._fresh()
                self.out.axioms.append(NF2(acc, nxt, fresh))
                self.out.axioms.append(NF2(nxt, acc, fresh))
                acc = fresh
            return acc
        fresh = self._fresh()
        self.out.axioms.append(NF4(expr.prop, self._name_for_lhs(expr.filler), fresh))
        return fresh

    def _emit_sub(self, name: str, sup: ClassExpr) -> None:
        """Emit axioms entailing name ⊑ sup."""
        if isinstance(sup, Atomic):
            if sup.name != THING_NAME:
                self.out.axioms.append(NF1(name, sup.name))
        elif isinstance(sup, DataSome):
            self.out.axioms.append(NF1(name, self._facet_proxy(sup.prop, sup.facet)))
        elif isinstance(sup, IntersectionOf):
            for member in sup.members:
                self._emit_sub(name, member)
        else:
            filler = sup.filler
            if isinstance(filler, Atomic):
                target = filler.name
            elif isinstance(filler, DataSome):
                target = self._facet_proxy(filler.prop, filler.facet)
            else:
                target = self._fresh()
                self._emit_sub(target, filler)
            self.out.axioms.append(NF3(name, sup.prop, target))

    def run(self) -> NormalizedOntology:
        onto = self.onto
        for ind in sorted(onto.abox.individuals):
            self.out.individual_proxies[ind] = f"{IND_PREFIX}{ind}"

        for ax in onto.desugared_axioms():
            self._emit_sub(self._name_for_lhs(ax.sub), ax.sup)
        for expr, ind in onto.abox.class_assertions:
            self._emit_sub(self.out.individual_proxies[ind], expr)
        for prop, subject, target in onto.abox.object_assertions:
            self.out.axioms.append(
                NF3(self.out.individual_proxies[subject], prop, self.out.individual_proxies[target])
            )
        for (prop, ind), value in onto.abox.data_assertions.items():
            for (p2, f2), proxy in self._proxy_by_key.items():
                if p2 == prop and facet_contains(f2, value):
                    self.out.axioms.append(NF1(self.out.individual_proxies[ind], proxy))
        proxies = list(self._proxy_by_key.items())
        for (p_a, f_a), proxy_a in proxies:
            for (p_b, f_b), proxy_b in proxies:
                if proxy_a != proxy_b and p_a == p_b and facet_implies(f_a, f_b):
                    self.out.axioms.append(NF1(proxy_a, proxy_b))
        return self.out


def normalize(onto: Ontology) -> NormalizedOntology:
    return _Normalizer(onto).run()


# ---------------------------------------------------------------------------
# Saturation
# ---------------------------------------------------------------------------


@dataclass
class Taxonomy:
    """Saturated closure: subsumer sets, role edges, and the reduced class
    hierarchy.  Immutable by convention; all queries are read-only."""

    ontology: Ontology
    subsumers: dict[str, frozenset[str]]
    role_edges: frozenset[tuple[str, str, str]]
    edges_by_source: dict[str, dict[str, tuple[str, ...]]]
    facet_proxies: dict[str, tuple[str, Facet]]
    individual_proxies: dict[str, str]
    equiv_classes: list[list[str]]
    direct_super: dict[str, list[str]]

    def subsumer_set(self, name: str) -> frozenset[str]:
        return self.subsumers.get(name, frozenset())


def saturate(normalized: NormalizedOntology) -> Taxonomy:
    nf1_index: dict[str, list[str]] = {}
    nf2_index: dict[str, list[tuple[str, str]]] = {}
    nf3_index: dict[str, list[tuple[str, str]]] = {}
    nf4_index: dict[tuple[str, str], list[str]] = {}
    for ax in normalized.axioms:
        if isinstance(ax, NF1):
            nf1_index.setdefault(ax.sub, []).append(ax.sup)
        elif isinstance(ax, NF2):
            nf2_index.setdefault(ax.left1, []).append((ax.left2, ax.sup))
        elif isinstance(ax, NF3):
            nf3_index.setdefault(ax.sub, []).append((ax.role, ax.filler))
        else:
            nf4_index.setdefault((ax.role, ax.filler), []).append(ax.sup)

    universe = normalized.universe()
    subsumers: dict[str, set[str]] = {name: set() for name in universe}
    edges: set[tuple[str, str, str]] = set()
    reverse_edges: dict[str, set[tuple[str, str]]] = {}
    queue: deque[tuple] = deque()

    def add_subsumer(name: str, sup: str) -> None:
        if sup not in subsumers[name]:
            subsumers[name].add(sup)
            queue.append(("s", name, sup))

    def add_edge(source: str, role: str, target: str) -> None:
        if (source, role, target) not in edges:
            edges.add((source, role, target))
            queue.append(("e", source, role, target))

    for name in universe:
        add_subsumer(name, name)
        add_subsumer(name, THING_NAME)

    while queue:
        item = queue.popleft()
        if item[0] == "s":
            _, name, sup = item
            for implied in nf1_index.get(sup, ()):
                add_subsumer(name, implied)
            for other, implied in nf2_index.get(sup, ()):
                if other in subsumers[name]:
                    add_subsumer(name, implied)
            for role, filler in nf3_index.get(sup, ()):
                add_edge(name, role, filler)
            for source, role in reverse_edges.get(name, ()):
                for implied in nf4_index.get((role, sup), ()):
                    add_subsumer(source, implied)
        else:
            _, source, role, target = item
            reverse_edges.setdefault(target, set()).add((source, role))
            for present in list(subsumers[target]):
                for implied in nf4_index.get((role, present), ()):
                    add_subsumer(source, implied)

    collected: dict[str, dict[str, list[str]]] = {}
    for source, role, target in sorted(edges):
        collected.setdefault(source, {}).setdefault(role, []).append(target)
    edges_by_source = {
        source: {role: tuple(targets) for role, targets in roles.items()}
        for source, roles in collected.items()
    }

    frozen = {name: frozenset(values) for name, values in subsumers.items()}
    equiv, direct = _reduce_hierarchy(normalized.ontology, frozen)
    return Taxonomy(
        ontology=normalized.ontology,
        subsumers=frozen,
        role_edges=frozenset(edges),
        edges_by_source=edges_by_source,
        facet_proxies=dict(normalized.facet_proxies),
        individual_proxies=dict(normalized.individual_proxies),
        equiv_classes=equiv,
        direct_super=direct,
    )


def _reduce_hierarchy(
    onto: Ontology, subsumers: dict[str, frozenset[str]]
) -> tuple[list[list[str]], dict[str, list[str]]]:
    """Equivalence classes plus the transitive reduction over declared names."""
    names = sorted(onto.classes | {THING_NAME})
    name_set = set(names)

    def above(c: str) -> set[str]:
        return set(subsumers.get(c, frozenset())) & name_set

    groups: dict[str, list[str]] = {}
    rep_of: dict[str, str] = {}
    for c in names:
        members = sorted(d for d in above(c) if c in subsumers.get(d, frozenset()))
        rep = members[0]
        rep_of[c] = rep
        groups.setdefault(rep, members)

    equiv_classes = [groups[rep] for rep in sorted(groups)]

    strict_above: dict[str, set[str]] = {}
    for rep in groups:
        ups = {rep_of[d] for d in above(rep)} - {rep}
        strict_above[rep] = ups

    direct: dict[str, list[str]] = {}
    for rep, ups in strict_above.items():
        reduced = {
            up
            for up in ups
            if not any(up in strict_above[mid] for mid in ups if mid != up)
        }
        direct[rep] = sorted(reduced)
    return equiv_classes, direct


def classify(onto: Ontology) -> Taxonomy:
    return saturate(normalize(onto))


# ---------------------------------------------------------------------------
# Entailment queries
# ---------------------------------------------------------------------------


def entails_subclass(taxonomy: Taxonomy, sub: str, sup: str) -> bool:
    """True iff every instance of class *sub* is an instance of *sup*."""
    for name in (sub, sup):
        if name != THING_NAME and name not in taxonomy.ontology.classes:
            raise UnknownNameError(f"unknown class {name}")
    return sup in taxonomy.subsumer_set(sub)


def _holds_at(taxonomy: Taxonomy, name: str, expr: ClassExpr) -> bool:
    if isinstance(expr, Atomic):
        return expr.name == THING_NAME or expr.name in taxonomy.subsumer_set(name)
    if isinstance(expr, IntersectionOf):
        return all(_holds_at(taxonomy, name, member) for member in expr.members)
    if isinstance(expr, ObjectSome):
        targets = taxonomy.edges_by_source.get(name, {}).get(expr.prop, ())
        return any(_holds_at(taxonomy, target, expr.filler) for target in targets)
    subsumer_set = taxonomy.subsumer_set(name)
    for proxy, (prop, facet) in taxonomy.facet_proxies.items():
        if prop == expr.prop and proxy in subsumer_set and facet_implies(facet, expr.facet):
            return True
    if name.startswith(IND_PREFIX):
        ind = name[len(IND_PREFIX):]
        value = taxonomy.ontology.abox.data_assertions.get((expr.prop, ind))
        return value is not None and facet_contains(expr.facet, value)
    return False


def entails_instance(taxonomy: Taxonomy, expr: ClassExpr, ind: str) -> bool:
    """True iff the ontology entails that individual *ind* belongs to *expr*."""
    proxy = taxonomy.individual_proxies.get(ind)
    if proxy is None:
        raise UnknownIndividualError(f"unknown individual {ind}")
    return _holds_at(taxonomy, proxy, expr)


def asserted_value(taxonomy: Taxonomy, prop: str, ind: str) -> LiteralValue | None:
    return taxonomy.ontology.abox.data_assertions.get((prop, ind))


# ---------------------------------------------------------------------------
# Hierarchy rendering (CLI `classify` and GET .../taxonomy)
# ---------------------------------------------------------------------------


def render_hierarchy(taxonomy: Taxonomy) -> str:
    """Deterministic text listing of the reduced hierarchy.

    One row per equivalence class, members joined by `` = ``, followed by
    `` -> `` and the lexicographically sorted direct superclasses (one
    representative per super group).  Rows sorted by first member.
    """
    lines = []
    for group in taxonomy.equiv_classes:
        rep = group[0]
        parents = taxonomy.direct_super.get(rep, [])
        row = " = ".join(group)
        if parents:
            row += " -> " + " ".join(parents)
        lines.append(row)
    return "\n".join(lines) + "\n"
