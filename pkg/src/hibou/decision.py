"""Decision support: most specific entailed recommended-treatment classes.

Given a taxonomy, a decision configuration (patient class, treatment class,
recommendation property) and an individual, compute the entailed atomic
treatment classes and keep the minimal ones under entailed subsumption,
grouped by equivalence.  ``explain`` maps a recommended treatment back to
the asserted patient classes that triggered it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import NotRecommendedError, UnknownIndividualError
from .model import Atomic, DecisionConfig, ObjectSome, Ontology, SubClassOf
from .reasoner import Taxonomy, entails_instance, entails_subclass


@dataclass(frozen=True)
class TreatmentGroup:
    members: tuple[str, ...]
    entailed: bool = True
    witnesses: tuple[str, ...] = ()


@dataclass(frozen=True)
class Recommendation:
    groups: tuple[TreatmentGroup, ...]

    def group_lists(self) -> list[list[str]]:
        return [list(g.members) for g in self.groups]

    def to_json(self) -> str:
        return json.dumps(self.group_lists(), separators=(",", ":")) + "\n"


EMPTY_RECOMMENDATION = Recommendation(groups=())


def _entailed_treatments(taxonomy: Taxonomy, cfg: DecisionConfig, ind: str) -> list[str]:
    return [
        t
        for t in sorted(taxonomy.ontology.classes)
        if entails_subclass(taxonomy, t, cfg.treatment_class)
        and entails_instance(taxonomy, ObjectSome(cfg.reco_prop, Atomic(t)), ind)
    ]


def recommend(taxonomy: Taxonomy, cfg: DecisionConfig, ind: str) -> Recommendation:
    """Minimal entailed treatment classes for *ind*, grouped by equivalence.

    Groups form an antichain under subsumption, each sorted, ordered by
    smallest member.  Witnesses carry the asserted classes that explain the
    group (see ``explain``).
    """
    cfg.check(taxonomy.ontology)
    if ind not in taxonomy.individual_proxies:
        raise UnknownIndividualError(f"unknown individual {ind}")

    entailed = _entailed_treatments(taxonomy, cfg, ind)
    minimal = [
        t
        for t in entailed
        if not any(
            other != t
            and entails_subclass(taxonomy, other, t)
            and not entails_subclass(taxonomy, t, other)
            for other in entailed
        )
    ]

    groups: list[TreatmentGroup] = []
    placed: set[str] = set()
    for t in minimal:
        if t in placed:
            continue
        members = tuple(
            sorted(
                other
                for other in minimal
                if entails_subclass(taxonomy, t, other) and entails_subclass(taxonomy, other, t)
            )
        )
        placed.update(members)
        witnesses = tuple(
            sorted(
                set().union(*(_witnesses_for(taxonomy, cfg, ind, m) for m in members))
            )
        )
        groups.append(TreatmentGroup(members=members, witnesses=witnesses))
    groups.sort(key=lambda g: g.members[0])
    return Recommendation(groups=tuple(groups))


def _witnesses_for(taxonomy: Taxonomy, cfg: DecisionConfig, ind: str, treatment: str) -> set[str]:
    """Asserted-axiom left-hand classes P with P ⊑ ∃reco.T' in the original
    ontology, T' ⊑ treatment, and ind entailed in P."""
    onto: Ontology = taxonomy.ontology
    found: set[str] = set()
    for ax in onto.desugared_axioms():
        if not isinstance(ax, SubClassOf):
            continue
        if not isinstance(ax.sub, Atomic) or ax.sub.name == "Thing":
            continue
        sup = ax.sup
        if not isinstance(sup, ObjectSome) or sup.prop != cfg.reco_prop:
            continue
        if not isinstance(sup.filler, Atomic):
            continue
        filler = sup.filler.name
        if filler == "Thing" or filler not in onto.classes:
            continue
        if not entails_subclass(taxonomy, filler, treatment):
            continue
        if entails_instance(taxonomy, ax.sub, ind):
            found.add(ax.sub.name)
    return found


def explain(taxonomy: Taxonomy, cfg: DecisionConfig, ind: str, treatment: str) -> list[str]:
    """Asserted patient classes justifying a recommended *treatment*.

    The treatment must appear in the current ``recommend`` output.
    """
    rec = recommend(taxonomy, cfg, ind)
    if not any(treatment in g.members for g in rec.groups):
        raise NotRecommendedError(f"{treatment} is not among the recommended treatments for {ind}")
    return sorted(_witnesses_for(taxonomy, cfg, ind, treatment))
