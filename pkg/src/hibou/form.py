"""Form model generation: entailment-selected components emitted as XML.

A property is shown iff the edited individual is entailed to be an instance
of the property's domain (undeclared domains default to Thing, so those
properties are always shown).  Widgets are chosen per property: an explicit
binding wins, then the highest-priority matching rule, then the TextField
fallback.  The form is an implementation-independent component tree plus
the embedded recommendation groups, rendered deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decision import EMPTY_RECOMMENDATION, Recommendation, recommend
from .errors import UnknownIndividualError
from .hfs import format_number
from .model import (
    DecisionConfig,
    Interval,
    LiteralValue,
    OneOf,
    Ontology,
    THING,
    facet_kind,
)
from .reasoner import Taxonomy, entails_instance
from .uiconfig import FALLBACK_WIDGET, UiConfig


@dataclass(frozen=True)
class Component:
    prop: str
    widget: str
    impl_hint: str
    label: str
    value: LiteralValue | None  # literal, or individual name for object properties
    options: tuple[str, ...] | None  # enum literals or candidate individuals
    numeric_range: tuple[float, float] | None


@dataclass(frozen=True)
class FormModel:
    instance: str
    components: tuple[Component, ...]
    recommendations: Recommendation


def visible_properties(taxonomy: Taxonomy, onto: Ontology, ind: str) -> list[str]:
    """Sorted properties whose domain the individual is entailed to inhabit."""
    if ind not in taxonomy.individual_proxies:
        raise UnknownIndividualError(f"unknown individual {ind}")
    visible = []
    for prop in sorted(onto.object_props | onto.data_props):
        domain = onto.domain_of(prop) or THING
        if entails_instance(taxonomy, domain, ind):
            visible.append(prop)
    return visible


def _range_kind(onto: Ontology, prop: str) -> tuple[str | None, str | None]:
    """(kind, range_class): kind in enum/numeric/boolean/object or None.

    Object properties have no range axiom in this fragment, so their range
    class is Thing.
    """
    if prop in onto.object_props:
        return "object", "Thing"
    rng = onto.range_of(prop)
    if rng is None:
        return None, None
    return facet_kind(rng), None


def choose_widget(cfg: UiConfig, onto: Ontology, prop: str) -> tuple[str, str]:
    """Widget name and impl hint for *prop* under a flattened config."""
    bound = cfg.bindings.get(prop)
    if bound is not None:
        return bound, cfg.widgets[bound]
    range_kind, range_class = _range_kind(onto, prop)
    for rule in cfg.rules:
        if rule.matches(range_kind, range_class):
            return rule.widget, cfg.widgets[rule.widget]
    return FALLBACK_WIDGET, cfg.widgets.get(FALLBACK_WIDGET, "")


def build_form(
    taxonomy: Taxonomy,
    onto: Ontology,
    cfg: UiConfig,
    dcfg: DecisionConfig | None,
    ind: str,
) -> FormModel:
    """Compose visibility, widget choice, current values and recommendations.

    ``dcfg=None`` builds an editing form with empty recommendations (used
    for ontologies that declare no decision vocabulary).  The recommendation
    property itself is excluded from the editable components.
    """
    visible = visible_properties(taxonomy, onto, ind)
    components: list[Component] = []
    for prop in visible:
        if dcfg is not None and prop == dcfg.reco_prop:
            continue
        widget, hint = choose_widget(cfg, onto, prop)
        value: LiteralValue | None
        options: tuple[str, ...] | None = None
        numeric_range: tuple[float, float] | None = None
        if prop in onto.data_props:
            value = onto.abox.data_assertions.get((prop, ind))
            rng = onto.range_of(prop)
            if isinstance(rng, OneOf):
                options = rng.values
            elif isinstance(rng, Interval):
                numeric_range = (rng.lo, rng.hi)
        else:
            targets = sorted(t for p, s, t in onto.abox.object_assertions if p == prop and s == ind)
            value = targets[0] if targets else None
            options = tuple(sorted(onto.abox.individuals))
        components.append(
            Component(
                prop=prop,
                widget=widget,
                impl_hint=hint,
                label=prop,
                value=value,
                options=options,
                numeric_range=numeric_range,
            )
        )
    recommendations = recommend(taxonomy, dcfg, ind) if dcfg is not None else EMPTY_RECOMMENDATION
    return FormModel(instance=ind, components=tuple(components), recommendations=recommendations)


# ---------------------------------------------------------------------------
# XML emission
# ---------------------------------------------------------------------------


def _escape(text: str, attr: bool = False) -> str:
    text = text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    if attr:
        text = text.replace('"', "&quot;")
    return text


def _value_text(value: LiteralValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return format_number(value)
    return value


def emit_xml(form: FormModel) -> str:
    """Deterministic two-space-indented form document, LF, trailing newline."""
    lines = [f'<form instance="{_escape(form.instance, attr=True)}">']
    if form.components:
        lines.append("  <components>")
        for c in form.components:
            lines.append(
                f'    <component property="{_escape(c.prop, attr=True)}"'
                f' widget="{_escape(c.widget, attr=True)}"'
                f' impl="{_escape(c.impl_hint, attr=True)}">'
            )
            lines.append(f"      <label>{_escape(c.label)}</label>")
            if c.value is not None:
                lines.append(f"      <value>{_escape(_value_text(c.value))}</value>")
            if c.options is not None:
                opts = "".join(f"<option>{_escape(o)}</option>" for o in c.options)
                lines.append(f"      <options>{opts}</options>")
            if c.numeric_range is not None:
                lo, hi = c.numeric_range
                lines.append(
                    f'      <range kind="numeric" lo="{format_number(lo)}" hi="{format_number(hi)}"/>'
                )
            lines.append("    </component>")
        lines.append("  </components>")
    else:
        lines.append("  <components/>")
    if form.recommendations.groups:
        lines.append("  <recommendations>")
        for group in form.recommendations.groups:
            treatments = "".join(f'<treatment class="{_escape(t, attr=True)}"/>' for t in group.members)
            lines.append(f"    <group>{treatments}</group>")
        lines.append("  </recommendations>")
    else:
        lines.append("  <recommendations/>")
    lines.append("</form>")
    return "\n".join(lines) + "\n"
