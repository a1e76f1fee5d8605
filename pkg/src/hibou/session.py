"""Editing sessions: overlay ABox, rebuild-on-write, journal persistence.

A session owns one fresh individual layered over an immutable base
ontology.  Every accepted write re-saturates the overlay from scratch and
re-renders the form document, so value overwrites (which are
non-monotonic) are always handled correctly.  Rejected writes leave no
trace.  Each session appends to a tab-separated journal that can be
replayed to reproduce the exact live state, byte for byte.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .decision import Recommendation
from .errors import (
    JournalError,
    PortalError,
    PropertyNotVisibleError,
    RangeViolationError,
    UnknownIndividualError,
    UnknownNameError,
    UnknownPropertyError,
)
from .form import build_form, emit_xml, visible_properties
from .hfs import format_literal, parse_ontology, serialize_ontology, tokenize
from .model import Atomic, DecisionConfig, LiteralValue, Ontology, THING, facet_contains
from .reasoner import Taxonomy, classify, render_hierarchy
from .uiconfig import UiConfig


@dataclass
class LoadedOntology:
    name: str
    ontology: Ontology
    taxonomy: Taxonomy
    hierarchy_text: str
    summary: dict

    @classmethod
    def from_text(cls, name: str, hfs_text: str) -> "LoadedOntology":
        onto = parse_ontology(hfs_text)
        taxonomy = classify(onto)
        roots = sorted(
            member
            for group in taxonomy.equiv_classes
            for member in group
            if member != "Thing" and taxonomy.direct_super.get(group[0]) == ["Thing"]
        )
        abox = onto.abox
        summary = {
            "name": name,
            "classes": len(onto.classes),
            "object_properties": len(onto.object_props),
            "data_properties": len(onto.data_props),
            "axioms": len(onto.axioms),
            "individuals": len(abox.individuals),
            "assertions": len(abox.class_assertions)
            + len(abox.object_assertions)
            + len(abox.data_assertions),
            "roots": roots,
        }
        return cls(name=name, ontology=onto, taxonomy=taxonomy,
                   hierarchy_text=render_hierarchy(taxonomy), summary=summary)


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass
class _Rendered:
    taxonomy: Taxonomy
    overlay: Ontology
    visible: list[str]
    form_xml: str
    recommendations: Recommendation


class Session:
    """Single-writer editing session; reads see the last rendered state."""

    def __init__(
        self,
        session_id: str,
        base: LoadedOntology,
        instance: str,
        initial_class: str,
        ui_config: UiConfig,
        decision_config: DecisionConfig | None,
        journal_path: Path | None = None,
    ):
        if initial_class != "Thing" and initial_class not in base.ontology.classes:
            raise UnknownNameError(f"unknown class {initial_class}")
        if instance in base.ontology.abox.individuals:
            raise UnknownIndividualError(f"instance {instance} already exists in the base ABox")
        self.id = session_id
        self.ontology_name = base.name
        self.instance = instance
        self.initial_class = initial_class
        self.ui_config = ui_config
        self.decision_config = decision_config
        self.created = _utc_now()
        self.updated = self.created
        self.values: dict[str, LiteralValue] = {}
        self.journal_path = journal_path
        self._base = base
        self._lock = threading.Lock()
        self._rendered = self._render(base, {})
        if journal_path is not None and not journal_path.exists():
            header = f"session\t{self.id}\t{self.ontology_name}\t{self.instance}"
            if self.initial_class != (decision_config.patient_class if decision_config else "Thing"):
                header += f"\t{self.initial_class}"
            journal_path.write_text(header + "\n", encoding="utf-8")

    # -- state construction ---------------------------------------------------

    def _overlay(self, base: LoadedOntology, values: dict[str, LiteralValue]) -> Ontology:
        onto = parse_ontology(serialize_ontology(base.ontology))
        initial = THING if self.initial_class == "Thing" else Atomic(self.initial_class)
        onto.abox.add_class_assertion(initial, self.instance)
        for prop, value in values.items():
            if prop in onto.object_props:
                onto.abox.add_object_assertion(prop, self.instance, str(value))
            else:
                onto.abox.add_data_assertion(prop, self.instance, value)
        return onto

    def _render(self, base: LoadedOntology, values: dict[str, LiteralValue]) -> _Rendered:
        overlay = self._overlay(base, values)
        taxonomy = classify(overlay)
        dcfg = self.decision_config if (self.decision_config and self.decision_config.is_declared_in(overlay)) else None
        form = build_form(taxonomy, overlay, self.ui_config, dcfg, self.instance)
        return _Rendered(
            taxonomy=taxonomy,
            overlay=overlay,
            visible=visible_properties(taxonomy, overlay, self.instance),
            form_xml=emit_xml(form),
            recommendations=form.recommendations,
        )

    # -- reads -----------------------------------------------------------------

    @property
    def form_xml(self) -> str:
        return self._rendered.form_xml

    @property
    def recommendations_json(self) -> str:
        return self._rendered.recommendations.to_json()

    def summary(self) -> dict:
        return {"id": self.id, "instance": self.instance, "ontology": self.ontology_name}

    # -- writes ----------------------------------------------------------------

    def set_value(self, prop: str, value: LiteralValue, base: LoadedOntology | None = None, record: bool = True) -> str:
        """Validate, record and apply one value write; returns the new form XML.

        Rejected writes raise without touching any state.
        """
        with self._lock:
            base = base or self._base
            if base is not self._base:
                # the ontology was reloaded since the last write
                self._base = base
                self._rendered = self._render(base, self.values)
            onto = self._rendered.overlay
            if prop not in onto.object_props and prop not in onto.data_props:
                raise UnknownPropertyError(f"unknown property {prop}")
            if prop not in self._rendered.visible:
                raise PropertyNotVisibleError(f"property {prop} is not visible for {self.instance}")
            if prop in onto.object_props:
                if not isinstance(value, str):
                    raise RangeViolationError(f"object property {prop} takes an individual name")
                valid_targets = base.ontology.abox.individuals | {self.instance}
                if value not in valid_targets:
                    raise UnknownIndividualError(f"unknown individual {value}")
            else:
                if not isinstance(value, (bool, int, float, str)):
                    raise RangeViolationError(f"unsupported literal for {prop}")
                if isinstance(value, str) and any(c in value for c in "\t\n\r"):
                    # the journal is tab-separated, one event per line
                    raise RangeViolationError(f"control characters not allowed in {prop}")
                declared = onto.range_of(prop)
                if declared is not None and not facet_contains(declared, value):
                    raise RangeViolationError(
                        f"value {format_literal(value)} violates the declared range of {prop}"
                    )
            new_values = dict(self.values)
            new_values[prop] = value
            rendered = self._render(base, new_values)
            self.values = new_values
            self._rendered = rendered
            self.updated = _utc_now()
            if record and self.journal_path is not None:
                encoded = value if prop in onto.object_props else format_literal(value)
                line = f"{self.updated}\tset\t{prop}\t{encoded}\n"
                with self.journal_path.open("a", encoding="utf-8") as handle:
                    handle.write(line)
            return rendered.form_xml


def _parse_journal_value(text: str, line_no: int) -> LiteralValue:
    try:
        tokens = tokenize(text)
    except PortalError as exc:
        raise JournalError(f"bad value {text!r}: {exc.message}", line_no) from None
    if len(tokens) != 1:
        raise JournalError(f"bad value {text!r}", line_no)
    tok = tokens[0]
    if tok.kind == "name":
        return tok.text  # an individual name (object property write)
    if tok.kind in ("number", "string", "bool"):
        return tok.value  # type: ignore[return-value]
    raise JournalError(f"bad value {text!r}", line_no)


def restore_session(
    journal_path: Path,
    bases: dict[str, LoadedOntology],
    ui_config: UiConfig,
    decision_config: DecisionConfig | None,
) -> Session:
    """Replay a journal into a fresh session with identical rendered state.

    Any malformed line (or an event the current ontology rejects) aborts the
    restore with the offending line number.
    """
    lines = journal_path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise JournalError("empty journal", 1)
    header = lines[0].split("\t")
    if len(header) not in (4, 5) or header[0] != "session":
        raise JournalError("bad journal header", 1)
    _, session_id, ontology_name, instance = header[:4]
    base = bases.get(ontology_name)
    if base is None:
        raise JournalError(f"journal references unknown ontology {ontology_name}", 1)
    if len(header) == 5:
        initial_class = header[4]
    else:
        initial_class = decision_config.patient_class if decision_config else "Thing"
    session = Session(
        session_id=session_id,
        base=base,
        instance=instance,
        initial_class=initial_class,
        ui_config=ui_config,
        decision_config=decision_config,
        journal_path=journal_path,
    )
    for idx, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 4 or parts[1] != "set":
            raise JournalError(f"bad journal event {line!r}", idx)
        _, _, prop, value_text = parts
        value = _parse_journal_value(value_text, idx)
        try:
            session.set_value(prop, value, record=False)
        except PortalError as exc:
            raise JournalError(f"replay failed: {exc.message}", idx) from None
    return session
