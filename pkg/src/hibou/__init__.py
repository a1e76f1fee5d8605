"""hibou: ontology-driven decision-support portal engine.

Stores ontologies in a tractable description-logic fragment (Hibou
Functional Syntax documents), classifies them by saturation, computes
most-specific recommended treatments for edited instances, generates
form models selected by entailment against property domains, answers
conjunctive queries, and serves everything over HTTP.
"""

from .decision import Recommendation, TreatmentGroup, explain, recommend
from .errors import PortalError
from .form import FormModel, build_form, choose_widget, emit_xml, visible_properties
from .hfs import parse_ontology, serialize_ontology
from .model import DecisionConfig, Ontology, merge
from .query import answer, parse_query
from .reasoner import Taxonomy, classify, entails_instance, entails_subclass, normalize, saturate
from .uiconfig import DEFAULT_UI_CONFIG, UiConfig, WidgetRule, parse_ui_config, resolve_config

__all__ = [
    "DEFAULT_UI_CONFIG",
    "DecisionConfig",
    "FormModel",
    "Ontology",
    "PortalError",
    "Recommendation",
    "Taxonomy",
    "TreatmentGroup",
    "UiConfig",
    "WidgetRule",
    "answer",
    "build_form",
    "choose_widget",
    "classify",
    "emit_xml",
    "entails_instance",
    "entails_subclass",
    "explain",
    "merge",
    "normalize",
    "parse_ontology",
    "parse_query",
    "parse_ui_config",
    "recommend",
    "resolve_config",
    "saturate",
    "serialize_ontology",
    "visible_properties",
]

__version__ = "0.1.0"
