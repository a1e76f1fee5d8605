"""UI configuration: widget catalog, selection rules, per-property bindings.

A configuration is a document in the `.uicfg.hfs` dialect::

    UiConfig(custom)
    Extends(default)
    Widget(RadioGroup "hibou.ui.RadioGroup")
    WidgetRule(100 EnumRange RadioGroup)
    BindWidget(age Slider)

Customization works by extension: a config names its parent and overrides
widgets and bindings per name; rules concatenate, child rules winning
priority ties.  ``DEFAULT_UI_CONFIG`` ships the baseline decision table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    CyclicExtendsError,
    DuplicateDeclarationError,
    SyntaxParseError,
    UnknownNameError,
    UnknownWidgetError,
)
from .hfs import Form, read_forms, tokenize

CONDITION_TOKENS = {
    "EnumRange": "enum",
    "NumericRange": "numeric",
    "BooleanRange": "boolean",
    "ObjectRange": "object",
    "Any": "any",
}

FALLBACK_WIDGET = "TextField"


@dataclass(frozen=True)
class WidgetRule:
    priority: int
    condition: str  # "enum" | "numeric" | "boolean" | "object" | "any"
    widget: str
    object_filter: str | None = None

    def matches(self, range_kind: str | None, range_class: str | None) -> bool:
        if self.condition == "any":
            return True
        if self.condition == "object":
            if range_kind != "object":
                return False
            return self.object_filter is None or self.object_filter == range_class
        return range_kind == self.condition


@dataclass
class UiConfig:
    name: str
    widgets: dict[str, str] = field(default_factory=dict)  # widget -> impl hint
    rules: list[WidgetRule] = field(default_factory=list)
    bindings: dict[str, str] = field(default_factory=dict)  # property -> widget
    extends: str | None = None


DEFAULT_UI_CONFIG = UiConfig(
    name="default",
    widgets={
        "TextField": "hibou.ui.TextField",
        "NumberField": "hibou.ui.NumberField",
        "Checkbox": "hibou.ui.Checkbox",
        "Dropdown": "hibou.ui.Dropdown",
        "InstancePicker": "hibou.ui.InstancePicker",
    },
    rules=[
        WidgetRule(10, "enum", "Dropdown"),
        WidgetRule(9, "numeric", "NumberField"),
        WidgetRule(8, "boolean", "Checkbox"),
        WidgetRule(7, "object", "InstancePicker"),
        WidgetRule(0, "any", FALLBACK_WIDGET),
    ],
)


def parse_ui_config(text: str) -> UiConfig:
    forms = read_forms(tokenize(text))
    if not forms:
        raise SyntaxParseError("empty UI config document")
    cfg: UiConfig | None = None
    pending: list[Form] = []
    for form in forms:
        if form.head == "UiConfig":
            if cfg is not None:
                raise SyntaxParseError("duplicate UiConfig(...) header", form.loc)
            if len(form.args) != 1 or isinstance(form.args[0], Form) or form.args[0].kind != "name":
                raise SyntaxParseError("UiConfig expects one name", form.loc)
            cfg = UiConfig(name=form.args[0].text)
        else:
            pending.append(form)
    if cfg is None:
        raise SyntaxParseError("missing UiConfig(...) header", forms[0].loc)

    priorities: set[int] = set()
    for form in pending:
        if form.head == "Extends":
            if cfg.extends is not None:
                raise DuplicateDeclarationError("duplicate Extends(...)", form.loc)
            cfg.extends = _name(form, 0)
        elif form.head == "Widget":
            name = _name(form, 0)
            hint = _string(form, 1)
            if name in cfg.widgets:
                raise DuplicateDeclarationError(f"widget {name} declared twice", form.loc)
            cfg.widgets[name] = hint
        elif form.head == "WidgetRule":
            priority = _int(form, 0)
            if priority in priorities:
                raise DuplicateDeclarationError(f"two rules share priority {priority}", form.loc)
            priorities.add(priority)
            condition, object_filter = _condition(form, 1)
            widget = _name(form, 2)
            cfg.rules.append(WidgetRule(priority, condition, widget, object_filter))
        elif form.head == "BindWidget":
            prop = _name(form, 0)
            widget = _name(form, 1)
            if prop in cfg.bindings:
                raise DuplicateDeclarationError(f"property {prop} bound twice", form.loc)
            cfg.bindings[prop] = widget
        else:
            raise SyntaxParseError(f"unknown UI config construct {form.head}", form.loc)
    return cfg


def _name(form: Form, idx: int) -> str:
    if idx >= len(form.args):
        raise SyntaxParseError(f"{form.head} is missing argument {idx + 1}", form.loc)
    arg = form.args[idx]
    if isinstance(arg, Form) or arg.kind != "name":
        raise SyntaxParseError(f"{form.head} argument {idx + 1} must be a name", form.loc)
    return arg.text


def _string(form: Form, idx: int) -> str:
    if idx >= len(form.args):
        raise SyntaxParseError(f"{form.head} is missing argument {idx + 1}", form.loc)
    arg = form.args[idx]
    if isinstance(arg, Form) or arg.kind != "string":
        raise SyntaxParseError(f"{form.head} argument {idx + 1} must be a string", form.loc)
    return arg.value  # type: ignore[return-value]


def _int(form: Form, idx: int) -> int:
    if idx >= len(form.args):
        raise SyntaxParseError(f"{form.head} is missing argument {idx + 1}", form.loc)
    arg = form.args[idx]
    if isinstance(arg, Form) or arg.kind != "number" or not isinstance(arg.value, int):
        raise SyntaxParseError(f"{form.head} argument {idx + 1} must be an integer", form.loc)
    return arg.value


def _condition(form: Form, idx: int) -> tuple[str, str | None]:
    if idx >= len(form.args):
        raise SyntaxParseError(f"{form.head} is missing argument {idx + 1}", form.loc)
    arg = form.args[idx]
    if isinstance(arg, Form):
        if arg.head != "ObjectRange" or len(arg.args) != 1:
            raise SyntaxParseError("only ObjectRange takes a class filter", arg.loc)
        inner = arg.args[0]
        if isinstance(inner, Form) or inner.kind != "name":
            raise SyntaxParseError("ObjectRange filter must be a class name", arg.loc)
        return "object", inner.text
    if arg.kind != "name" or arg.text not in CONDITION_TOKENS:
        expected = "|".join(CONDITION_TOKENS)
        raise SyntaxParseError(f"rule condition must be one of {expected}", arg.loc)
    return CONDITION_TOKENS[arg.text], None


def resolve_config(config: UiConfig, registry: dict[str, UiConfig] | None = None) -> UiConfig:
    """Flatten the Extends chain: child widgets/bindings override the
    parent's per name; rules concatenate with child rules winning priority
    ties.  The result has ``extends=None`` and validated widget references.
    """
    registry = dict(registry or {})
    registry.setdefault("default", DEFAULT_UI_CONFIG)
    registry.setdefault(config.name, config)

    chain: list[UiConfig] = []
    seen: set[str] = set()
    current: UiConfig | None = config
    while current is not None:
        if current.name in seen:
            raise CyclicExtendsError(f"extends cycle through {current.name}")
        seen.add(current.name)
        chain.append(current)
        if current.extends is None:
            current = None
        else:
            parent = registry.get(current.extends)
            if parent is None:
                raise UnknownNameError(f"unknown parent config {current.extends}")
            current = parent

    widgets: dict[str, str] = {}
    bindings: dict[str, str] = {}
    for cfg in reversed(chain):  # parents first, children override
        widgets.update(cfg.widgets)
        bindings.update(cfg.bindings)
    layered_rules: list[WidgetRule] = []
    for cfg in chain:  # children first, so stable sort keeps them ahead on ties
        layered_rules.extend(cfg.rules)
    rules = sorted(layered_rules, key=lambda r: -r.priority)

    for rule in rules:
        if rule.widget not in widgets:
            raise UnknownWidgetError(f"rule references unknown widget {rule.widget}")
    for prop, widget in sorted(bindings.items()):
        if widget not in widgets:
            raise UnknownWidgetError(f"binding for {prop} references unknown widget {widget}")

    return UiConfig(name=config.name, widgets=widgets, rules=rules, bindings=bindings, extends=None)
