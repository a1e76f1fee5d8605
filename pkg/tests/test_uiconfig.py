"""UI-config document tests: parsing, duplicates, rule conditions."""

from __future__ import annotations

import pytest

from hibou.errors import DuplicateDeclarationError, SyntaxParseError, UnknownNameError
from hibou.uiconfig import WidgetRule, parse_ui_config, resolve_config


def test_full_document_parses():
    cfg = parse_ui_config(
        "# custom layer\n"
        "UiConfig(custom)\n"
        "Extends(default)\n"
        'Widget(RadioGroup "ui.Radio")\n'
        "WidgetRule(100 EnumRange RadioGroup)\n"
        "WidgetRule(50 ObjectRange(Thing) RadioGroup)\n"
        "BindWidget(age RadioGroup)\n"
    )
    assert cfg.name == "custom"
    assert cfg.extends == "default"
    assert cfg.widgets == {"RadioGroup": "ui.Radio"}
    assert cfg.rules == [
        WidgetRule(100, "enum", "RadioGroup"),
        WidgetRule(50, "object", "RadioGroup", object_filter="Thing"),
    ]
    assert cfg.bindings == {"age": "RadioGroup"}


def test_missing_header_rejected():
    with pytest.raises(SyntaxParseError):
        parse_ui_config('Widget(W "x")')
    with pytest.raises(SyntaxParseError):
        parse_ui_config("")


def test_duplicate_priority_rejected():
    with pytest.raises(DuplicateDeclarationError):
        parse_ui_config(
            'UiConfig(c) Widget(A "a") Widget(B "b")'
            " WidgetRule(5 Any A) WidgetRule(5 EnumRange B)"
        )


def test_duplicate_widget_and_binding_rejected():
    with pytest.raises(DuplicateDeclarationError):
        parse_ui_config('UiConfig(c) Widget(A "a") Widget(A "b")')
    with pytest.raises(DuplicateDeclarationError):
        parse_ui_config('UiConfig(c) Widget(A "a") BindWidget(p A) BindWidget(p A)')


def test_bad_condition_rejected():
    with pytest.raises(SyntaxParseError):
        parse_ui_config('UiConfig(c) Widget(A "a") WidgetRule(5 Sparkly A)')


def test_unknown_parent_rejected_at_resolve():
    cfg = parse_ui_config("UiConfig(c) Extends(ghost)")
    with pytest.raises(UnknownNameError):
        resolve_config(cfg)


def test_rule_priority_must_be_integer():
    with pytest.raises(SyntaxParseError):
        parse_ui_config('UiConfig(c) Widget(A "a") WidgetRule(1.5 Any A)')
