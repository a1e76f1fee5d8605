/**
 * Widget registry and rendering to a plain widget tree.
 *
 * The tree is framework-free data (VNode) so it can be asserted in node
 * tests and materialized into real DOM by dom.ts in the browser. Widgets
 * are resolved by the `widget` name from the form XML; the impl hint is
 * opaque and only surfaces as a tooltip. Unknown widget names fall back
 * to TextField with a visible badge.
 */

import type { FormComponent, FormModel } from "./formModel.js";

export type SubmitHandler = (property: string, value: string | number | boolean) => void;

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: Array<VNode | string>;
  on?: Record<string, (payload: string) => void>;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: Array<VNode | string> = [],
  on?: Record<string, (payload: string) => void>,
): VNode {
  const node: VNode = { tag, attrs, children };
  if (on) node.on = on;
  return node;
}

export type WidgetRenderer = (component: FormComponent, submit: SubmitHandler) => VNode;

class WidgetRegistry {
  private renderers = new Map<string, WidgetRenderer>();

  register(name: string, renderer: WidgetRenderer): void {
    this.renderers.set(name, renderer);
  }

  get(name: string): WidgetRenderer | undefined {
    return this.renderers.get(name);
  }

  list(): string[] {
    return Array.from(this.renderers.keys());
  }
}

export const widgetRegistry = new WidgetRegistry();

function inputAttrs(component: FormComponent, extra: Record<string, string> = {}): Record<string, string> {
  return {
    name: component.property,
    "data-property": component.property,
    title: component.impl,
    ...extra,
  };
}

widgetRegistry.register("TextField", (component, submit) =>
  h(
    "input",
    inputAttrs(component, { type: "text", value: component.value ?? "" }),
    [],
    { change: (raw) => submit(component.property, raw) },
  ),
);

widgetRegistry.register("NumberField", (component, submit) =>
  h(
    "input",
    inputAttrs(component, {
      type: "number",
      value: component.value ?? "",
      ...(component.range ? { min: component.range.lo, max: component.range.hi } : {}),
    }),
    [],
    {
      change: (raw) => {
        const parsed = Number(raw);
        submit(component.property, Number.isNaN(parsed) ? raw : parsed);
      },
    },
  ),
);

widgetRegistry.register("Checkbox", (component, submit) =>
  h(
    "input",
    inputAttrs(component, {
      type: "checkbox",
      ...(component.value === "true" ? { checked: "checked" } : {}),
    }),
    [],
    { change: (raw) => submit(component.property, raw === "true") },
  ),
);

function selectNode(component: FormComponent, submit: SubmitHandler): VNode {
  const options = (component.options ?? []).map((option) =>
    h(
      "option",
      { value: option, ...(component.value === option ? { selected: "selected" } : {}) },
      [option],
    ),
  );
  const placeholder = h("option", { value: "", ...(component.value ? {} : { selected: "selected" }) }, [""]);
  return h("select", inputAttrs(component), [placeholder, ...options], {
    change: (raw) => submit(component.property, raw),
  });
}

widgetRegistry.register("Dropdown", selectNode);
widgetRegistry.register("InstancePicker", selectNode);

widgetRegistry.register("RadioGroup", (component, submit) =>
  h(
    "fieldset",
    inputAttrs(component, { class: "radio-group" }),
    (component.options ?? []).map((option) =>
      h("label", { class: "radio-option" }, [
        h(
          "input",
          {
            type: "radio",
            name: component.property,
            value: option,
            ...(component.value === option ? { checked: "checked" } : {}),
          },
          [],
          { change: () => submit(component.property, option) },
        ),
        option,
      ]),
    ),
  ),
);

export interface RenderedComponent {
  property: string;
  node: VNode;
  usedFallback: boolean;
}

export function renderComponent(component: FormComponent, submit: SubmitHandler): RenderedComponent {
  const renderer = widgetRegistry.get(component.widget);
  const fallback = widgetRegistry.get("TextField")!;
  const usedFallback = renderer === undefined;
  const control = (renderer ?? fallback)(component, submit);
  const children: Array<VNode | string> = [
    h("label", { class: "component-label", for: component.property }, [component.label]),
    control,
  ];
  if (usedFallback) {
    children.push(h("span", { class: "widget-badge", title: component.impl }, [`unknown widget: ${component.widget}`]));
  }
  return {
    property: component.property,
    node: h("div", { class: "component", "data-property": component.property }, children),
    usedFallback,
  };
}

export interface InlineError {
  property: string;
  category: string;
  message: string;
}

export function renderForm(model: FormModel, submit: SubmitHandler, inlineError?: InlineError | null): VNode {
  const componentNodes = model.components.map((component) => {
    const rendered = renderComponent(component, submit);
    if (inlineError && inlineError.property === component.property) {
      rendered.node.children.push(
        h("span", { class: "inline-error", "data-category": inlineError.category }, [inlineError.message]),
      );
    }
    return rendered.node;
  });
  const groups = model.recommendations.map((group) =>
    h(
      "li",
      { class: "recommendation-group" },
      group.map((treatment) => h("span", { class: "treatment", "data-class": treatment }, [treatment])),
    ),
  );
  return h("div", { class: "form", "data-instance": model.instance }, [
    h("div", { class: "components" }, componentNodes),
    h("div", { class: "recommendations" }, [
      h("h2", {}, ["Recommended treatments"]),
      groups.length ? h("ul", {}, groups) : h("p", { class: "no-recommendations" }, ["none yet"]),
    ]),
  ]);
}

/** Property names rendered in a widget tree (round-trip fidelity checks). */
export function renderedProperties(tree: VNode): string[] {
  const out: string[] = [];
  const walk = (node: VNode | string): void => {
    if (typeof node === "string") return;
    if (node.attrs["class"] === "component" && node.attrs["data-property"]) {
      out.push(node.attrs["data-property"]);
    }
    node.children.forEach(walk);
  };
  walk(tree);
  return out;
}
