/**
 * Materialize a widget tree into real DOM. Only the browser entry point
 * imports this module; everything else stays DOM-free and node-testable.
 */

import type { VNode } from "./widgets.js";

const BOOLEAN_ATTRS = new Set(["checked", "selected", "disabled"]);

export function materialize(node: VNode | string, doc: Document): Node {
  if (typeof node === "string") {
    return doc.createTextNode(node);
  }
  const element = doc.createElement(node.tag);
  for (const [name, value] of Object.entries(node.attrs)) {
    if (BOOLEAN_ATTRS.has(name)) {
      (element as unknown as Record<string, unknown>)[name] = true;
    } else if (name === "value" && (node.tag === "input" || node.tag === "select")) {
      (element as HTMLInputElement).value = value;
    } else {
      element.setAttribute(name, value);
    }
  }
  for (const child of node.children) {
    element.appendChild(materialize(child, doc));
  }
  if (node.on) {
    for (const [event, handler] of Object.entries(node.on)) {
      element.addEventListener(event, () => {
        const input = element as HTMLInputElement;
        const payload = input.type === "checkbox" ? String(input.checked) : input.value;
        handler(payload);
      });
    }
  }
  return element;
}

export function mount(tree: VNode, container: Element): void {
  container.replaceChildren(materialize(tree, container.ownerDocument));
}
