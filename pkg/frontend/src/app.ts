/**
 * Browser entry point: create a session, render the form, post edits,
 * re-render the returned document. All decisions come from the server.
 */

import { PortalClient } from "./client.js";
import { mount } from "./dom.js";
import { FormController } from "./state.js";
import { h, renderForm, VNode } from "./widgets.js";

function banner(category: string, message: string, onRetry: (() => void) | null): VNode {
  const children: Array<VNode | string> = [`${category}: ${message}`];
  if (onRetry) {
    children.push(h("button", { class: "retry" }, ["retry"], { click: () => onRetry() }));
  }
  return h("div", { class: "error-banner", "data-category": category }, children);
}

export function start(root: Element, baseUrl: string): void {
  const doc = root.ownerDocument;
  const client = new PortalClient(baseUrl);

  const ontologyInput = doc.createElement("input");
  ontologyInput.value = "oncology";
  ontologyInput.id = "ontology-name";
  const openButton = doc.createElement("button");
  openButton.textContent = "open session";
  const header = doc.createElement("div");
  header.className = "session-header";
  header.append("Ontology: ", ontologyInput, openButton);
  const formHost = doc.createElement("div");
  formHost.id = "form-host";
  root.replaceChildren(header, formHost);

  openButton.addEventListener("click", () => {
    void openSession(ontologyInput.value);
  });

  async function openSession(ontology: string): Promise<void> {
    try {
      const session = await client.createSession(ontology);
      const controller = new FormController(client, session.id);
      controller.subscribe((state) => {
        const pieces: VNode[] = [];
        if (state.bannerError) {
          pieces.push(
            banner(state.bannerError.category, state.bannerError.message, state.canRetry ? () => void controller.retry() : null),
          );
        }
        if (state.form) {
          pieces.push(
            renderForm(state.form, (property, value) => void controller.submitValue(property, value), state.inlineError),
          );
        }
        mount(h("div", { class: state.pending ? "portal pending" : "portal" }, pieces), formHost);
      });
      await controller.refresh();
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      mount(banner("session", message, null), formHost);
    }
  }
}

declare global {
  interface Window {
    hibouStart?: typeof start;
  }
}

if (typeof window !== "undefined") {
  window.hibouStart = start;
  const root = document.getElementById("root");
  if (root) {
    start(root, "");
  }
}
