import assert from "node:assert/strict";
import { test } from "node:test";

import { PortalClient } from "../src/client.js";
import { FormController } from "../src/state.js";

const FORM_A = '<form instance="c">\n  <components>\n    <component property="age" widget="NumberField" impl="x">\n      <label>age</label>\n    </component>\n  </components>\n  <recommendations/>\n</form>\n';
const FORM_B = FORM_A.replace("<recommendations/>", '<recommendations><group><treatment class="T"/></group></recommendations>');

type Responder = (path: string, init?: RequestInit) => Promise<Response>;

function clientWith(responder: Responder): PortalClient {
  const fetchImpl = ((input: RequestInfo | URL, init?: RequestInit) =>
    responder(String(input), init)) as typeof fetch;
  return new PortalClient("", fetchImpl);
}

function xmlResponse(body: string): Response {
  return new Response(body, { status: 200, headers: { "Content-Type": "application/xml" } });
}

function errorResponse(status: number, category: string, message: string): Response {
  return new Response(JSON.stringify({ category, message }), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

test("refresh loads and parses the form", async () => {
  const controller = new FormController(clientWith(async () => xmlResponse(FORM_A)), "s1");
  await controller.refresh();
  const state = controller.getState();
  assert.equal(state.form?.instance, "c");
  assert.equal(state.form?.components[0]?.property, "age");
  assert.equal(state.bannerError, null);
});

test("successful write replaces the entire form state", async () => {
  let calls = 0;
  const controller = new FormController(
    clientWith(async (path) => {
      calls += 1;
      return path.endsWith("/form") ? xmlResponse(FORM_A) : xmlResponse(FORM_B);
    }),
    "s1",
  );
  await controller.refresh();
  await controller.submitValue("age", 76);
  assert.deepEqual(controller.getState().form?.recommendations, [["T"]]);
  assert.equal(calls, 2);
});

test("4xx shows the category inline at the component and keeps the form", async () => {
  const controller = new FormController(
    clientWith(async (path) =>
      path.endsWith("/form") ? xmlResponse(FORM_A) : errorResponse(400, "range-violation", "value 999 out of range"),
    ),
    "s1",
  );
  await controller.refresh();
  const before = controller.getState().form;
  await controller.submitValue("age", 999);
  const state = controller.getState();
  assert.deepEqual(state.inlineError, {
    property: "age",
    category: "range-violation",
    message: "value 999 out of range",
  });
  assert.equal(state.form, before);
  assert.equal(state.canRetry, false);
});

test("network failure keeps state and offers a retry that resubmits", async () => {
  let failNext = true;
  const posted: string[] = [];
  const controller = new FormController(
    clientWith(async (path, init) => {
      if (path.endsWith("/form")) return xmlResponse(FORM_A);
      if (failNext) {
        failNext = false;
        throw new TypeError("fetch failed");
      }
      posted.push(String(init?.body));
      return xmlResponse(FORM_B);
    }),
    "s1",
  );
  await controller.refresh();
  await controller.submitValue("age", 76);
  let state = controller.getState();
  assert.equal(state.bannerError?.category, "network");
  assert.equal(state.canRetry, true);
  assert.equal(state.form?.recommendations.length, 0); // state retained

  await controller.retry();
  state = controller.getState();
  assert.equal(state.bannerError, null);
  assert.deepEqual(state.form?.recommendations, [["T"]]);
  assert.deepEqual(posted, ['{"property":"age","value":76}']);
});

test("writes are serialized: at most one in flight, submission order kept", async () => {
  let inFlight = 0;
  let maxInFlight = 0;
  const order: string[] = [];
  const controller = new FormController(
    clientWith(async (path, init) => {
      if (path.endsWith("/form")) return xmlResponse(FORM_A);
      inFlight += 1;
      maxInFlight = Math.max(maxInFlight, inFlight);
      order.push(JSON.parse(String(init?.body)).property);
      await new Promise((resolve) => setTimeout(resolve, 5));
      inFlight -= 1;
      return xmlResponse(FORM_B);
    }),
    "s1",
  );
  await controller.refresh();
  await Promise.all([
    controller.submitValue("a", 1),
    controller.submitValue("b", 2),
    controller.submitValue("c", 3),
  ]);
  assert.equal(maxInFlight, 1);
  assert.deepEqual(order, ["a", "b", "c"]);
});

test("stale refresh response is discarded after a newer write applied", async () => {
  let releaseRefresh: (() => void) | null = null;
  const slowRefresh = new Promise<void>((resolve) => {
    releaseRefresh = () => resolve();
  });
  const controller = new FormController(
    clientWith(async (path) => {
      if (path.endsWith("/form")) {
        await slowRefresh;
        return xmlResponse(FORM_A); // stale: no recommendations
      }
      return xmlResponse(FORM_B);
    }),
    "s1",
  );
  const refreshing = controller.refresh(); // starts first, resolves last
  await controller.submitValue("age", 76);
  assert.deepEqual(controller.getState().form?.recommendations, [["T"]]);
  releaseRefresh!();
  await refreshing;
  // the late response must not clobber the newer write result
  assert.deepEqual(controller.getState().form?.recommendations, [["T"]]);
});

test("malformed XML response keeps previous state and raises a banner", async () => {
  let first = true;
  const controller = new FormController(
    clientWith(async (path) => {
      if (path.endsWith("/form")) return xmlResponse(FORM_A);
      if (first) {
        first = false;
        return xmlResponse("<form broken");
      }
      return xmlResponse(FORM_B);
    }),
    "s1",
  );
  await controller.refresh();
  const before = controller.getState().form;
  await controller.submitValue("age", 76);
  const state = controller.getState();
  assert.equal(state.bannerError?.category, "malformed-xml");
  assert.equal(state.form, before);
});
