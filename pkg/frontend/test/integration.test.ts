/**
 * Round-trip test against the real portal: spawns `hibou serve`, pushes the
 * demo session's six values through the client state machine, and checks
 * the recommendation groups against the CLI run on the same journal.
 * Requires the Python package to be installed (pip install -e ..).
 */

import assert from "node:assert/strict";
import { after, before, test } from "node:test";
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { PortalClient } from "../src/client.js";
import { FormController } from "../src/state.js";
import { renderForm, renderedProperties } from "../src/widgets.js";

const REPO = resolve(import.meta.dirname, "..", "..", "..");
const DEMO = join(REPO, "demo");

const DEMO_STEPS: Array<[string, string | number | boolean]> = [
  ["diagnosis", "breast_cancer"],
  ["age", 76],
  ["tumorSizeMm", 18],
  ["receptorStatus", "er_positive"],
  ["performanceStatus", 1],
  ["notes", "routine referral"],
];

let portal: ChildProcess;
let baseUrl = "";
let workDir = "";
let journalDir = "";

function freePort(): Promise<number> {
  return new Promise((resolvePort, rejectPort) => {
    const probe = createServer();
    probe.once("error", rejectPort);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        rejectPort(new Error("no port assigned"));
        return;
      }
      probe.close(() => resolvePort(address.port));
    });
  });
}

before(async () => {
  workDir = mkdtempSync(join(tmpdir(), "hibou-webui-"));
  journalDir = join(workDir, "journals");
  const port = await freePort();
  const configPath = join(workDir, "portal.conf");
  writeFileSync(
    configPath,
    `port=${port}\nontology_dir=${DEMO}\njournal_dir=${journalDir}\n`,
    "utf-8",
  );
  portal = spawn("hibou", ["serve", "--config", configPath], { stdio: ["ignore", "pipe", "pipe"] });
  baseUrl = await new Promise<string>((resolvePort, rejectPort) => {
    let buffer = "";
    const timer = setTimeout(() => rejectPort(new Error(`portal did not start: ${buffer}`)), 15000);
    portal.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = /portal listening on (http:\/\/[0-9.]+:\d+)/.exec(buffer);
      if (match) {
        clearTimeout(timer);
        resolvePort(match[1]!);
      }
    });
    portal.stderr!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
    });
    portal.on("exit", (code) => rejectPort(new Error(`portal exited early (${code}): ${buffer}`)));
  });
});

after(() => {
  portal?.kill();
});

test("browser round trip matches the CLI on the same journal", async () => {
  const client = new PortalClient(baseUrl);
  const session = await client.createSession("oncology");
  const controller = new FormController(client, session.id);
  await controller.refresh();

  let visible = controller.getState().form!.components.map((c) => c.property);
  assert.ok(visible.includes("diagnosis"));
  assert.ok(!visible.includes("tumorSizeMm"), "cancer-only property hidden before diagnosis");

  for (const [property, value] of DEMO_STEPS) {
    await controller.submitValue(property, value);
    assert.equal(controller.getState().inlineError, null, String(property));
    if (property === "diagnosis") {
      // newly visible properties appear right after the triggering entry
      visible = controller.getState().form!.components.map((c) => c.property);
      assert.ok(visible.includes("tumorSizeMm"));
      assert.ok(visible.includes("receptorStatus"));
    }
  }

  const groups = controller.getState().form!.recommendations;
  assert.deepEqual(groups, [["AromataseInhibitor"], ["BreastConservingSurgery"], ["Chemotherapy"]]);
  assert.deepEqual(await client.getRecommendations(session.id), groups);

  // rendered component set corresponds one-to-one with the document
  const tree = renderForm(controller.getState().form!, () => {});
  assert.deepEqual(
    renderedProperties(tree),
    controller.getState().form!.components.map((c) => c.property),
  );

  // same journal, decided by the CLI instead of the live server
  const journal = readFileSync(join(journalDir, `${session.id}.journal`), "utf-8").trimEnd().split("\n");
  const header = journal[0]!.split("\t");
  assert.equal(header[0], "session");
  const instance = header[3]!;
  const lastValue = new Map<string, string>();
  for (const line of journal.slice(1)) {
    const [, verb, prop, valueText] = line.split("\t");
    assert.equal(verb, "set");
    lastValue.set(prop!, valueText!);
  }
  const overlayLines = [readFileSync(join(DEMO, "oncology.hfs"), "utf-8"), `ClassAssertion(Patient ${instance})`];
  for (const [prop, valueText] of lastValue) {
    if (/^[A-Za-z_][A-Za-z0-9_]*$/.test(valueText) && !["true", "false"].includes(valueText)) {
      overlayLines.push(`ObjectPropertyAssertion(${prop} ${instance} ${valueText})`);
    } else {
      overlayLines.push(`DataPropertyAssertion(${prop} ${instance} ${valueText})`);
    }
  }
  const overlayPath = join(workDir, "overlay.hfs");
  writeFileSync(overlayPath, overlayLines.join("\n") + "\n", "utf-8");
  const cli = spawnSync("hibou", ["recommend", "-o", overlayPath, "-i", instance], { encoding: "utf-8" });
  assert.equal(cli.status, 0, cli.stderr);
  assert.deepEqual(JSON.parse(cli.stdout), groups);
});

test("range-violating entry shows an inline error and alters nothing else", async () => {
  const client = new PortalClient(baseUrl);
  const session = await client.createSession("oncology");
  const controller = new FormController(client, session.id);
  await controller.refresh();
  const before = controller.getState().form!;

  await controller.submitValue("age", 400);
  const state = controller.getState();
  assert.equal(state.inlineError?.property, "age");
  assert.equal(state.inlineError?.category, "range-violation");
  assert.deepEqual(state.form, before); // full state retained, nothing re-rendered differently

  await controller.submitValue("age", 40);
  assert.equal(controller.getState().inlineError, null);
  assert.equal(
    controller.getState().form!.components.find((c) => c.property === "age")?.value,
    "40",
  );
});
