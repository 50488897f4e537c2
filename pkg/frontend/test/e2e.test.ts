/** End to end against a live service: spawn the gateway, connect a real
 * WebSocket, and run one replica-modality drone task from notification to
 * task_completed. The whole run must land well inside two minutes.
 *
 * No browser in this environment, so the DOM layer stays untested here;
 * ClientCore carries all decision state and is what this exercises.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ClientCore } from "../src/core.js";
import { decode } from "../src/protocol.js";

const TIME_SCALE = 8; // sim seconds per wall second
const NOTIFY_DELAY = 0.5; // sim seconds until the first task banner

let workDir: string;
let server: ChildProcess;
let serverUrl: string;
let serverLog = "";

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "console-e2e-"));
  const planPath = join(workDir, "plan.json");
  execFileSync("python3", [
    "-m", "warelab.gateway.cli", "plan",
    "--subjects", "4", "--seed", "7", "-o", planPath,
  ]);

  // -u so the "serving ... on ws://..." line is not stuck in a pipe buffer
  server = spawn("python3", [
    "-u", "-m", "warelab.gateway.cli", "serve",
    "--plan", planPath,
    "--subject", "s02",
    "--session", "0",
    "--port", "0",
    "--notify-delay", String(NOTIFY_DELAY),
    "--time-scale", String(TIME_SCALE),
  ], { env: { ...process.env, WARELAB_DATA_DIR: workDir } });

  serverUrl = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(
      () => reject(new Error(`server never announced itself:\n${serverLog}`)),
      15000,
    );
    const sniff = (chunk: Buffer) => {
      serverLog += chunk.toString();
      const m = serverLog.match(/ws:\/\/127\.0\.0\.1:(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(m[0]);
      }
    };
    server.stdout?.on("data", sniff);
    server.stderr?.on("data", sniff);
    server.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early (${code}):\n${serverLog}`));
    });
  });
});

afterAll(() => {
  server?.kill("SIGTERM");
  rmSync(workDir, { recursive: true, force: true });
});

function waitFor(
  pred: () => boolean,
  what: string,
  ms = 30000,
): Promise<void> {
  return new Promise((resolve, reject) => {
    const t0 = Date.now();
    const timer = setInterval(() => {
      if (pred()) {
        clearInterval(timer);
        resolve();
      } else if (Date.now() - t0 > ms) {
        clearInterval(timer);
        reject(new Error(`timed out waiting for ${what}\nserver:\n${serverLog}`));
      }
    }, 10);
  });
}

describe("replica-modality drone task", () => {
  it("completes from notification to task_completed", async () => {
    const t0 = Date.now();
    const ws = new WebSocket(serverUrl);
    const core = new ClientCore((text) => ws.send(text));

    let flying = false;
    let target: [number, number] = [0, 0];
    let released = false;

    const panel = () => core.panelFor("drone1");
    const drone = () => core.snapshot?.drones.find((d) => d.id === "drone1");

    const axis = (name: string, err: number) => {
      // velocity holds until recommanded, so close-enough sends zero
      const m = Math.abs(err) < 0.05 ? 0 : Math.min(1, Math.abs(err) / 2);
      core.panel(err >= 0 ? `+${name}` : `-${name}`, m);
    };

    const flightStep = () => {
      const d = drone();
      if (!d || !flying) return;
      if ((core.snapshot?.seq ?? 0) % 3 !== 0) return; // ~10 Hz is plenty
      axis("x", target[0] - d.x);
      axis("y", target[1] - d.y);
      if (!released && panel().buttons.includes("release")) {
        released = true;
        flying = false;
        core.panel("release");
      }
    };

    ws.on("message", (data) => {
      const msg = decode(data.toString());
      if (!msg) return;
      core.apply(msg);
      if (msg.type === "snapshot") flightStep();
    });

    await new Promise<void>((resolve, reject) => {
      ws.once("open", () => resolve());
      ws.once("error", reject);
    });

    core.hello("s02");
    await waitFor(() => core.briefing !== null, "hello briefing");
    expect(core.briefing?.modality).toBe("mr");
    expect(core.briefing?.sessionIndex).toBe(0);

    const landing = (core.briefing?.zones as { id: string; center: number[] }[])
      .find((z) => z.id === "landing1");
    expect(landing).toBeDefined();
    target = [landing!.center[0], landing!.center[1]];

    // task banner first; opening the panel before it would not activate
    await waitFor(() => core.banner !== null, "task notification");
    expect(core.banner?.taskKind).toBe("drone_lift");

    core.summon();
    await waitFor(
      () => core.palette().includes("grab:drone1"),
      "palette with drone entry",
    );
    core.grabDevice("drone1");
    await waitFor(
      () => core.controllerPhase() === "device_grabbed",
      "replica in hand",
    );
    core.releaseDevice();
    await waitFor(
      () => core.controllerPhase() === "panel_open" && core.boundRobot() === "drone1",
      "panel bound to drone1",
    );

    // activation clears the banner once the service says so
    await waitFor(() => core.banner === null, "banner cleared by activation");
    expect(core.snapshot?.phase).toBe("secondary_active");

    await waitFor(() => panel().buttons.includes("grasp"), "grasp offered");
    core.panel("grasp");
    await waitFor(() => drone()?.carried === "box1", "box attached");

    flying = true;
    await waitFor(() => released, "release pressed over the pad", 60000);
    await waitFor(
      () => core.events.some((e) => e.kind === "task_completed"),
      "task_completed event",
    );

    const elapsed = Date.now() - t0;
    expect(elapsed).toBeLessThan(120000);

    // the completion event can outrun the next snapshot; wait until the
    // freed box is actually observed, then hold it to the pad
    const box1 = () => core.snapshot?.boxes.find((b) => b.id === "box1");
    await waitFor(() => box1()?.carried_by === "", "box resting free");
    const box = box1();
    expect(Math.hypot(box!.x - target[0], box!.y - target[1])).toBeLessThan(1.2);

    ws.close();
    // eslint-disable-next-line no-console
    console.log(`drone task done in ${(elapsed / 1000).toFixed(1)}s wall`);
  });
});
