/** The committed conformance.json is the contract: panels must surface
 * exactly what the service's tables say, and the client must style every
 * state the tables can name. Regenerate the fixture with
 * `warelab fixture -o frontend/conformance.json` after service changes.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { ClientCore, TINTS } from "../src/core.js";
import type { AffordanceUpdate, StateColor } from "../src/protocol.js";

type DroneRow = {
  state: string;
  autonomous_flight: boolean;
  vision_available: boolean;
  arrows: string[];
  arrows_visible: boolean;
  buttons: string[];
  color: string;
};

type LifecycleRow = {
  phase: string;
  gesture: string;
  next: string;
  binds?: string | null;
};

const fixture = JSON.parse(
  readFileSync(new URL("../conformance.json", import.meta.url), "utf-8"),
) as {
  version: number;
  colors: Record<string, string>;
  drone_arrows: string[];
  agv_arrows: string[];
  agv_rules: {
    fork_toggle: Record<string, string>;
    idle: { arrows: string[]; arrows_visible: boolean; buttons: string[] };
    route_active: { arrows: string[]; arrows_visible: boolean; buttons: string[] };
  };
  drone_affordances: DroneRow[];
  lifecycle: LifecycleRow[];
};

function coreWith(update: Omit<AffordanceUpdate, "type">): ClientCore {
  const core = new ClientCore(() => {});
  core.apply({ type: "affordance_update", ...update });
  return core;
}

describe("fixture shape", () => {
  it("is the version this console was written against", () => {
    expect(fixture.version).toBe(1);
  });

  it("covers the full state/flag grid", () => {
    expect(fixture.drone_affordances).toHaveLength(16);
    const seen = new Set(
      fixture.drone_affordances.map(
        (r) => `${r.state}/${r.autonomous_flight}/${r.vision_available}`,
      ),
    );
    expect(seen.size).toBe(16);
    expect(fixture.lifecycle).toHaveLength(24);
  });
});

describe("panel mirrors the affordance tables", () => {
  for (const row of fixture.drone_affordances) {
    const label =
      `${row.state} ${row.autonomous_flight ? "auto" : "manual"}` +
      `${row.vision_available ? " vision" : ""}`;
    it(label, () => {
      const core = coreWith({
        robot_id: "drone1",
        arrows: row.arrows,
        buttons: row.buttons,
        arrows_visible: row.arrows_visible,
      });
      const view = core.panelFor("drone1");
      expect(view.arrows).toEqual(row.arrows);
      expect(view.buttons).toEqual(row.buttons);
      expect(view.arrowsVisible).toBe(row.arrows_visible);
      // the robot we never heard about stays empty, whatever drone1 got
      expect(core.panelFor("drone2")).toEqual({
        arrows: [],
        buttons: [],
        arrowsVisible: false,
      });
    });
  }

  it("offers grasp exactly in ready_to_pick", () => {
    for (const row of fixture.drone_affordances) {
      expect(row.buttons.includes("grasp")).toBe(row.state === "ready_to_pick");
    }
  });

  it("offers release and rotate90 exactly in ready_to_release", () => {
    for (const row of fixture.drone_affordances) {
      const there = row.state === "ready_to_release";
      expect(row.buttons.includes("release")).toBe(there);
      expect(row.buttons.includes("rotate90")).toBe(there);
      expect(row.buttons.includes("align")).toBe(there && row.vision_available);
    }
  });

  it("hides arrows only while an autonomous pick runs", () => {
    for (const row of fixture.drone_affordances) {
      const hidden = row.state === "picking" && row.autonomous_flight;
      expect(row.arrows_visible).toBe(!hidden);
      // hidden means not offered at all, not merely greyed out
      expect(row.arrows).toEqual(hidden ? [] : fixture.drone_arrows);
    }
  });
});

describe("transporter rules", () => {
  it("idle offers driving, routes, and charging", () => {
    expect(fixture.agv_rules.idle.arrows).toEqual(fixture.agv_arrows);
    expect(fixture.agv_rules.idle.arrows_visible).toBe(true);
    expect(fixture.agv_rules.idle.buttons).toContain("go_charge");
  });

  it("an active route leaves only the fork toggle", () => {
    expect(fixture.agv_rules.route_active.arrows).toEqual([]);
    expect(fixture.agv_rules.route_active.arrows_visible).toBe(false);
    expect(fixture.agv_rules.route_active.buttons).toEqual(["<fork_toggle>"]);
  });

  it("fork toggle flips lift/lower on fork state", () => {
    expect(fixture.agv_rules.fork_toggle).toEqual({
      false: "lift_forks",
      true: "lower_forks",
    });
  });
});

describe("colors", () => {
  it("every fixture color has a tint and vice versa", () => {
    const named = new Set(Object.values(fixture.colors));
    expect(named).toEqual(new Set(Object.keys(TINTS)));
  });

  it("avatar fill follows state_color messages", () => {
    const core = new ClientCore(() => {});
    for (const [state, color] of Object.entries(fixture.colors)) {
      const msg: StateColor = {
        type: "state_color",
        robot_id: "drone1",
        color,
        op_state: state,
      };
      core.apply(msg);
      expect(core.colorOf("drone1")).toBe(color);
      expect(core.opStateOf("drone1")).toBe(state);
      expect(core.avatarFill("drone1")).toBe(TINTS[color]);
    }
  });

  it("drone rows quote the same state colors", () => {
    for (const row of fixture.drone_affordances) {
      expect(row.color).toBe(fixture.colors[row.state]);
    }
  });
});

describe("device lifecycle table", () => {
  it("has exactly the four legal transitions", () => {
    const legal = fixture.lifecycle.filter((r) => r.next !== "invalid");
    expect(legal).toEqual([
      { binds: null, gesture: "palm_up", next: "palette_shown", phase: "hidden" },
      { binds: "r2", gesture: "grab_device", next: "device_grabbed", phase: "palette_shown" },
      { binds: "r1", gesture: "release_device", next: "panel_open", phase: "device_grabbed" },
      { binds: null, gesture: "stow_device", next: "hidden", phase: "panel_open" },
    ]);
  });

  it("enumerates every phase/gesture pair once", () => {
    const seen = new Set(fixture.lifecycle.map((r) => `${r.phase}|${r.gesture}`));
    expect(seen.size).toBe(24);
    const phases = new Set(fixture.lifecycle.map((r) => r.phase));
    expect(phases).toEqual(
      new Set(["hidden", "palette_shown", "device_grabbed", "panel_open"]),
    );
  });
});
