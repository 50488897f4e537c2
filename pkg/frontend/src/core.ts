// View-model for the operator console, free of any DOM or socket code so the
// component tests (and the scripted end-to-end session) can drive it as-is.
//
// The one rule that matters: panels render ONLY what the last
// affordance_update for that robot said. There is no client-side fallback
// table; a robot the service never described gets an empty, inert panel.

import {
  Ack,
  AffordanceUpdate,
  CameraFrame,
  Err,
  GestureName,
  Inbound,
  NotificationMsg,
  Outbound,
  Snapshot,
  encode,
} from "./protocol.js";

export type PanelView = {
  arrows: string[];
  buttons: string[];
  arrowsVisible: boolean;
};

const EMPTY_PANEL: PanelView = { arrows: [], buttons: [], arrowsVisible: false };

export type Banner = {
  taskIndex: number;
  taskKind: string;
  channel: string;
  issuedAt: number;
};

export type Toast = { mid: string; reason: string; code: string };

export type Briefing = {
  scene: string;
  subject: string;
  sessionIndex: number;
  modality: string;
  zones: unknown[];
  routes: unknown[];
  robots: string[];
};

// avatar tints for the four operational colors the service reports
export const TINTS: Record<string, string> = {
  dark_grey: "#4a4f55",
  green: "#2e9e44",
  red: "#d23b2f",
  yellow: "#e0b421",
};

export const BUTTON_LABELS: Record<string, string> = {
  grasp: "Grasp",
  release: "Release",
  rotate90: "Rotate 90°",
  align: "Align",
  go_charge: "Go charge",
  lift_forks: "Lift forks",
  lower_forks: "Lower forks",
};

export function buttonLabel(name: string): string {
  if (name.startsWith("route:")) return `Start ${name.slice(6)}`;
  if (name.startsWith("grab:")) return name.slice(5);
  return BUTTON_LABELS[name] ?? name;
}

export class ClientCore {
  snapshot: Snapshot | null = null;
  banner: Banner | null = null;
  cameraOn = false;
  cameraFrame: CameraFrame | null = null;
  briefing: Briefing | null = null;
  sessionEnded = false;
  toasts: Toast[] = [];
  events: { kind: string; t: number }[] = [];
  // robot named by the latest per-robot update; joypad sessions have no
  // bound replica, so this is how the console learns its target
  lastPanelRobot: string | null = null;

  private affordances = new Map<string, PanelView>();
  private colors = new Map<string, { color: string; opState: string }>();
  private pending = new Map<string, Inbound>();
  private midCounter = 0;
  private send: (text: string) => void;

  constructor(send: (text: string) => void) {
    this.send = send;
  }

  // ----------------------------------------------------------------- intents

  private post<T extends Inbound>(msg: T): T {
    this.pending.set(msg.mid, msg);
    this.send(encode(msg));
    return msg;
  }

  private nextMid(): string {
    return `m${++this.midCounter}`;
  }

  hello(subject: string | null): Inbound {
    return this.post({
      type: "hello",
      mid: this.nextMid(),
      role: "console",
      subject,
      protocol: 1,
    });
  }

  gesture(gesture: GestureName, robotId: string | null = null): Inbound {
    return this.post({ type: "gesture", mid: this.nextMid(), gesture, robot_id: robotId });
  }

  summon(): Inbound {
    return this.gesture("palm_up");
  }

  grabDevice(robotId: string): Inbound {
    return this.gesture("grab_device", robotId);
  }

  releaseDevice(): Inbound {
    return this.gesture("release_device");
  }

  stowDevice(): Inbound {
    return this.gesture("stow_device");
  }

  toggleCamera(): Inbound {
    return this.gesture("thumb_up");
  }

  panel(action: string, magnitude = 1.0): Inbound {
    return this.post({ type: "panel_action", mid: this.nextMid(), action, magnitude });
  }

  joypad(control: string, value = 1.0): Inbound {
    return this.post({ type: "joypad_input", mid: this.nextMid(), control, value });
  }

  submitSus(answers: Record<string, number>): Inbound {
    return this.post({
      type: "questionnaire_submit",
      mid: this.nextMid(),
      stage: "sus",
      answers,
    });
  }

  submitComparative(
    answers: Record<string, { choice: string; comment?: string }>,
  ): Inbound {
    return this.post({
      type: "questionnaire_submit",
      mid: this.nextMid(),
      stage: "comparative",
      answers,
    });
  }

  endSession(): Inbound {
    return this.post({ type: "session_control", mid: this.nextMid(), op: "end" });
  }

  // ------------------------------------------------------------------ state

  apply(msg: Outbound): void {
    switch (msg.type) {
      case "snapshot":
        this.snapshot = msg;
        for (const d of msg.drones) {
          this.colors.set(d.id, { color: d.color, opState: d.op_state });
        }
        this.cameraOn = msg.controller.camera;
        // activation is visible as the session phase leaving "pending"
        if (this.banner && msg.phase !== "secondary_pending") this.banner = null;
        break;
      case "affordance_update":
        this.applyAffordance(msg);
        break;
      case "notification":
        this.banner = {
          taskIndex: msg.task_index,
          taskKind: msg.task_kind,
          channel: msg.channel,
          issuedAt: msg.issued_at,
        };
        break;
      case "state_color":
        this.colors.set(msg.robot_id, { color: msg.color, opState: msg.op_state });
        break;
      case "camera_frame":
        this.cameraFrame = msg;
        break;
      case "session_event":
        this.events.push({ kind: msg.kind, t: msg.t });
        if (msg.kind === "interaction_activated") this.banner = null;
        if (msg.kind === "session_end") this.sessionEnded = true;
        break;
      case "ack":
        this.applyAck(msg);
        break;
      case "err":
        this.pending.delete(msg.re);
        this.toasts.push({ mid: msg.re, reason: msg.reason, code: msg.code });
        break;
    }
  }

  private applyAffordance(msg: AffordanceUpdate): void {
    this.affordances.set(msg.robot_id, {
      arrows: [...msg.arrows],
      buttons: [...msg.buttons],
      arrowsVisible: msg.arrows_visible,
    });
    if (msg.robot_id !== "") this.lastPanelRobot = msg.robot_id;
  }

  private applyAck(msg: Ack): void {
    const origin = this.pending.get(msg.re);
    this.pending.delete(msg.re);
    if (!origin) return;
    if (origin.type === "hello") {
      const d = msg.data as Record<string, unknown>;
      this.briefing = {
        scene: String(d.scene ?? ""),
        subject: String(d.subject ?? ""),
        sessionIndex: Number(d.session_index ?? 0),
        modality: String(d.modality ?? ""),
        zones: Array.isArray(d.zones) ? d.zones : [],
        routes: Array.isArray(d.routes) ? d.routes : [],
        robots: Array.isArray(d.robots) ? (d.robots as string[]) : [],
      };
    } else if (origin.type === "gesture" && origin.gesture === "thumb_up") {
      // the acknowledged flag, not the optimistic one, decides the sub-view
      this.cameraOn = Boolean((msg.data as Record<string, unknown>).camera);
      if (!this.cameraOn) this.cameraFrame = null;
    }
  }

  // ------------------------------------------------------------------ views

  /** Panel content for one robot; empty unless the service said otherwise. */
  panelFor(robotId: string): PanelView {
    return this.affordances.get(robotId) ?? EMPTY_PANEL;
  }

  /** Device palette entries (grab:<robot> buttons keyed to robot_id ""). */
  palette(): string[] {
    return this.panelFor("").buttons;
  }

  controllerPhase(): string {
    return this.snapshot?.controller.phase ?? "hidden";
  }

  boundRobot(): string {
    return this.snapshot?.controller.robot ?? "";
  }

  colorOf(robotId: string): string {
    return this.colors.get(robotId)?.color ?? "dark_grey";
  }

  opStateOf(robotId: string): string {
    return this.colors.get(robotId)?.opState ?? "freedrive";
  }

  avatarFill(robotId: string): string {
    return TINTS[this.colorOf(robotId)] ?? TINTS.dark_grey;
  }

  pendingCount(): number {
    return this.pending.size;
  }

  takeToasts(): Toast[] {
    const out = this.toasts;
    this.toasts = [];
    return out;
  }
}

// ---------------------------------------------------------------------------
// questionnaire form validation (client side; the service re-validates)

export const SUS_ITEMS = ["q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9", "q10"];
export const COMPARATIVE_ITEMS = ["c1", "c2", "c3"];
export const MODALITY_CHOICES = ["mr", "joypad"];

export function susComplete(answers: Record<string, unknown>): boolean {
  return SUS_ITEMS.every((k) => {
    const v = answers[k];
    return typeof v === "number" && Number.isInteger(v) && v >= 1 && v <= 5;
  });
}

export function comparativeComplete(answers: Record<string, unknown>): boolean {
  // each answer is {choice, comment?}; only the choice gates submission
  return COMPARATIVE_ITEMS.every((k) => {
    const v = answers[k];
    if (typeof v !== "object" || v === null) return false;
    const choice = (v as { choice?: unknown }).choice;
    return typeof choice === "string" && MODALITY_CHOICES.includes(choice);
  });
}
