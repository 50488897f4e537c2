/** Browser entry: WebSocket + DOM + keyboard + gamepad glued to ClientCore.
 *
 * Everything that can be unit-tested lives in core.ts and render.ts; this
 * file is wiring. Query params: ?server=ws://host:8765&subject=s01
 */

import {
  COMPARATIVE_ITEMS,
  ClientCore,
  MODALITY_CHOICES,
  SUS_ITEMS,
  buttonLabel,
  comparativeComplete,
  susComplete,
} from "./core.js";
import { decode } from "./protocol.js";
import { drawCameraView, drawScene, fitViewport } from "./render.js";

const ARROW_REPEAT_MS = 100; // held arrow resends at 10 Hz
const RECONNECT_MS = 1500;

const SUS_TEXT: Record<string, string> = {
  q1: "I would use this console frequently",
  q2: "The console felt unnecessarily complex",
  q3: "The console was easy to use",
  q4: "I would need support to use it",
  q5: "The functions were well integrated",
  q6: "There was too much inconsistency",
  q7: "Most people would learn it quickly",
  q8: "The console felt cumbersome",
  q9: "I felt confident using it",
  q10: "I needed to learn a lot beforehand",
};

const COMPARATIVE_TEXT: Record<string, string> = {
  c1: "Which control did you prefer overall?",
  c2: "Which felt better for flying the drone?",
  c3: "Which felt better for routing the transporter?",
};

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

const params = new URLSearchParams(location.search);
const serverUrl = params.get("server") ?? "ws://127.0.0.1:8765";
const subjectId = params.get("subject");

const floor = $("floor") as HTMLCanvasElement;
const cameraCanvas = $("camera") as HTMLCanvasElement;
const overlay = $("overlay");
const sessionLabel = $("session-label");
const bannerEl = $("banner");
const paletteEl = $("palette");
const panelEl = $("panel");
const panelRobotEl = $("panel-robot");
const avatarEl = $("avatar");
const arrowsEl = $("arrows");
const panelButtonsEl = $("panel-buttons");
const joypadSection = $("joypad-section");
const joypadState = $("joypad-state");
const joypadFallback = $("joypad-fallback");
const toastsEl = $("toasts");
const susForm = $("sus-form") as HTMLFormElement;
const comparativeForm = $("comparative-form") as HTMLFormElement;
const endButton = $("end-session") as HTMLButtonElement;

let ws: WebSocket | null = null;
const core = new ClientCore((text) => {
  if (ws && ws.readyState === WebSocket.OPEN) ws.send(text);
});

function connect(): void {
  ws = new WebSocket(serverUrl);
  ws.onopen = () => {
    overlay.classList.remove("on");
    core.hello(subjectId);
  };
  ws.onmessage = (ev) => {
    const msg = decode(String(ev.data));
    if (msg) core.apply(msg);
    syncDom();
  };
  ws.onclose = () => {
    overlay.classList.add("on");
    if (!core.sessionEnded) setTimeout(connect, RECONNECT_MS);
  };
}

/* ---------------- side panel ---------------- */

// Glyphs for the arrow names the service offers; anything unlisted
// renders under its wire name so nothing is ever silently dropped.
const ARROW_GLYPH: Record<string, string> = {
  "+x": "↑", "-x": "↓", "+y": "←", "-y": "→",
  "+z": "Z+", "-z": "Z-",
  forward: "↑", backward: "↓",
  yaw_ccw: "↺", yaw_cw: "↻",
};

let repeatTimer: number | null = null;

function stopRepeat(): void {
  if (repeatTimer !== null) {
    clearInterval(repeatTimer);
    repeatTimer = null;
  }
}

function holdToDrive(btn: HTMLButtonElement, fire: () => void): void {
  btn.addEventListener("pointerdown", (ev) => {
    ev.preventDefault();
    stopRepeat();
    fire();
    repeatTimer = window.setInterval(fire, ARROW_REPEAT_MS);
  });
  for (const kind of ["pointerup", "pointerleave", "pointercancel"]) {
    btn.addEventListener(kind, stopRepeat);
  }
}

function renderPanel(): void {
  const robot = core.boundRobot();
  const mr = core.briefing?.modality !== "joypad";
  if (!robot || !mr) {
    panelEl.classList.remove("on");
    stopRepeat();
    return;
  }
  panelEl.classList.add("on");
  panelRobotEl.textContent = robot;
  avatarEl.style.background = core.avatarFill(robot);
  const view = core.panelFor(robot);

  arrowsEl.replaceChildren();
  if (view.arrowsVisible) {
    for (const name of view.arrows) {
      const btn = document.createElement("button");
      btn.textContent = ARROW_GLYPH[name] ?? name;
      holdToDrive(btn, () => core.panel(name));
      arrowsEl.appendChild(btn);
    }
  }

  panelButtonsEl.replaceChildren();
  for (const name of view.buttons) {
    const btn = document.createElement("button");
    btn.textContent = buttonLabel(name);
    btn.onclick = () => core.panel(name);
    panelButtonsEl.appendChild(btn);
  }
}

function renderPalette(): void {
  const entries = core.palette();
  if (core.briefing?.modality === "joypad") {
    paletteEl.textContent = "joypad session: no palette";
    return;
  }
  if (entries.length === 0) {
    paletteEl.textContent = "press P to summon";
    return;
  }
  paletteEl.replaceChildren();
  for (const name of entries) {
    const btn = document.createElement("button");
    btn.textContent = buttonLabel(name);
    // drag metaphor: press grabs the replica, letting go drops it in place
    btn.addEventListener("pointerdown", () => {
      if (name.startsWith("grab:")) core.grabDevice(name.slice(5));
    });
    btn.addEventListener("pointerup", () => core.releaseDevice());
    paletteEl.appendChild(btn);
  }
}

/* ---------------- joypad modality ---------------- */

// No bound replica in a joypad session; the target robot is whoever the
// per-robot updates name, and the widgets mirror its live affordances.
let gamepadIndex: number | null = null;

function renderJoypad(): void {
  const target = core.lastPanelRobot;
  const view = target ? core.panelFor(target) : null;
  joypadFallback.replaceChildren();
  if (!view) return;
  if (view.arrowsVisible) {
    for (const name of view.arrows) {
      const btn = document.createElement("button");
      btn.textContent = ARROW_GLYPH[name] ?? name;
      holdToDrive(btn, () => core.joypad(name));
      joypadFallback.appendChild(btn);
    }
  }
  for (const name of view.buttons) {
    const btn = document.createElement("button");
    btn.textContent = buttonLabel(name);
    btn.onclick = () => core.joypad(name);
    joypadFallback.appendChild(btn);
  }
}

let lastPadSend = 0;

function pollGamepad(): void {
  const pads = navigator.getGamepads ? navigator.getGamepads() : [];
  const pad = gamepadIndex !== null ? pads[gamepadIndex] : null;
  if (!pad) return;
  const now = performance.now();
  if (now - lastPadSend < ARROW_REPEAT_MS) return; // don't flood at frame rate
  lastPadSend = now;
  const view = core.lastPanelRobot ? core.panelFor(core.lastPanelRobot) : null;
  if (!view) return;
  const offered = new Set(view.arrowsVisible ? view.arrows : []);
  const dead = 0.25;
  const axis = (i: number) => (Math.abs(pad.axes[i] ?? 0) > dead ? pad.axes[i] : 0);
  const feed = (name: string, value: number) => {
    if (offered.has(name)) core.joypad(name, value);
  };
  const lx = axis(0), ly = axis(1), rx = axis(2), ry = axis(3);
  // stick up drives the body's forward axis whichever name it goes by
  if (ly) feed(ly < 0 ? "+x" : "-x", Math.abs(ly));
  if (ly) feed(ly < 0 ? "forward" : "backward", Math.abs(ly));
  if (lx) feed(lx < 0 ? "+y" : "-y", Math.abs(lx));
  if (rx) feed(rx < 0 ? "yaw_ccw" : "yaw_cw", Math.abs(rx));
  if (ry) feed(ry < 0 ? "+z" : "-z", Math.abs(ry));
  if (pad.buttons[0]?.pressed && view.buttons.length > 0) {
    core.joypad(view.buttons[0]);
  }
}

window.addEventListener("gamepadconnected", (ev) => {
  gamepadIndex = (ev as GamepadEvent).gamepad.index;
  joypadState.textContent = `gamepad: ${(ev as GamepadEvent).gamepad.id}`;
});
window.addEventListener("gamepaddisconnected", () => {
  gamepadIndex = null;
  joypadState.textContent = "no gamepad; fallback buttons below";
});

/* ---------------- questionnaires ---------------- */

function buildSusForm(): void {
  susForm.replaceChildren();
  const h = document.createElement("h2");
  h.textContent = "Usability (1 = disagree, 5 = agree)";
  susForm.appendChild(h);
  for (const item of SUS_ITEMS) {
    const row = document.createElement("div");
    row.className = "row";
    const label = document.createElement("span");
    label.textContent = SUS_TEXT[item];
    row.appendChild(label);
    const picks = document.createElement("span");
    for (let v = 1; v <= 5; v++) {
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = item;
      radio.value = String(v);
      radio.title = String(v);
      picks.appendChild(radio);
    }
    row.appendChild(picks);
    susForm.appendChild(row);
  }
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Submit usability form";
  susForm.appendChild(submit);
  susForm.onsubmit = (ev) => {
    ev.preventDefault();
    const data = new FormData(susForm);
    const answers: Record<string, number> = {};
    for (const item of SUS_ITEMS) {
      const v = data.get(item);
      if (v !== null) answers[item] = Number(v);
    }
    if (!susComplete(answers)) return;
    core.submitSus(answers);
    susForm.classList.remove("on");
  };
}

function buildComparativeForm(): void {
  comparativeForm.replaceChildren();
  const h = document.createElement("h2");
  h.textContent = "Comparing the two sessions";
  comparativeForm.appendChild(h);
  for (const item of COMPARATIVE_ITEMS) {
    const label = document.createElement("label");
    label.textContent = COMPARATIVE_TEXT[item];
    comparativeForm.appendChild(label);
    const select = document.createElement("select");
    select.name = item;
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = "(choose)";
    select.appendChild(blank);
    for (const choice of MODALITY_CHOICES) {
      const opt = document.createElement("option");
      opt.value = choice;
      opt.textContent = choice;
      select.appendChild(opt);
    }
    comparativeForm.appendChild(select);
    const comment = document.createElement("input");
    comment.type = "text";
    comment.name = `${item}-comment`;
    comment.placeholder = "comment (optional)";
    comparativeForm.appendChild(comment);
  }
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Submit comparison";
  comparativeForm.appendChild(submit);
  comparativeForm.onsubmit = (ev) => {
    ev.preventDefault();
    const data = new FormData(comparativeForm);
    const answers: Record<string, { choice: string; comment?: string }> = {};
    for (const item of COMPARATIVE_ITEMS) {
      const choice = String(data.get(item) ?? "");
      if (!choice) continue;
      const comment = String(data.get(`${item}-comment`) ?? "");
      answers[item] = comment ? { choice, comment } : { choice };
    }
    if (!comparativeComplete(answers)) return;
    core.submitComparative(answers);
    comparativeForm.classList.remove("on");
  };
}

let susSubmitted = false;
let comparativeSubmitted = false;

/* ---------------- micro task ---------------- */

// Local busywork between notifications: drag boxes across the divider.
// Purely client side, nothing goes over the wire.
type MicroBox = { x: number; y: number };

const micro = $("microtask") as HTMLCanvasElement;
const microBoxes: MicroBox[] = [
  { x: 40, y: 35 }, { x: 40, y: 65 }, { x: 40, y: 95 },
];
let microDrag: MicroBox | null = null;
let microCrossings = 0;

function drawMicro(): void {
  const ctx = micro.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, micro.width, micro.height);
  ctx.strokeStyle = "#39424f";
  ctx.beginPath();
  ctx.moveTo(micro.width / 2, 0);
  ctx.lineTo(micro.width / 2, micro.height);
  ctx.stroke();
  ctx.fillStyle = "#b5852f";
  for (const b of microBoxes) ctx.fillRect(b.x - 10, b.y - 10, 20, 20);
  ctx.fillStyle = "#707a88";
  ctx.font = "11px system-ui";
  ctx.fillText(`crossings: ${microCrossings}`, 6, 12);
}

micro.addEventListener("pointerdown", (ev) => {
  const r = micro.getBoundingClientRect();
  const x = ev.clientX - r.left, y = ev.clientY - r.top;
  microDrag = microBoxes.find((b) => Math.abs(b.x - x) < 12 && Math.abs(b.y - y) < 12) ?? null;
});
micro.addEventListener("pointermove", (ev) => {
  if (!microDrag) return;
  const r = micro.getBoundingClientRect();
  const was = microDrag.x < micro.width / 2;
  microDrag.x = Math.min(micro.width - 12, Math.max(12, ev.clientX - r.left));
  microDrag.y = Math.min(micro.height - 12, Math.max(12, ev.clientY - r.top));
  if (was !== microDrag.x < micro.width / 2) microCrossings++;
  drawMicro();
});
for (const kind of ["pointerup", "pointerleave"]) {
  micro.addEventListener(kind, () => { microDrag = null; });
}

/* ---------------- DOM sync + render loop ---------------- */

function syncDom(): void {
  if (core.briefing) {
    sessionLabel.textContent =
      `${core.briefing.subject} session ${core.briefing.sessionIndex} ` +
      `(${core.briefing.modality})`;
    const joypad = core.briefing.modality === "joypad";
    joypadSection.style.display = joypad ? "block" : "none";
  }
  if (core.banner) {
    bannerEl.textContent =
      `Task: ${core.banner.taskKind.replace("_", " ")} (go!)`;
    bannerEl.classList.add("on");
  } else {
    bannerEl.classList.remove("on");
  }
  cameraCanvas.classList.toggle("on", core.cameraOn);
  renderPalette();
  renderPanel();
  if (core.briefing?.modality === "joypad") renderJoypad();

  for (const toast of core.takeToasts()) {
    const div = document.createElement("div");
    div.className = "toast";
    div.textContent = `${toast.code}: ${toast.reason}`;
    toastsEl.appendChild(div);
    setTimeout(() => div.remove(), 4000);
  }

  const phase = core.snapshot?.phase ?? "primary_only";
  if (phase === "done" && !susSubmitted) {
    susForm.classList.add("on");
  }
  if (core.briefing?.sessionIndex === 1 && susSubmitted && !comparativeSubmitted) {
    comparativeForm.classList.add("on");
  }
  const comparativeDue = core.briefing?.sessionIndex === 1;
  endButton.classList.toggle(
    "on",
    phase === "done" && susSubmitted && (!comparativeDue || comparativeSubmitted),
  );
  if (core.sessionEnded) {
    sessionLabel.textContent += " [ended]";
  }
}

// Track submissions by watching what the core sent; forms above flip these.
const origSubmitSus = core.submitSus.bind(core);
core.submitSus = (answers) => {
  susSubmitted = true;
  return origSubmitSus(answers);
};
const origSubmitComparative = core.submitComparative.bind(core);
core.submitComparative = (answers) => {
  comparativeSubmitted = true;
  return origSubmitComparative(answers);
};

endButton.onclick = () => core.endSession();

document.addEventListener("keydown", (ev) => {
  if (ev.repeat) return;
  if ((ev.target as HTMLElement | null)?.tagName === "INPUT") return;
  switch (ev.key) {
    case "p": case "P":
      core.summon();
      break;
    case "Escape":
      core.stowDevice();
      break;
    case "t": case "T":
      core.toggleCamera();
      break;
  }
});
$("panel-close").onclick = () => core.stowDevice();

function frame(): void {
  const ctx = floor.getContext("2d");
  if (ctx) {
    const w = floor.clientWidth, h = floor.clientHeight;
    if (floor.width !== w || floor.height !== h) {
      floor.width = w;
      floor.height = h;
    }
    drawScene(ctx, core, fitViewport(w, h));
  }
  const camCtx = cameraCanvas.getContext("2d");
  if (camCtx && core.cameraOn) drawCameraView(camCtx, core, cameraCanvas.width);
  if (core.briefing?.modality === "joypad") pollGamepad();
  requestAnimationFrame(frame);
}

buildSusForm();
buildComparativeForm();
drawMicro();
connect();
requestAnimationFrame(frame);
