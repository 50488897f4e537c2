// Top-down canvas rendering of the warehouse floor. Pure drawing: all state
// comes in through ClientCore, all geometry through the hello briefing.

import { ClientCore } from "./core.js";

export type Viewport = {
  width: number;
  height: number;
  scale: number; // px per meter
  cx: number; // world origin in canvas px
  cy: number;
};

export function fitViewport(width: number, height: number): Viewport {
  // default floor spans roughly x in [-10, 10], y in [-8, 8]
  const scale = Math.min(width / 22, height / 18);
  return { width, height, scale, cx: width / 2, cy: height / 2 };
}

function toPx(v: Viewport, x: number, y: number): [number, number] {
  // world +y is up on screen
  return [v.cx + x * v.scale, v.cy - y * v.scale];
}

type ZoneDoc = { id: string; kind: string; center: [number, number]; radius: number };
type RouteDoc = { id: string; waypoints: [number, number][] };

const ZONE_FILL: Record<string, string> = {
  takeoff_pad: "rgba(46, 158, 68, 0.18)",
  landing_pad: "rgba(224, 180, 33, 0.18)",
  route_entry: "rgba(66, 135, 245, 0.15)",
  charging: "rgba(208, 70, 70, 0.15)",
  work_table: "rgba(130, 130, 140, 0.25)",
};

export function drawScene(
  ctx: CanvasRenderingContext2D,
  core: ClientCore,
  view: Viewport,
): void {
  ctx.clearRect(0, 0, view.width, view.height);
  ctx.save();
  ctx.font = "11px system-ui, sans-serif";

  const briefing = core.briefing;
  if (briefing) {
    for (const z of briefing.zones as ZoneDoc[]) {
      const [px, py] = toPx(view, z.center[0], z.center[1]);
      ctx.beginPath();
      ctx.arc(px, py, z.radius * view.scale, 0, Math.PI * 2);
      ctx.fillStyle = ZONE_FILL[z.kind] ?? "rgba(128,128,128,0.15)";
      ctx.fill();
      ctx.fillStyle = "#8a8f98";
      ctx.fillText(z.id, px + 4, py - 4);
    }
    ctx.strokeStyle = "rgba(120, 130, 150, 0.6)";
    ctx.setLineDash([6, 4]);
    for (const r of briefing.routes as RouteDoc[]) {
      ctx.beginPath();
      r.waypoints.forEach(([wx, wy], i) => {
        const [px, py] = toPx(view, wx, wy);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.stroke();
    }
    ctx.setLineDash([]);
  }

  const snap = core.snapshot;
  if (!snap) {
    ctx.restore();
    return;
  }

  for (const b of snap.boxes) {
    if (b.carried_by) continue; // drawn attached to its carrier
    const [px, py] = toPx(view, b.x, b.y);
    const s = 0.18 * view.scale;
    ctx.save();
    ctx.translate(px, py);
    ctx.rotate(-b.yaw);
    ctx.fillStyle = "#b5852f";
    ctx.fillRect(-s, -s, 2 * s, 2 * s);
    ctx.restore();
  }

  for (const a of snap.agvs) {
    const [px, py] = toPx(view, a.x, a.y);
    ctx.save();
    ctx.translate(px, py);
    ctx.rotate(-a.yaw);
    const w = 0.45 * view.scale;
    const h = 0.3 * view.scale;
    ctx.fillStyle = a.route ? "#4878c8" : "#68778c";
    ctx.fillRect(-w, -h, 2 * w, 2 * h);
    ctx.strokeStyle = "#dde2ea";
    ctx.beginPath();
    ctx.moveTo(0, 0);
    ctx.lineTo(w, 0);
    ctx.stroke();
    ctx.restore();
    ctx.fillStyle = "#aab2bf";
    ctx.fillText(a.forks ? `${a.id} [forks up]` : a.id, px + 8, py + 14);
  }

  for (const d of snap.drones) {
    const [px, py] = toPx(view, d.x, d.y);
    const r = (0.28 + 0.05 * d.z) * view.scale;
    ctx.beginPath();
    ctx.arc(px, py, r, 0, Math.PI * 2);
    ctx.fillStyle = core.avatarFill(d.id);
    ctx.fill();
    ctx.strokeStyle = "#11151a";
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(px + r * Math.cos(-d.yaw), py + r * Math.sin(-d.yaw));
    ctx.stroke();
    if (d.carried) {
      const s = 0.14 * view.scale;
      ctx.fillStyle = "#b5852f";
      ctx.fillRect(px - s, py - s, 2 * s, 2 * s);
    }
    ctx.fillStyle = "#aab2bf";
    ctx.fillText(`${d.id} (${core.opStateOf(d.id)})`, px + 8, py - 8);
  }

  ctx.restore();
}

/** Drone camera sub-view: items arrive in the drone body frame, forward up. */
export function drawCameraView(
  ctx: CanvasRenderingContext2D,
  core: ClientCore,
  size: number,
): void {
  ctx.clearRect(0, 0, size, size);
  ctx.fillStyle = "#10151c";
  ctx.fillRect(0, 0, size, size);
  const frame = core.cameraFrame;
  if (!frame) return;
  const scale = size / 16; // camera_range diameter
  const mid = size / 2;
  ctx.save();
  ctx.font = "10px system-ui, sans-serif";
  for (const [id, kind, x, y] of frame.items) {
    const px = mid - y * scale;
    const py = mid - x * scale;
    ctx.fillStyle = kind === "box" ? "#b5852f" : kind === "agv" ? "#4878c8" : "#384656";
    if (kind === "zone") {
      ctx.strokeStyle = "#384656";
      ctx.beginPath();
      ctx.arc(px, py, 0.8 * scale, 0, Math.PI * 2);
      ctx.stroke();
    } else {
      ctx.fillRect(px - 3, py - 3, 6, 6);
    }
    ctx.fillStyle = "#707a88";
    ctx.fillText(id, px + 5, py + 3);
  }
  // own position marker
  ctx.strokeStyle = "#e8edf4";
  ctx.beginPath();
  ctx.moveTo(mid, mid + 5);
  ctx.lineTo(mid, mid - 5);
  ctx.moveTo(mid - 4, mid - 1);
  ctx.lineTo(mid, mid - 5);
  ctx.lineTo(mid + 4, mid - 1);
  ctx.stroke();
  ctx.restore();
}
