// Wire protocol mirror. One JSON object per WebSocket text frame, tagged by
// "type". Every client message carries a client-chosen `mid`; the service
// answers each with exactly one ack/err echoing it as `re`. Everything else
// arriving is broadcast state.

export const PROTOCOL_VERSION = 1;

export type GestureName =
  | "palm_up"
  | "grab_device"
  | "release_device"
  | "stow_device"
  | "thumb_up"
  | "hand_near_robot";

export type Hello = {
  type: "hello";
  mid: string;
  role: "console" | "observer";
  subject: string | null;
  protocol: number;
};

export type Gesture = {
  type: "gesture";
  mid: string;
  gesture: GestureName;
  robot_id: string | null;
};

export type PanelAction = {
  type: "panel_action";
  mid: string;
  action: string;
  magnitude: number;
};

export type JoypadInput = {
  type: "joypad_input";
  mid: string;
  control: string;
  value: number;
};

export type QuestionnaireSubmit = {
  type: "questionnaire_submit";
  mid: string;
  stage: "sus" | "comparative";
  answers: Record<string, unknown>;
};

export type SessionControl = {
  type: "session_control";
  mid: string;
  op: "end";
};

export type Inbound =
  | Hello
  | Gesture
  | PanelAction
  | JoypadInput
  | QuestionnaireSubmit
  | SessionControl;

// ---------------------------------------------------------------------------
// service -> client

export type SnapshotDrone = {
  id: string;
  x: number;
  y: number;
  z: number;
  yaw: number;
  carried: string;
  op_state: string;
  color: string;
};

export type SnapshotAgv = {
  id: string;
  x: number;
  y: number;
  yaw: number;
  forks: boolean;
  route: string;
  progress: number;
};

export type SnapshotBox = {
  id: string;
  x: number;
  y: number;
  z: number;
  yaw: number;
  carried_by: string;
};

export type Snapshot = {
  type: "snapshot";
  sim_time: number;
  seq: number;
  phase: "primary_only" | "secondary_pending" | "secondary_active" | "done";
  controller: { phase: string; robot: string; camera: boolean };
  drones: SnapshotDrone[];
  agvs: SnapshotAgv[];
  boxes: SnapshotBox[];
};

export type AffordanceUpdate = {
  type: "affordance_update";
  robot_id: string; // "" keys the device palette
  arrows: string[];
  buttons: string[];
  arrows_visible: boolean;
};

export type NotificationMsg = {
  type: "notification";
  task_index: number;
  task_kind: string;
  channel: string;
  issued_at: number;
};

export type StateColor = {
  type: "state_color";
  robot_id: string;
  color: string;
  op_state: string;
};

// items: [id, kind, x, y, z, yaw] in the drone body frame
export type CameraFrame = {
  type: "camera_frame";
  drone_id: string;
  sim_time: number;
  items: [string, string, number, number, number, number][];
};

export type SessionEvent = {
  type: "session_event";
  kind: string;
  t: number;
  data: Record<string, unknown>;
};

export type Ack = {
  type: "ack";
  re: string;
  data: Record<string, unknown>;
};

export type Err = {
  type: "err";
  re: string;
  reason: string;
  code: string;
};

export type Outbound =
  | Snapshot
  | AffordanceUpdate
  | NotificationMsg
  | StateColor
  | CameraFrame
  | SessionEvent
  | Ack
  | Err;

const OUTBOUND_TAGS = new Set([
  "snapshot",
  "affordance_update",
  "notification",
  "state_color",
  "camera_frame",
  "session_event",
  "ack",
  "err",
]);

export function encode(msg: Inbound): string {
  return JSON.stringify(msg);
}

/** Parse a service frame; null for anything that is not outbound traffic
 *  (garbage or a tag from a newer protocol than ours). */
export function decode(text: string): Outbound | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) return null;
  const tag = (doc as { type?: unknown }).type;
  if (typeof tag !== "string" || !OUTBOUND_TAGS.has(tag)) return null;
  return doc as Outbound;
}
