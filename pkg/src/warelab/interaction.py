"""Replica-controller interaction model.

Three cooperating pieces:

* the controller lifecycle FSM (hidden -> palette -> grabbed -> panel open),
  driven by hand gestures; every undefined (phase, gesture) pair raises
  InvalidTransition and leaves the state unchanged;
* per-robot operational state derived purely from the world (drones walk
  freedrive / ready-to-pick / picking / ready-to-release, each with a fixed
  avatar color);
* affordance gating: which hold-arrows and buttons a control panel offers in
  a given operational state, and the single dispatch path that turns a
  UI action into a simulation command only when the affordance is live.

Both input modalities (replica panel and joypad) funnel through
gate_action(), so there is exactly one place that decides whether a control
may emit a command.

Arrow actions are composable per axis: each arrow updates its own component
of the robot's setpoint (magnitude in [0, 1] scales the envelope limit) and
leaves the other components alone, so releasing one arrow never cancels
another and two joypad axes can be deflected at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import WarelabError
from .sim import world as W
from .sim.model import WorldState, ZoneKind


class InteractionError(WarelabError):
    pass


class InvalidTransition(InteractionError):
    pass


class PanelNotOpen(InteractionError):
    pass


class AffordanceNotAvailable(InteractionError):
    pass


# ---------------------------------------------------------------------------
# controller lifecycle


class ControllerPhase(str, Enum):
    HIDDEN = "hidden"
    PALETTE_SHOWN = "palette_shown"
    DEVICE_GRABBED = "device_grabbed"
    PANEL_OPEN = "panel_open"


class GestureKind(str, Enum):
    PALM_UP = "palm_up"
    GRAB_DEVICE = "grab_device"
    RELEASE_DEVICE = "release_device"
    STOW_DEVICE = "stow_device"
    THUMB_UP = "thumb_up"
    HAND_NEAR_ROBOT = "hand_near_robot"


@dataclass(frozen=True)
class GestureEvent:
    kind: GestureKind
    robot_id: str | None = None
    # HAND_NEAR_ROBOT payload: True entering, False leaving
    near: bool = True


@dataclass(frozen=True)
class ControllerState:
    phase: ControllerPhase = ControllerPhase.HIDDEN
    robot_id: str | None = None

    def __post_init__(self):
        bound = self.phase in (
            ControllerPhase.DEVICE_GRABBED,
            ControllerPhase.PANEL_OPEN,
        )
        if bound and self.robot_id is None:
            raise ValueError(f"{self.phase.value} requires a bound robot")
        if not bound and self.robot_id is not None:
            raise ValueError(f"{self.phase.value} must not bind a robot")


def lifecycle_step(state: ControllerState, event: GestureEvent) -> ControllerState:
    """Advance the controller FSM by one gesture.

    Only four (phase, gesture) pairs are defined; everything else raises
    InvalidTransition. THUMB_UP and HAND_NEAR_ROBOT never drive the
    lifecycle (they control the camera view and arrow presentation), so
    they are invalid here in every phase.
    """
    phase, kind = state.phase, event.kind
    if phase is ControllerPhase.HIDDEN and kind is GestureKind.PALM_UP:
        return ControllerState(ControllerPhase.PALETTE_SHOWN)
    if phase is ControllerPhase.PALETTE_SHOWN and kind is GestureKind.GRAB_DEVICE:
        if not event.robot_id:
            raise InvalidTransition("grabbing a replica requires a robot id")
        return ControllerState(ControllerPhase.DEVICE_GRABBED, event.robot_id)
    if phase is ControllerPhase.DEVICE_GRABBED and kind is GestureKind.RELEASE_DEVICE:
        return ControllerState(ControllerPhase.PANEL_OPEN, state.robot_id)
    if phase is ControllerPhase.PANEL_OPEN and kind is GestureKind.STOW_DEVICE:
        return ControllerState(ControllerPhase.HIDDEN)
    raise InvalidTransition(f"{kind.value} is undefined in phase {phase.value}")


def camera_toggle(enabled: bool, event: GestureEvent) -> bool:
    """Thumb-up flips the drone camera sub-view; other gestures leave it."""
    if event.kind is GestureKind.THUMB_UP:
        return not enabled
    return enabled


# ---------------------------------------------------------------------------
# operational state and avatar color


class DroneOpState(str, Enum):
    FREEDRIVE = "freedrive"
    READY_TO_PICK = "ready_to_pick"
    PICKING = "picking"
    READY_TO_RELEASE = "ready_to_release"


class AvatarColor(str, Enum):
    DARK_GREY = "dark_grey"
    GREEN = "green"
    RED = "red"
    YELLOW = "yellow"


_STATE_COLOR = {
    DroneOpState.FREEDRIVE: AvatarColor.DARK_GREY,
    DroneOpState.READY_TO_PICK: AvatarColor.GREEN,
    DroneOpState.PICKING: AvatarColor.RED,
    DroneOpState.READY_TO_RELEASE: AvatarColor.YELLOW,
}


def drone_op_state(world: WorldState, drone_id: str) -> DroneOpState:
    """Operational state, derived purely from world facts.

    Carrying and over a landing pad: ready to release. Carrying elsewhere:
    picking. Empty over a takeoff pad with a free box in reach: ready to
    pick. Otherwise freedrive.
    """
    drone = world.drones.get(drone_id)
    if drone is None:
        raise W.UnknownRobot(f"no drone {drone_id!r}")
    if drone.carried is not None:
        if W.proximity(world, drone_id, ZoneKind.LANDING_PAD) is not None:
            return DroneOpState.READY_TO_RELEASE
        return DroneOpState.PICKING
    if (
        W.proximity(world, drone_id, ZoneKind.TAKEOFF_PAD) is not None
        and W.free_box_in_reach(world, drone_id) is not None
    ):
        return DroneOpState.READY_TO_PICK
    return DroneOpState.FREEDRIVE


def avatar_color(state: DroneOpState) -> AvatarColor:
    return _STATE_COLOR[DroneOpState(state)]


# ---------------------------------------------------------------------------
# affordances

DRONE_ARROWS = frozenset({"+x", "-x", "+y", "-y", "+z", "-z", "yaw_ccw", "yaw_cw"})
AGV_ARROWS = frozenset({"forward", "backward", "yaw_ccw", "yaw_cw"})


@dataclass(frozen=True)
class AffordanceSet:
    arrows: frozenset
    buttons: tuple
    arrows_visible: bool


def drone_affordances(
    state: DroneOpState, autonomous_flight: bool, vision_available: bool
) -> AffordanceSet:
    """Panel content for a drone in the given operational state.

    During picking the arrows track flight autonomy: hidden and inert while
    the autopilot flies, shown for manual carry flight. Align appears only
    when the vision pipeline can actually serve it.
    """
    state = DroneOpState(state)
    if state is DroneOpState.FREEDRIVE:
        return AffordanceSet(DRONE_ARROWS, (), True)
    if state is DroneOpState.READY_TO_PICK:
        return AffordanceSet(DRONE_ARROWS, ("grasp",), True)
    if state is DroneOpState.PICKING:
        if autonomous_flight:
            return AffordanceSet(frozenset(), (), False)
        return AffordanceSet(DRONE_ARROWS, (), True)
    buttons = ["release", "rotate90"]
    if vision_available:
        buttons.append("align")
    return AffordanceSet(DRONE_ARROWS, tuple(buttons), True)


def agv_affordances(world: WorldState, agv_id: str) -> AffordanceSet:
    """Panel content for an AGV.

    While a route runs, manual arrows are disabled and route/charge buttons
    disappear (each would be rejected); the fork toggle stays. When idle,
    every route whose start lies within reach gets a button.
    """
    agv = world.agvs.get(agv_id)
    if agv is None:
        raise W.UnknownRobot(f"no AGV {agv_id!r}")
    fork_button = "lower_forks" if agv.fork_raised else "lift_forks"
    if agv.active_route is not None:
        return AffordanceSet(frozenset(), (fork_button,), False)
    route_buttons = tuple(
        f"route:{rid}" for rid in W.startable_routes(world, agv_id)
    )
    return AffordanceSet(
        AGV_ARROWS, route_buttons + (fork_button, "go_charge"), True
    )


def affordances(world: WorldState, robot_id: str) -> AffordanceSet:
    """Affordances for any robot, dispatching on its kind."""
    if robot_id in world.drones:
        drone = world.drones[robot_id]
        return drone_affordances(
            drone_op_state(world, robot_id),
            drone.autonomous_flight,
            world.config.vision_available,
        )
    return agv_affordances(world, robot_id)


# ---------------------------------------------------------------------------
# dispatch


@dataclass(frozen=True)
class SimCommand:
    op: str
    robot_id: str
    args: tuple = ()

    def payload(self) -> dict:
        return {"op": self.op, "robot": self.robot_id, "args": list(self.args)}


def gate_action(
    world: WorldState, robot_id: str, action: str, magnitude: float = 1.0
) -> SimCommand:
    """Validate a UI action against the robot's live affordances.

    Returns the simulation command the action maps to, or raises
    AffordanceNotAvailable when the control is not currently offered. This
    is the single choke point both input modalities go through.
    """
    magnitude = float(magnitude)
    if not (magnitude == magnitude and -1e12 < magnitude < 1e12):
        raise ValueError("magnitude must be finite")
    if magnitude < 0.0:
        magnitude = 0.0
    elif magnitude > 1.0:
        magnitude = 1.0
    offer = affordances(world, robot_id)
    if action in offer.arrows:
        if robot_id in world.drones:
            return _drone_arrow(world, robot_id, action, magnitude)
        return _agv_arrow(world, robot_id, action, magnitude)
    if action in offer.buttons:
        return _button(robot_id, action)
    raise AffordanceNotAvailable(
        f"{action!r} is not offered for {robot_id} right now"
    )


def _drone_arrow(world, robot_id, action, m):
    cfg = world.config
    drone = world.drones[robot_id]
    cv = drone.commanded_velocity
    vx, vy, vz = cv.x, cv.y, cv.z
    rate = drone.commanded_yaw_rate
    v = m * cfg.v_max_drone
    if action == "+x":
        vx = v
    elif action == "-x":
        vx = -v
    elif action == "+y":
        vy = v
    elif action == "-y":
        vy = -v
    elif action == "+z":
        vz = v
    elif action == "-z":
        vz = -v
    elif action == "yaw_ccw":
        rate = m * cfg.omega_max
    else:
        rate = -m * cfg.omega_max
    return SimCommand("command_drone", robot_id, (vx, vy, vz, rate))


def _agv_arrow(world, robot_id, action, m):
    cfg = world.config
    agv = world.agvs[robot_id]
    v, w = agv.forward_speed, agv.yaw_rate
    if action == "forward":
        v = m * cfg.v_max_agv
    elif action == "backward":
        v = -m * cfg.v_max_agv
    elif action == "yaw_ccw":
        w = m * cfg.omega_max
    else:
        w = -m * cfg.omega_max
    return SimCommand("command_agv", robot_id, (v, w))


def _button(robot_id, action):
    if action == "grasp":
        return SimCommand("grasp", robot_id)
    if action == "release":
        return SimCommand("release", robot_id)
    if action == "rotate90":
        return SimCommand("rotate_quarter", robot_id)
    if action == "align":
        return SimCommand("align_to_pad", robot_id)
    if action.startswith("route:"):
        return SimCommand("assign_route", robot_id, (action[len("route:"):],))
    if action == "lift_forks":
        return SimCommand("set_forks", robot_id, (True,))
    if action == "lower_forks":
        return SimCommand("set_forks", robot_id, (False,))
    if action == "go_charge":
        return SimCommand("send_to_charging", robot_id)
    raise AffordanceNotAvailable(f"no mapping for button {action!r}")


def dispatch(
    ctrl: ControllerState, world: WorldState, action: str, magnitude: float = 1.0
) -> SimCommand:
    """Panel-path entry: requires an open panel, then gates like any input."""
    if ctrl.phase is not ControllerPhase.PANEL_OPEN:
        raise PanelNotOpen(f"controller is {ctrl.phase.value}")
    return gate_action(world, ctrl.robot_id, action, magnitude)


_APPLY = {
    "command_drone": lambda w, r, a: W.command_drone(w, r, (a[0], a[1], a[2]), a[3]),
    "command_agv": lambda w, r, a: W.command_agv(w, r, a[0], a[1]),
    "grasp": lambda w, r, a: W.grasp(w, r),
    "release": lambda w, r, a: W.release(w, r),
    "rotate_quarter": lambda w, r, a: W.rotate_quarter(w, r),
    "align_to_pad": lambda w, r, a: W.align_to_pad(w, r),
    "assign_route": lambda w, r, a: W.assign_route(w, r, a[0]),
    "set_forks": lambda w, r, a: W.set_forks(w, r, a[0]),
    "send_to_charging": lambda w, r, a: W.send_to_charging(w, r),
    "autopilot_fly": lambda w, r, a: W.autopilot_fly(w, r, (a[0], a[1], a[2])),
}


def apply_command(world: WorldState, cmd: SimCommand):
    """Execute a gated command against the world."""
    try:
        fn = _APPLY[cmd.op]
    except KeyError:
        raise ValueError(f"unknown command op {cmd.op!r}") from None
    return fn(world, cmd.robot_id, cmd.args)


# ---------------------------------------------------------------------------
# conformance fixture


def conformance_fixture() -> dict:
    """Machine-readable tables of the FSMs and affordance rules.

    Consoles render these rules client-side; comparing a client's tables
    against this fixture keeps the two implementations aligned without
    sharing code.
    """
    lifecycle = []
    for phase in ControllerPhase:
        for kind in GestureKind:
            state = ControllerState(
                phase,
                "r1"
                if phase
                in (ControllerPhase.DEVICE_GRABBED, ControllerPhase.PANEL_OPEN)
                else None,
            )
            event = GestureEvent(
                kind, "r2" if kind is GestureKind.GRAB_DEVICE else None
            )
            try:
                nxt = lifecycle_step(state, event)
                lifecycle.append(
                    {
                        "phase": phase.value,
                        "gesture": kind.value,
                        "next": nxt.phase.value,
                        "binds": nxt.robot_id,
                    }
                )
            except InvalidTransition:
                lifecycle.append(
                    {"phase": phase.value, "gesture": kind.value, "next": "invalid"}
                )

    drone_rows = []
    for state in DroneOpState:
        for autonomous in (False, True):
            for vision in (False, True):
                offer = drone_affordances(state, autonomous, vision)
                drone_rows.append(
                    {
                        "state": state.value,
                        "autonomous_flight": autonomous,
                        "vision_available": vision,
                        "arrows": sorted(offer.arrows),
                        "buttons": list(offer.buttons),
                        "arrows_visible": offer.arrows_visible,
                        "color": avatar_color(state).value,
                    }
                )

    return {
        "version": 1,
        "lifecycle": lifecycle,
        "drone_affordances": drone_rows,
        "drone_arrows": sorted(DRONE_ARROWS),
        "agv_arrows": sorted(AGV_ARROWS),
        "agv_rules": {
            "route_active": {
                "arrows": [],
                "arrows_visible": False,
                "buttons": ["<fork_toggle>"],
            },
            "idle": {
                "arrows": sorted(AGV_ARROWS),
                "arrows_visible": True,
                "buttons": ["<route:* for startable routes>", "<fork_toggle>", "go_charge"],
            },
            "fork_toggle": {False: "lift_forks", True: "lower_forks"},
        },
        "colors": {s.value: _STATE_COLOR[s].value for s in DroneOpState},
    }
