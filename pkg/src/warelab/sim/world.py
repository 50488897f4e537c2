"""Simulation commands and the fixed-step integrator.

All functions mutate a WorldState in place and raise the errors from
warelab.sim.errors when a precondition fails; a failed command never leaves a
partial change behind. Stepping subdivides any requested advance into
config.dt substeps, so trajectories depend only on (initial state, command
sequence), never on how callers batch their step() calls.

Route following and autonomous flight capture their targets at
config.waypoint_capture (effectively exact). config.arrival_radius is a
coarser threshold used for preconditions: route-start eligibility and the
short-circuit when an autopilot target is already close.
"""

from __future__ import annotations

import math

from .. import _kernels as kern
from .errors import (
    AlreadyCarrying,
    AutonomousFlightActive,
    NoBoxInRange,
    NotAtRouteStart,
    NotCarrying,
    RouteActive,
    UnknownRobot,
    UnknownRoute,
    UnknownZone,
    VisionUnavailable,
)
from .model import Route, Vec3, WorldState, ZoneKind

# reserved id prefix for internally generated charging routes
CHARGE_ROUTE_PREFIX = "__charge:"


def _require_drone(world: WorldState, robot_id: str):
    try:
        return world.drones[robot_id]
    except KeyError:
        raise UnknownRobot(f"no drone {robot_id!r}") from None


def _require_agv(world: WorldState, robot_id: str):
    try:
        return world.agvs[robot_id]
    except KeyError:
        raise UnknownRobot(f"no AGV {robot_id!r}") from None


def _check_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise ValueError("command values must be finite")


# ---------------------------------------------------------------------------
# stepping


def step(world: WorldState, dt: float) -> None:
    """Advance the world by dt seconds in config.dt substeps.

    dt values within 1e-9 ticks of a whole number of substeps snap to the
    grid, so step(1.0) runs the same fifty 0.02 s substeps as fifty calls of
    step(0.02) and the trajectories agree bit for bit regardless of batching.
    """
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive and finite, got {dt!r}")
    base = world.config.dt
    ratio = dt / base
    n = int(math.floor(ratio + 1e-9))
    for _ in range(n):
        _substep(world, base)
    tail = dt - n * base
    if tail > base * 1e-9:
        _substep(world, tail)


def _substep(world: WorldState, dt: float) -> None:
    for did in sorted(world.drones):
        _drone_substep(world, world.drones[did], dt)
    for aid in sorted(world.agvs):
        _agv_substep(world, world.agvs[aid], dt)
    world.sim_time += dt


def _drone_substep(world, drone, dt):
    cfg = world.config
    pose = drone.pose
    pos = pose.position

    # yaw: a pending slew overrides the commanded rate and lands exactly
    if drone.target_yaw is not None:
        new_yaw, rate, reached = kern.slew_substep(
            pose.yaw, drone.target_yaw, cfg.omega_max, dt
        )
        pose.yaw = new_yaw
        drone.commanded_yaw_rate = 0.0 if reached else rate
        if reached:
            drone.target_yaw = None
    else:
        pose.yaw = kern.yaw_integrate(pose.yaw, drone.commanded_yaw_rate, dt)

    if drone.autonomous_flight and drone.autopilot_target is not None:
        tgt = drone.autopilot_target
        x, y, z, vx, vy, vz, arrived = kern.drone_flight_substep(
            pos.x, pos.y, pos.z, tgt.x, tgt.y, tgt.z,
            cfg.v_max_drone, cfg.waypoint_capture, dt,
        )
        pos.x, pos.y, pos.z = x, y, z
        cv = drone.commanded_velocity
        cv.x, cv.y, cv.z = vx, vy, vz
        if arrived:
            drone.autonomous_flight = False
            drone.autopilot_target = None
            cv.x = cv.y = cv.z = 0.0
    else:
        cv = drone.commanded_velocity
        x, y, z = kern.drone_translate(pos.x, pos.y, pos.z, cv.x, cv.y, cv.z, dt)
        pos.x, pos.y, pos.z = x, y, z

    if drone.carried is not None:
        box = world.boxes[drone.carried]
        off = drone.carry_offset
        bx, by, bz, byaw = kern.compose_pose(
            pos.x, pos.y, pos.z, pose.yaw,
            off.position.x, off.position.y, off.position.z, off.yaw,
        )
        bp = box.pose.position
        bp.x, bp.y, bp.z = bx, by, bz
        box.pose.yaw = byaw


def _agv_substep(world, agv, dt):
    cfg = world.config
    pose = agv.pose
    pos = pose.position
    if agv.active_route is not None:
        route = world.routes[agv.active_route]
        while True:
            if agv.route_progress >= len(route.waypoints):
                agv.active_route = None
                agv.route_progress = 0
                agv.forward_speed = 0.0
                agv.yaw_rate = 0.0
                break
            wp = route.waypoints[agv.route_progress]
            x, y, yaw, v, w, captured = kern.agv_route_substep(
                pos.x, pos.y, pose.yaw, wp.x, wp.y,
                cfg.v_max_agv, cfg.omega_max, cfg.heading_tol,
                cfg.waypoint_capture, dt,
            )
            if captured:
                agv.route_progress += 1
                continue
            pos.x, pos.y = x, y
            pose.yaw = yaw
            agv.forward_speed = v
            agv.yaw_rate = w
            break
    else:
        x, y, yaw = kern.unicycle_step(
            pos.x, pos.y, pose.yaw, agv.forward_speed, agv.yaw_rate, dt
        )
        pos.x, pos.y = x, y
        pose.yaw = yaw


# ---------------------------------------------------------------------------
# drone commands


def command_drone(world, robot_id, velocity, yaw_rate=0.0):
    """Set a drone's velocity and yaw-rate setpoints, clamped to limits.

    Rejected with AutonomousFlightActive while an autopilot flight runs.
    Cancels any pending rate-limited rotation: the operator taking the stick
    overrides a queued turn.
    """
    drone = _require_drone(world, robot_id)
    if drone.autonomous_flight:
        raise AutonomousFlightActive(f"{robot_id} is in autonomous flight")
    vx, vy, vz = float(velocity[0]), float(velocity[1]), float(velocity[2])
    yaw_rate = float(yaw_rate)
    _check_finite(vx, vy, vz, yaw_rate)
    cfg = world.config
    speed = math.sqrt(vx * vx + vy * vy + vz * vz)
    if speed > cfg.v_max_drone:
        scale = cfg.v_max_drone / speed
        vx, vy, vz = vx * scale, vy * scale, vz * scale
    if yaw_rate > cfg.omega_max:
        yaw_rate = cfg.omega_max
    elif yaw_rate < -cfg.omega_max:
        yaw_rate = -cfg.omega_max
    cv = drone.commanded_velocity
    cv.x, cv.y, cv.z = vx, vy, vz
    drone.commanded_yaw_rate = yaw_rate
    drone.target_yaw = None


def grasp(world, robot_id):
    """Attach the nearest free box within grasp range to the drone.

    The drone must be over a takeoff pad (config.require_pad_for_grasp) and
    not already carrying. The box keeps its relative pose in the drone body
    frame until released.
    """
    drone = _require_drone(world, robot_id)
    if drone.carried is not None:
        raise AlreadyCarrying(f"{robot_id} already carries {drone.carried}")
    cfg = world.config
    if cfg.require_pad_for_grasp:
        if proximity(world, robot_id, ZoneKind.TAKEOFF_PAD) is None:
            raise NoBoxInRange(f"{robot_id} is not over a takeoff pad")
    box_id = free_box_in_reach(world, robot_id)
    if box_id is None:
        raise NoBoxInRange(f"no free box within {cfg.grasp_radius} m of {robot_id}")
    box = world.boxes[box_id]
    p, b = drone.pose, box.pose
    ox, oy, oz, oyaw = kern.relative_pose(
        p.position.x, p.position.y, p.position.z, p.yaw,
        b.position.x, b.position.y, b.position.z, b.yaw,
    )
    from .model import Pose  # local import to keep module top uncluttered

    drone.carried = box_id
    drone.carry_offset = Pose(Vec3(ox, oy, oz), oyaw)
    box.carried_by = robot_id


def release(world, robot_id):
    """Detach the carried box; it settles on the floor below its x, y."""
    drone = _require_drone(world, robot_id)
    if drone.carried is None:
        raise NotCarrying(f"{robot_id} carries nothing")
    box = world.boxes[drone.carried]
    box.carried_by = None
    box.pose.position.z = world.config.box_half_height
    drone.carried = None
    drone.carry_offset = None


def rotate_quarter(world, robot_id):
    """Queue a rate-limited +90 degree yaw rotation.

    Composes with a still-pending rotation, so four back-to-back commands
    return the heading to its start (up to wrap rounding).
    """
    drone = _require_drone(world, robot_id)
    base = drone.target_yaw if drone.target_yaw is not None else drone.pose.yaw
    drone.target_yaw = kern.wrap_pi(base + math.pi / 2.0)
    drone.commanded_yaw_rate = 0.0


def align_to_pad(world, robot_id):
    """Slew the carried box to the nearest landing pad's grid orientation.

    Targets whichever of pad_yaw + k*90deg is closest to the current heading.
    Replaces any pending rotation. Requires camera vision and a carried box.
    """
    drone = _require_drone(world, robot_id)
    if not world.config.vision_available:
        raise VisionUnavailable("vision pipeline disabled in this world")
    if drone.carried is None:
        raise NotCarrying(f"{robot_id} carries nothing to align")
    pad = _nearest_zone(world, drone.pose.position, ZoneKind.LANDING_PAD)
    if pad is None:
        raise UnknownZone("no landing pad in this scene")
    yaw = drone.pose.yaw
    best = None
    best_err = None
    for k in range(4):
        cand = kern.wrap_pi(pad.pad_yaw + k * (math.pi / 2.0))
        err = abs(kern.wrap_pi(cand - yaw))
        if best_err is None or err < best_err:
            best, best_err = cand, err
    drone.target_yaw = best
    drone.commanded_yaw_rate = 0.0


def autopilot_fly(world, robot_id, target) -> bool:
    """Start an autonomous straight-line flight to target.

    Returns True when the drone is already within config.arrival_radius and
    the flight completes immediately (no autonomy engaged). Manual velocity
    commands are rejected until arrival.
    """
    drone = _require_drone(world, robot_id)
    tx, ty, tz = float(target[0]), float(target[1]), float(target[2])
    _check_finite(tx, ty, tz)
    pos = drone.pose.position
    cv = drone.commanded_velocity
    cv.x = cv.y = cv.z = 0.0
    drone.commanded_yaw_rate = 0.0
    if kern.dist3(pos.x, pos.y, pos.z, tx, ty, tz) <= world.config.arrival_radius:
        drone.autonomous_flight = False
        drone.autopilot_target = None
        return True
    drone.autonomous_flight = True
    drone.autopilot_target = Vec3(tx, ty, tz)
    return False


# ---------------------------------------------------------------------------
# AGV commands


def command_agv(world, robot_id, forward_speed, yaw_rate=0.0):
    """Set an AGV's forward-speed and yaw-rate setpoints, clamped to limits.

    Rejected with RouteActive while the AGV follows a route.
    """
    agv = _require_agv(world, robot_id)
    if agv.active_route is not None:
        raise RouteActive(f"{robot_id} is following {agv.active_route}")
    forward_speed = float(forward_speed)
    yaw_rate = float(yaw_rate)
    _check_finite(forward_speed, yaw_rate)
    cfg = world.config
    if forward_speed > cfg.v_max_agv:
        forward_speed = cfg.v_max_agv
    elif forward_speed < -cfg.v_max_agv:
        forward_speed = -cfg.v_max_agv
    if yaw_rate > cfg.omega_max:
        yaw_rate = cfg.omega_max
    elif yaw_rate < -cfg.omega_max:
        yaw_rate = -cfg.omega_max
    agv.forward_speed = forward_speed
    agv.yaw_rate = yaw_rate


def assign_route(world, robot_id, route_id):
    """Put an AGV on a route; it must stand within arrival_radius of the start."""
    agv = _require_agv(world, robot_id)
    if agv.active_route is not None:
        raise RouteActive(f"{robot_id} is already following {agv.active_route}")
    route = world.routes.get(route_id)
    if route is None:
        raise UnknownRoute(f"no route {route_id!r}")
    if not route.waypoints:
        raise UnknownRoute(f"route {route_id!r} has no waypoints")
    start = route.waypoints[0]
    pos = agv.pose.position
    if kern.dist2(pos.x, pos.y, start.x, start.y) > world.config.arrival_radius:
        raise NotAtRouteStart(
            f"{robot_id} is not within {world.config.arrival_radius} m "
            f"of the start of {route_id}"
        )
    _activate_route(world, agv, route_id)


def _activate_route(world, agv, route_id):
    from .model import RouteAssignment

    agv.active_route = route_id
    agv.route_progress = 0
    agv.forward_speed = 0.0
    agv.yaw_rate = 0.0
    agv.route_log.append(
        RouteAssignment(route_id, agv.pose.position.x, agv.pose.position.y)
    )


def set_forks(world, robot_id, raised):
    """Raise or lower the fork assembly; always permitted."""
    agv = _require_agv(world, robot_id)
    agv.fork_raised = bool(raised)


def send_to_charging(world, robot_id):
    """Route the AGV to the nearest charging dock.

    Creates (or replaces) an internal route under a reserved id; internal
    routes never show up as route-start buttons. Returns the route id.
    """
    agv = _require_agv(world, robot_id)
    if agv.active_route is not None:
        raise RouteActive(f"{robot_id} is already following {agv.active_route}")
    dock = _nearest_zone(world, agv.pose.position, ZoneKind.CHARGING)
    if dock is None:
        raise UnknownZone("no charging dock in this scene")
    route_id = CHARGE_ROUTE_PREFIX + robot_id
    pos = agv.pose.position
    world.routes[route_id] = Route(
        route_id, [Vec3(pos.x, pos.y, 0.0), Vec3(dock.center.x, dock.center.y, 0.0)]
    )
    _activate_route(world, agv, route_id)
    return route_id


# ---------------------------------------------------------------------------
# queries


def proximity(world, robot_id, kind) -> str | None:
    """Id of the zone of the given kind whose disc contains the robot, or None.

    Containment is planar and inclusive of the boundary. Overlapping zones
    resolve by distance, then id.
    """
    body = world.drones.get(robot_id) or world.agvs.get(robot_id)
    if body is None:
        raise UnknownRobot(f"no robot {robot_id!r}")
    kind = ZoneKind(kind)
    pos = body.pose.position
    best = None
    best_key = None
    for zid in sorted(world.zones):
        zone = world.zones[zid]
        if zone.kind is not kind:
            continue
        d = kern.dist2(pos.x, pos.y, zone.center.x, zone.center.y)
        if d <= zone.radius:
            key = (d, zid)
            if best_key is None or key < best_key:
                best, best_key = zid, key
    return best


def _nearest_zone(world, position, kind):
    best = None
    best_key = None
    for zid in sorted(world.zones):
        zone = world.zones[zid]
        if zone.kind is not kind:
            continue
        d = kern.dist2(position.x, position.y, zone.center.x, zone.center.y)
        key = (d, zid)
        if best_key is None or key < best_key:
            best, best_key = zone, key
    return best


def free_box_in_reach(world, robot_id) -> str | None:
    """Id of the nearest uncarried box within grasp_radius (3D), or None."""
    drone = _require_drone(world, robot_id)
    pos = drone.pose.position
    cfg = world.config
    best = None
    best_key = None
    for bid in sorted(world.boxes):
        box = world.boxes[bid]
        if box.carried_by is not None:
            continue
        bp = box.pose.position
        d = kern.dist3(pos.x, pos.y, pos.z, bp.x, bp.y, bp.z)
        if d <= cfg.grasp_radius:
            key = (d, bid)
            if best_key is None or key < best_key:
                best, best_key = bid, key
    return best


def startable_routes(world, robot_id) -> list[str]:
    """Routes this AGV could start now, sorted by id.

    Empty while a route is active (starting another would be rejected).
    Internal charging routes are excluded.
    """
    agv = _require_agv(world, robot_id)
    if agv.active_route is not None:
        return []
    pos = agv.pose.position
    out = []
    for rid in sorted(world.routes):
        if rid.startswith(CHARGE_ROUTE_PREFIX):
            continue
        route = world.routes[rid]
        if not route.waypoints:
            continue
        start = route.waypoints[0]
        if kern.dist2(pos.x, pos.y, start.x, start.y) <= world.config.arrival_radius:
            out.append(rid)
    return out
