"""World state containers.

Plain mutable dataclasses; all behavior lives in warelab.sim.world. Poses use
a z-up world frame, yaw in radians wrapped to (-pi, pi]. AGVs and boxes keep
z in their pose for uniformity (an AGV's z stays 0, a floor box's z is its
half height).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


@dataclass
class Vec3:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def as_tuple(self):
        return (self.x, self.y, self.z)


@dataclass
class Pose:
    position: Vec3 = field(default_factory=Vec3)
    yaw: float = 0.0


class ZoneKind(str, Enum):
    TAKEOFF_PAD = "takeoff_pad"
    LANDING_PAD = "landing_pad"
    ROUTE_ENTRY = "route_entry"
    CHARGING = "charging"
    WORK_TABLE = "work_table"


@dataclass
class Zone:
    id: str
    kind: ZoneKind
    center: Vec3
    radius: float
    # reference heading for pad-aligned cargo orientations
    pad_yaw: float = 0.0


@dataclass
class Route:
    id: str
    waypoints: list[Vec3]


@dataclass
class BoxItem:
    id: str
    pose: Pose
    carried_by: str | None = None


@dataclass
class DroneBody:
    id: str
    pose: Pose
    commanded_velocity: Vec3 = field(default_factory=Vec3)
    commanded_yaw_rate: float = 0.0
    carried: str | None = None
    # carried box pose expressed in the drone body frame; fixed while carried
    carry_offset: Pose | None = None
    autonomous_flight: bool = False
    autopilot_target: Vec3 | None = None
    # pending rate-limited rotation; None when no slew is in progress
    target_yaw: float | None = None


@dataclass
class RouteAssignment:
    """Sticky record of a route command: where the AGV stood when it got it."""

    route_id: str
    x: float
    y: float


@dataclass
class AgvBody:
    id: str
    pose: Pose
    forward_speed: float = 0.0
    yaw_rate: float = 0.0
    active_route: str | None = None
    route_progress: int = 0
    fork_raised: bool = False
    route_log: list[RouteAssignment] = field(default_factory=list)


@dataclass(frozen=True)
class WorldConfig:
    dt: float = 0.02
    v_max_drone: float = 2.0
    v_max_agv: float = 1.0
    omega_max: float = math.pi / 2
    grasp_radius: float = 0.3
    arrival_radius: float = 0.5
    heading_tol: float = 0.05
    # waypoint / autopilot capture distance; see the route-following notes
    waypoint_capture: float = 1e-6
    box_half_height: float = 0.15
    vision_available: bool = True
    require_pad_for_grasp: bool = True
    autonomous_picking: bool = False
    camera_range: float = 8.0


@dataclass
class WorldState:
    config: WorldConfig = field(default_factory=WorldConfig)
    sim_time: float = 0.0
    drones: dict[str, DroneBody] = field(default_factory=dict)
    agvs: dict[str, AgvBody] = field(default_factory=dict)
    boxes: dict[str, BoxItem] = field(default_factory=dict)
    zones: dict[str, Zone] = field(default_factory=dict)
    routes: dict[str, Route] = field(default_factory=dict)

    def robot_ids(self):
        return sorted(self.drones) + sorted(self.agvs)
