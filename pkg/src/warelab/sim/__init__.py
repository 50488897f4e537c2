"""Deterministic fixed-step warehouse simulation."""

from .errors import (
    AlreadyCarrying,
    AutonomousFlightActive,
    NoBoxInRange,
    NotAtRouteStart,
    NotCarrying,
    RouteActive,
    SimError,
    UnknownRobot,
    UnknownRoute,
    UnknownZone,
    VisionUnavailable,
)
from .model import (
    AgvBody,
    BoxItem,
    DroneBody,
    Pose,
    Route,
    RouteAssignment,
    Vec3,
    WorldConfig,
    WorldState,
    Zone,
    ZoneKind,
)
from .scene import Scene, SceneError, build_world, default_scene, load_scene, scene_from_doc
from .world import (
    CHARGE_ROUTE_PREFIX,
    align_to_pad,
    assign_route,
    autopilot_fly,
    command_agv,
    command_drone,
    free_box_in_reach,
    grasp,
    proximity,
    release,
    rotate_quarter,
    send_to_charging,
    set_forks,
    startable_routes,
    step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
