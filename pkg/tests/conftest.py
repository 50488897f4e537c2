"""Shared world-building helpers for the test suite."""

import math

import pytest

from warelab.sim.model import (
    AgvBody,
    BoxItem,
    DroneBody,
    Pose,
    Route,
    Vec3,
    WorldConfig,
    WorldState,
    Zone,
    ZoneKind,
)


def make_world(**overrides) -> WorldState:
    return WorldState(config=WorldConfig(**overrides))


def add_drone(world, drone_id="d1", position=(0.0, 0.0, 0.0), yaw=0.0):
    body = DroneBody(id=drone_id, pose=Pose(Vec3(*position), yaw))
    world.drones[drone_id] = body
    return body


def add_agv(world, agv_id="a1", position=(0.0, 0.0), yaw=0.0):
    body = AgvBody(id=agv_id, pose=Pose(Vec3(position[0], position[1], 0.0), yaw))
    world.agvs[agv_id] = body
    return body


def add_box(world, box_id="b1", position=(0.0, 0.0, 0.15), yaw=0.0):
    box = BoxItem(id=box_id, pose=Pose(Vec3(*position), yaw))
    world.boxes[box_id] = box
    return box


def add_zone(world, zone_id, kind, center, radius, pad_yaw=0.0):
    zone = Zone(
        id=zone_id,
        kind=ZoneKind(kind),
        center=Vec3(center[0], center[1], 0.0),
        radius=radius,
        pad_yaw=pad_yaw,
    )
    world.zones[zone_id] = zone
    return zone


def add_route(world, route_id, waypoints):
    route = Route(route_id, [Vec3(x, y, 0.0) for x, y in waypoints])
    world.routes[route_id] = route
    return route


@pytest.fixture
def world():
    return make_world()


def step_until(world, predicate, max_time=120.0):
    """Advance one substep at a time until predicate(world); returns sim_time."""
    from warelab.sim import world as W

    dt = world.config.dt
    deadline = world.sim_time + max_time
    while not predicate(world):
        if world.sim_time > deadline:
            raise AssertionError(f"condition not reached within {max_time} s")
        W.step(world, dt)
    return world.sim_time


def assert_angle_domain(yaw):
    assert -math.pi < yaw <= math.pi, f"yaw {yaw} outside (-pi, pi]"
