"""Scene documents: YAML loading, validation and world construction.

A Scene wraps the normalized source document and builds fresh, independent
WorldState instances from it on demand. Replays and repeated headless runs
always start from fresh_world(), never from a shared mutable world.

Document layout:

    name: <scene name>
    config: {dt: 0.02, ...}            # WorldConfig overrides
    zones:
      - {id, kind, center: [x, y], radius, pad_yaw}
    routes:
      - {id, waypoints: [[x, y], ...]}
    robots:
      drones: [{id, position: [x, y, z], yaw}]
      agvs:   [{id, position: [x, y], yaw, route}]   # route: initial assignment
    boxes:
      - {id, position: [x, y, z], yaw}
    tasks:
      agv_route:  {agv, route, entry_zone}
      drone_lift: {box, takeoff_zone, landing_zone}

Task references are validated by the session layer (missing entities raise
there), so a scene file can ship before its task wiring is final.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from importlib import resources

import yaml

from ..errors import WarelabError
from . import world as sim_world
from .model import (
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

_CONFIG_FIELDS = {f.name for f in fields(WorldConfig)}


class SceneError(WarelabError):
    pass


def _vec3(value, what):
    if not isinstance(value, (list, tuple)) or len(value) not in (2, 3):
        raise SceneError(f"{what} must be [x, y] or [x, y, z], got {value!r}")
    vals = [float(v) for v in value]
    if len(vals) == 2:
        vals.append(0.0)
    return Vec3(*vals)


def _unique_id(entry, seen, what):
    eid = entry.get("id")
    if not isinstance(eid, str) or not eid:
        raise SceneError(f"{what} entry without a string id: {entry!r}")
    if eid in seen:
        raise SceneError(f"duplicate {what} id {eid!r}")
    seen.add(eid)
    return eid


@dataclass(frozen=True)
class Scene:
    name: str
    doc: dict

    def fresh_world(self) -> WorldState:
        return build_world(self.doc)

    @property
    def tasks(self) -> dict:
        return self.doc.get("tasks") or {}

    def canonical_json(self) -> str:
        return json.dumps(self.doc, sort_keys=True, separators=(",", ":"))


def scene_from_doc(doc) -> Scene:
    if not isinstance(doc, dict):
        raise SceneError("scene document must be a mapping")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise SceneError("scene needs a non-empty name")
    scene = Scene(name=name, doc=doc)
    scene.fresh_world()  # validate eagerly
    return scene


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise SceneError(f"unparseable scene file {path}: {exc}") from None
    return scene_from_doc(doc)


def default_scene() -> Scene:
    text = (
        resources.files("warelab").joinpath("data/default_scene.yaml").read_text()
    )
    return scene_from_doc(yaml.safe_load(text))


def build_world(doc) -> WorldState:
    cfg_doc = doc.get("config") or {}
    if not isinstance(cfg_doc, dict):
        raise SceneError("config must be a mapping")
    unknown = set(cfg_doc) - _CONFIG_FIELDS
    if unknown:
        raise SceneError(f"unknown config keys: {sorted(unknown)}")
    config = WorldConfig(**cfg_doc)
    world = WorldState(config=config)

    seen = set()
    for entry in doc.get("zones") or []:
        zid = _unique_id(entry, seen, "zone")
        try:
            kind = ZoneKind(entry.get("kind"))
        except ValueError:
            raise SceneError(
                f"zone {zid!r} has unknown kind {entry.get('kind')!r}"
            ) from None
        world.zones[zid] = Zone(
            id=zid,
            kind=kind,
            center=_vec3(entry.get("center"), f"zone {zid} center"),
            radius=float(entry.get("radius", 0.5)),
            pad_yaw=float(entry.get("pad_yaw", 0.0)),
        )

    seen = set()
    for entry in doc.get("routes") or []:
        rid = _unique_id(entry, seen, "route")
        wps = entry.get("waypoints")
        if not isinstance(wps, list) or not wps:
            raise SceneError(f"route {rid!r} needs a non-empty waypoint list")
        world.routes[rid] = Route(
            rid, [_vec3(wp, f"route {rid} waypoint") for wp in wps]
        )

    robots = doc.get("robots") or {}
    seen = set()
    for entry in robots.get("drones") or []:
        did = _unique_id(entry, seen, "robot")
        world.drones[did] = DroneBody(
            id=did,
            pose=Pose(
                _vec3(entry.get("position"), f"drone {did} position"),
                float(entry.get("yaw", 0.0)),
            ),
        )
    initial_routes = []
    for entry in robots.get("agvs") or []:
        aid = _unique_id(entry, seen, "robot")
        world.agvs[aid] = AgvBody(
            id=aid,
            pose=Pose(
                _vec3(entry.get("position"), f"AGV {aid} position"),
                float(entry.get("yaw", 0.0)),
            ),
        )
        if entry.get("route") is not None:
            initial_routes.append((aid, entry["route"]))

    seen = set()
    for entry in doc.get("boxes") or []:
        bid = _unique_id(entry, seen, "box")
        world.boxes[bid] = BoxItem(
            id=bid,
            pose=Pose(
                _vec3(entry.get("position"), f"box {bid} position"),
                float(entry.get("yaw", 0.0)),
            ),
        )

    # initial assignments go through the regular command so its preconditions
    # (route exists, AGV at start) hold for scenes too
    for aid, rid in initial_routes:
        try:
            sim_world.assign_route(world, aid, rid)
        except WarelabError as exc:
            raise SceneError(f"initial route for {aid!r}: {exc}") from None

    return world
