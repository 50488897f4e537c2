"""Live gateway: WebSocket service around one SessionEngine.

Exactly one asyncio task (the simulation loop) owns the engine. Connection
handlers only move frames: inbound frames go onto a shared queue the loop
drains each tick; outbound messages fan out through per-client queues. A
client whose queue overflows is disconnected rather than allowed to stall
the loop. Acks and Errs go only to the client that sent the frame;
everything else is broadcast.

Snapshots go out on a wall-clock cadence (default 30 Hz) independent of
the 50 Hz tick, and only when sim_time moved, so each client sees sim_time
strictly increase.
"""

from __future__ import annotations

import asyncio
import concurrent.futures
import threading
from dataclasses import dataclass

import websockets
import websockets.exceptions

from ..orchestrator import SessionPlan, build_tasks
from ..sim.scene import Scene
from . import protocol as P
from .engine import SessionEngine
from .errors import BindFailure, InvalidConfig


@dataclass
class ServeConfig:
    scene: Scene
    plan: SessionPlan
    session_index: int = 0
    host: str = "127.0.0.1"
    port: int = 8765
    notify_delay: float = 30.0
    snapshot_hz: float = 30.0
    time_scale: float = 1.0  # >1 runs the sim faster than real time
    client_queue_limit: int = 256

    def validate(self):
        if self.session_index not in (0, 1):
            raise InvalidConfig("session_index must be 0 or 1")
        if self.snapshot_hz <= 0 or self.time_scale <= 0:
            raise InvalidConfig("snapshot_hz and time_scale must be positive")


class _Client:
    def __init__(self, ws, limit):
        self.ws = ws
        self.queue = asyncio.Queue(maxsize=limit)
        self.dropped = False

    def push(self, text) -> bool:
        """Queue a frame; marks the client dropped when the queue is full."""
        if self.dropped:
            return False
        try:
            self.queue.put_nowait(text)
            return True
        except asyncio.QueueFull:
            self.dropped = True
            return False


class GatewayServer:
    """Owns the engine, the sim loop, and the listener.

    start()/stop() run the whole thing on a private thread so synchronous
    callers (CLI, tests) can drive it; serve_forever() is the CLI path.
    """

    def __init__(self, config: ServeConfig):
        config.validate()
        self.config = config
        self.engine = None
        self.port = None
        self._thread = None
        self._loop = None
        self._stop_evt = None

    # ------------------------------------------------------------------

    async def _run(self, started: asyncio.Future):
        cfg = self.config
        tasks_by_kind = build_tasks(cfg.scene.tasks)
        self.engine = SessionEngine(
            cfg.scene, cfg.plan, cfg.session_index, tasks_by_kind, cfg.notify_delay
        )
        self._stop_evt = asyncio.Event()
        inbound = asyncio.Queue()
        clients = set()

        async def sender(client):
            try:
                while True:
                    text = await client.queue.get()
                    await client.ws.send(text)
            except (
                websockets.exceptions.ConnectionClosed,
                asyncio.CancelledError,
            ):
                pass

        async def handler(ws):
            client = _Client(ws, cfg.client_queue_limit)
            clients.add(client)
            pump = asyncio.create_task(sender(client))
            try:
                async for raw in ws:
                    if isinstance(raw, bytes):
                        raw = raw.decode("utf-8", errors="replace")
                    await inbound.put((client, raw))
            except websockets.exceptions.ConnectionClosed:
                pass
            finally:
                clients.discard(client)
                pump.cancel()

        try:
            server = await websockets.serve(handler, cfg.host, cfg.port)
        except OSError as exc:
            if not started.done():
                started.set_exception(BindFailure(str(exc)))
            return
        self.port = server.sockets[0].getsockname()[1]
        started.set_result(self.port)

        def broadcast(messages):
            for message in messages:
                text = P.encode(message)
                for client in list(clients):
                    if not client.push(text):
                        clients.discard(client)
                        asyncio.ensure_future(client.ws.close(code=1013))

        loop = asyncio.get_running_loop()
        dt = self.engine.world.config.dt
        tick_wall = dt / cfg.time_scale
        snap_period = 1.0 / cfg.snapshot_hz
        # the loop always truly awaits between wakeups and catches up on
        # sim time in bounded batches; spinning would starve the senders
        wake = max(tick_wall, 0.002)
        max_batch = 50
        start_wall = loop.time()
        start_sim = self.engine.world.sim_time
        next_snap = loop.time()
        last_snap_sim = -1.0
        try:
            while not self._stop_evt.is_set():
                while not inbound.empty():
                    client, raw = inbound.get_nowait()
                    replies = self.engine.handle_text(raw)
                    for reply in replies:
                        if isinstance(reply, (P.Ack, P.Err)):
                            if not client.push(P.encode(reply)):
                                clients.discard(client)
                                asyncio.ensure_future(client.ws.close(code=1013))
                        else:
                            broadcast([reply])
                if not self.engine.ended:
                    target = start_sim + (loop.time() - start_wall) * cfg.time_scale
                    batched = 0
                    while (
                        self.engine.world.sim_time + dt * 0.5 < target
                        and batched < max_batch
                        and not self.engine.ended
                    ):
                        broadcast(self.engine.advance(dt))
                        batched += 1
                    lag = target - self.engine.world.sim_time
                    if lag > 1.0:
                        # machine cannot hold this time_scale: shed debt
                        start_wall = loop.time()
                        start_sim = self.engine.world.sim_time
                now = loop.time()
                if now >= next_snap:
                    if self.engine.world.sim_time > last_snap_sim:
                        last_snap_sim = self.engine.world.sim_time
                        broadcast([self.engine.snapshot()])
                        frame = self.engine.camera_frame()
                        if frame is not None:
                            broadcast([frame])
                    next_snap = now + snap_period
                try:
                    await asyncio.wait_for(self._stop_evt.wait(), timeout=wake)
                except asyncio.TimeoutError:
                    pass
        finally:
            server.close()
            await server.wait_closed()

    # ------------------------------------------------------------------

    def start(self, timeout=10.0):
        """Run the server on a background thread; returns the bound port."""
        self._loop = asyncio.new_event_loop()
        # thread-safe handoff: the loop may finish (bind failure) before
        # this thread gets to look, so no asyncio future here
        started = concurrent.futures.Future()

        def runner():
            asyncio.set_event_loop(self._loop)
            try:
                self._loop.run_until_complete(self._run(started))
            except BaseException as exc:
                if not started.done():
                    started.set_exception(exc)

        self._thread = threading.Thread(target=runner, daemon=True)
        self._thread.start()
        try:
            return started.result(timeout)
        except concurrent.futures.TimeoutError:
            raise BindFailure("server did not start in time") from None
        except Exception:
            self._thread.join(timeout=2)
            raise

    def stop(self, timeout=10.0):
        if self._loop is None:
            return
        self._loop.call_soon_threadsafe(self._stop_evt.set)
        self._thread.join(timeout)

    def serve_forever(self):
        port = self.start()
        try:
            self._thread.join()
        except KeyboardInterrupt:
            self.stop()
        return port
