"""Live mode: pace the simulated day on the wall clock and bridge it to the
dashboard over a WebSocket.

Stream grammar is the wire protocol plus a few session framing lines:

  server -> client: DAY|horizon|interval_minutes        session header
                    NOD|id|name|class|rated_kw          load roster
                    SCR|id|screen                       screen-state mirror
                    CFG/TEL/CMD/ACK (wire lines)        messages as delivered
                    ROW|t|aggregate_kw|mdl_kw|over_kw   profile row (CSV values)
                    ERR|id|kind|detail                  rejected consumer input
                    END|energy_over|penalty|intervals   day complete
  client -> server: UIE|id|menu / node_config / data_logging / back
                    UIE|id|submit|CLASS|alpha|beta|gamma_minutes

Consumer inputs are queued and applied at interval boundaries only; the
dashboard never originates scheduling decisions.
"""

from __future__ import annotations

import asyncio

from .domain import LoadClass
from .errors import HansimError
from .protocol import encode, format_number
from .simnet import DayEngine, Scenario
from .sln import SmartLoadNode


def _field(value: str) -> str:
    return value.replace("|", "/").replace("\n", " ")


def _scr_line(node: SmartLoadNode) -> str:
    return f"SCR|{node.node_id}|{node.screen.value}"


def _nod_line(node: SmartLoadNode) -> str:
    return (f"NOD|{node.node_id}|{_field(node.spec.name)}|"
            f"{node.spec.load_class.value}|{format_number(node.spec.rated_kw)}")


class LiveSession:
    """One paced day, one set of watchers."""

    def __init__(self, scenario: Scenario, algorithm: str, seed: int | None, pace_s: float):
        self.engine = DayEngine(scenario, algorithm, seed)
        self.pace_s = pace_s
        self.clients: set = set()
        self.inputs: asyncio.Queue[str] = asyncio.Queue()
        self.row_history: list[str] = []
        self.last_cfg: dict[str, str] = {}
        self.last_tel: dict[str, str] = {}
        self.end_line: str | None = None
        self._log_cursor = 0

    # -- fan-out ---------------------------------------------------------------

    async def broadcast(self, line: str) -> None:
        stale = []
        for ws in self.clients:
            try:
                await ws.send(line)
            except Exception:
                stale.append(ws)
        for ws in stale:
            self.clients.discard(ws)

    def snapshot(self) -> list[str]:
        """Everything a late joiner needs to mirror the current state."""
        engine = self.engine
        lines = [f"DAY|{engine.tm.horizon}|{engine.tm.interval_minutes}"]
        for node in engine.nodes.values():
            lines.append(_nod_line(node))
            lines.append(_scr_line(node))
            if node.node_id in self.last_cfg:
                lines.append(self.last_cfg[node.node_id])
            if node.node_id in self.last_tel:
                lines.append(self.last_tel[node.node_id])
        lines.extend(self.row_history)
        if self.end_line:
            lines.append(self.end_line)
        return lines

    def _remember(self, line: str) -> None:
        if line.startswith("CFG|"):
            self.last_cfg[line.split("|")[1]] = line
        elif line.startswith("TEL|"):
            self.last_tel[line.split("|")[1]] = line

    # -- consumer input ----------------------------------------------------------

    async def apply_ui_event(self, raw: str) -> None:
        fields = raw.strip().split("|")
        if len(fields) < 3 or fields[0] != "UIE":
            await self.broadcast(f"ERR|-|BadEvent|{_field(raw.strip()[:80])}")
            return
        node_id, event = fields[1], fields[2]
        node = self.engine.nodes.get(node_id)
        if node is None:
            await self.broadcast(f"ERR|{_field(node_id)}|UnknownNode|no such node")
            return
        try:
            if event == "menu":
                node.press_menu()
            elif event == "node_config":
                node.select_node_config()
            elif event == "data_logging":
                node.open_data_logging()
            elif event == "back":
                node.show_default()
            elif event == "submit":
                if len(fields) != 7:
                    await self.broadcast(f"ERR|{node_id}|BadEvent|submit wants CLASS|a|b|gamma")
                    return
                cls = LoadClass(fields[3])
                triple = [int(x) for x in fields[4:7]]
                cfg = self.engine.submit_config(node_id, cls, *triple)
                line = encode(cfg).rstrip("\n")
                self._remember(line)
                await self.broadcast(line)
            else:
                await self.broadcast(f"ERR|{node_id}|BadEvent|unknown event {_field(event)}")
                return
        except (HansimError, ValueError) as exc:
            kind = type(exc).__name__
            await self.broadcast(f"ERR|{node_id}|{kind}|{_field(str(exc))}")
            return
        await self.broadcast(_scr_line(node))

    # -- the paced day -------------------------------------------------------------

    async def _broadcast_new_deliveries(self) -> None:
        log = self.engine.event_log
        while self._log_cursor < len(log):
            _, line = log[self._log_cursor]
            self._log_cursor += 1
            stripped = line.rstrip("\n")
            self._remember(stripped)
            await self.broadcast(stripped)

    async def run_day(self) -> None:
        engine = self.engine
        for t in range(engine.tm.horizon):
            while not self.inputs.empty():
                await self.apply_ui_event(self.inputs.get_nowait())
            snap = engine.run_interval(t)
            await self._broadcast_new_deliveries()
            row = (f"ROW|{snap.t}|{format_number(snap.aggregate_kw)}|"
                   f"{format_number(snap.mdl_kw)}|{format_number(snap.over_kw)}")
            self.row_history.append(row)
            await self.broadcast(row)
            await asyncio.sleep(self.pace_s)
        result = engine.finish()
        await self._broadcast_new_deliveries()  # telemetry drained after the last boundary
        report = result.penalty_report
        self.end_line = (f"END|{format_number(report.energy_over_kwh)}|"
                         f"{format_number(report.penalty)}|{report.intervals_over}")
        await self.broadcast(self.end_line)


async def _serve_async(scenario: Scenario, host: str, port: int, algorithm: str,
                       seed: int | None, pace_s: float) -> None:
    from websockets.asyncio.server import serve as ws_serve

    session = LiveSession(scenario, algorithm, seed, pace_s)

    async def handler(ws) -> None:
        session.clients.add(ws)
        try:
            for line in session.snapshot():
                await ws.send(line)
            async for raw in ws:
                if isinstance(raw, bytes):
                    raw = raw.decode("utf-8", errors="replace")
                await session.inputs.put(raw)
        finally:
            session.clients.discard(ws)

    async with ws_serve(handler, host, port) as server:
        actual_port = server.sockets[0].getsockname()[1]
        print(f"listening on ws://{host}:{actual_port}", flush=True)
        await session.run_day()
        await asyncio.sleep(max(pace_s, 0.2))  # let the END line drain


def serve(scenario: Scenario, host: str, port: int, algorithm: str = "priority",
          seed: int | None = None, pace_s: float = 1.0) -> None:
    """Blocking entry point for `hansim serve`."""
    asyncio.run(_serve_async(scenario, host, port, algorithm, seed, pace_s))
