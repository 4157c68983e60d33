"""Live multi-session game service.

HTTP endpoints create and inspect sessions; each role holds one WebSocket
through which all play flows as JSON messages with terms in canonical text.
Per-player visibility filtering happens in the engine before anything is
fanned out, so a connection can never observe a word hidden from its role.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import uuid
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from .engine import (
    Accounts, ActionAck, ActionReject, ChrononConfig, ChrononOpen, Delta, Game,
    GameEnd, InitSnapshot, RulesText, account_map, replay_lines,
)
from .errors import ParseError, SidlError, ValidationFailure
from .model import load_source, sorted_facts, visible_words
from .terms import format_term, parse_term

log = logging.getLogger(__name__)

SPECTATOR = "spectator"


def event_to_wire(event) -> dict:
    if isinstance(event, RulesText):
        return {"type": "rules", "source": event.source}
    if isinstance(event, InitSnapshot):
        return {"type": "init", "facts": list(event.facts), "accounts": event.accounts}
    if isinstance(event, ChrononOpen):
        return {"type": "chronon", "number": event.number,
                "deadline_ms": event.deadline_ms}
    if isinstance(event, ActionAck):
        return {"type": "ack", "switch": event.switch}
    if isinstance(event, ActionReject):
        return {"type": "reject", "switch": event.switch,
                "reason": event.reason, "detail": event.detail}
    if isinstance(event, Delta):
        return {"type": "delta", "created": list(event.created),
                "deleted": list(event.deleted)}
    if isinstance(event, Accounts):
        return {"type": "accounts", "accounts": event.accounts}
    if isinstance(event, GameEnd):
        return {"type": "end", "accounts": event.accounts}
    raise TypeError(f"unknown event {event!r}")


class LiveSession:
    def __init__(self, session_id: str, defn, config: ChrononConfig, replay_dir: str):
        self.id = session_id
        self.defn = defn
        self.config = config
        self.replay_dir = replay_dir
        self.game = Game(defn, config)
        self.roles = list(defn.player_texts)
        self.connections: dict[str, Optional[WebSocket]] = {r: None for r in self.roles}
        self.spectators: list[WebSocket] = []
        self.lifecycle = "lobby"
        self.chronon_open = False
        self.lock = asyncio.Lock()
        self.resolved = asyncio.Event()
        self.loop_task: Optional[asyncio.Task] = None

    # -- helpers -------------------------------------------------------------

    async def _send(self, role: str, message: dict) -> None:
        ws = self.connections.get(role)
        if ws is None:
            return
        try:
            await ws.send_text(json.dumps(message, sort_keys=True))
        except Exception:
            self.connections[role] = None

    async def _send_spectators(self, message: dict) -> None:
        for ws in list(self.spectators):
            try:
                await ws.send_text(json.dumps(message, sort_keys=True))
            except Exception:
                self.spectators.remove(ws)

    def _public_words(self, words):
        # Spectators get the public view: words hidden from any player are withheld.
        out = list(words)
        for player in self.defn.players:
            visible = set(visible_words(self.defn, player, out))
            out = [w for w in out if w in visible]
        return out

    def _maybe_resolved(self) -> None:
        """duration 0: close once every live player switch carries a submission."""
        if self.config.duration_ms != 0 or not self.chronon_open:
            return
        for res in self.game.unresolved_player_switches():
            owner = format_term(res.controller.player)
            if self.connections.get(owner) is not None:
                return
        self.resolved.set()

    # -- protocol ------------------------------------------------------------

    async def handle_join(self, role: str, ws: WebSocket) -> bool:
        if role == SPECTATOR:
            self.spectators.append(ws)
            await ws.send_text(json.dumps({"type": "joined", "role": role}))
            if self.lifecycle != "lobby":
                await self._send_spectator_snapshot(ws)
            return True
        if role not in self.connections:
            await ws.send_text(json.dumps(
                {"type": "reject", "switch": "", "reason": "unknown_role",
                 "detail": role}))
            return False
        if self.connections[role] is not None:
            await ws.send_text(json.dumps(
                {"type": "reject", "switch": "", "reason": "role_taken",
                 "detail": role}))
            return False
        self.connections[role] = ws
        await ws.send_text(json.dumps({"type": "joined", "role": role}))
        if self.lifecycle == "lobby":
            if all(c is not None for c in self.connections.values()):
                await self._start()
        else:
            await self._resend_snapshot(role)
            self._maybe_resolved()
        return True

    async def _start(self) -> None:
        self.lifecycle = "running"
        batches = self.game.begin()
        for role, events in batches.items():
            for event in events:
                await self._send(role, event_to_wire(event))
        state = self.game.state
        accounts = account_map(self.defn, state)
        public = [format_term(w) for w in self._public_words(sorted_facts(state.facts))]
        await self._send_spectators({"type": "rules", "source": self.defn.source})
        await self._send_spectators({"type": "init", "facts": public,
                                     "accounts": accounts})
        self.loop_task = asyncio.create_task(self.run_loop())

    async def _resend_snapshot(self, role: str) -> None:
        state = self.game.state
        player = self.defn.players[self.roles.index(role)]
        visible = visible_words(self.defn, player, sorted_facts(state.facts))
        await self._send(role, {"type": "rules", "source": self.defn.source})
        await self._send(role, {"type": "init",
                                "facts": [format_term(w) for w in visible],
                                "accounts": account_map(self.defn, state)})
        if self.chronon_open:
            await self._send(role, {"type": "chronon",
                                    "number": state.chronon + 1,
                                    "deadline_ms": self.config.duration_ms})

    async def _send_spectator_snapshot(self, ws: WebSocket) -> None:
        state = self.game.state
        public = [format_term(w) for w in self._public_words(sorted_facts(state.facts))]
        await ws.send_text(json.dumps({"type": "init", "facts": public,
                                       "accounts": account_map(self.defn, state)}))

    async def handle_act(self, role: str, message: dict) -> None:
        ws = self.connections.get(role)
        switch_text = str(message.get("switch", ""))
        if self.lifecycle == "ended" or not self.chronon_open:
            await self._send(role, {"type": "reject", "switch": switch_text,
                                    "reason": "chronon_closed", "detail": ""})
            return
        try:
            switch = parse_term(switch_text)
            action = parse_term(str(message.get("action", "")))
        except ParseError as exc:
            await self._send(role, {"type": "reject", "switch": switch_text,
                                    "reason": "malformed_term", "detail": str(exc)})
            return
        player = self.defn.players[self.roles.index(role)]
        async with self.lock:
            outcome = self.game.submit(player, switch, action)
        await self._send(role, event_to_wire(outcome))
        if isinstance(outcome, ActionAck):
            self._maybe_resolved()

    async def run_loop(self) -> None:
        try:
            while not self.game.is_terminal() and not self.game.chronon_capped():
                number = self.game.state.chronon + 1
                open_msg = {"type": "chronon", "number": number,
                            "deadline_ms": self.config.duration_ms}
                for role in self.roles:
                    await self._send(role, open_msg)
                await self._send_spectators(open_msg)
                self.resolved.clear()
                self.chronon_open = True
                self._maybe_resolved()
                if self.config.duration_ms == 0:
                    await self.resolved.wait()
                else:
                    try:
                        await asyncio.wait_for(
                            self.resolved.wait(), self.config.duration_ms / 1000.0)
                    except asyncio.TimeoutError:
                        pass
                self.chronon_open = False
                async with self.lock:
                    record, events = self.game.close()
                for role, batch in events.items():
                    for event in batch:
                        await self._send(role, event_to_wire(event))
                public_created = [format_term(w)
                                  for w in self._public_words(record.created)]
                public_deleted = [format_term(w)
                                  for w in self._public_words(record.deleted)]
                await self._send_spectators({"type": "delta",
                                             "created": public_created,
                                             "deleted": public_deleted})
                await self._send_spectators({"type": "accounts",
                                             "accounts": record.accounts_after})
            end_batches = self.game.end_events()
            for role, batch in end_batches.items():
                for event in batch:
                    await self._send(role, event_to_wire(event))
            await self._send_spectators(
                {"type": "end", "accounts": account_map(self.defn, self.game.state)})
            self.lifecycle = "ended"
            self.persist_replay()
        except Exception:
            log.exception("session %s loop failed", self.id)
            self.lifecycle = "ended"

    def persist_replay(self) -> None:
        path = os.path.join(self.replay_dir, f"session-{self.id}.jsonl")
        with open(path, "w", encoding="utf-8") as fp:
            for line in replay_lines(self.defn, self.config, self.game.records):
                fp.write(line + "\n")
        self.replay_path = path

    def status(self) -> dict:
        return {
            "id": self.id,
            "game": self.defn.name,
            "lifecycle": self.lifecycle,
            "roles": self.roles,
            "bound": [r for r, c in self.connections.items() if c is not None],
            "chronon": self.game.state.chronon if self.game.state else 0,
        }


def create_app(default_source: Optional[str] = None, replay_dir: str = ".") -> FastAPI:
    app = FastAPI(title="sidl game server")
    sessions: dict[str, LiveSession] = {}
    app.state.sessions = sessions

    @app.post("/sessions")
    async def create_session(body: dict):
        source = body.get("source") or default_source
        if not source:
            return JSONResponse({"error": "no definition source"}, status_code=400)
        try:
            defn = load_source(source)
        except ValidationFailure as exc:
            return JSONResponse(
                {"error": "validation failed",
                 "findings": [f.to_json() for f in exc.findings]},
                status_code=400)
        except SidlError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        raw = body.get("config") or {}
        config = ChrononConfig(
            duration_ms=int(raw.get("duration_ms", 0)),
            max_chronons=raw.get("max_chronons"),
            seed=int(raw.get("seed", 0)),
        )
        session_id = uuid.uuid4().hex[:12]
        sessions[session_id] = LiveSession(session_id, defn, config, replay_dir)
        return {"id": session_id, "roles": sessions[session_id].roles}

    @app.get("/sessions/{session_id}")
    async def session_status(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return JSONResponse({"error": "no such session"}, status_code=404)
        return session.status()

    @app.get("/sessions/{session_id}/replay")
    async def session_replay(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            return JSONResponse({"error": "no such session"}, status_code=404)
        lines = replay_lines(session.defn, session.config, session.game.records)
        return PlainTextResponse("\n".join(lines) + "\n")

    @app.websocket("/session/{session_id}")
    async def session_socket(ws: WebSocket, session_id: str):
        await ws.accept()
        session = sessions.get(session_id)
        if session is None:
            await ws.send_text(json.dumps(
                {"type": "reject", "switch": "", "reason": "no_such_session",
                 "detail": session_id}))
            await ws.close()
            return
        role: Optional[str] = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    message = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(
                        {"type": "reject", "switch": "",
                         "reason": "malformed_message", "detail": ""}))
                    continue
                mtype = message.get("type")
                if mtype == "join":
                    wanted = str(message.get("role", ""))
                    if await session.handle_join(wanted, ws):
                        role = wanted
                elif mtype == "act":
                    if role is None or role == SPECTATOR:
                        await ws.send_text(json.dumps(
                            {"type": "reject", "switch": "",
                             "reason": "not_joined", "detail": ""}))
                    else:
                        await session.handle_act(role, message)
                else:
                    await ws.send_text(json.dumps(
                        {"type": "reject", "switch": "",
                         "reason": "unknown_type", "detail": str(mtype)}))
        except WebSocketDisconnect:
            pass
        finally:
            if role == SPECTATOR:
                if ws in session.spectators:
                    session.spectators.remove(ws)
            elif role is not None and session.connections.get(role) is ws:
                session.connections[role] = None
                session._maybe_resolved()

    return app
