"""UCI engine bridge: session handshake, per-move win/draw/lose
evaluation, and the sentiment-versus-outcome contingency table."""

from __future__ import annotations

import logging
import os
import select
import shlex
import subprocess
import time
from dataclasses import dataclass, field
from typing import Optional

from .chess_core import BoardState, MoveSequence, san_to_engine_coords

log = logging.getLogger(__name__)

OUTCOMES = ("Win", "Draw", "Lose")
SENTIMENT_AXIS = ("Positive", "Neutral", "Negative")


class EngineError(Exception):
    pass


class EngineUnreachable(EngineError):
    pass


class HandshakeTimeout(EngineError):
    pass


class EngineProtocolError(EngineError):
    pass


class WdlUnavailable(EngineError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    skill_level: int = 8
    elo: int = 2400
    depth: int = 10
    engine_path: Optional[str] = None
    handshake_timeout: float = 10.0

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")


@dataclass(frozen=True)
class WdlOutcome:
    win: float
    draw: float
    lose: float
    approximate: bool = False  # True when derived from a centipawn fallback

    def __post_init__(self):
        total = self.win + self.draw + self.lose
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"WDL probabilities sum to {total}, expected 1")
        if min(self.win, self.draw, self.lose) < 0:
            raise ValueError("negative WDL probability")

    def flipped(self) -> "WdlOutcome":
        return WdlOutcome(self.lose, self.draw, self.win, self.approximate)


def parse_wdl(text: str) -> WdlOutcome:
    """Per-mille `w d l` triple -> normalized probabilities."""
    parts = text.split()
    if len(parts) != 3:
        raise EngineProtocolError(f"bad wdl triple {text!r}")
    w, d, l = (int(p) for p in parts)
    total = w + d + l
    if total <= 0:
        raise EngineProtocolError(f"non-positive wdl total in {text!r}")
    return WdlOutcome(w / total, d / total, l / total)


def wdl_from_cp(cp: int, draw_share: float = 0.33) -> WdlOutcome:
    """Centipawn fallback when the engine reports no wdl token: logistic
    win share with a fixed draw mass, flagged approximate."""
    win_share = 1.0 / (1.0 + 10.0 ** (-cp / 400.0))
    win = (1.0 - draw_share) * win_share
    lose = (1.0 - draw_share) - win
    return WdlOutcome(round(win, 9), draw_share, round(lose, 9), approximate=True)


class Transport:
    """Newline-delimited duplex channel to an engine."""

    def send_line(self, line: str) -> None:
        raise NotImplementedError

    def recv_line(self, timeout: float) -> Optional[str]:
        raise NotImplementedError

    def close(self) -> None:
        pass


class MockTransport(Transport):
    """Scripted in-process engine for protocol tests.

    `responders` is a list of (command-prefix, [reply lines]); each sent
    command is appended to `sent` and matched against the first prefix.
    """

    def __init__(self, responders):
        self.responders = list(responders)
        self.sent: list[str] = []
        self.pending: list[str] = []

    def send_line(self, line: str) -> None:
        self.sent.append(line)
        for prefix, replies in self.responders:
            if line.startswith(prefix):
                self.pending.extend(replies)
                return

    def recv_line(self, timeout: float) -> Optional[str]:
        if self.pending:
            return self.pending.pop(0)
        return None


class ProcessTransport(Transport):
    """Child-process stdio transport."""

    def __init__(self, command: str):
        try:
            self.proc = subprocess.Popen(
                shlex.split(command), stdin=subprocess.PIPE,
                stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, bufsize=0)
        except OSError as e:
            raise EngineUnreachable(f"cannot start engine {command!r}: {e}") from e
        self._buffer = b""

    def send_line(self, line: str) -> None:
        if self.proc.poll() is not None:
            raise EngineUnreachable("engine process exited")
        self.proc.stdin.write((line + "\n").encode("utf-8"))
        self.proc.stdin.flush()

    def recv_line(self, timeout: float) -> Optional[str]:
        # unbuffered reads into a private line buffer; select() would be
        # blind to data a stdio buffer had already swallowed
        deadline = time.monotonic() + timeout
        while True:
            if b"\n" in self._buffer:
                line, _, self._buffer = self._buffer.partition(b"\n")
                return line.decode("utf-8").rstrip("\r")
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            ready, _, _ = select.select([self.proc.stdout], [], [], remaining)
            if not ready:
                return None
            chunk = os.read(self.proc.stdout.fileno(), 4096)
            if not chunk:
                return None
            self._buffer += chunk

    def close(self) -> None:
        try:
            self.send_line("quit")
        except EngineError:
            pass
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()


class EngineSession:
    """One serial UCI conversation; a single in-flight command at a time."""

    def __init__(self, transport: Transport, config: EngineConfig):
        self.transport = transport
        self.config = config
        self.raw_log: list[str] = []
        self.rejected_options: list[str] = []

    def _recv(self, timeout: Optional[float] = None) -> Optional[str]:
        line = self.transport.recv_line(timeout or self.config.handshake_timeout)
        if line is not None:
            self.raw_log.append(line)
        return line

    def _await(self, token: str, error: str) -> None:
        deadline = time.monotonic() + self.config.handshake_timeout
        while time.monotonic() < deadline:
            line = self._recv(timeout=deadline - time.monotonic())
            if line is None:
                break
            if line.strip() == token:
                return
            if line.startswith("No such option") or "error" in line.lower():
                self.rejected_options.append(line)
                log.warning("engine option rejected: %s", line)
        raise HandshakeTimeout(error)

    def open(self) -> "EngineSession":
        self.transport.send_line("uci")
        self._await("uciok", "no uciok from engine")
        self.transport.send_line(
            f"setoption name Skill Level value {self.config.skill_level}")
        self.transport.send_line(
            f"setoption name UCI_Elo value {self.config.elo}")
        self.transport.send_line("setoption name UCI_LimitStrength value true")
        self.transport.send_line("setoption name UCI_ShowWDL value true")
        self.transport.send_line("isready")
        self._await("readyok", "no readyok from engine")
        return self

    def close(self) -> None:
        self.transport.close()

    def __enter__(self):
        return self.open()

    def __exit__(self, *exc):
        self.close()

    def evaluate_move(self, board: BoardState, moves: MoveSequence) -> WdlOutcome:
        """WDL for the first move of the sequence, from the mover's
        perspective.

        The engine reports the post-move position, where the opponent is
        the side to move, so the parsed triple is flipped before return.
        """
        coord = san_to_engine_coords(board, moves.moves[0])
        self.transport.send_line(f"position fen {board.fen()} moves {coord}")
        self.transport.send_line(f"go depth {self.config.depth}")

        last_wdl = None
        last_cp = None
        deadline = time.monotonic() + self.config.handshake_timeout
        while time.monotonic() < deadline:
            line = self._recv(timeout=deadline - time.monotonic())
            if line is None:
                break
            tokens = line.split()
            if line.startswith("bestmove"):
                break
            if "wdl" in tokens:
                i = tokens.index("wdl")
                last_wdl = " ".join(tokens[i + 1:i + 4])
            if "cp" in tokens:
                i = tokens.index("cp")
                last_cp = int(tokens[i + 1])
        if last_wdl is not None:
            return parse_wdl(last_wdl).flipped()
        if last_cp is not None:
            log.warning("engine reported no wdl; using centipawn fallback")
            return wdl_from_cp(last_cp).flipped()
        raise EngineProtocolError("no parsable info line before bestmove")


def outcome_category(outcome: WdlOutcome) -> str:
    """Argmax category; ties broken Win > Draw > Lose."""
    triple = (outcome.win, outcome.draw, outcome.lose)
    return OUTCOMES[triple.index(max(triple))]


def build_contingency(sentiments, outcomes) -> dict:
    """counts[sentiment][category] over evaluated records."""
    if len(sentiments) != len(outcomes):
        raise ValueError("sentiments and outcomes differ in length")
    table = {s: {c: 0 for c in OUTCOMES} for s in SENTIMENT_AXIS}
    for s, o in zip(sentiments, outcomes):
        table[s][outcome_category(o)] += 1
    return table


def contingency_csv(table: dict) -> str:
    lines = ["sentiment," + ",".join(OUTCOMES)]
    for s in SENTIMENT_AXIS:
        lines.append(s + "," + ",".join(str(table[s][c]) for c in OUTCOMES))
    return "\n".join(lines) + "\n"
