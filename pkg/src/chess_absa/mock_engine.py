"""Deterministic stand-in UCI engine.

Speaks just enough of the protocol for the evaluation pipeline: uci,
isready, setoption, position, go, quit.  WDL replies are a pure function
of the position command, so runs are reproducible.

Run as: python -m chess_absa.mock_engine
"""

from __future__ import annotations

import sys
import zlib


def wdl_for(position: str) -> tuple[int, int, int]:
    h = zlib.crc32(position.encode("utf-8"))
    w = 100 + h % 500
    d = 100 + (h // 500) % 300
    l = 1000 - w - d
    return w, d, l


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    position = "startpos"

    def say(line: str) -> None:
        stdout.write(line + "\n")
        stdout.flush()

    for raw in stdin:
        line = raw.strip()
        if line == "uci":
            say("id name MockFish")
            say("id author chess-absa")
            say("uciok")
        elif line == "isready":
            say("readyok")
        elif line.startswith("position"):
            position = line
        elif line.startswith("go"):
            w, d, l = wdl_for(position)
            say(f"info depth 10 score cp {(w - l)} wdl {w} {d} {l} pv 0000")
            say("bestmove 0000")
        elif line == "quit":
            break


if __name__ == "__main__":
    serve()
