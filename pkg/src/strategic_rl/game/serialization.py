"""Plain-text game files.

::

    markov-game v1 H=2
    initial root
    meta target_state [1, "entry0"]
    step 1 states=1
    state root max=2 min=2 player=both
    0 0 0.5 -> left 1.0
    0 1 0.25 -> left 0.5 right 0.5
    ...
    step 2 states=2
    state left max=1 min=1 player=both
    0 0 1.0

Steps are numbered from 1 in the file. Floats are written with ``repr`` so a
write/read cycle reproduces every value bit for bit. State names may not
contain whitespace.
"""

from __future__ import annotations

import json
from pathlib import Path

from .model import GameBuilder, MarkovGame

HEADER = "markov-game v1"


class GameFormatError(ValueError):
    pass


def dumps(game: MarkovGame) -> str:
    lines = [f"{HEADER} H={game.horizon}", f"initial {game.initial_state}"]
    for key in sorted(game.metadata):
        lines.append(f"meta {key} {json.dumps(game.metadata[key], sort_keys=True)}")
    for h, layout in enumerate(game.layouts):
        lines.append(f"step {h + 1} states={layout.n_states}")
        P = game.transitions[h]
        next_names = game.layouts[h + 1].names if P is not None else ()
        for s, name in enumerate(layout.names):
            lines.append(f"state {name} max={layout.n_max[s]} min={layout.n_min[s]} player={layout.active[s]}")
            for e in range(layout.entry_ptr[s], layout.entry_ptr[s + 1]):
                parts = [str(layout.entry_a[e]), str(layout.entry_b[e]), repr(float(game.rewards[h][e]))]
                if P is not None:
                    parts.append("->")
                    for j, p in zip(P.indices[P.indptr[e]:P.indptr[e + 1]], P.data[P.indptr[e]:P.indptr[e + 1]]):
                        parts += [next_names[j], repr(float(p))]
                lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _kv(token: str, key: str, lineno: int) -> str:
    prefix = key + "="
    if not token.startswith(prefix):
        raise GameFormatError(f"line {lineno}: expected {prefix}<value>, got {token!r}")
    return token[len(prefix):]


def loads(text: str) -> MarkovGame:
    rows = [(i + 1, line.split()) for i, line in enumerate(text.splitlines())]
    rows = [(i, toks) for i, toks in rows if toks and not toks[0].startswith("#")]
    if not rows or " ".join(rows[0][1][:2]) != HEADER or len(rows[0][1]) != 3:
        raise GameFormatError(f"first line must be '{HEADER} H=<H>'")
    horizon = int(_kv(rows[0][1][2], "H", rows[0][0]))
    if len(rows) < 2 or rows[1][1][0] != "initial" or len(rows[1][1]) != 2:
        raise GameFormatError("second line must be 'initial <state>'")
    initial = rows[1][1][1]
    metadata = {}
    step_blocks: list[list[tuple[int, list[str]]]] = []
    for lineno, toks in rows[2:]:
        if toks[0] == "meta":
            metadata[toks[1]] = json.loads(" ".join(toks[2:]))
        elif toks[0] == "step":
            if int(toks[1]) != len(step_blocks) + 1:
                raise GameFormatError(f"line {lineno}: steps must be numbered consecutively from 1")
            step_blocks.append([])
        elif not step_blocks:
            raise GameFormatError(f"line {lineno}: content before the first step block")
        else:
            step_blocks[-1].append((lineno, toks))
    if len(step_blocks) != horizon:
        raise GameFormatError(f"header says H={horizon} but the file has {len(step_blocks)} steps")

    builder = GameBuilder(horizon, initial)
    outcomes = []
    for h, block in enumerate(step_blocks):
        current = None
        for lineno, toks in block:
            if toks[0] == "state":
                current = toks[1]
                builder.add_state(h, current, int(_kv(toks[2], "max", lineno)),
                                  int(_kv(toks[3], "min", lineno)), _kv(toks[4], "player", lineno))
                continue
            if current is None:
                raise GameFormatError(f"line {lineno}: outcome before any state")
            a, b, reward = int(toks[0]), int(toks[1]), float(toks[2])
            succ = None
            if len(toks) > 3:
                if toks[3] != "->" or len(toks[4:]) % 2:
                    raise GameFormatError(f"line {lineno}: expected '-> <state> <prob> ...'")
                pairs = toks[4:]
                succ = {}
                for name, p in zip(pairs[::2], pairs[1::2]):
                    succ[name] = succ.get(name, 0.0) + float(p)
            outcomes.append((h, current, a, b, reward, succ))
    for h, name, a, b, reward, succ in outcomes:
        builder.set_outcome(h, name, a, b, reward, succ)
    return builder.build(metadata)


def save(game: MarkovGame, path: str | Path) -> None:
    Path(path).write_text(dumps(game))


def load(path: str | Path) -> MarkovGame:
    return loads(Path(path).read_text())
