"""Line-oriented instance format.

::

    # comment
    p thetac <n> <m> <c> <k>
    e <u> <v> [mult]

Vertices are ``1..n``; ``m`` counts edge lines.  Repeated lines for the
same pair add up.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

from .errors import PreconditionError
from .graph import Instance, Multigraph, sorted_vertices


def parse_instance(text: str) -> Instance:
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "p":
                if header is not None:
                    raise PreconditionError(f"line {lineno}: second header")
                if len(parts) != 6 or parts[1] != "thetac":
                    raise PreconditionError(f"line {lineno}: expected 'p thetac n m c k'")
                header = tuple(int(x) for x in parts[2:])
            elif parts[0] == "e":
                if header is None:
                    raise PreconditionError(f"line {lineno}: edge before header")
                if len(parts) not in (3, 4):
                    raise PreconditionError(f"line {lineno}: expected 'e u v [mult]'")
                u, v = int(parts[1]), int(parts[2])
                mult = int(parts[3]) if len(parts) == 4 else 1
                n = header[0]
                if not (1 <= u <= n and 1 <= v <= n):
                    raise PreconditionError(f"line {lineno}: vertex out of range 1..{n}")
                if u == v:
                    raise PreconditionError(f"line {lineno}: self-loop")
                if mult < 1:
                    raise PreconditionError(f"line {lineno}: multiplicity must be positive")
                edges.append((u, v, mult))
            else:
                raise PreconditionError(f"line {lineno}: unknown record {parts[0]!r}")
        except ValueError as exc:
            if isinstance(exc, PreconditionError):
                raise
            raise PreconditionError(f"line {lineno}: {exc}") from None
    if header is None:
        raise PreconditionError("missing 'p thetac' header")
    n, m, c, k = header
    if len(edges) != m:
        raise PreconditionError(f"header says {m} edges, found {len(edges)}")
    if c < 1:
        raise PreconditionError("c must be >= 1")
    return Instance(Multigraph(range(1, n + 1), edges), k, c)


def read_instance(path: Union[str, Path]) -> Instance:
    return parse_instance(Path(path).read_text())


def format_instance(inst: Instance, comment: str = "") -> str:
    """Serialize, renumbering vertices to 1..n in id order."""
    g = inst.graph
    ren = {v: i + 1 for i, v in enumerate(sorted_vertices(g.vertices))}
    pairs = sorted((min(ren[u], ren[v]), max(ren[u], ren[v]), m) for u, v, m in g.pairs())
    lines = [f"# {line}" for line in comment.splitlines()]
    lines.append(f"p thetac {g.n} {len(pairs)} {inst.c} {inst.k}")
    lines += [f"e {u} {v}" if m == 1 else f"e {u} {v} {m}" for u, v, m in pairs]
    return "\n".join(lines) + "\n"


def write_instance(inst: Instance, path: Union[str, Path], comment: str = "") -> None:
    Path(path).write_text(format_instance(inst, comment))
