"""Marching-squares isolines on a rectangular grid.

Crossings are placed on cell edges by linear interpolation and segments are
chained through shared edges, so polylines come out with exact topology
rather than by matching floating-point endpoints.  Saddle cells are resolved
with the cell-centre average.
"""

from __future__ import annotations

import numpy as np

# edges of cell (i, j): 0 top (i, j)-(i, j+1), 1 right (i, j+1)-(i+1, j+1),
# 2 bottom (i+1, j)-(i+1, j+1), 3 left (i, j)-(i+1, j)
# corner bits: 1 (i, j), 2 (i, j+1), 4 (i+1, j+1), 8 (i+1, j)
_SEGMENTS = {
    1: ((0, 3),),
    2: ((0, 1),),
    3: ((1, 3),),
    4: ((1, 2),),
    6: ((0, 2),),
    7: ((2, 3),),
    8: ((2, 3),),
    9: ((0, 2),),
    11: ((1, 2),),
    12: ((1, 3),),
    13: ((0, 1),),
    14: ((0, 3),),
}
# saddles, keyed by (case, centre above level)
_SADDLES = {
    (5, True): ((0, 1), (2, 3)),
    (5, False): ((0, 3), (1, 2)),
    (10, True): ((0, 3), (1, 2)),
    (10, False): ((0, 1), (2, 3)),
}


def _edge_key(i, j, e):
    if e == 0:
        return (0, i, j)
    if e == 2:
        return (0, i + 1, j)
    if e == 3:
        return (1, i, j)
    return (1, i, j + 1)


def _edge_point(field, level, key):
    kind, i, j = key
    a = field[i, j]
    if kind == 0:
        b = field[i, j + 1]
        t = (level - a) / (b - a)
        return (float(i), j + float(t))
    b = field[i + 1, j]
    t = (level - a) / (b - a)
    return (i + float(t), float(j))


def isolines(field: np.ndarray, level: float, mask: np.ndarray | None = None) -> list[tuple[np.ndarray, bool]]:
    """Polylines of ``field == level`` in fractional index coordinates.

    Returns ``(points, closed)`` pairs, ``points`` of shape ``(m, 2)`` holding
    ``(i, j)``.  Cells touching a ``mask`` node (or a non-finite value) are
    skipped.
    """
    f = np.asarray(field, dtype=float)
    bad = ~np.isfinite(f)
    if mask is not None:
        bad |= mask
    above = np.where(bad, False, f > level)
    case = (
        above[:-1, :-1] * 1
        + above[:-1, 1:] * 2
        + above[1:, 1:] * 4
        + above[1:, :-1] * 8
    )
    skip = bad[:-1, :-1] | bad[:-1, 1:] | bad[1:, 1:] | bad[1:, :-1]
    cells = np.argwhere((case != 0) & (case != 15) & ~skip)

    neighbours: dict = {}
    for i, j in cells:
        c = int(case[i, j])
        if c in (5, 10):
            centre = 0.25 * (f[i, j] + f[i, j + 1] + f[i + 1, j + 1] + f[i + 1, j])
            segs = _SADDLES[(c, bool(centre > level))]
        else:
            segs = _SEGMENTS[c]
        for ea, eb in segs:
            ka, kb = _edge_key(i, j, ea), _edge_key(i, j, eb)
            neighbours.setdefault(ka, []).append(kb)
            neighbours.setdefault(kb, []).append(ka)

    lines = []
    seen = set()

    def walk(start):
        chain = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [n for n in neighbours[cur] if n != prev and n not in seen]
            if not nxt:
                closed = len(chain) > 2 and start in neighbours[cur] and prev is not None
                return chain, closed
            prev, cur = cur, nxt[0]
            chain.append(cur)
            seen.add(cur)

    # open lines first, starting from their ends
    for key, nbrs in neighbours.items():
        if len(nbrs) == 1 and key not in seen:
            chain, _ = walk(key)
            lines.append((chain, False))
    for key in neighbours:
        if key not in seen:
            chain, closed = walk(key)
            if closed:
                chain.append(chain[0])
            lines.append((chain, closed))

    out = []
    for chain, closed in lines:
        pts = np.array([_edge_point(f, level, k) for k in chain])
        out.append((pts, closed))
    return out
