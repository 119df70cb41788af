"""Plane multigraphs as rotation systems, with the graph surgery they need.

A graph is stored as an explicit embedding: a dict of edges (id -> endpoint
pair) plus, per vertex, the counterclockwise cyclic order of incident
edge-ends ("darts").  A dart is (edge_id, side); dart (e, 0) sits at
edges[e][0].  Faces are always derived by tracing, never stored.

Parallel edges and degree-2 vertices are representable because the
triangle/star exchanges create them transiently before series-parallel
cleanup; loops are not supported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

Dart = tuple[int, int]

DELTA_TO_Y = "delta_to_y"
Y_TO_DELTA = "y_to_delta"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Face:
    """One face cycle: darts in order (face on the left) and their tails."""

    darts: tuple[Dart, ...]
    tails: tuple[str, ...]

    @staticmethod
    def from_cycle(darts: tuple[Dart, ...], tails: tuple[str, ...]) -> "Face":
        k = darts.index(min(darts))
        return Face(darts[k:] + darts[:k], tails[k:] + tails[:k])

    @property
    def key(self) -> tuple[Dart, ...]:
        return self.darts

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.darts)

    @property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.tails)

    def __len__(self) -> int:
        return len(self.darts)


@dataclass(frozen=True, eq=True)
class PlaneGraph:
    """Immutable plane multigraph; operations return new instances."""

    edges: dict[int, tuple[str, str]]
    rotations: dict[str, tuple[Dart, ...]]

    # -- basic access ------------------------------------------------------

    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self.rotations))

    def num_vertices(self) -> int:
        return len(self.rotations)

    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: str) -> int:
        return len(self.rotations[v])

    def dart_tail(self, d: Dart) -> str:
        return self.edges[d[0]][d[1]]

    def dart_head(self, d: Dart) -> str:
        return self.edges[d[0]][1 - d[1]]

    @staticmethod
    def twin(d: Dart) -> Dart:
        return (d[0], 1 - d[1])

    def neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(self.dart_head(d) for d in self.rotations[v])

    def has_edge(self, u: str, v: str) -> bool:
        return any(set(p) == {u, v} for p in self.edges.values())

    def edge_between(self, u: str, v: str) -> list[int]:
        return sorted(e for e, p in self.edges.items() if set(p) == {u, v})

    def is_simple(self) -> bool:
        seen = set()
        for u, v in self.edges.values():
            if u == v:
                return False
            k = frozenset((u, v))
            if k in seen:
                return False
            seen.add(k)
        return True

    # -- validation --------------------------------------------------------

    def validate(self) -> None:
        darts_seen: set[Dart] = set()
        for v, rot in self.rotations.items():
            if not rot:
                raise GraphError(f"isolated vertex {v!r}")
            for d in rot:
                e, s = d
                if e not in self.edges or s not in (0, 1):
                    raise GraphError(f"bad dart {d} at {v!r}")
                if self.edges[e][s] != v:
                    raise GraphError(f"dart {d} listed at wrong vertex {v!r}")
                if d in darts_seen:
                    raise GraphError(f"dart {d} appears twice")
                darts_seen.add(d)
        for e, (u, v) in self.edges.items():
            if u == v:
                raise GraphError(f"loop edge {e} unsupported")
            for d in ((e, 0), (e, 1)):
                if d not in darts_seen:
                    raise GraphError(f"edge {e} missing dart {d}")
        if not self._connected():
            raise GraphError("graph is not connected")
        f = len(self.faces())
        if self.num_vertices() - self.num_edges() + f != 2:
            raise GraphError("rotation system is not a sphere embedding")

    def _connected(self) -> bool:
        verts = self.vertices()
        if not verts:
            return False
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            v = stack.pop()
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(verts)

    # -- faces -------------------------------------------------------------

    def next_in_rotation(self, d: Dart) -> Dart:
        rot = self.rotations[self.dart_tail(d)]
        return rot[(rot.index(d) + 1) % len(rot)]

    def prev_in_rotation(self, d: Dart) -> Dart:
        rot = self.rotations[self.dart_tail(d)]
        return rot[(rot.index(d) - 1) % len(rot)]

    def next_face_dart(self, d: Dart) -> Dart:
        return self.prev_in_rotation(self.twin(d))

    def faces(self) -> tuple[Face, ...]:
        out = []
        seen: set[Dart] = set()
        for v in sorted(self.rotations):
            for d0 in self.rotations[v]:
                if d0 in seen:
                    continue
                darts = []
                tails = []
                d = d0
                while True:
                    seen.add(d)
                    darts.append(d)
                    tails.append(self.dart_tail(d))
                    d = self.next_face_dart(d)
                    if d == d0:
                        break
                out.append(Face.from_cycle(tuple(darts), tuple(tails)))
        return tuple(sorted(out, key=lambda f: f.key))

    def face_with_edges(self, edge_ids) -> Face:
        want = frozenset(edge_ids)
        hits = [f for f in self.faces() if frozenset(f.edge_ids) == want]
        if len(hits) != 1:
            raise GraphError(f"no unique face with edges {sorted(want)}")
        return hits[0]

    def face_by_key(self, key) -> Face:
        key = tuple((int(d[0]), int(d[1])) for d in key)
        for f in self.faces():
            if f.key == key:
                return f
        raise GraphError(f"no face with key {key}")

    # -- fresh ids ---------------------------------------------------------

    def fresh_vertex(self, base: str = "n") -> str:
        k = 0
        while f"{base}{k}" in self.rotations:
            k += 1
        return f"{base}{k}"

    def fresh_edge_id(self) -> int:
        return max(self.edges, default=-1) + 1


# ---------------------------------------------------------------------------
# construction


def _normalize_rotation(rot) -> tuple[Dart, ...]:
    rot = tuple((int(d[0]), int(d[1])) for d in rot)
    if not rot:
        return rot
    k = rot.index(min(rot))
    return rot[k:] + rot[:k]


def build(edges: dict[int, tuple[str, str]], rotations: dict[str, tuple[Dart, ...]],
          check: bool = True) -> PlaneGraph:
    """Assemble a PlaneGraph; rotations are stored starting at their least dart
    so that equality of instances means cyclic equality of the embeddings."""
    g = PlaneGraph(dict(edges), {v: _normalize_rotation(r) for v, r in rotations.items()})
    if check:
        g.validate()
    return g


def from_adjacency(adjacency: dict[str, list[str]]) -> PlaneGraph:
    """Build a plane graph from counterclockwise neighbor lists.

    Parallel edges repeat the neighbor; the i-th repeat at u is matched with
    the (k-1-i)-th repeat at v, the sphere-compatible pairing for the
    multigraphs handled here (validated afterwards).
    """
    slots: dict[str, list] = {v: [None] * len(lst) for v, lst in adjacency.items()}
    edges: dict[int, tuple[str, str]] = {}
    eid = 0
    for u in sorted(adjacency):
        for w in adjacency[u]:
            if w not in adjacency:
                raise GraphError(f"unknown neighbor {w!r} of {u!r}")
            if u == w:
                raise GraphError("loops unsupported")
        for w in sorted(set(adjacency[u])):
            iu = [i for i, x in enumerate(adjacency[u]) if x == w]
            iw = [i for i, x in enumerate(adjacency[w]) if x == u]
            if len(iu) != len(iw):
                raise GraphError(f"inconsistent adjacency between {u!r} and {w!r}")
            if slots[u][iu[0]] is not None:
                continue  # already built from the other side
            for a, b in zip(iu, reversed(iw)):
                edges[eid] = (u, w)
                slots[u][a] = (eid, 0)
                slots[w][b] = (eid, 1)
                eid += 1
    rotations = {v: tuple(slots[v]) for v in adjacency}
    return build(edges, rotations)


def to_adjacency(g: PlaneGraph) -> dict[str, list[str]]:
    return {v: [g.dart_head(d) for d in g.rotations[v]] for v in sorted(g.rotations)}


def to_spec_json(g: PlaneGraph) -> str:
    adj = to_adjacency(g)
    return json.dumps({"schema": 1, "vertices": sorted(g.rotations), "adjacency": adj},
                      sort_keys=True)


def from_spec_json(text: str) -> PlaneGraph:
    data = json.loads(text)
    if not isinstance(data, dict) or "adjacency" not in data or "vertices" not in data:
        raise GraphError("graph JSON needs 'vertices' and 'adjacency'")
    adj = {str(v): [str(w) for w in data["adjacency"][v]] for v in data["vertices"]}
    return from_adjacency(adj)


def to_full_dict(g: PlaneGraph) -> dict:
    """Lossless serialization (keeps edge ids and dart order)."""
    return {
        "edges": {str(e): list(p) for e, p in sorted(g.edges.items())},
        "rotations": {v: [list(d) for d in g.rotations[v]] for v in sorted(g.rotations)},
    }


def from_full_dict(data: dict) -> PlaneGraph:
    edges = {int(e): (p[0], p[1]) for e, p in data["edges"].items()}
    rotations = {v: tuple((int(d[0]), int(d[1])) for d in r)
                 for v, r in data["rotations"].items()}
    return build(edges, rotations)


def relabel(g: PlaneGraph, vertex_map: dict[str, str] | None = None,
            edge_map: dict[int, int] | None = None) -> PlaneGraph:
    """Rename vertices/edges; maps may be partial, must stay injective."""
    vm = dict(vertex_map or {})
    em = dict(edge_map or {})
    for v in g.rotations:
        vm.setdefault(v, v)
    for e in g.edges:
        em.setdefault(e, e)
    if len(set(vm.values())) != len(vm) or len(set(em.values())) != len(em):
        raise GraphError("relabeling is not injective")
    edges = {em[e]: (vm[u], vm[w]) for e, (u, w) in g.edges.items()}
    rotations = {vm[v]: tuple((em[d[0]], d[1]) for d in rot)
                 for v, rot in g.rotations.items()}
    return build(edges, rotations, check=False)


def same_labeled_plane_graph(g: PlaneGraph, h: PlaneGraph) -> bool:
    """Same vertices, same edges (ids and endpoint sets), same face structure.

    Rotation tuples may start anywhere and the sphere may be reflected; the
    face edge-set collection pins everything this package relies on.
    """
    if set(g.rotations) != set(h.rotations) or set(g.edges) != set(h.edges):
        return False
    for e in g.edges:
        if set(g.edges[e]) != set(h.edges[e]):
            return False
    fg = sorted(tuple(sorted(f.edge_ids)) for f in g.faces())
    fh = sorted(tuple(sorted(f.edge_ids)) for f in h.faces())
    return fg == fh


# ---------------------------------------------------------------------------
# connectivity and standardness


def is_three_connected(g: PlaneGraph) -> bool:
    """Brute-force 3-connectivity; fine at the graph sizes handled here."""
    if not g.is_simple():
        raise GraphError("3-connectivity is defined here for simple graphs only")
    verts = g.vertices()
    if len(verts) < 4:
        return False
    if any(g.degree(v) < 3 for v in verts):
        return False
    adj = {v: set(g.neighbors(v)) for v in verts}

    def connected_without(banned: set[str]) -> bool:
        rest = [v for v in verts if v not in banned]
        if not rest:
            return False
        seen = {rest[0]}
        stack = [rest[0]]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in banned and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(rest)

    return all(connected_without({a, b}) for a, b in combinations(verts, 2))


def is_standard_graph(g: PlaneGraph) -> bool:
    """Faces meet in nothing, one vertex or one edge; edges share <= 1 vertex."""
    if any(u == v for u, v in g.edges.values()):
        return False
    for e, f in combinations(g.edges.values(), 2):
        if len(set(e) & set(f)) > 1:
            return False
    data = [(frozenset(f.edge_ids), f.vertex_set) for f in g.faces()]
    for (e1, v1), (e2, v2) in combinations(data, 2):
        ce = e1 & e2
        cv = v1 & v2
        if len(ce) > 1:
            return False
        if len(ce) == 1:
            (eid,) = ce
            if cv != frozenset(g.edges[eid]):
                return False
        elif len(cv) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# duality
#
# The dual reuses the dart set: its rotation at a face-vertex is that face's
# dart cycle.  This keeps edge ids, preserves the Euler characteristic, and
# makes the double dual the original graph up to dart twinning.


def dual_with_maps(g: PlaneGraph):
    """Plane dual plus feature maps.

    Returns (dual, {face_key: dual vertex id}, {dual_face_key: primal vertex}).
    Dual edges keep the primal edge ids.
    """
    faces = g.faces()
    fid = {f.key: f"f{i}" for i, f in enumerate(faces)}
    face_of_dart = {}
    for f in faces:
        for d in f.darts:
            face_of_dart[d] = fid[f.key]
    edges = {e: (face_of_dart[(e, 0)], face_of_dart[(e, 1)]) for e in g.edges}
    rotations = {fid[f.key]: f.darts for f in faces}
    dual_g = build(edges, rotations)
    dual_face_vertex = {}
    for df in dual_g.faces():
        heads = {g.dart_head(d) for d in df.darts}
        if len(heads) != 1:
            raise GraphError("dual face does not surround a single primal vertex")
        dual_face_vertex[df.key] = next(iter(heads))
    return dual_g, {f.key: fid[f.key] for f in faces}, dual_face_vertex


def dual(g: PlaneGraph) -> PlaneGraph:
    return dual_with_maps(g)[0]


# ---------------------------------------------------------------------------
# site classification


def classify_y(g: PlaneGraph, v: str) -> str:
    rot = g.rotations[v]
    if len(rot) != 3:
        raise GraphError(f"{v!r} does not have degree 3")
    nbrs = [g.dart_head(d) for d in rot]
    if len(set(nbrs)) != 3:
        raise GraphError(f"{v!r} has repeated neighbors")
    k = sum(1 for a, b in combinations(nbrs, 2) if g.has_edge(a, b))
    return f"Y{k}"


def _check_triangle(g: PlaneGraph, face: Face) -> tuple[str, str, str]:
    if len(face) != 3:
        raise GraphError("site face is not a triangle")
    corners = face.tails
    if len(set(corners)) != 3:
        raise GraphError("triangle face with repeated corner")
    if len(set(face.edge_ids)) != 3:
        raise GraphError("triangle face with repeated edge")
    return corners


def classify_delta(g: PlaneGraph, face: Face) -> str:
    corners = _check_triangle(g, face)
    cs = set(corners)
    k = 0
    for c in corners:
        internal = sum(1 for d in g.rotations[c] if g.dart_head(d) in cs)
        if g.degree(c) - internal == 1:
            k += 1
    return f"D{k}"


# ---------------------------------------------------------------------------
# series-parallel events and reduction steps


@dataclass(frozen=True)
class SPEvent:
    kind: str                       # "deg2" | "parallel"
    vertex: str | None              # deg2: the merged-away vertex
    vertex_rotation: tuple[Dart, ...] | None  # deg2: its original dart order
    removed_edges: tuple[int, ...]  # deg2: (edge at a, edge at b); parallel: (edge,)
    removed_defs: tuple[tuple[str, str], ...]
    kept_edge: int                  # deg2: fresh merged edge; parallel: survivor
    endpoints: tuple[str, str]      # kept edge endpoints as stored
    before_flags: tuple[bool, bool] = (False, False)  # parallel: insert before kept dart?


@dataclass(frozen=True)
class ReductionStep:
    """One simple triangle/star exchange with full inversion data."""

    direction: str
    site_type: str
    corners: tuple[str, str, str]
    center: str
    removed_darts: tuple[Dart, Dart, Dart]       # aligned with corners
    removed_defs: dict[int, tuple[str, str]]
    center_rotation: tuple[Dart, Dart, Dart]     # spokes at center, corner-aligned
    new_edges: tuple[int, int, int]              # spokes (DtoY) / triangle edges (YtoD)
    sp_events: tuple[SPEvent, ...]

    def spoke_of_corner(self, c: str) -> int:
        """Pre-graph spoke edge id at corner c (y_to_delta steps)."""
        return self.removed_darts[self.corners.index(c)][0]

    def to_dict(self) -> dict:
        def ev(e: SPEvent) -> dict:
            return {
                "kind": e.kind, "vertex": e.vertex,
                "vertex_rotation": None if e.vertex_rotation is None
                else [list(d) for d in e.vertex_rotation],
                "removed_edges": list(e.removed_edges),
                "removed_defs": [list(p) for p in e.removed_defs],
                "kept_edge": e.kept_edge, "endpoints": list(e.endpoints),
                "before_flags": list(e.before_flags),
            }
        return {
            "direction": self.direction, "site_type": self.site_type,
            "corners": list(self.corners), "center": self.center,
            "removed_darts": [list(d) for d in self.removed_darts],
            "removed_defs": {str(k): list(v) for k, v in sorted(self.removed_defs.items())},
            "center_rotation": [list(d) for d in self.center_rotation],
            "new_edges": list(self.new_edges),
            "sp_events": [ev(e) for e in self.sp_events],
        }

    @staticmethod
    def from_dict(d: dict) -> "ReductionStep":
        def ev(x: dict) -> SPEvent:
            return SPEvent(
                x["kind"], x["vertex"],
                None if x["vertex_rotation"] is None
                else tuple((int(a), int(b)) for a, b in x["vertex_rotation"]),
                tuple(int(e) for e in x["removed_edges"]),
                tuple((p[0], p[1]) for p in x["removed_defs"]),
                int(x["kept_edge"]), (x["endpoints"][0], x["endpoints"][1]),
                (bool(x["before_flags"][0]), bool(x["before_flags"][1])))
        return ReductionStep(
            d["direction"], d["site_type"], tuple(d["corners"]), d["center"],
            tuple((int(a), int(b)) for a, b in d["removed_darts"]),
            {int(k): (v[0], v[1]) for k, v in d["removed_defs"].items()},
            tuple((int(a), int(b)) for a, b in d["center_rotation"]),
            tuple(int(e) for e in d["new_edges"]),
            tuple(ev(x) for x in d["sp_events"]))


def _rot_list(g: PlaneGraph, v: str) -> list[Dart]:
    return list(g.rotations[v])


def _replace_pair_with(rot: list[Dart], first: Dart, second: Dart, new: Dart) -> list[Dart]:
    i = rot.index(first)
    if rot[(i + 1) % len(rot)] != second:
        raise GraphError("expected consecutive darts in rotation")
    out = [d for d in rot if d not in (first, second)]
    j = sum(1 for d in rot[:i] if d not in (first, second))
    out.insert(j, new)
    return out


def _replace_one_with(rot: list[Dart], old: Dart, new: list[Dart]) -> list[Dart]:
    i = rot.index(old)
    return rot[:i] + new + rot[i + 1:]


def _collapse_degree2(g: PlaneGraph, c: str):
    """Merge the two edges at a degree-2 vertex into one fresh edge."""
    rot = g.rotations[c]
    if len(rot) != 2:
        raise GraphError(f"{c!r} is not a degree-2 vertex")
    da, db = rot
    a, b = g.dart_head(da), g.dart_head(db)
    if a == b:
        raise GraphError("collapse would create a loop")
    ea, eb = da[0], db[0]
    m = g.fresh_edge_id()
    edges = dict(g.edges)
    defs = (edges[ea], edges[eb])
    del edges[ea]
    del edges[eb]
    edges[m] = (a, b)
    rotations = {v: _rot_list(g, v) for v in g.rotations if v != c}
    rotations[a] = _replace_one_with(rotations[a], g.twin(da), [(m, 0)])
    rotations[b] = _replace_one_with(rotations[b], g.twin(db), [(m, 1)])
    ev = SPEvent("deg2", c, rot, (ea, eb), defs, m, (a, b))
    return build(edges, rotations, check=False), ev


def _undo_degree2(g: PlaneGraph, ev: SPEvent) -> PlaneGraph:
    a, b = ev.endpoints
    ea, eb = ev.removed_edges
    edges = dict(g.edges)
    del edges[ev.kept_edge]
    edges[ea] = ev.removed_defs[0]
    edges[eb] = ev.removed_defs[1]
    da = (ea, 0) if ev.removed_defs[0][0] == a else (ea, 1)
    db = (eb, 0) if ev.removed_defs[1][0] == b else (eb, 1)
    rotations = {v: _rot_list(g, v) for v in g.rotations}
    rotations[a] = _replace_one_with(rotations[a], (ev.kept_edge, 0), [da])
    rotations[b] = _replace_one_with(rotations[b], (ev.kept_edge, 1), [db])
    rotations[ev.vertex] = list(ev.vertex_rotation)
    return build(edges, rotations, check=False)


def _collapse_parallel(g: PlaneGraph, keep: int, remove: int):
    """Remove one edge of a parallel pair that bounds a two-sided face."""
    if set(g.edges[keep]) != set(g.edges[remove]):
        raise GraphError("edges are not parallel")
    if not any(len(f) == 2 and set(f.edge_ids) == {keep, remove} for f in g.faces()):
        raise GraphError("parallel pair does not bound a two-sided face")
    u, v = g.edges[keep]
    flags = []
    for end, vertex in ((0, u), (1, v)):
        rot = g.rotations[vertex]
        rd = (remove, 0) if g.edges[remove][0] == vertex else (remove, 1)
        i, j = rot.index(rd), rot.index((keep, end))
        flags.append((i - j) % len(rot) == len(rot) - 1)  # removed dart right before kept
    edges = dict(g.edges)
    rdef = edges[remove]
    del edges[remove]
    rotations = {w: [d for d in rot if d[0] != remove]
                 for w, rot in g.rotations.items()}
    ev = SPEvent("parallel", None, None, (remove,), (rdef,), keep, (u, v),
                 (flags[0], flags[1]))
    return build(edges, rotations, check=False), ev


def _undo_parallel(g: PlaneGraph, ev: SPEvent) -> PlaneGraph:
    remove = ev.removed_edges[0]
    edges = dict(g.edges)
    edges[remove] = ev.removed_defs[0]
    rotations = {w: _rot_list(g, w) for w in g.rotations}
    for end, vertex in ((0, ev.endpoints[0]), (1, ev.endpoints[1])):
        rd = (remove, 0) if ev.removed_defs[0][0] == vertex else (remove, 1)
        rot = rotations[vertex]
        j = rot.index((ev.kept_edge, end))
        rot.insert(j if ev.before_flags[end] else j + 1, rd)
    return build(edges, rotations, check=False)


# ---------------------------------------------------------------------------
# the simple reductions themselves


def _delta_to_y(g: PlaneGraph, face: Face):
    corners = _check_triangle(g, face)
    site_type = classify_delta(g, face)
    center = g.fresh_vertex()
    edges = dict(g.edges)
    removed_defs = {d[0]: g.edges[d[0]] for d in face.darts}
    eid = g.fresh_edge_id()
    spoke = [eid, eid + 1, eid + 2]
    for t in range(3):
        edges[spoke[t]] = (center, corners[t])
    for d in face.darts:
        del edges[d[0]]
    rotations = {v: _rot_list(g, v) for v in g.rotations}
    for t in range(3):
        c = corners[t]
        out_d = face.darts[t]                    # leaves c along the face
        in_d = g.twin(face.darts[(t - 1) % 3])   # dart at c of the arriving edge
        rotations[c] = _replace_pair_with(rotations[c], out_d, in_d, (spoke[t], 1))
    rotations[center] = [(spoke[0], 0), (spoke[1], 0), (spoke[2], 0)]
    g2 = build(edges, rotations, check=False)
    # series cleanup: corners of outer degree one became degree-2 vertices
    events = []
    for c in sorted(corners):
        if c in g2.rotations and g2.degree(c) == 2:
            g2, ev = _collapse_degree2(g2, c)
            events.append(ev)
    g2.validate()
    step = ReductionStep(
        DELTA_TO_Y, site_type, corners, center,
        face.darts, removed_defs,
        ((spoke[0], 0), (spoke[1], 0), (spoke[2], 0)),
        tuple(spoke), tuple(events))
    return g2, step


def _y_to_delta(g: PlaneGraph, v: str):
    site_type = classify_y(g, v)
    rot = g.rotations[v]
    spokes = tuple(d[0] for d in rot)
    nbrs = tuple(g.dart_head(d) for d in rot)
    removed_defs = {d[0]: g.edges[d[0]] for d in rot}
    edges = dict(g.edges)
    for e in spokes:
        del edges[e]
    eid = g.fresh_edge_id()
    tri = (eid, eid + 1, eid + 2)
    for t in range(3):
        edges[tri[t]] = (nbrs[t], nbrs[(t + 1) % 3])
    rotations = {w: _rot_list(g, w) for w in g.rotations if w != v}
    for t in range(3):
        n = nbrs[t]
        spoke_dart = g.twin(rot[t])
        rotations[n] = _replace_one_with(
            rotations[n], spoke_dart, [(tri[t], 0), (tri[(t - 1) % 3], 1)])
    g2 = build(edges, rotations, check=False)
    # parallel cleanup: pre-existing internal edges now double the triangle edges
    events = []
    for t in range(3):
        old = [e for e in g.edge_between(nbrs[t], nbrs[(t + 1) % 3]) if e != tri[t]]
        if len(old) > 1:
            raise GraphError("site has parallel internal edges")
        if old:
            g2, ev = _collapse_parallel(g2, keep=tri[t], remove=old[0])
            events.append(ev)
    g2.validate()
    step = ReductionStep(
        Y_TO_DELTA, site_type, nbrs, v,
        tuple(g.twin(d) for d in rot),  # spoke darts at the neighbors
        removed_defs, rot, tri, tuple(events))
    return g2, step


def simple_reduction(g: PlaneGraph, site, direction: str):
    """Apply one simple reduction: the exchange plus its forced SP cleanup.

    site is a Face (triangle) or face key for delta_to_y, a vertex id for
    y_to_delta.  Returns (new graph, ReductionStep).
    """
    if direction == DELTA_TO_Y:
        face = site if isinstance(site, Face) else g.face_by_key(site)
        return _delta_to_y(g, face)
    if direction == Y_TO_DELTA:
        return _y_to_delta(g, site)
    raise GraphError(f"unknown direction {direction!r}")


def apply_reduction_step(g: PlaneGraph, step: ReductionStep) -> PlaneGraph:
    """Replay a recorded step on its pre-graph; must reproduce ids exactly."""
    if step.direction == DELTA_TO_Y:
        g2, step2 = _delta_to_y(g, g.face_by_key(step.removed_darts))
    else:
        g2, step2 = _y_to_delta(g, step.center)
    if step2 != step:
        raise GraphError("step replay diverged from the recorded step")
    return g2


def invert_reduction_step(g: PlaneGraph, step: ReductionStep) -> PlaneGraph:
    """Exact inverse: rebuild the step's pre-graph from its post-graph."""
    cur = g
    for ev in reversed(step.sp_events):
        cur = _undo_degree2(cur, ev) if ev.kind == "deg2" else _undo_parallel(cur, ev)
    edges = dict(cur.edges)
    rotations = {v: _rot_list(cur, v) for v in cur.rotations}
    for e in step.new_edges:
        del edges[e]
    for e, defn in step.removed_defs.items():
        edges[e] = defn
    if step.direction == DELTA_TO_Y:
        del rotations[step.center]
        darts = step.removed_darts
        for t in range(3):
            c = step.corners[t]
            out_d = darts[t]
            in_d = PlaneGraph.twin(darts[(t - 1) % 3])
            rotations[c] = _replace_one_with(rotations[c], (step.new_edges[t], 1),
                                             [out_d, in_d])
    else:
        tri = step.new_edges
        for t in range(3):
            n = step.corners[t]
            rotations[n] = _replace_pair_with(
                rotations[n], (tri[t], 0), (tri[(t - 1) % 3], 1), step.removed_darts[t])
        rotations[step.center] = list(step.center_rotation)
    return build(edges, rotations)


def transport_faces(step: ReductionStep, pre: PlaneGraph, post: PlaneGraph):
    """Map pre-graph face keys to post-graph face keys across a step.

    The consumed site face (and, for star exchanges, collapsed two-sided
    faces) map to None.  All other faces change edge sets only by the
    recorded substitutions, so matching by edge sets is exact.
    """
    post_by_edges: dict[frozenset, list] = {}
    for f in post.faces():
        post_by_edges.setdefault(frozenset(f.edge_ids), []).append(f.key)

    def unique_post(s: set[int]):
        keys = post_by_edges.get(frozenset(s), [])
        if len(keys) != 1:
            raise GraphError("face transport found no unique image")
        return keys[0]

    mapping: dict[tuple, tuple | None] = {}
    if step.direction == DELTA_TO_Y:
        site_key = Face.from_cycle(
            step.removed_darts,
            tuple(pre.dart_tail(d) for d in step.removed_darts)).key
        spoke_of = {step.corners[t]: step.new_edges[t] for t in range(3)}
        for f in pre.faces():
            if f.key == site_key:
                mapping[f.key] = None
                continue
            s = set(f.edge_ids)
            for t in range(3):
                e = step.removed_darts[t][0]
                if e in s:
                    a, b = step.removed_defs[e]
                    s.discard(e)
                    s.add(spoke_of[a])
                    s.add(spoke_of[b])
            for ev in step.sp_events:
                hit = [e for e in ev.removed_edges if e in s]
                if hit:
                    if len(hit) != 2:
                        raise GraphError("merged edge pair split across faces")
                    s.difference_update(ev.removed_edges)
                    s.add(ev.kept_edge)
            mapping[f.key] = unique_post(s)
    else:
        spoke_at = {step.corners[t]: step.removed_darts[t][0] for t in range(3)}
        tri = step.new_edges
        collapsed = {ev.removed_edges[0]: ev.kept_edge for ev in step.sp_events}
        for f in pre.faces():
            s = set(f.edge_ids)
            spokes_in = s & set(spoke_at.values())
            if spokes_in:
                if len(spokes_in) != 2:
                    raise GraphError("face touches the star center irregularly")
                hits = [t for t in range(3)
                        if {spoke_at[step.corners[t]],
                            spoke_at[step.corners[(t + 1) % 3]]} == spokes_in]
                if len(hits) != 1:
                    raise GraphError("ambiguous spoke pair")
                s -= spokes_in
                s.add(tri[hits[0]])
            for old, kept in collapsed.items():
                if old in s:
                    s.discard(old)
                    s.add(kept)
            if len(s) == 1:
                mapping[f.key] = None  # this was the face that became a collapsed bigon
                continue
            mapping[f.key] = unique_post(s)
    return mapping


# ---------------------------------------------------------------------------
# subdivision and chord insertion


def subdivide(g: PlaneGraph, edge_id: int, new_vertex: str | None = None,
              new_edge_ids: tuple[int, int] | None = None):
    """Replace an edge by a two-edge path through a fresh vertex.

    new_edge_ids, when given, names the (first-endpoint half, second-endpoint
    half) explicitly; both must be unused.
    """
    u, v = g.edges[edge_id]
    m = new_vertex if new_vertex is not None else g.fresh_vertex()
    if m in g.rotations:
        raise GraphError(f"vertex {m!r} already present")
    if new_edge_ids is None:
        ea = g.fresh_edge_id()
        eb = ea + 1
    else:
        ea, eb = new_edge_ids
    edges = dict(g.edges)
    del edges[edge_id]
    if ea in edges or eb in edges or ea == eb:
        raise GraphError("subdivision edge ids already in use")
    edges[ea] = (u, m)
    edges[eb] = (m, v)
    rotations = {w: _rot_list(g, w) for w in g.rotations}
    rotations[u] = _replace_one_with(rotations[u], (edge_id, 0), [(ea, 0)])
    rotations[v] = _replace_one_with(rotations[v], (edge_id, 1), [(eb, 1)])
    rotations[m] = [(ea, 1), (eb, 0)]
    return build(edges, rotations), m, (ea, eb)


def _face_corner_outgoing(g: PlaneGraph, face: Face, v: str) -> Dart:
    hits = [face.darts[t] for t in range(len(face)) if face.tails[t] == v]
    if len(hits) != 1:
        raise GraphError(f"vertex {v!r} does not appear exactly once on the face")
    return hits[0]


def add_edge_in_face(g: PlaneGraph, face: Face, u1: str, u2: str,
                     new_edge: int | None = None):
    """Insert the chord {u1, u2} inside the given face."""
    if u1 == u2:
        raise GraphError("chord needs distinct endpoints")
    if g.has_edge(u1, u2):
        raise GraphError(f"{u1!r} and {u2!r} are already adjacent")
    d1 = _face_corner_outgoing(g, face, u1)
    d2 = _face_corner_outgoing(g, face, u2)
    e = g.fresh_edge_id() if new_edge is None else new_edge
    if e in g.edges:
        raise GraphError(f"edge id {e} already present")
    edges = dict(g.edges)
    edges[e] = (u1, u2)
    rotations = {w: _rot_list(g, w) for w in g.rotations}
    for v, d, side in ((u1, d1, 0), (u2, d2, 1)):
        rot = rotations[v]
        rot.insert(rot.index(d) + 1, (e, side))
    return build(edges, rotations), e


def add_edge_variant_i(g: PlaneGraph, face: Face, u1: str, u2: str):
    """Chord between two non-adjacent vertices of a face."""
    return add_edge_in_face(g, face, u1, u2)


def add_edge_variant_ii(g: PlaneGraph, face: Face, edge_u1_u3: int, u2: str,
                        new_vertex: str | None = None):
    """Subdivide one face edge, then join the new vertex to a face vertex."""
    if edge_u1_u3 not in set(face.edge_ids):
        raise GraphError("edge to subdivide is not on the face")
    if u2 in g.edges[edge_u1_u3]:
        raise GraphError("target vertex lies on the subdivided edge")
    g2, m, _ = subdivide(g, edge_u1_u3, new_vertex)
    face2 = _find_face_containing(g2, {m, u2}, within=face.vertex_set | {m})
    g3, e = add_edge_in_face(g2, face2, u2, m)
    return g3, m, e


def add_edge_variant_iii(g: PlaneGraph, face: Face, edge_a: int, edge_b: int,
                         new_vertices: tuple[str | None, str | None] = (None, None)):
    """Subdivide two face edges, then join the two new vertices."""
    fe = set(face.edge_ids)
    if edge_a not in fe or edge_b not in fe or edge_a == edge_b:
        raise GraphError("need two distinct face edges")
    g2, m1, _ = subdivide(g, edge_a, new_vertices[0])
    g3, m2, _ = subdivide(g2, edge_b, new_vertices[1])
    face3 = _find_face_containing(g3, {m1, m2}, within=face.vertex_set | {m1, m2})
    g4, e = add_edge_in_face(g3, face3, m1, m2)
    return g4, (m1, m2), e


def _find_face_containing(g: PlaneGraph, needed: set[str], within: set[str]) -> Face:
    hits = [f for f in g.faces()
            if needed <= f.vertex_set and f.vertex_set <= within]
    if len(hits) != 1:
        raise GraphError("could not locate the target face after subdivision")
    return hits[0]


# ---------------------------------------------------------------------------
# isomorphism / canonical codes (abstract multigraphs)


def _refine(adj: list[dict[int, int]], colors: list[int]) -> list[int]:
    while True:
        sig = []
        for i in range(len(colors)):
            row = tuple(sorted((colors[j], m) for j, m in adj[i].items()))
            sig.append((colors[i], row))
        order = {s: k for k, s in enumerate(sorted(set(sig)))}
        new = [order[s] for s in sig]
        if new == colors:
            return colors
        colors = new


def _canonical(g: PlaneGraph) -> tuple[bytes, tuple[str, ...]]:
    verts = g.vertices()
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    adj: list[dict[int, int]] = [dict() for _ in range(n)]
    for u, v in g.edges.values():
        iu, iv = idx[u], idx[v]
        adj[iu][iv] = adj[iu].get(iv, 0) + 1
        adj[iv][iu] = adj[iv].get(iu, 0) + 1

    best_code: bytes | None = None
    best_order: tuple[int, ...] = ()

    def matrix_code(order: list[int]) -> bytes:
        pos = {v: i for i, v in enumerate(order)}
        out = bytearray([min(n, 255)])
        for v in order:
            row = bytearray(n)
            for w, m in adj[v].items():
                row[pos[w]] = min(m, 255)
            out.extend(row)
        return bytes(out)

    def search(colors: list[int], depth: int) -> None:
        nonlocal best_code, best_order
        colors = _refine(adj, colors)
        cells: dict[int, list[int]] = {}
        for i, c in enumerate(colors):
            cells.setdefault(c, []).append(i)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            order = sorted(range(n), key=lambda i: (colors[i], i))
            code = matrix_code(order)
            if best_code is None or code < best_code:
                best_code = code
                best_order = tuple(order)
            return
        for i in target:
            nc = list(colors)
            nc[i] = -1 - depth
            search(nc, depth + 1)

    search([0] * n, 0)
    assert best_code is not None
    return best_code, tuple(verts[i] for i in best_order)


def canonical_code(g: PlaneGraph) -> bytes:
    """Canonical byte string: equal iff the abstract multigraphs are isomorphic.

    Color refinement with full individualization of the first non-singleton
    class; adequate for the small graphs this package handles.
    """
    return _canonical(g)[0]


def isomorphic(g: PlaneGraph, h: PlaneGraph) -> dict[str, str] | None:
    """An adjacency-preserving vertex bijection, or None."""
    if g.num_vertices() != h.num_vertices() or g.num_edges() != h.num_edges():
        return None
    cg, og = _canonical(g)
    ch, oh = _canonical(h)
    if cg != ch:
        return None
    mapping = dict(zip(og, oh))

    def pair_counts(x: PlaneGraph, mp=None):
        out: dict[frozenset, int] = {}
        for u, v in x.edges.values():
            if mp:
                u, v = mp[u], mp[v]
            k = frozenset((u, v))
            out[k] = out.get(k, 0) + 1
        return out

    if pair_counts(g, mapping) != pair_counts(h):
        return None
    return mapping


# ---------------------------------------------------------------------------
# small named graphs used throughout the tests and docs


def k4() -> PlaneGraph:
    return from_adjacency({
        "a": ["b", "c", "d"],
        "b": ["c", "a", "d"],
        "c": ["a", "b", "d"],
        "d": ["a", "c", "b"],
    })


def triangle() -> PlaneGraph:
    return from_adjacency({"a": ["b", "c"], "b": ["c", "a"], "c": ["a", "b"]})


def cube() -> PlaneGraph:
    # outer square a b c d (counterclockwise), inner square e f g h
    return from_adjacency({
        "a": ["b", "e", "d"],
        "b": ["c", "f", "a"],
        "c": ["d", "g", "b"],
        "d": ["c", "a", "h"],
        "e": ["f", "h", "a"],
        "f": ["g", "e", "b"],
        "g": ["c", "h", "f"],
        "h": ["g", "d", "e"],
    })


def prism() -> PlaneGraph:
    # triangles a b c (inner) and d e f (outer) joined by a matching
    return from_adjacency({
        "a": ["d", "b", "c"],
        "b": ["c", "a", "e"],
        "c": ["a", "b", "f"],
        "d": ["e", "a", "f"],
        "e": ["f", "b", "d"],
        "f": ["d", "c", "e"],
    })


def wheel4() -> PlaneGraph:
    # square rim w x y z with hub h
    return from_adjacency({
        "h": ["w", "x", "y", "z"],
        "w": ["x", "h", "z"],
        "x": ["y", "h", "w"],
        "y": ["z", "h", "x"],
        "z": ["w", "h", "y"],
    })


def pentagonal_prism() -> PlaneGraph:
    inner = ["a", "b", "c", "d", "e"]
    outer = ["p", "q", "r", "s", "t"]
    adj: dict[str, list[str]] = {}
    n = 5
    for i in range(n):
        adj[inner[i]] = [inner[(i + 1) % n], inner[(i - 1) % n], outer[i]]
        adj[outer[i]] = [inner[i], outer[(i - 1) % n], outer[(i + 1) % n]]
    return from_adjacency(adj)


def path4() -> PlaneGraph:
    return from_adjacency({"a": ["b"], "b": ["a", "c"], "c": ["b", "d"], "d": ["c"]})
