"""Graded triangular meshing of sloshing domains.

Pipeline: sample the boundary loop with spacing that ramps down
geometrically towards the surface corners A and B, scatter a hexagonal
lattice of interior points with a clearance band along the boundary,
Delaunay-triangulate everything, keep triangles whose centroid lies in
the domain, and insert circumcenters of poor triangles until every
interior angle reaches 20 degrees.  Refinement never moves or adds
boundary nodes, so the sampled boundary stays authoritative.

Everything is deterministic: identical inputs give identical meshes.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from .. import _backend
from .domain import Polyline

_MIN_ANGLE = math.radians(20.0)
_GRADING_ZONE = 10.0
_LATTICE_CLEARANCE = 0.6
_INSERT_CLEARANCE = 0.45
_MAX_REFINE_ROUNDS = 30


class MeshError(RuntimeError):
    """Raised when a valid mesh cannot be produced for the request."""


@dataclass
class TriangleMesh:
    """P1 triangulation with tagged boundary edges.

    `boundary_edges` is a tuple of (i, j, tag) triples in boundary loop
    order; tags are the piece conditions ('steklov', 'neumann',
    'dirichlet').  Triangles are counterclockwise.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: tuple
    mesh_size: float
    grading_factor: float
    _edge_arr: np.ndarray = field(default=None, repr=False, compare=False)
    _tag_arr: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=np.float64)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        self.boundary_edges = tuple(
            (int(i), int(j), str(tag)) for i, j, tag in self.boundary_edges
        )
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise MeshError("nodes must be an (n, 2) array")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshError("triangles must be an (m, 3) array")
        self._edge_arr = np.array(
            [(i, j) for i, j, _ in self.boundary_edges], dtype=np.int64
        ).reshape(-1, 2)
        self._tag_arr = np.array([t for _, _, t in self.boundary_edges])
        if len(self.triangles):
            area, _ = _backend.triangle_quality(self.nodes, self.triangles)
            if np.any(area <= 0):
                raise MeshError("mesh contains non-positively-oriented triangles")

    @property
    def num_nodes(self):
        return len(self.nodes)

    @property
    def num_triangles(self):
        return len(self.triangles)

    def edges_with_tag(self, tag):
        """Boundary edges carrying `tag`, as an (k, 2) index array."""
        return self._edge_arr[self._tag_arr == tag]

    def quality(self):
        """(signed areas, minimum interior angles) per triangle."""
        return _backend.triangle_quality(self.nodes, self.triangles)


def _mandatory_fractions(curve):
    """Arc-length fractions that boundary sampling must hit exactly."""
    if isinstance(curve, Polyline):
        return np.asarray(curve._cum) / curve.length()
    return np.array([0.0, 1.0])


def _sample_piece(curve, reverse, local_h):
    """Interior arc-length fractions (loop direction) for one piece."""
    length = curve.length()
    fracs = [0.0]
    spans = _mandatory_fractions(curve)
    if reverse:
        spans = 1.0 - spans[::-1]
    for f0, f1 in zip(spans[:-1], spans[1:]):
        span_len = (f1 - f0) * length
        steps = []
        s = 0.0
        while s < span_len:
            u_loop = f0 + s / length
            u_curve = 1.0 - u_loop if reverse else u_loop
            p = curve.point(u_curve)
            steps.append(min(local_h(p), span_len))
            s += steps[-1]
        scale = span_len / s
        acc = f0
        for st in steps:
            acc += st * scale / length
            fracs.append(acc)
        fracs[-1] = f1
    return np.asarray(fracs[1:-1]), length


def _sample_boundary(domain, h, g):
    """Polygonalize the boundary loop.

    Returns (nodes, edges, tags) with nodes in loop order, edges the
    consecutive index pairs closing the loop, and one tag per edge.
    """
    a_pt, b_pt = (np.asarray(p) for p in domain.corner_points)
    ramp = (1.0 - g) / (_GRADING_ZONE * h)

    def local_h(p):
        d = min(np.hypot(*(np.asarray(p) - a_pt)), np.hypot(*(np.asarray(p) - b_pt)))
        return h * min(1.0, g + ramp * d)

    nodes = []
    edges = []
    tags = []
    pieces = domain.loop_pieces()
    start0 = pieces[0][0].curve.point(1.0 if pieces[0][1] else 0.0)
    nodes.append(np.asarray(start0, dtype=float))
    for piece, reverse in pieces:
        curve = piece.curve
        inner, _ = _sample_piece(curve, reverse, local_h)
        u_curve = 1.0 - inner if reverse else inner
        first = len(nodes) - 1
        if len(u_curve):
            pts = np.atleast_2d(curve.point(u_curve))
            nodes.extend(pts)
        end_pt = curve.point(0.0 if reverse else 1.0)
        nodes.append(np.asarray(end_pt, dtype=float))
        last = len(nodes) - 1
        for i in range(first, last):
            edges.append((i, i + 1))
            tags.append(piece.condition)
    # the loop closes: the final node duplicates node 0
    closing = nodes.pop()
    if not np.allclose(closing, nodes[0], atol=1e-9):
        raise MeshError("boundary pieces do not close into a loop")
    edges[-1] = (edges[-1][0], 0)
    return np.asarray(nodes), np.asarray(edges, dtype=np.int64), tags


def _hex_lattice(bbox, a):
    """Hexagonal point lattice covering bbox with spacing a, centered."""
    (xmin, ymin), (xmax, ymax) = bbox
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    dy = a * math.sqrt(3.0) / 2.0
    nx = int(math.ceil((xmax - xmin) / (2 * a))) + 1
    ny = int(math.ceil((ymax - ymin) / (2 * dy))) + 1
    rows = []
    for j in range(-ny, ny + 1):
        y = cy + j * dy
        off = 0.5 * a if j % 2 else 0.0
        x = cx + off + a * np.arange(-nx, nx + 1)
        rows.append(np.stack([x, np.full_like(x, y)], axis=1))
    return np.concatenate(rows, axis=0)


def _filter_polygon(poly):
    """Drop collinear vertices; the reduced polygon bounds the same set.

    Point-in-polygon tests cost O(vertices) per point, and straight
    boundary pieces contribute long collinear runs of sampled nodes that
    carry no shape information.
    """
    prev = np.roll(poly, 1, axis=0)
    nxt = np.roll(poly, -1, axis=0)
    a = poly - prev
    b = nxt - poly
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    scale = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
    keep = np.abs(cross) > 1e-12 * scale
    return poly[keep] if keep.sum() >= 3 else poly


def _triangulate(nodes, poly):
    tris = Delaunay(nodes).simplices.astype(np.int64)
    cent = nodes[tris].mean(axis=1)
    keep = _backend.points_in_polygon(np.ascontiguousarray(cent), poly)
    tris = tris[keep]
    p0, p1, p2 = nodes[tris[:, 0]], nodes[tris[:, 1]], nodes[tris[:, 2]]
    area2 = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p2[:, 0] - p0[:, 0]) * (
        p1[:, 1] - p0[:, 1]
    )
    flip = area2 < 0
    tris[flip, 1], tris[flip, 2] = tris[flip, 2].copy(), tris[flip, 1].copy()
    return tris


def _edge_key_set(tris, n):
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    lo = e.min(axis=1).astype(np.int64)
    hi = e.max(axis=1).astype(np.int64)
    return set((lo * n + hi).tolist())


def _check_recovery(tris, bedges, n):
    keys = _edge_key_set(tris, n)
    lo = bedges.min(axis=1).astype(np.int64)
    hi = bedges.max(axis=1).astype(np.int64)
    missing = [k for k in (lo * n + hi).tolist() if k not in keys]
    if missing:
        raise MeshError(
            "boundary edge not recovered by the triangulation; "
            "decrease mesh_size relative to the geometry features"
        )


def _circumcenters(nodes, tris):
    p0, p1, p2 = nodes[tris[:, 0]], nodes[tris[:, 1]], nodes[tris[:, 2]]
    d = 2.0 * (
        p0[:, 0] * (p1[:, 1] - p2[:, 1])
        + p1[:, 0] * (p2[:, 1] - p0[:, 1])
        + p2[:, 0] * (p0[:, 1] - p1[:, 1])
    )
    n0 = (p0 ** 2).sum(axis=1)
    n1 = (p1 ** 2).sum(axis=1)
    n2 = (p2 ** 2).sum(axis=1)
    ux = (n0 * (p1[:, 1] - p2[:, 1]) + n1 * (p2[:, 1] - p0[:, 1]) + n2 * (p0[:, 1] - p1[:, 1])) / d
    uy = (n0 * (p2[:, 0] - p1[:, 0]) + n1 * (p0[:, 0] - p2[:, 0]) + n2 * (p1[:, 0] - p0[:, 0])) / d
    cc = np.stack([ux, uy], axis=1)
    radius = np.linalg.norm(cc - p0, axis=1)
    return cc, radius


def generate_mesh(domain, mesh_size, grading_factor=0.25):
    """Triangulate a sloshing domain.

    `mesh_size` bounds the boundary spacing and interior lattice pitch;
    near the surface corners A and B the boundary spacing ramps down to
    `grading_factor * mesh_size` over a zone of ten mesh sizes, which is
    where the corner singularities of the eigenfunctions live.  Raises
    MeshError if a mesh with minimum interior angle of 20 degrees cannot
    be reached.
    """
    h = float(mesh_size)
    g = float(grading_factor)
    if h <= 0:
        raise MeshError("mesh_size must be positive")
    if not 0 < g <= 1:
        raise MeshError("grading_factor must lie in (0, 1]")

    poly, bedges, tags = _sample_boundary(domain, h, g)
    fpoly = _filter_polygon(poly)
    nb = len(poly)
    deg = np.zeros(nb)
    cnt = np.zeros(nb)
    lens = np.linalg.norm(poly[bedges[:, 1]] - poly[bedges[:, 0]], axis=1)
    for (i, j), ell in zip(bedges, lens):
        deg[i] += ell
        deg[j] += ell
        cnt[i] += 1
        cnt[j] += 1
    bspacing = deg / cnt
    btree = cKDTree(poly)

    bbox = (poly.min(axis=0), poly.max(axis=0))
    cand = _hex_lattice(bbox, h)
    inside = _backend.points_in_polygon(np.ascontiguousarray(cand), fpoly)
    cand = cand[inside]
    if len(cand):
        d, _ = btree.query(cand)
        cand = cand[d >= _LATTICE_CLEARANCE * h]
    nodes = np.concatenate([poly, cand], axis=0) if len(cand) else poly.copy()

    tris = _triangulate(nodes, fpoly)
    _check_recovery(tris, bedges, len(nodes))

    for _ in range(_MAX_REFINE_ROUNDS):
        _, minang = _backend.triangle_quality(nodes, tris)
        bad = minang < _MIN_ANGLE - 1e-12
        if not bad.any():
            break
        order = np.argsort(minang[bad])
        cc, radius = _circumcenters(nodes, tris[bad])
        cc, radius = cc[order], radius[order]
        ok = np.isfinite(cc).all(axis=1) & np.isfinite(radius) & (radius > 0)
        ok &= _backend.points_in_polygon(np.ascontiguousarray(cc), fpoly)
        tree = cKDTree(nodes)
        d_any, _ = tree.query(cc)
        ok &= d_any >= _INSERT_CLEARANCE * radius
        d_b, i_b = btree.query(cc)
        ok &= d_b >= _INSERT_CLEARANCE * bspacing[i_b]
        accepted = []
        for k in np.where(ok)[0]:
            p = cc[k]
            if accepted:
                dmin = np.min(np.linalg.norm(np.asarray(accepted) - p, axis=1))
                if dmin < _INSERT_CLEARANCE * radius[k]:
                    continue
            accepted.append(p)
        if not accepted:
            raise MeshError(
                "cannot reach the 20 degree minimum angle: refinement points "
                "were all rejected (corner angle below 20 degrees?)"
            )
        nodes = np.concatenate([nodes, np.asarray(accepted)], axis=0)
        tris = _triangulate(nodes, fpoly)
        _check_recovery(tris, bedges, len(nodes))

    area, minang = _backend.triangle_quality(nodes, tris)
    if minang.min() < _MIN_ANGLE - 1e-12:
        raise MeshError("minimum interior angle below 20 degrees after refinement")
    x, y = poly[:, 0], poly[:, 1]
    poly_area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    if abs(area.sum() - poly_area) > 1e-10 * max(1.0, abs(poly_area)):
        raise MeshError("triangle areas do not tile the boundary polygon")

    boundary_edges = tuple(
        (int(i), int(j), tag) for (i, j), tag in zip(bedges, tags)
    )
    return TriangleMesh(
        nodes=nodes,
        triangles=tris,
        boundary_edges=boundary_edges,
        mesh_size=h,
        grading_factor=g,
    )
