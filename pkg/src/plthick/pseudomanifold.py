"""Pseudomanifold verifiers: purity, facet degrees, boundary, gallery
connectivity, link classification in link dimension <= 2, and orientability.

Orientability is decided by propagating orientations across interior facets
and is independently cross-checked against top relative homology; the two
must agree.  Link recognition is deliberately capped at link dimension 2,
where it is decidable by surface classification.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .complex_core import Complex, Simplex, boundary_and_free_faces, close_under_faces
from .errors import ConstructionError, ValidationError
from .homology import homology_groups


@dataclass(frozen=True)
class LinkClass:
    """Classification of a link complex of dimension <= 2.

    ``kind`` is one of Sphere, Disc, ClosedSurface, SurfaceWithBoundary,
    Circle, Arc, PointPair, Point, Empty, Mixed, NotManifold.  ``genus`` is
    the orientable genus, or the crosscap number for non-orientable
    surfaces.  ``components`` counts connected components; a disconnected
    link is still a manifold when every component is one.
    """

    kind: str
    dim: int
    components: int
    is_manifold: bool
    orientable: bool | None = None
    genus: int | None = None
    boundary_components: int | None = None
    witness: Simplex | None = None

    def closed(self):
        return self.is_manifold and not self.boundary_components

    def describe(self):
        bits = [self.kind]
        if self.genus is not None:
            bits.append("genus=%d" % self.genus)
        if self.orientable is not None:
            bits.append("orientable=%s" % self.orientable)
        if self.boundary_components:
            bits.append("boundary_circles=%d" % self.boundary_components)
        if self.components != 1:
            bits.append("components=%d" % self.components)
        return " ".join(bits)


@dataclass(frozen=True)
class OrientationAssignment:
    """Signs of the top simplices relative to their sorted vertex order."""

    signs: dict

    def sign(self, s):
        return self.signs[s]


@dataclass(frozen=True)
class OrientResult:
    success: bool
    assignment: OrientationAssignment | None
    odd_cycle: list | None
    top_relative_rank: int


@dataclass(frozen=True)
class PseudomanifoldReport:
    dim: int
    is_pure: bool
    facet_degrees_ok: bool
    boundary: Complex
    gallery_connected: bool
    gallery_components: int
    facet_witness: Simplex | None = None
    isolated_singularities: bool | None = None
    positive_links_ok: bool | None = None
    vertex_links: dict | None = None
    orientable: bool | None = None

    def pseudomanifold_ok(self):
        return self.is_pure and self.facet_degrees_ok


def _facet_cofaces(X):
    """Map each (d-1)-simplex to the d-simplices containing it."""
    d = X.dim
    table = {f: [] for f in X.by_dim(d - 1)}
    for s in X.by_dim(d):
        vs = s.vertices
        for i in range(len(vs)):
            table[Simplex(vs[:i] + vs[i + 1:])].append(s)
    return table


def check_pseudomanifold(X):
    """Purity, facet degrees, boundary and gallery connectivity of X."""
    if X.dim < 1:
        raise ValidationError("pseudomanifold check needs dim >= 1")
    if not X.is_connected():
        raise ValidationError("complex is disconnected")
    d = X.dim
    is_pure = all(s.dim == d for s in X.maximal_simplices)
    cofaces = _facet_cofaces(X)
    witness = None
    facet_degrees_ok = True
    for f, tops in cofaces.items():
        if len(tops) > 2 or len(tops) == 0:
            facet_degrees_ok = False
            witness = f
            break
    boundary = Complex(close_under_faces(
        f for f, tops in cofaces.items() if len(tops) == 1))

    parent = {s: s for s in X.by_dim(d)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tops in cofaces.values():
        for other in tops[1:]:
            ra, rb = find(tops[0]), find(other)
            if ra != rb:
                parent[rb] = ra
    components = len({find(s) for s in X.by_dim(d)})
    return PseudomanifoldReport(
        dim=d,
        is_pure=is_pure,
        facet_degrees_ok=facet_degrees_ok,
        boundary=boundary,
        gallery_connected=components <= 1,
        gallery_components=components,
        facet_witness=witness,
    )


# -- link classification -------------------------------------------------------


def link_of(X, s):
    """Link of a simplex, built from the incidence index (no star closure)."""
    sset = set(s.vertices)
    out = set()
    for t in X.incident(s.vertices[0]):
        tset = set(t.vertices)
        if sset <= tset and len(tset) > len(sset):
            out.add(Simplex(tuple(v for v in t.vertices if v not in sset)))
    return Complex(close_under_faces(out))


def classify_link(L):
    """Classify a complex of dimension <= 2 as a combinatorial manifold type."""
    dim = L.dim
    if dim > 2:
        raise ValidationError("link recognition is only decidable up to dimension 2")
    if dim == -1:
        return LinkClass(kind="Empty", dim=-1, components=0, is_manifold=True)
    if dim == 0:
        n = len(L.vertices)
        if n == 1:
            return LinkClass(kind="Point", dim=0, components=1, is_manifold=True,
                             boundary_components=1)
        if n == 2:
            return LinkClass(kind="PointPair", dim=0, components=2, is_manifold=True,
                             boundary_components=0)
        return LinkClass(kind="NotManifold", dim=0, components=n, is_manifold=False,
                         witness=L.by_dim(0)[0])
    if dim == 1:
        return _classify_curves(L)
    return _classify_surface(L)


def _classify_curves(L):
    for v in L.by_dim(0):
        if not any(v.vertices[0] in e.vertices for e in L.by_dim(1)):
            return LinkClass(kind="NotManifold", dim=1, components=0,
                             is_manifold=False, witness=v)
    adj = L.adjacency()
    for v, nbrs in adj.items():
        if len(nbrs) > 2:
            return LinkClass(kind="NotManifold", dim=1, components=0,
                             is_manifold=False, witness=Simplex((v,)))
    comps = L.connected_components()
    cycles = paths = 0
    for comp in comps:
        if all(len(adj[v]) == 2 for v in comp):
            cycles += 1
        else:
            paths += 1
    if paths == 0:
        kind = "Circle"
    elif cycles == 0:
        kind = "Arc"
    else:
        kind = "Mixed"
    return LinkClass(kind=kind, dim=1, components=len(comps), is_manifold=True,
                     orientable=True, boundary_components=2 * paths)


def _classify_surface(L):
    triangles = L.by_dim(2)
    covered_edges = set()
    covered_vertices = set()
    for t in triangles:
        covered_vertices.update(t.vertices)
        covered_edges.update(t.facets())
    for e in L.by_dim(1):
        if e not in covered_edges:
            return LinkClass(kind="NotManifold", dim=2, components=0,
                             is_manifold=False, witness=e)
    for v in L.by_dim(0):
        if v.vertices[0] not in covered_vertices:
            return LinkClass(kind="NotManifold", dim=2, components=0,
                             is_manifold=False, witness=v)
    edge_cofaces = _facet_cofaces(L)
    for e, tops in edge_cofaces.items():
        if len(tops) > 2:
            return LinkClass(kind="NotManifold", dim=2, components=0,
                             is_manifold=False, witness=e)
    # Local surface condition: each vertex link is a single circle or arc.
    for v in L.by_dim(0):
        vlink = link_of(L, v)
        cls = _classify_curves(vlink)
        if not cls.is_manifold or cls.components != 1 or cls.kind == "Mixed":
            return LinkClass(kind="NotManifold", dim=2, components=0,
                             is_manifold=False, witness=v)

    comps = L.connected_components()
    kinds = []
    orientable_all = True
    genus_total = 0
    boundary_total = 0
    for comp in comps:
        piece = L.restrict_to_component(comp)
        chi = piece.euler_characteristic()
        bd_edges = [e for e, tops in _facet_cofaces(piece).items() if len(tops) == 1]
        bd = Complex(close_under_faces(bd_edges))
        nb = len(bd.connected_components()) if len(bd) else 0
        signs, _ = _propagate(piece.by_dim(2), _facet_cofaces(piece))
        orientable = signs is not None
        orientable_all = orientable_all and orientable
        if nb == 0:
            if orientable:
                genus = (2 - chi) // 2
                kinds.append("Sphere" if chi == 2 else "ClosedSurface")
            else:
                genus = 2 - chi
                kinds.append("ClosedSurface")
        else:
            if orientable:
                genus = (2 - chi - nb) // 2
                kinds.append("Disc" if (chi == 1 and nb == 1) else "SurfaceWithBoundary")
            else:
                genus = 2 - chi - nb
                kinds.append("SurfaceWithBoundary")
        genus_total += genus
        boundary_total += nb
    kind = kinds[0] if len(set(kinds)) == 1 else "Mixed"
    return LinkClass(kind=kind, dim=2, components=len(comps), is_manifold=True,
                     orientable=orientable_all, genus=genus_total,
                     boundary_components=boundary_total)


# -- isolated singularities -----------------------------------------------------


def check_isolated_singularities(X, report=None):
    """Fill the link fields of a pseudomanifold report.

    Positive-dimensional simplices must have the sphere/disc-type links of
    the matching dimension; vertex links must classify as combinatorial
    manifolds (possibly disconnected).  The two clauses are reported
    separately.
    """
    if report is None:
        report = check_pseudomanifold(X)
    if X.dim > 3:
        raise ValidationError("isolated-singularity check implemented for dim <= 3")
    if not report.pseudomanifold_ok():
        return replace(report, isolated_singularities=False, positive_links_ok=False)
    d = X.dim
    boundary = report.boundary
    positive_ok = True
    cofaces = _facet_cofaces(X)
    for f, tops in cofaces.items():
        on_boundary = f in boundary
        if on_boundary and len(tops) != 1:
            positive_ok = False
        if not on_boundary and len(tops) != 2:
            positive_ok = False
    if d == 3:
        for e in X.by_dim(1):
            elink = link_of(X, e)
            if elink.dim != 1:
                positive_ok = False
                continue
            cls = _classify_curves(elink)
            if e in boundary:
                if not (cls.kind == "Arc" and cls.components == 1):
                    positive_ok = False
            else:
                if not (cls.kind == "Circle" and cls.components == 1):
                    positive_ok = False

    vertex_links = {}
    vertices_ok = True
    for v in X.by_dim(0):
        cls = classify_link(link_of(X, v))
        vertex_links[v.vertices[0]] = cls
        if not cls.is_manifold:
            vertices_ok = False
    return replace(
        report,
        positive_links_ok=positive_ok,
        vertex_links=vertex_links,
        isolated_singularities=positive_ok and vertices_ok,
    )


# -- orientability -----------------------------------------------------------------


def _relation(sigma, tau, facet):
    """Required product sign(sigma)*sign(tau) across a shared facet."""
    i = sigma.vertices.index(next(v for v in sigma.vertices if v not in facet.vertices))
    j = tau.vertices.index(next(v for v in tau.vertices if v not in facet.vertices))
    return -((-1) ** i) * ((-1) ** j)


def _propagate(tops, cofaces):
    """BFS orientation propagation; returns (signs, None) or (None, odd_cycle)."""
    neighbors = {}
    for f, ts in cofaces.items():
        if len(ts) == 2:
            a, b = ts
            rel = _relation(a, b, f)
            neighbors.setdefault(a, []).append((b, rel))
            neighbors.setdefault(b, []).append((a, rel))
    signs = {}
    parent = {}
    for seed in sorted(tops):
        if seed in signs:
            continue
        signs[seed] = 1
        parent[seed] = None
        queue = [seed]
        while queue:
            cur = queue.pop()
            for nxt, rel in neighbors.get(cur, ()):
                want = rel * signs[cur]
                if nxt not in signs:
                    signs[nxt] = want
                    parent[nxt] = cur
                    queue.append(nxt)
                elif signs[nxt] != want:
                    return None, _odd_cycle(parent, cur, nxt)
    return signs, None


def _odd_cycle(parent, a, b):
    anc_a = []
    x = a
    while x is not None:
        anc_a.append(x)
        x = parent[x]
    aset = set(anc_a)
    path_b = []
    x = b
    while x not in aset:
        path_b.append(x)
        x = parent[x]
    lca = x
    path_a = anc_a[:anc_a.index(lca) + 1]
    return path_a + list(reversed(path_b)) + [a]


def induced_facet_sign(sigma, sign, facet):
    """Sign of the orientation induced on a facet, on its sorted vertices."""
    missing = next(v for v in sigma.vertices if v not in facet.vertices)
    i = sigma.vertices.index(missing)
    return sign * ((-1) ** i)


def orient(X, cone_vertices=frozenset(), report=None, homology_oracle=True):
    """Orient the top simplices so induced orientations on interior facets
    are opposite.

    Simplices containing a cone vertex must carry the negation of the cone
    vertex prepended to the orientation their base inherits; this is
    verified explicitly.  Success is cross-checked against the rank of the
    top relative homology group (one Z per gallery component).
    """
    if report is None:
        report = check_pseudomanifold(X)
    if not report.facet_degrees_ok:
        raise ValidationError("facet degrees exceed 2; orientation undefined")
    cofaces = _facet_cofaces(X)
    tops = X.by_dim(X.dim)
    signs, odd_cycle = _propagate(tops, cofaces)

    rank = -1
    if homology_oracle:
        rel = report.boundary if len(report.boundary) else None
        rank = homology_groups(X, rel=rel).betti[X.dim]
        expected = report.gallery_components if signs is not None else None
        if signs is not None and rank != expected:
            raise ConstructionError(
                "orientation propagation and homology disagree: rank %d vs %d"
                % (rank, expected))
        if signs is None and rank >= report.gallery_components:
            raise ConstructionError(
                "non-orientable propagation but full-rank top homology")

    if signs is None:
        return OrientResult(success=False, assignment=None,
                            odd_cycle=odd_cycle, top_relative_rank=rank)

    for f, ts in cofaces.items():
        if len(ts) == 2:
            a, b = ts
            if induced_facet_sign(a, signs[a], f) != -induced_facet_sign(b, signs[b], f):
                raise ConstructionError("induced orientations not opposite at %s" % (f,))

    cone_vertices = set(cone_vertices)
    if cone_vertices:
        _verify_cone_rule(X, signs, cofaces, cone_vertices)
    return OrientResult(success=True, assignment=OrientationAssignment(signs=signs),
                        odd_cycle=None, top_relative_rank=rank)


def _verify_cone_rule(X, signs, cofaces, cone_vertices):
    """Cone simplices carry -(w, base orientation inherited from the body)."""
    for s in X.by_dim(X.dim):
        ws = [v for v in s.vertices if v in cone_vertices]
        if not ws:
            continue
        if len(ws) != 1:
            raise ConstructionError("top simplex %s has several cone vertices" % (s,))
        w = ws[0]
        base = Simplex(tuple(v for v in s.vertices if v != w))
        partners = [t for t in cofaces[base] if t != s]
        body = [t for t in partners
                if not any(v in cone_vertices for v in t.vertices)]
        if not body:
            continue
        inherited = induced_facet_sign(body[0], signs[body[0]], base)
        pos = s.vertices.index(w)
        rule_sign = -(inherited * ((-1) ** pos))
        if signs[s] != rule_sign:
            raise ConstructionError(
                "cone orientation rule violated at %s (got %d want %d)"
                % (s, signs[s], rule_sign))
