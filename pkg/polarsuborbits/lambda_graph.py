"""The last subconstituent Lambda: vertices (X | Z), adjacency, neighbourhoods and export."""

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, IO, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from . import matspace as ms
from .errors import CapExceededError, ConfigError, MatrixError, VertexError
from .geometry import OrthoSpace, is_totally_isotropic
from .matspace import Mat

logger = logging.getLogger(__name__)

EXPORT_FORMATS = ("edgelist", "dimacs", "json")


@dataclass(frozen=True, eq=False)
class Vertex:
    """The subspace (X - 1/2 Z Delta Z^t | I | Z) of Lambda, identified by (X, Z)."""
    X: Mat
    Z: Mat
    _key: Tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not ms.is_alternate(self.X):
            raise VertexError("X must be an alternate matrix")
        if self.Z.shape[0] != self.X.shape[0]:
            raise VertexError(f"Z has {self.Z.shape[0]} rows but X is {self.X.shape[0]}x{self.X.shape[0]}")
        key = tuple(ms.upper_entries(self.X)) + tuple(ms.as_ints(self.Z).ravel().tolist())
        object.__setattr__(self, '_key', key)

    @property
    def key(self) -> Tuple[int, ...]:
        """Upper-triangular entries of X row-major, then Z row-major."""
        return self._key

    @property
    def nu(self) -> int:
        return self.X.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Vertex):
            return NotImplemented
        return self.Z.shape == other.Z.shape and self._key == other._key

    def __hash__(self):
        return hash((self.Z.shape, self._key))

    def to_json(self) -> Dict[str, List[int]]:
        return {'X': ms.as_ints(self.X).ravel().tolist(), 'Z': ms.as_ints(self.Z).ravel().tolist()}

    @classmethod
    def from_json(cls, space: OrthoSpace, data: Union[str, Dict]) -> "Vertex":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as e:
                raise VertexError(f"vertex encoding is not valid JSON: {e}") from e
        if not isinstance(data, dict) or 'X' not in data or 'Z' not in data:
            raise VertexError("vertex encoding needs the keys 'X' and 'Z'")
        nu, delta = space.nu, space.delta
        X_entries, Z_entries = list(data['X']), list(data['Z'])
        if len(X_entries) != nu * nu or len(Z_entries) != nu * delta:
            raise VertexError(f"expected {nu * nu} X entries and {nu * delta} Z entries for nu={nu}")
        try:
            values = [int(x) for x in X_entries + Z_entries]
        except (TypeError, ValueError) as e:
            raise VertexError(f"vertex entries must be integers: {e}") from e
        if any(not 0 <= x < space.q for x in values):
            raise VertexError(f"vertex entries must be canonical indices in [0, {space.q})")
        X = space.GF(np.array(values[:nu * nu], dtype=np.int64).reshape(nu, nu))
        Z = space.GF(np.array(values[nu * nu:], dtype=np.int64).reshape(nu, delta))
        return cls(X, Z)


def vertex_count(q: int, nu: int, delta: int = 2) -> int:
    return q ** (nu * (nu - 1) // 2 + nu * delta)


def coordinate_count(space: OrthoSpace) -> int:
    return space.nu * (space.nu - 1) // 2 + space.nu * space.delta


def basepoint(space: OrthoSpace) -> Vertex:
    """P1 = (0 | I | 0)."""
    return Vertex(ms.zeros(space.field, space.nu, space.nu), ms.zeros(space.field, space.nu, space.delta))


def vertex_from_coords(space: OrthoSpace, coords: Sequence[int]) -> Vertex:
    nu = space.nu
    m = nu * (nu - 1) // 2
    X = ms.alternate_from_upper(space.field, nu, list(coords[:m]))
    Z = ms.zeros(space.field, nu, space.delta)
    if space.delta:
        Z = space.GF(np.asarray(coords[m:], dtype=np.int64).reshape(nu, space.delta))
    return Vertex(X, Z)


def vertex_at(space: OrthoSpace, index: int) -> Vertex:
    d = coordinate_count(space)
    if not 0 <= index < space.q ** d:
        raise VertexError(f"vertex index {index} out of range")
    digits = [(index // space.q ** (d - 1 - i)) % space.q for i in range(d)]
    return vertex_from_coords(space, digits)


def vertex_index(space: OrthoSpace, v: Vertex) -> int:
    """Base-q reading of the key, most significant coordinate first."""
    index = 0
    for c in v.key:
        index = index * space.q + c
    return index


def enumerate_vertices(space: OrthoSpace) -> List[Vertex]:
    d = coordinate_count(space)
    logger.info("enumerating %d vertices of %s", space.q ** d, space.describe())
    return [vertex_from_coords(space, coords) for coords in itertools.product(range(space.q), repeat=d)]


def a_block(space: OrthoSpace, v: Vertex) -> Mat:
    """A = X - 1/2 Z Delta Z^t."""
    return v.X - space.field.half * ms.mul_all(v.Z, space.Delta, ms.transpose(v.Z))


def realize(space: OrthoSpace, v: Vertex) -> Mat:
    return ms.hconcat(space.field, [a_block(space, v), ms.identity(space.field, space.nu), v.Z])


def vertex_from_matrix(space: OrthoSpace, M: Mat) -> Vertex:
    nu = space.nu
    if M.shape != (nu, space.dim):
        raise VertexError(f"expected a {nu}x{space.dim} matrix, got {M.shape}")
    if ms.rank(M) != nu:
        raise VertexError(f"matrix has rank {ms.rank(M)}, expected {nu}")
    if not is_totally_isotropic(space, M):
        raise VertexError("subspace is not totally isotropic")
    middle = M[:, nu:2 * nu]
    try:
        N = ms.inverse(middle) @ M
    except MatrixError as e:
        raise VertexError("middle block is singular: the subspace is not in Lambda") from e
    Z = N[:, 2 * nu:]
    X = N[:, :nu] + space.field.half * ms.mul_all(Z, space.Delta, ms.transpose(Z))
    return Vertex(X, Z)


def act_by_matrix(space: OrthoSpace, v: Vertex, G: Mat) -> Vertex:
    """Image of v under the isometry G acting on row vectors."""
    return vertex_from_matrix(space, realize(space, v) @ G)


def adjacent(space: OrthoSpace, u: Vertex, v: Vertex) -> bool:
    diff = ms.hconcat(space.field, [a_block(space, u) - a_block(space, v), u.Z - v.Z])
    return ms.rank(diff) == 1


def joint_dim(space: OrthoSpace, u: Vertex, v: Vertex) -> int:
    """dim(P + Q) of the two subspaces."""
    return ms.rank(ms.vconcat(space.field, [realize(space, u), realize(space, v)]))


def rank_one_directions(space: OrthoSpace) -> List[Mat]:
    """Every rank-1 nu x delta matrix exactly once, as D0 (x y) with D0's first nonzero entry equal to 1."""
    nu, delta, q = space.nu, space.delta, space.q
    columns = []
    for coords in itertools.product(range(q), repeat=nu):
        nonzero = [c for c in coords if c]
        if nonzero and nonzero[0] == 1:
            columns.append(space.GF(np.asarray(coords, dtype=np.int64).reshape(nu, 1)))
    rows = [space.GF(np.asarray(c, dtype=np.int64).reshape(1, delta))
            for c in itertools.product(range(q), repeat=delta) if any(c)]
    return [D0 @ row for D0 in columns for row in rows]


def neighbor_along(space: OrthoSpace, v: Vertex, D: Mat) -> Vertex:
    """The neighbour (X + 1/2 (C Delta D^t - D Delta C^t), C + D) with C = Z_v."""
    C = v.Z
    shift = ms.mul_all(C, space.Delta, ms.transpose(D)) - ms.mul_all(D, space.Delta, ms.transpose(C))
    return Vertex(v.X + space.field.half * shift, C + D)


def neighbors(space: OrthoSpace, v: Vertex) -> List[Vertex]:
    return [neighbor_along(space, v, D) for D in rank_one_directions(space)]


def degree(space: OrthoSpace) -> int:
    if space.delta == 0:
        return 0
    return (space.q ** space.nu - 1) * (space.q ** space.delta - 1) // (space.q - 1)


class VertexTable:
    """Coordinates of every vertex, in enumeration order, with permutation tables for affine maps.

    Group elements of G0 and the neighbour shifts act affinely on the coordinates, so each permutation is
    read off from d + 1 exact evaluations and then applied to the whole table at once.
    """

    def __init__(self, space: OrthoSpace, cap: Optional[int] = None, seed: int = 0):
        self.space = space
        self.d = coordinate_count(space)
        self.size = vertex_count(space.q, space.nu, space.delta)
        if cap is not None and self.size > cap:
            raise CapExceededError("vertex table", self.size, cap)
        q = space.q
        self.powers = np.array([q ** (self.d - 1 - i) for i in range(self.d)], dtype=np.int64)
        idx = np.arange(self.size, dtype=np.int64)
        self.coords = (idx[:, None] // self.powers[None, :]) % q if self.d else np.zeros((self.size, 0), np.int64)
        self.field_coords = space.GF(self.coords)
        self.rng = np.random.default_rng(seed)
        logger.info("vertex table for %s: %d vertices, %d coordinates", space.describe(), self.size, self.d)

    def __len__(self) -> int:
        return self.size

    def vertex(self, index: int) -> Vertex:
        return vertex_from_coords(self.space, self.coords[index].tolist())

    def index_of(self, v: Vertex) -> int:
        return vertex_index(self.space, v)

    def indices_of(self, coords: np.ndarray) -> np.ndarray:
        return coords.astype(np.int64) @ self.powers if self.d else np.zeros(len(coords), dtype=np.int64)

    def affine(self, fn: Callable[[Vertex], Vertex]) -> Tuple[Mat, Mat]:
        """(L, b) with coords(fn(v)) = coords(v) L + b."""
        GF = self.space.GF
        b = GF(np.asarray(fn(vertex_from_coords(self.space, [0] * self.d)).key, dtype=np.int64))
        L = GF.Zeros((self.d, self.d))
        for j in range(self.d):
            unit = [0] * self.d
            unit[j] = 1
            L[j] = GF(np.asarray(fn(vertex_from_coords(self.space, unit)).key, dtype=np.int64)) - b
        return L, b

    def permutation(self, fn: Callable[[Vertex], Vertex], checks: int = 4) -> np.ndarray:
        """perm[i] = index of fn(vertex i), for an fn that is affine on coordinates."""
        if self.d == 0:
            return np.zeros(1, dtype=np.int64)
        L, b = self.affine(fn)
        image = ms.mul(self.field_coords, L) + b
        perm = self.indices_of(ms.as_ints(image))
        for i in self.rng.integers(0, self.size, size=min(checks, self.size)):
            if self.index_of(fn(self.vertex(int(i)))) != perm[i]:
                raise VertexError(f"map is not affine on the vertex coordinates (vertex {int(i)})")
        return perm

    def neighbor_permutations(self) -> List[np.ndarray]:
        """One permutation per rank-1 direction D; together they list every edge twice."""
        return [self.permutation(lambda v, D=D: neighbor_along(self.space, v, D))
                for D in rank_one_directions(self.space)]


def build_graph(space: OrthoSpace, table: Optional[VertexTable] = None, cap: Optional[int] = None) -> nx.Graph:
    table = table or VertexTable(space, cap=cap)
    G = nx.Graph()
    G.add_nodes_from(range(len(table)))
    source = np.arange(len(table))
    for perm in table.neighbor_permutations():
        mask = source < perm
        G.add_edges_from(zip(source[mask].tolist(), perm[mask].tolist()))
    logger.info("built Lambda graph: %d vertices, %d edges", G.number_of_nodes(), G.number_of_edges())
    return G


def _write_graph(stream: IO[str], space: OrthoSpace, G: nx.Graph, fmt: str, table: VertexTable):
    edges = sorted((min(u, v), max(u, v)) for u, v in G.edges())
    n, m = G.number_of_nodes(), len(edges)
    if fmt == "edgelist":
        stream.write(f"{n} {m}\n")
        stream.writelines(f"{u} {v}\n" for u, v in edges)
    elif fmt == "dimacs":
        stream.write(f"p edge {n} {m}\n")
        stream.writelines(f"e {u + 1} {v + 1}\n" for u, v in edges)
    else:
        payload = {
            'q': space.q,
            'nu': space.nu,
            'vertices': [table.vertex(i).to_json() for i in range(n)],
            'edges': [[u, v] for u, v in edges],
        }
        json.dump(payload, stream)
        stream.write("\n")


def export_graph(space: OrthoSpace, fmt: str, destination: Union[str, IO[str]],
                 cap: Optional[int] = None) -> Dict[str, object]:
    if fmt not in EXPORT_FORMATS:
        raise ConfigError(f"unknown graph format {fmt!r}; choose one of {', '.join(EXPORT_FORMATS)}")
    table = VertexTable(space, cap=cap)
    G = build_graph(space, table)
    if isinstance(destination, str):
        with open(destination, "w", encoding="utf-8") as fh:
            _write_graph(fh, space, G, fmt, table)
    else:
        _write_graph(destination, space, G, fmt, table)
    summary = {
        'format': fmt,
        'vertices': G.number_of_nodes(),
        'edges': G.number_of_edges(),
        'destination': destination if isinstance(destination, str) else None,
    }
    logger.info("exported %s graph: %s", fmt, summary)
    return summary
