"""Brute-force orbit computations, independent of the classifier.

Generators act through their full isometry matrices (realize, multiply, renormalize); orbits are the
connected components of the resulting permutation graph, found by breadth-first search.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import matspace as ms
from .errors import CapExceededError, GeometryError
from .geometry import (
    GroupElement0,
    GroupElement01,
    OrthoSpace,
    g01_as_g0,
    g01_element,
    g0_element,
    order_gl,
    order_o,
)
from .lambda_graph import VertexTable, act_by_matrix
from .matspace import Mat
from .reports import CheckResult
from .suborbits import (
    SuborbitLabel,
    all_alt_forms,
    all_labels,
    label_table,
    o1_canonicalize,
    o2_canonicalize,
    rank_g0,
    representative,
    suborbit_size,
)

logger = logging.getLogger(__name__)


@dataclass
class OrbitPartition:
    points: int
    classes: List[List[int]]
    index: np.ndarray

    @classmethod
    def from_index(cls, index: np.ndarray) -> "OrbitPartition":
        """Classes numbered by first appearance, members ascending."""
        _, first, inverse = np.unique(index, return_index=True, return_inverse=True)
        rank = np.argsort(np.argsort(first))
        canonical = rank[inverse]
        order = np.argsort(canonical, kind="stable")
        bounds = np.cumsum(np.bincount(canonical))
        classes = [chunk.tolist() for chunk in np.split(order, bounds[:-1])]
        return cls(points=len(index), classes=classes, index=canonical)

    def sizes(self) -> List[int]:
        return [len(c) for c in self.classes]

    def __len__(self):
        return len(self.classes)

    def to_json(self):
        return {'points': self.points, 'classes': self.classes}


def _field_basis(space: OrthoSpace):
    """omega^k for k < e: an F_p-basis of F_q."""
    w = space.field.primitive
    return [w ** k for k in range(space.field.e)]


def _gl_generators(space: OrthoSpace, n: int) -> List[Mat]:
    spec = space.field
    if n == 0:
        return []
    gens = []
    for i, j in itertools.permutations(range(n), 2):
        for t in _field_basis(space):
            E = ms.identity(spec, n)
            E[i, j] = t
            gens.append(E)
    D = ms.identity(spec, n)
    D[0, 0] = spec.primitive
    gens.append(D)
    return gens


def g01_generators(space: OrthoSpace) -> List[GroupElement01]:
    """Transvections and a primitive dilation for GL_nu (S = I), then every element of O(Delta) (T = I)."""
    if space.delta != 2:
        raise GeometryError("G01 generators are built for delta = 2")
    I_nu, I_2 = ms.identity(space.field, space.nu), ms.identity(space.field, 2)
    gens = [g01_element(space, T, I_2) for T in _gl_generators(space, space.nu)]
    gens += [g01_element(space, I_nu, S) for S in space.o2_elements]
    return gens


def g0_generators(space: OrthoSpace) -> List[GroupElement0]:
    """g01_generators plus one element with T23 != 0 and, for nu >= 2, one with alternate T21 != 0."""
    spec, nu = space.field, space.nu
    gens = [g01_as_g0(g) for g in g01_generators(space)]
    I_nu, I_2 = ms.identity(spec, nu), ms.identity(spec, 2)
    T23 = ms.zeros(spec, nu, 2)
    T23[0, 0] = 1
    T21 = -(spec.half * (T23 @ space.Delta @ T23.T))
    gens.append(g0_element(space, I_nu, T21, T23, I_2))
    if nu >= 2:
        T21 = ms.zeros(spec, nu, nu)
        T21[0, 1] = 1
        T21[1, 0] = -spec.one
        gens.append(g0_element(space, I_nu, T21, ms.zeros(spec, nu, 2), I_2))
    return gens


def group_closure(space: OrthoSpace, generators: Sequence[Union[GroupElement01, GroupElement0]],
                  cap: int) -> List[Mat]:
    """Every product of generators, as full matrices, by breadth-first search from the identity."""
    identity = ms.identity(space.field, space.dim)
    seen = {ms.as_ints(identity).tobytes(): identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for M in frontier:
            for g in generators:
                P = M @ g.full
                key = ms.as_ints(P).tobytes()
                if key not in seen:
                    seen[key] = P
                    nxt.append(P)
                    if len(seen) > cap:
                        raise CapExceededError("group closure", len(seen), cap)
        frontier = nxt
    logger.info("group closure: %d elements from %d generators", len(seen), len(generators))
    return list(seen.values())


def orbits_from_permutations(perms: Sequence[np.ndarray], n: int) -> OrbitPartition:
    index = np.full(n, -1, dtype=np.int64)
    next_id = 0
    for start in range(n):
        if index[start] >= 0:
            continue
        index[start] = next_id
        frontier = np.array([start], dtype=np.int64)
        while frontier.size:
            images = np.unique(np.concatenate([p[frontier] for p in perms])) if perms else frontier[:0]
            fresh = images[index[images] < 0]
            index[fresh] = next_id
            frontier = fresh
        next_id += 1
    for p in perms:
        if not np.array_equal(index[p], index):
            raise GeometryError("an orbit is not closed under a generator")
    return OrbitPartition.from_index(index)


def generator_permutations(space: OrthoSpace, table: VertexTable,
                           generators: Sequence[Union[GroupElement01, GroupElement0]]) -> List[np.ndarray]:
    return [table.permutation(lambda v, M=g.full: act_by_matrix(space, v, M)) for g in generators]


def orbits_on_lambda(space: OrthoSpace, table: Optional[VertexTable] = None, cap: int = 20000) -> OrbitPartition:
    table = table or VertexTable(space, cap=cap)
    if len(table) > cap:
        raise CapExceededError("orbit computation on Lambda", len(table), cap)
    perms = generator_permutations(space, table, g01_generators(space))
    partition = orbits_from_permutations(perms, len(table))
    logger.info("G01 has %d orbits on %d vertices", len(partition), len(table))
    return partition


def pair_orbits(space: OrthoSpace, table: Optional[VertexTable] = None, cap: int = 100000) -> OrbitPartition:
    """G0 orbits on ordered pairs; pair (i, j) is point i * N + j."""
    table = table or VertexTable(space)
    n = len(table)
    if n * n > cap:
        raise CapExceededError("pair orbit computation", n * n, cap)
    perms = generator_permutations(space, table, g0_generators(space))
    pair_perms = [(p[:, None] * n + p[None, :]).ravel() for p in perms]
    partition = orbits_from_permutations(pair_perms, n * n)
    logger.info("G0 has %d orbits on %d ordered pairs", len(partition), n * n)
    return partition


def _alt_points(space: OrthoSpace, cap: int) -> Tuple[np.ndarray, Mat, np.ndarray]:
    nu, q = space.nu, space.q
    m = nu * (nu - 1) // 2
    n = q ** m
    if n > cap:
        raise CapExceededError("orbit computation on alternate matrices", n, cap)
    powers = np.array([q ** (m - 1 - k) for k in range(m)], dtype=np.int64)
    idx = np.arange(n, dtype=np.int64)
    coords = (idx[:, None] // powers[None, :]) % q if m else np.zeros((n, 0), dtype=np.int64)
    return coords, space.GF(coords), powers


def _alt_permutation(space: OrthoSpace, T: Mat, coords_gf: Mat, powers: np.ndarray) -> np.ndarray:
    """X -> T^t X T is linear on the strictly-upper coordinates."""
    spec, nu = space.field, space.nu
    m = len(powers)
    if m == 0:
        return np.zeros(1, dtype=np.int64)
    L = space.GF.Zeros((m, m))
    for j in range(m):
        unit = [0] * m
        unit[j] = 1
        X = ms.alternate_from_upper(spec, nu, unit)
        L[j] = space.GF(ms.upper_entries(T.T @ X @ T))
    return ms.as_ints(ms.mul(coords_gf, L)) @ powers


def o_i_generators(space: OrthoSpace, i: int) -> List[Mat]:
    """Generators of the block lower-triangular group O_i = [[T11, 0], [T21, T22]], T11 of size i."""
    spec, nu = space.field, space.nu
    if i not in (1, 2) or nu < i:
        raise GeometryError(f"O_{i} needs i in {{1, 2}} and nu >= i, got nu={nu}")
    gens = [ms.block_diag(spec, [g, ms.identity(spec, nu - i)]) for g in _gl_generators(space, i)]
    gens += [ms.block_diag(spec, [ms.identity(spec, i), g]) for g in _gl_generators(space, nu - i)]
    for j, k in itertools.product(range(i, nu), range(i)):
        for t in _field_basis(space):
            E = ms.identity(spec, nu)
            E[j, k] = t
            gens.append(E)
    return gens


def orbits_on_alt(space: OrthoSpace, i: int, cap: int = 20000) -> OrbitPartition:
    coords, coords_gf, powers = _alt_points(space, cap)
    perms = [_alt_permutation(space, T, coords_gf, powers) for T in o_i_generators(space, i)]
    partition = orbits_from_permutations(perms, len(coords))
    logger.info("O_%d has %d orbits on %d alternate matrices", i, len(partition), len(coords))
    return partition


def cross_validate_alt(space: OrthoSpace, i: int, cap: int = 20000) -> List[CheckResult]:
    """O_i orbits against the canonicalizer and the expected list of canonical forms."""
    coords, _, _ = _alt_points(space, cap)
    partition = orbits_on_alt(space, i, cap)
    canonicalize = o1_canonicalize if i == 1 else o2_canonicalize
    forms = [str(canonicalize(space.field, ms.alternate_from_upper(space.field, space.nu, list(c)))[1])
             for c in coords.tolist()]
    per_class = [{forms[p] for p in members} for members in partition.classes]
    class_forms = [next(iter(s)) for s in per_class if len(s) == 1]
    expected = sorted(str(f) for f in all_alt_forms(space.nu, i))
    suite = f"alt-O{i}"
    return [
        CheckResult(suite, "constant form on each orbit", all(len(s) == 1 for s in per_class),
                    expected="1 form per orbit", observed=[sorted(s) for s in per_class if len(s) > 1]),
        CheckResult(suite, "distinct forms across orbits", len(set(class_forms)) == len(class_forms),
                    expected=len(partition), observed=len(set(class_forms))),
        CheckResult(suite, "forms match the expected list", sorted(class_forms) == expected,
                    expected=expected, observed=sorted(class_forms)),
    ]


def cross_validate(space: OrthoSpace, table: Optional[VertexTable] = None,
                   labels: Optional[List[SuborbitLabel]] = None, cap: int = 20000,
                   threads: int = 1) -> Tuple[List[CheckResult], Dict[str, object]]:
    """Orbit count, orbit sizes, classifier agreement and representative placement against BFS orbits."""
    table = table or VertexTable(space, cap=cap)
    partition = orbits_on_lambda(space, table, cap)
    labels = labels if labels is not None else label_table(space, table, threads)
    q, nu = space.q, space.nu
    expected_labels = all_labels(q, nu)
    expected_sizes = sorted(suborbit_size(q, nu, L) for L in expected_labels)

    per_class = [Counter(labels[p] for p in members) for members in partition.classes]
    class_label = [next(iter(c)) if len(c) == 1 else None for c in per_class]
    constant = all(L is not None for L in class_label)
    distinct = constant and len(set(class_label)) == len(class_label)

    misplaced = []
    for L in expected_labels:
        cls = partition.index[table.index_of(representative(space, L))]
        if class_label[cls] != L or len(partition.classes[cls]) != suborbit_size(q, nu, L):
            misplaced.append(str(L))

    suite = "suborbits"
    checks = [
        CheckResult(suite, "orbit count equals rank", len(partition) == rank_g0(q, nu),
                    expected=rank_g0(q, nu), observed=len(partition)),
        CheckResult(suite, "orbit sizes equal suborbit lengths", sorted(partition.sizes()) == expected_sizes,
                    expected=expected_sizes, observed=sorted(partition.sizes())),
        CheckResult(suite, "classifier constant on orbits and injective", distinct,
                    expected=len(partition), observed=len({L for L in class_label if L is not None})),
        CheckResult(suite, "representatives lie in their classified orbit", not misplaced,
                    expected=[], observed=misplaced),
    ]
    data = {
        'orbits': len(partition),
        'orbit_sizes': sorted(partition.sizes()),
        'group_order': order_gl(nu, q) * order_o(2, q),
        'labels': {str(L): n for L, n in sorted(Counter(labels).items(), key=lambda kv: kv[0].sort_key())},
    }
    return checks, data
