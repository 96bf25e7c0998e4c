"""The orthogonal space F_q^(2nu+delta), its stabilizer groups G0 and G01, and classical group orders."""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple, Union

from . import matspace as ms
from .errors import ClassificationError, GeometryError
from .gf import FieldSpec, Scalar, field_new, is_square
from .matspace import Mat

logger = logging.getLogger(__name__)

VARIANTS = ("1", "z")


@dataclass(eq=False)
class OrthoSpace:
    """F_q^(2nu+delta) with Gram matrix [[0, I, 0], [I, 0, 0], [0, 0, Delta]]."""
    field: FieldSpec
    nu: int
    delta: int
    variant: str
    gram: Mat
    Delta: Mat

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def GF(self):
        return self.field.GF

    @property
    def dim(self) -> int:
        return 2 * self.nu + self.delta

    @cached_property
    def o2_elements(self) -> List[Mat]:
        return enumerate_o2(self)

    def describe(self) -> str:
        return f"F_{self.q}^{self.dim} (nu={self.nu}, delta={self.delta})"


def space_new(field: Union[FieldSpec, int], nu: int, delta: int = 2, variant: str = "1") -> OrthoSpace:
    spec = field if isinstance(field, FieldSpec) else field_new(field)
    if nu < 1:
        raise GeometryError(f"nu must be at least 1, got {nu}")
    if delta not in (0, 1, 2):
        raise GeometryError(f"delta must be 0, 1 or 2, got {delta}")
    if variant not in VARIANTS:
        raise GeometryError(f"variant must be one of {VARIANTS}, got {variant!r}")

    if delta == 0:
        Delta = ms.zeros(spec, 0, 0)
    elif delta == 1:
        Delta = spec.GF([[1 if variant == "1" else spec.z]])
    else:
        Delta = ms.identity(spec, 2)
        Delta[1, 1] = -spec.z_element

    gram = ms.zeros(spec, 2 * nu + delta, 2 * nu + delta)
    gram[0:nu, nu:2 * nu] = ms.identity(spec, nu)
    gram[nu:2 * nu, 0:nu] = ms.identity(spec, nu)
    if delta:
        gram[2 * nu:, 2 * nu:] = Delta

    space = OrthoSpace(field=spec, nu=nu, delta=delta, variant=variant, gram=gram, Delta=Delta)
    if ms.rank(gram) != space.dim or not ms.equal(gram, gram.T):
        raise GeometryError("Gram matrix is not symmetric and nonsingular")
    if not _is_definite(space):
        raise GeometryError(f"Delta is not definite over F_{spec.q}")
    return space


def _is_definite(space: OrthoSpace) -> bool:
    for coords in itertools.product(range(space.q), repeat=space.delta):
        if not any(coords):
            continue
        x = space.GF([list(coords)])
        if ms.is_zero(x @ space.Delta @ x.T):
            return False
    return True


def is_isometry(space: OrthoSpace, M: Mat) -> bool:
    if M.shape != (space.dim, space.dim):
        raise GeometryError(f"expected a {space.dim}x{space.dim} matrix, got {M.shape}")
    return ms.equal(M @ space.gram @ M.T, space.gram)


def is_totally_isotropic(space: OrthoSpace, P: Mat) -> bool:
    if P.shape[1] != space.dim:
        return False
    return ms.is_zero(ms.mul_all(P, space.gram, ms.transpose(P))) and ms.rank(P) == P.shape[0]


def order_gl(nu: int, q: int) -> int:
    if nu <= 0:
        return 1
    result = q ** (nu * (nu - 1) // 2)
    for i in range(1, nu + 1):
        result *= q ** i - 1
    return result


def order_sp(two_nu: int, q: int) -> int:
    """|Sp_2m(F_q)|, with |Sp_2m| = 1 for m <= 0."""
    if two_nu % 2:
        raise GeometryError(f"symplectic groups have even degree, got {two_nu}")
    m = two_nu // 2
    if m <= 0:
        return 1
    result = q ** (m * m)
    for i in range(1, m + 1):
        result *= q ** (2 * i) - 1
    return result


def order_o(two_nu_plus_2: int, q: int) -> int:
    """|O_{2nu+2,Delta}(F_q)| for the anisotropic Delta."""
    if two_nu_plus_2 < 2 or two_nu_plus_2 % 2:
        raise GeometryError(f"expected an even degree >= 2, got {two_nu_plus_2}")
    nu = (two_nu_plus_2 - 2) // 2
    result = q ** (nu * (nu + 1))
    for i in range(1, nu + 1):
        result *= q ** i - 1
    for i in range(0, nu + 2):
        result *= q ** i + 1
    return result


def enumerate_o2(space: OrthoSpace) -> List[Mat]:
    """All 2(q+1) isometries of Delta: [[x, y], [yz, x]] and [[x, y], [-yz, -x]] with x^2 - zy^2 = 1."""
    if space.delta != 2:
        raise GeometryError("the anisotropic plane only exists for delta = 2")
    GF, z = space.GF, space.field.z_element
    solutions = []
    for i, j in itertools.product(range(space.q), repeat=2):
        x, y = GF(i), GF(j)
        if x * x - z * y * y == 1:
            solutions.append((x, y))
    rotations, reflections = [], []
    for x, y in solutions:
        rotations.append(GF([[int(x), int(y)], [int(y * z), int(x)]]))
        reflections.append(GF([[int(x), int(y)], [int(-(y * z)), int(-x)]]))
    group = rotations + reflections
    for S in group:
        if not ms.equal(S @ space.Delta @ S.T, space.Delta):
            raise GeometryError("enumerated matrix is not an isometry of Delta")
    return group


def normalize_line(space: OrthoSpace, a: Scalar, b: Scalar) -> Tuple[Mat, int]:
    """Find S in O(Delta) with (a, b) S spanning (1, 0) (label 0) or (1, 1) (label 1).

    The label is 0 exactly when a^2 - z b^2 is a square.
    """
    a, b = space.field.element(a), space.field.element(b)
    if a == 0 and b == 0:
        raise GeometryError("the zero vector spans no line")
    label = 0 if is_square(space.field, a * a - space.field.z_element * b * b) else 1
    row = space.GF([[int(a), int(b)]])
    for S in space.o2_elements:
        w = row @ S
        if w[0, 0] != 0 and w[0, 1] == w[0, 0] * label:
            return S, label
    raise ClassificationError(f"no isometry normalizes ({int(a)}, {int(b)})")


@dataclass(eq=False)
class GroupElement01:
    """[T, (T^t)^-1, S]: an element fixing both P0 and P1."""
    space: OrthoSpace
    T: Mat
    S: Mat
    full: Mat

    def key(self) -> bytes:
        return ms.as_ints(self.full).tobytes()

    def to_json(self):
        return {'T': ms.to_json(self.T), 'S': ms.to_json(self.S), 'full': ms.to_json(self.full)}


def _assemble01(space: OrthoSpace, T: Mat, S: Mat) -> GroupElement01:
    full = ms.block_diag(space.field, [T, ms.transpose(ms.inverse(T)), S])
    return GroupElement01(space=space, T=T, S=S, full=full)


def g01_element(space: OrthoSpace, T: Mat, S: Mat) -> GroupElement01:
    if T.shape != (space.nu, space.nu) or ms.rank(T) < space.nu:
        raise GeometryError("T must be an invertible nu x nu matrix")
    if S.shape != (2, 2) or not ms.equal(S @ space.Delta @ S.T, space.Delta):
        raise GeometryError("S is not an isometry of Delta")
    return _assemble01(space, T, S)


def identity01(space: OrthoSpace) -> GroupElement01:
    return _assemble01(space, ms.identity(space.field, space.nu), ms.identity(space.field, 2))


def compose01(g: GroupElement01, h: GroupElement01) -> GroupElement01:
    """The product g*h; acting by it is acting by g, then by h."""
    return GroupElement01(space=g.space, T=g.T @ h.T, S=g.S @ h.S, full=g.full @ h.full)


def invert01(g: GroupElement01) -> GroupElement01:
    return _assemble01(g.space, ms.inverse(g.T), ms.inverse(g.S))


def g01_act(g: GroupElement01, v):
    """Right action (X, Z) -> (T^t X T, T^t Z S)."""
    from .lambda_graph import Vertex

    Tt = g.T.T
    return Vertex(Tt @ v.X @ g.T, Tt @ v.Z @ g.S)


@dataclass(eq=False)
class GroupElement0:
    """[[T11, 0, 0], [T21, (T11^t)^-1, T23], [-S Delta T23^t T11, 0, S]]: an element fixing P0."""
    space: OrthoSpace
    T11: Mat
    T21: Mat
    T23: Mat
    S: Mat
    full: Mat

    def key(self) -> bytes:
        return ms.as_ints(self.full).tobytes()

    def to_json(self):
        return {
            'T11': ms.to_json(self.T11),
            'T21': ms.to_json(self.T21),
            'T23': ms.to_json(self.T23),
            'S': ms.to_json(self.S),
            'full': ms.to_json(self.full),
        }


def g0_constraint(space: OrthoSpace, T11: Mat, T21: Mat, T23: Mat) -> Mat:
    T11_inv = ms.inverse(T11)
    return T11_inv.T @ T21.T + T21 @ T11_inv + T23 @ space.Delta @ T23.T


def g0_element(space: OrthoSpace, T11: Mat, T21: Mat, T23: Mat, S: Mat) -> GroupElement0:
    nu = space.nu
    if T11.shape != (nu, nu) or ms.rank(T11) < nu:
        raise GeometryError("T11 must be an invertible nu x nu matrix")
    if T21.shape != (nu, nu) or T23.shape != (nu, 2):
        raise GeometryError("T21 must be nu x nu and T23 nu x 2")
    if S.shape != (2, 2) or not ms.equal(S @ space.Delta @ S.T, space.Delta):
        raise GeometryError("S is not an isometry of Delta")
    if not ms.is_zero(g0_constraint(space, T11, T21, T23)):
        raise GeometryError("(T11^t)^-1 T21^t + T21 T11^-1 + T23 Delta T23^t is not zero")

    full = ms.zeros(space.field, space.dim, space.dim)
    full[0:nu, 0:nu] = T11
    full[nu:2 * nu, 0:nu] = T21
    full[nu:2 * nu, nu:2 * nu] = ms.inverse(T11).T
    full[nu:2 * nu, 2 * nu:] = T23
    full[2 * nu:, 0:nu] = -(S @ space.Delta @ T23.T @ T11)
    full[2 * nu:, 2 * nu:] = S
    return GroupElement0(space=space, T11=T11, T21=T21, T23=T23, S=S, full=full)


def g01_as_g0(g: GroupElement01) -> GroupElement0:
    space = g.space
    return GroupElement0(
        space=space,
        T11=g.T,
        T21=ms.zeros(space.field, space.nu, space.nu),
        T23=ms.zeros(space.field, space.nu, 2),
        S=g.S,
        full=g.full,
    )


def compose0(g: GroupElement0, h: GroupElement0) -> GroupElement0:
    space, nu = g.space, g.space.nu
    full = g.full @ h.full
    return GroupElement0(
        space=space,
        T11=full[0:nu, 0:nu],
        T21=full[nu:2 * nu, 0:nu],
        T23=full[nu:2 * nu, 2 * nu:],
        S=full[2 * nu:, 2 * nu:],
        full=full,
    )


def g0_act(g: GroupElement0, v):
    """A' = T11^t (A T11 + T21 - Z S Delta T23^t T11), Z' = T11^t (T23 + Z S)."""
    from .lambda_graph import Vertex

    space = g.space
    Delta, half = space.Delta, space.field.half
    A = v.X - half * (v.Z @ Delta @ v.Z.T)
    T11t = g.T11.T
    A_new = T11t @ (A @ g.T11 + g.T21 - v.Z @ g.S @ Delta @ g.T23.T @ g.T11)
    Z_new = T11t @ (g.T23 + v.Z @ g.S)
    return Vertex(A_new + half * (Z_new @ Delta @ Z_new.T), Z_new)

