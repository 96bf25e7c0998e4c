"""Suborbits of the two-point stabilizer G01 on Lambda.

Alternate matrices are first brought to canonical form under the block lower-triangular groups O1 (first row
(t, 0, ..., 0)) and O2 (first two rows [T11 | 0]); the classifier then reduces any vertex to one of the
representatives phi0..phi8 and returns the group element that carries the representative back to it.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import matspace as ms
from .errors import ClassificationError, GeometryError, LabelError
from .geometry import (
    GroupElement01,
    OrthoSpace,
    compose01,
    g01_act,
    g01_element,
    identity01,
    invert01,
    normalize_line,
    order_gl,
    order_sp,
)
from .gf import FieldSpec, field_new, is_square, sqrt
from .lambda_graph import Vertex, VertexTable, basepoint, joint_dim
from .matspace import Mat

logger = logging.getLogger(__name__)

FAMILIES = tuple(range(9))
ALT_KINDS = ("zero", "shifted", "leading", "double_shifted", "kappa")

_LABEL_RE = re.compile(r"^phi(\d)(?:\((\d+)(?:;a=(\d+))?(?:;b=(\d+))?\))?$")


@dataclass(frozen=True)
class SuborbitLabel:
    """phi_family(r; a) or phi_family(r; b); `a` only for families 2 and 3, `b` only for family 7."""
    family: int
    r: int = 0
    a: Optional[int] = None
    b: Optional[int] = None

    def __str__(self):
        if self.family == 0:
            return "phi0"
        extra = ""
        if self.a is not None:
            extra = f";a={self.a}"
        elif self.b is not None:
            extra = f";b={self.b}"
        return f"phi{self.family}({self.r}{extra})"

    @classmethod
    def parse(cls, text: str) -> "SuborbitLabel":
        match = _LABEL_RE.match(text.strip())
        if not match:
            raise LabelError(f"cannot parse suborbit label {text!r}")
        family, r, a, b = match.groups()
        family = int(family)
        if family != 0 and r is None:
            raise LabelError(f"label {text!r} is missing its r parameter")
        return cls(
            family=family,
            r=int(r) if r is not None else 0,
            a=int(a) if a is not None else None,
            b=int(b) if b is not None else None,
        )

    def sort_key(self) -> Tuple[int, int, int, int]:
        return (self.family, self.r, self.a or 0, self.b or 0)


def _label_ranges(nu: int) -> Dict[int, range]:
    return {
        0: range(0, 1),
        1: range(1, nu // 2 + 1),
        2: range(0, (nu - 1) // 2 + 1),
        3: range(1, nu // 2 + 1),
        4: range(0, (nu - 1) // 2 + 1) if nu >= 2 else range(0),
        5: range(1, (nu - 1) // 2 + 1),
        6: range(1, (nu - 2) // 2 + 1),
        7: range(1, nu // 2 + 1),
        8: range(2, nu // 2 + 1),
    }


def all_labels(q: int, nu: int) -> List[SuborbitLabel]:
    omega = field_new(q).omega
    labels = []
    for family, rs in _label_ranges(nu).items():
        for r in rs:
            if family in (2, 3):
                labels.extend(SuborbitLabel(family, r, a=a) for a in (0, 1))
            elif family == 7:
                labels.extend(SuborbitLabel(family, r, b=b) for b in omega)
            else:
                labels.append(SuborbitLabel(family, r))
    return sorted(labels, key=SuborbitLabel.sort_key)


def validate_label(q: int, nu: int, label: SuborbitLabel) -> SuborbitLabel:
    if label.family not in FAMILIES:
        raise LabelError(f"unknown family {label.family}")
    if label.r not in _label_ranges(nu)[label.family]:
        raise LabelError(f"{label} is out of range for nu={nu}")
    needs_a, needs_b = label.family in (2, 3), label.family == 7
    if needs_a != (label.a is not None) or needs_b != (label.b is not None):
        raise LabelError(f"{label} has the wrong parameters for family {label.family}")
    if needs_a and label.a not in (0, 1):
        raise LabelError(f"a must be 0 or 1 in {label}")
    if needs_b and label.b not in field_new(q).omega:
        raise LabelError(f"b must lie in Omega={list(field_new(q).omega)} in {label}")
    return label


def rank_g0(q: int, nu: int) -> int:
    return (q + 7) // 2 * (nu // 2) + 4 * ((nu - 1) // 2) + max(0, (nu - 2) // 2) + 3


# --- canonical forms of alternate matrices -------------------------------------------------------

@dataclass(frozen=True)
class AltCanonicalForm:
    kind: str
    r: int

    def matrix(self, spec: FieldSpec, nu: int) -> Mat:
        A = ms.std_alternate
        if self.kind == "zero":
            blocks = []
        elif self.kind == "shifted":
            blocks = [ms.zeros(spec, 1, 1), A(spec, self.r)]
        elif self.kind == "leading":
            blocks = [A(spec, self.r)]
        elif self.kind == "double_shifted":
            blocks = [ms.zeros(spec, 2, 2), A(spec, self.r)]
        elif self.kind == "kappa":
            blocks = [ms.mat_K(spec), A(spec, self.r - 2)]
        else:
            raise LabelError(f"unknown canonical form {self.kind!r}")
        used = sum(b.shape[0] for b in blocks)
        if used > nu:
            raise LabelError(f"{self} does not fit in dimension {nu}")
        return ms.block_diag(spec, blocks + [ms.zeros(spec, nu - used, nu - used)])

    def __str__(self):
        return self.kind if self.kind == "zero" else f"{self.kind}({self.r})"


def all_alt_forms(nu: int, i: int) -> List[AltCanonicalForm]:
    forms = [AltCanonicalForm("zero", 0)]
    forms += [AltCanonicalForm("shifted", r) for r in range(1, (nu - 1) // 2 + 1)]
    forms += [AltCanonicalForm("leading", r) for r in range(1, nu // 2 + 1)]
    if i == 2:
        forms += [AltCanonicalForm("double_shifted", r) for r in range(1, (nu - 2) // 2 + 1)]
        forms += [AltCanonicalForm("kappa", r) for r in range(2, nu // 2 + 1)]
    return forms


def _apply(T: Mat, X: Mat, D: Mat) -> Tuple[Mat, Mat]:
    return T @ D, D.T @ X @ D


def _reduce_tail(spec: FieldSpec, X: Mat, i: int) -> Tuple[Mat, Mat, int]:
    """Normalize the trailing block to [A_2s, 0] and clear the coupling of the first i rows against A_2s."""
    nu = X.shape[0]
    T22, s = ms.alt_normalize(X[i:, i:])
    T = ms.block_diag(spec, [ms.identity(spec, i), T22])
    Xc = T.T @ X @ T
    if s:
        Y = Xc[0:i, i:i + 2 * s]
        E = ms.identity(spec, nu)
        E[i:i + 2 * s, 0:i] = -(ms.std_alternate(spec, s) @ Y.T)
        T, Xc = _apply(T, Xc, E)
    if not ms.is_zero(Xc[0:i, i:i + 2 * s]):
        raise ClassificationError("coupling against the symplectic block was not cleared")
    return T, Xc, s


def _finish(spec: FieldSpec, X: Mat, T: Mat, form: AltCanonicalForm) -> Tuple[Mat, AltCanonicalForm]:
    if not ms.equal(T.T @ X @ T, form.matrix(spec, X.shape[0])):
        raise ClassificationError(f"canonical reduction did not reach {form}")
    return T, form


def o1_canonicalize(spec: FieldSpec, X: Mat) -> Tuple[Mat, AltCanonicalForm]:
    """T in O1 with T^t X T in {0, [0, A_2r, 0], [A_2r, 0]}."""
    ms.require_alternate(X)
    nu = X.shape[0]
    if nu < 1:
        raise GeometryError("O1 needs nu >= 1")
    T, Xc, s = _reduce_tail(spec, X, 1)
    c0 = 1 + 2 * s
    y = Xc[0:1, c0:]
    if y.size == 0 or ms.is_zero(y):
        return _finish(spec, X, T, AltCanonicalForm("shifted" if s else "zero", s))

    T, Xc = _apply(T, Xc, ms.block_diag(spec, [ms.identity(spec, c0), ms.row_reducer(spec, y)]))
    order = [0, c0] + list(range(1, c0)) + list(range(c0 + 1, nu))
    T, Xc = _apply(T, Xc, ms.permutation(spec, order))
    return _finish(spec, X, T, AltCanonicalForm("leading", s + 1))


def o2_canonicalize(spec: FieldSpec, X: Mat) -> Tuple[Mat, AltCanonicalForm]:
    """T in O2 with T^t X T one of the O1 shapes, [0^(2), A_2r, 0] or [K, A_2r-4, 0]."""
    ms.require_alternate(X)
    nu = X.shape[0]
    if nu < 2:
        raise GeometryError("O2 needs nu >= 2")
    GF = spec.GF
    T, Xc, s = _reduce_tail(spec, X, 2)
    c0 = 2 + 2 * s
    Y = Xc[0:2, c0:]
    rk = ms.rank(Y)

    if rk == 0:
        x1 = Xc[0, 1]
        if x1 == 0:
            return _finish(spec, X, T, AltCanonicalForm("double_shifted" if s else "zero", s))
        D = ms.identity(spec, nu)
        D[0, 0] = GF(1) / x1
        T, Xc = _apply(T, Xc, D)
        return _finish(spec, X, T, AltCanonicalForm("leading", s + 1))

    if rk == 1:
        col = next(j for j in range(Y.shape[1]) if not ms.is_zero(Y[:, j:j + 1]))
        w = Y[:, col:col + 1]
        R = ms.permutation(spec, [1, 0]) @ ms.inverse(ms.complete_basis(spec, w))
        T, Xc = _apply(T, Xc, ms.block_diag(spec, [R.T, ms.identity(spec, nu - 2)]))
        y = Xc[1:2, c0:]
        T, Xc = _apply(T, Xc, ms.block_diag(spec, [ms.identity(spec, c0), ms.row_reducer(spec, y)]))
        D = ms.identity(spec, nu)
        D[c0, 0] = Xc[0, 1]
        T, Xc = _apply(T, Xc, D)
        order = [0, 1, c0] + list(range(2, c0)) + list(range(c0 + 1, nu))
        T, Xc = _apply(T, Xc, ms.permutation(spec, order))
        return _finish(spec, X, T, AltCanonicalForm("shifted", s + 1))

    T, Xc = _apply(T, Xc, ms.block_diag(spec, [ms.identity(spec, c0), ms.row_reducer(spec, Y)]))
    D = ms.identity(spec, nu)
    D[c0, 1] = -Xc[0, 1]
    T, Xc = _apply(T, Xc, D)
    order = [0, 1, c0, c0 + 1] + list(range(2, c0)) + list(range(c0 + 2, nu))
    T, Xc = _apply(T, Xc, ms.permutation(spec, order))
    return _finish(spec, X, T, AltCanonicalForm("kappa", s + 2))


# --- representatives and the classifier ----------------------------------------------------------

def _pad(spec: FieldSpec, nu: int, blocks: Sequence[Mat]) -> Mat:
    used = sum(b.shape[0] for b in blocks)
    return ms.block_diag(spec, list(blocks) + [ms.zeros(spec, nu - used, nu - used)])


def representative(space: OrthoSpace, label: SuborbitLabel) -> Vertex:
    if space.delta != 2:
        raise GeometryError("suborbit representatives are defined for delta = 2")
    spec, nu = space.field, space.nu
    validate_label(space.q, nu, label)
    f, r = label.family, label.r
    A = ms.std_alternate
    zero1, zero2 = ms.zeros(spec, 1, 1), ms.zeros(spec, 2, 2)

    Z = ms.zeros(spec, nu, 2)
    if f in (2, 3):
        Z[0, 0] = 1
        Z[0, 1] = label.a
    elif f >= 4:
        Z[0:2, 0:2] = ms.identity(spec, 2)

    if f == 0:
        X = ms.zeros(spec, nu, nu)
    elif f in (1, 3):
        X = _pad(spec, nu, [A(spec, r)])
    elif f in (2, 4):
        X = _pad(spec, nu, [zero1, A(spec, r)])
    elif f == 5:
        X = _pad(spec, nu, [ms.mat_Y(spec), A(spec, r - 1)])
    elif f == 6:
        X = _pad(spec, nu, [zero2, A(spec, r)])
    elif f == 7:
        X = _pad(spec, nu, [spec.GF(label.b) * A(spec, 1), A(spec, r - 1)])
    else:
        X = _pad(spec, nu, [ms.mat_K(spec), A(spec, r - 2)])
    return Vertex(X, Z)


class _Reduction:
    """Running state of the classifier: the current vertex and the accumulated group element."""

    def __init__(self, space: OrthoSpace, v: Vertex):
        self.space = space
        self.v = v
        self.g = identity01(space)

    def step(self, T: Mat, S: Optional[Mat] = None):
        S = ms.identity(self.space.field, 2) if S is None else S
        h = g01_element(self.space, T, S)
        self.v = g01_act(h, self.v)
        self.g = compose01(self.g, h)

    def diag(self, values: Sequence) -> Mat:
        spec, nu = self.space.field, self.space.nu
        D = ms.identity(spec, nu)
        for k, value in enumerate(values):
            D[k, k] = value
        return D


def _classify_rank1(red: _Reduction) -> SuborbitLabel:
    space, spec, GF = red.space, red.space.field, red.space.GF
    Z = red.v.Z
    u = Z[:, 0:1] if not ms.is_zero(Z[:, 0:1]) else Z[:, 1:2]
    red.step(ms.transpose(ms.inverse(ms.complete_basis(spec, u))))
    if not ms.is_zero(red.v.Z[1:]):
        raise ClassificationError("rank-1 Z was not moved onto E1")

    T, form = o1_canonicalize(spec, red.v.X)
    red.step(T)
    S11, a = normalize_line(space, red.v.Z[0, 0], red.v.Z[0, 1])
    red.step(ms.identity(spec, space.nu), S11)
    beta = red.v.Z[0, 0]
    red.step(red.diag([GF(1) / beta]))

    if form.kind == "leading":
        red.step(red.diag([GF(1), GF(1) / red.v.X[0, 1]]))
        return SuborbitLabel(3, form.r, a=a)
    return SuborbitLabel(2, form.r, a=a)


def _classify_rank2(red: _Reduction) -> SuborbitLabel:
    space, spec, GF = red.space, red.space.field, red.space.GF
    nu, z = space.nu, spec.z_element
    red.step(ms.transpose(ms.inverse(ms.complete_basis(spec, red.v.Z))))

    T, form = o2_canonicalize(spec, red.v.X)
    R = ms.inverse(T[0:2, 0:2])
    red.step(T @ ms.block_diag(spec, [R, ms.identity(spec, nu - 2)]))

    if form.kind == "zero":
        return SuborbitLabel(4, 0)
    if form.kind == "double_shifted":
        return SuborbitLabel(6, form.r)
    if form.kind == "kappa":
        red.step(ms.block_diag(spec, [ms.identity(spec, 2), ms.transpose(ms.inverse(R)),
                                      ms.identity(spec, nu - 4)]))
        return SuborbitLabel(8, form.r)
    if form.kind == "leading":
        b = red.v.X[0, 1]
        if int(b) not in spec.omega:
            flip = ms.from_rows(spec, [[-1, 0], [0, 1]])
            red.step(red.diag([-GF(1)]), flip)
        return SuborbitLabel(7, form.r, b=int(red.v.X[0, 1]))

    u, v = red.v.X[0, 2], red.v.X[1, 2]
    if u == 0:
        red.step(red.diag([GF(1), GF(1), GF(1) / v]))
        return SuborbitLabel(4, form.r)
    red.step(red.diag([GF(1), GF(1), GF(1) / u]))
    c = v / u
    rest = ms.identity(spec, nu - 3)
    if is_square(spec, c * c - z):
        s = sqrt(spec, c * c - z)
        A11 = (GF(1) / s) * spec.GF([[int(c), int(-z)], [int(-GF(1)), int(c)]])
        red.step(ms.block_diag(spec, [A11, GF([[int(GF(1) / s)]]), rest]), ms.inverse(A11.T))
        return SuborbitLabel(4, form.r)
    s = sqrt(spec, (GF(1) - z) / (c * c - z))
    B11 = spec.GF([[int(c - z), int(z * (c - GF(1)))], [int(c - GF(1)), int(c - z)]])
    B11 = (GF(1) / (s * (c * c - z))) * B11
    red.step(ms.block_diag(spec, [B11, GF([[int(s)]]), rest]), ms.inverse(B11.T))
    return SuborbitLabel(5, form.r)


def classify(space: OrthoSpace, v: Vertex) -> Tuple[SuborbitLabel, GroupElement01]:
    """The suborbit of v and a witness g with g01_act(g, representative(label)) == v."""
    if space.delta != 2:
        raise GeometryError("classification is implemented for delta = 2")
    red = _Reduction(space, v)
    rank_z = ms.rank(v.Z)
    if rank_z == 0:
        T, r = ms.alt_normalize(v.X)
        red.step(T)
        label = SuborbitLabel(1, r) if r else SuborbitLabel(0)
    elif rank_z == 1:
        label = _classify_rank1(red)
    else:
        label = _classify_rank2(red)

    if red.v != representative(space, label):
        raise ClassificationError(f"reduction of {v.to_json()} stopped at {red.v.to_json()}, not at {label}")
    logger.debug("classified %s as %s", v.key, label)
    return label, invert01(red.g)


def label_table(space: OrthoSpace, table: VertexTable, threads: int = 1) -> List[SuborbitLabel]:
    """classify(...).label for every vertex of the table, in enumeration order."""
    from .config import parallel_map

    logger.info("classifying %d vertices of %s", len(table), space.describe())
    return parallel_map(lambda i: classify(space, table.vertex(i))[0], range(len(table)), threads)


# --- suborbit lengths ----------------------------------------------------------------------------

def _check_label(q: int, nu: int, label: SuborbitLabel):
    field_new(q)
    validate_label(q, nu, label)


def suborbit_size(q: int, nu: int, label: SuborbitLabel) -> int:
    """Length of the G01-orbit of representative(label); |Sp_2m| = 1 for m <= 0."""
    _check_label(q, nu, label)
    gl, sp = order_gl(nu, q), lambda m: order_sp(m, q)
    f, r = label.family, label.r
    if f == 0:
        return 1
    if f == 1:
        size = Fraction(gl, sp(2 * r) * order_gl(nu - 2 * r, q) * q ** (2 * r * (nu - 2 * r)))
    elif f == 2:
        size = Fraction((q + 1) * gl,
                        sp(2 * r) * order_gl(nu - 2 * r - 1, q) * 2 * q ** ((2 * r + 1) * (nu - 2 * r - 1)))
    elif f == 3:
        size = Fraction((q + 1) * gl,
                        sp(2 * r - 2) * order_gl(nu - 2 * r, q) * 2 * q ** (2 * r * (nu - 2 * r) + 2 * r - 1))
    elif f == 4 and r == 0:
        size = Fraction(gl, order_gl(nu - 2, q) * q ** (2 * (nu - 2)))
    elif f in (4, 5):
        size = Fraction((q + 1) * gl,
                        sp(2 * r - 2) * order_gl(nu - 2 * r - 1, q) * 2 * q ** ((2 * r + 1) * (nu - 2 * r) - 2))
    elif f == 6:
        size = Fraction(gl, sp(2 * r) * order_gl(nu - 2 * r - 2, q) * q ** ((2 * r + 2) * (nu - 2 * r - 2)))
    elif f == 7:
        size = Fraction(2 * gl, sp(2 * r - 2) * order_gl(nu - 2 * r, q) * q ** (2 * r * (nu - 2 * r)))
    else:
        size = Fraction(gl, sp(2 * r - 4) * order_gl(nu - 2 * r, q) * q ** (2 * r * (nu - 2 * r) + 4 * r - 5))
    if size.denominator != 1:
        raise ClassificationError(f"length of {label} at q={q}, nu={nu} is not an integer: {size}")
    return int(size)


def printed_suborbit_size(q: int, nu: int, label: SuborbitLabel) -> Fraction:
    """The length formulas as originally displayed, evaluated exactly; may differ from suborbit_size."""
    _check_label(q, nu, label)
    gl, sp = order_gl(nu, q), lambda m: order_sp(m, q)
    f, r = label.family, label.r
    if f == 4:
        return Fraction((q + 1) * gl,
                        sp(2 * r - 2) * order_gl(nu - 2 * r - 1, q) * 2 * q ** ((2 * r + 1) * (nu - 2 * r) - 2))
    if f == 5:
        return Fraction((q + 1) * gl,
                        sp(2 * r - 2) * order_gl(nu - 2 * r - 1, q) * 2 * q ** ((2 * r + 1) * nu - 4 * (r * r + 1)))
    if f == 8:
        return Fraction(gl, sp(2 * r - 2) * order_gl(nu - 2 * r, q) * q ** (2 * r * (nu - 2 * r) + 4 * r - 5))
    return Fraction(suborbit_size(q, nu, label))


def length_discrepancies(q: int, nu: int) -> List[Dict[str, object]]:
    rows = []
    for label in all_labels(q, nu):
        printed, derived = printed_suborbit_size(q, nu, label), suborbit_size(q, nu, label)
        if printed != derived:
            rows.append({'label': str(label), 'printed': str(printed), 'derived': derived})
    return rows


def joint_dim_profile(space: OrthoSpace) -> Dict[str, int]:
    """joint_dim(P1, representative(L)) for every label L."""
    p1 = basepoint(space)
    return {str(L): joint_dim(space, p1, representative(space, L)) for L in all_labels(space.q, space.nu)}
