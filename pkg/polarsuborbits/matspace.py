"""Dense matrices over F_q built on galois FieldArrays.

Every matrix is a 2-d ``galois.FieldArray``. Constructors take the FieldSpec first; 0x0 and other
empty shapes are legal values and are handled without calling into numpy's matmul.
"""

import logging
from typing import Dict, List, Sequence, Tuple

import galois
import numpy as np

from .errors import MatrixError
from .gf import FieldSpec

logger = logging.getLogger(__name__)

Mat = galois.FieldArray


def as_ints(A: Mat) -> np.ndarray:
    """Canonical indices of the entries as an int64 ndarray."""
    return A.view(np.ndarray).astype(np.int64)


def is_zero(A: Mat) -> bool:
    return not A.view(np.ndarray).any()


def equal(A: Mat, B: Mat) -> bool:
    return A.shape == B.shape and np.array_equal(A.view(np.ndarray), B.view(np.ndarray))


def zeros(spec: FieldSpec, rows: int, cols: int) -> Mat:
    return spec.GF.Zeros((rows, cols))


def identity(spec: FieldSpec, n: int) -> Mat:
    if n == 0:
        return zeros(spec, 0, 0)
    return spec.GF.Identity(n)


def from_rows(spec: FieldSpec, rows: Sequence[Sequence[int]]) -> Mat:
    """Matrix of small signed integers read as elements of the prime subfield."""
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), -1)
    M = spec.GF(np.abs(arr) % spec.p)
    negative = arr < 0
    if negative.any():
        M[negative] = -M[negative]
    return M


def mul(A: Mat, B: Mat) -> Mat:
    if A.shape[1] != B.shape[0]:
        raise MatrixError(f"cannot multiply {A.shape} by {B.shape}")
    if 0 in A.shape or 0 in B.shape:
        return type(A).Zeros((A.shape[0], B.shape[1]))
    return A @ B


def mul_all(*mats: Mat) -> Mat:
    result = mats[0]
    for M in mats[1:]:
        result = mul(result, M)
    return result


def transpose(A: Mat) -> Mat:
    return A.T.copy()


def add(A: Mat, B: Mat) -> Mat:
    if A.shape != B.shape:
        raise MatrixError(f"cannot add {A.shape} and {B.shape}")
    return A + B


def sub(A: Mat, B: Mat) -> Mat:
    if A.shape != B.shape:
        raise MatrixError(f"cannot subtract {B.shape} from {A.shape}")
    return A - B


def scale(c, A: Mat) -> Mat:
    if not isinstance(c, galois.FieldArray):
        c = type(A)(c)
    return c * A


def rank(A: Mat) -> int:
    if 0 in A.shape:
        return 0
    return int(np.linalg.matrix_rank(A))


def inverse(A: Mat) -> Mat:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise MatrixError(f"only square matrices have inverses, got {A.shape}")
    if A.shape[0] == 0:
        return A.copy()
    if rank(A) < A.shape[0]:
        raise MatrixError("matrix is singular")
    return np.linalg.inv(A)


def det(A: Mat):
    if A.shape[0] != A.shape[1]:
        raise MatrixError(f"determinant needs a square matrix, got {A.shape}")
    return np.linalg.det(A)


def _echelon_rows(A: Mat) -> Mat:
    if A.shape[0] == 0:
        return A
    R = A.row_reduce()
    keep = R.view(np.ndarray).any(axis=1)
    return R[keep]


def row_space_equal(A: Mat, B: Mat) -> bool:
    """Compare reduced row-echelon forms."""
    if A.shape[1] != B.shape[1]:
        raise MatrixError(f"row spaces live in different ambient spaces: {A.shape[1]} vs {B.shape[1]} columns")
    return equal(_echelon_rows(A), _echelon_rows(B))


def block_diag(spec: FieldSpec, blocks: Sequence[Mat]) -> Mat:
    n_rows = sum(b.shape[0] for b in blocks)
    n_cols = sum(b.shape[1] for b in blocks)
    M = zeros(spec, n_rows, n_cols)
    r = c = 0
    for b in blocks:
        if b.size:
            M[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return M


def hconcat(spec: FieldSpec, blocks: Sequence[Mat]) -> Mat:
    heights = {b.shape[0] for b in blocks}
    if len(heights) > 1:
        raise MatrixError(f"hconcat needs equal row counts, got {sorted(heights)}")
    rows = heights.pop() if heights else 0
    M = zeros(spec, rows, sum(b.shape[1] for b in blocks))
    c = 0
    for b in blocks:
        if b.size:
            M[:, c:c + b.shape[1]] = b
        c += b.shape[1]
    return M


def vconcat(spec: FieldSpec, blocks: Sequence[Mat]) -> Mat:
    widths = {b.shape[1] for b in blocks}
    if len(widths) > 1:
        raise MatrixError(f"vconcat needs equal column counts, got {sorted(widths)}")
    cols = widths.pop() if widths else 0
    M = zeros(spec, sum(b.shape[0] for b in blocks), cols)
    r = 0
    for b in blocks:
        if b.size:
            M[r:r + b.shape[0], :] = b
        r += b.shape[0]
    return M


def basis_vector(spec: FieldSpec, nu: int, i: int) -> Mat:
    """The nu x 1 column E_i (1-based)."""
    if not 1 <= i <= nu:
        raise MatrixError(f"E_{i} does not exist in dimension {nu}")
    E = zeros(spec, nu, 1)
    E[i - 1, 0] = 1
    return E


def permutation(spec: FieldSpec, order: Sequence[int]) -> Mat:
    """Matrix P whose j-th column is E_{order[j]}; T @ P reorders the columns of T."""
    n = len(order)
    P = zeros(spec, n, n)
    for j, i in enumerate(order):
        P[i, j] = 1
    return P


def std_alternate(spec: FieldSpec, r: int) -> Mat:
    """The 2r x 2r block diagonal of r copies of [[0, 1], [-1, 0]]."""
    if r < 0:
        raise MatrixError(f"r must be non-negative, got {r}")
    A2 = from_rows(spec, [[0, 1], [-1, 0]])
    return block_diag(spec, [A2] * r)


def mat_K(spec: FieldSpec) -> Mat:
    I2 = identity(spec, 2)
    K = zeros(spec, 4, 4)
    K[0:2, 2:4] = I2
    K[2:4, 0:2] = -I2
    return K


def mat_Y(spec: FieldSpec) -> Mat:
    return from_rows(spec, [[0, 0, 1], [0, 0, 1], [-1, -1, 0]])


def is_alternate(X: Mat) -> bool:
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        return False
    return is_zero(X + X.T) and not np.diagonal(X.view(np.ndarray)).any()


def require_alternate(X: Mat) -> None:
    if not is_alternate(X):
        raise MatrixError("matrix is not alternate")


def _swap(T: Mat, M: Mat, a: int, b: int) -> Tuple[Mat, Mat]:
    if a == b:
        return T, M
    order = list(range(M.shape[0]))
    order[a], order[b] = order[b], order[a]
    T = T[:, order]
    M = M[order][:, order]
    return T, M


def alt_normalize(X: Mat) -> Tuple[Mat, int]:
    """Return (T, r) with T invertible and T^t X T = [A_2r, 0].

    Pivot: leftmost column with a nonzero entry below the finished blocks, smallest row in it.
    """
    require_alternate(X)
    GF = type(X)
    n = X.shape[0]
    T = GF.Identity(n) if n else X.copy()
    M = X.copy()
    pos = 0
    while pos + 1 < n:
        sub_block = M[pos:, pos:].view(np.ndarray)
        cols = np.flatnonzero(sub_block.any(axis=0))
        if cols.size == 0:
            break
        j = pos + int(cols[0])
        i = pos + int(np.flatnonzero(sub_block[:, j - pos])[0])
        T, M = _swap(T, M, pos, i)
        if j == pos:
            j = i
        T, M = _swap(T, M, pos + 1, j)

        D = GF.Identity(n)
        D[pos + 1, pos + 1] = GF(1) / M[pos, pos + 1]
        T, M = T @ D, D.T @ M @ D

        # w <- w - B(w, f) e + B(w, e) f for every later basis vector w
        E = GF.Identity(n)
        for k in range(pos + 2, n):
            E[pos, k] = -M[k, pos + 1]
            E[pos + 1, k] = M[k, pos]
        T, M = T @ E, E.T @ M @ E
        pos += 2
    return T, pos // 2


def complete_basis(spec: FieldSpec, cols: Mat) -> Mat:
    """Invertible n x n matrix whose leading columns are the given independent columns."""
    n, k = cols.shape
    if rank(cols) != k:
        raise MatrixError("columns to complete are not independent")
    M = cols.copy()
    for i in range(n):
        if M.shape[1] == n:
            break
        candidate = hconcat(spec, [M, basis_vector(spec, n, i + 1)])
        if rank(candidate) == candidate.shape[1]:
            M = candidate
    return M


def row_reducer(spec: FieldSpec, rows: Mat) -> Mat:
    """Invertible R with rows @ R = (I | 0) for a matrix of independent rows."""
    return inverse(transpose(complete_basis(spec, transpose(rows))))


def to_json(A: Mat) -> Dict[str, object]:
    return {'rows': int(A.shape[0]), 'cols': int(A.shape[1]), 'entries': as_ints(A).ravel().tolist()}


def from_json(spec: FieldSpec, data: Dict[str, object]) -> Mat:
    try:
        rows, cols, entries = int(data['rows']), int(data['cols']), list(data['entries'])
    except (KeyError, TypeError, ValueError) as e:
        raise MatrixError(f"malformed matrix encoding: {e}") from e
    if len(entries) != rows * cols:
        raise MatrixError(f"expected {rows * cols} entries, got {len(entries)}")
    if any(not 0 <= int(x) < spec.q for x in entries):
        raise MatrixError(f"entries must be canonical indices in [0, {spec.q})")
    return spec.GF(np.array(entries, dtype=np.int64).reshape(rows, cols))


def alternate_from_upper(spec: FieldSpec, n: int, upper: Sequence[int]) -> Mat:
    """Alternate matrix from its strictly-upper entries listed row-major."""
    X = zeros(spec, n, n)
    iu = np.triu_indices(n, 1)
    if len(upper) != len(iu[0]):
        raise MatrixError(f"expected {len(iu[0])} upper entries, got {len(upper)}")
    if len(upper):
        vals = spec.GF(np.asarray(upper, dtype=np.int64))
        X[iu] = vals
        X[(iu[1], iu[0])] = -vals
    return X


def upper_entries(X: Mat) -> List[int]:
    iu = np.triu_indices(X.shape[0], 1)
    return as_ints(X)[iu].tolist()
