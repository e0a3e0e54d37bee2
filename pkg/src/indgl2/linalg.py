"""Exact subspace algebra over a finite field K.

Vectors are rows of field codes; a LinMap with matrix M sends the row vector
v to v @ M (row i of M is the image of the i-th domain basis vector).  A
Subspace is stored in reduced row echelon form, which is unique, so equality
of subspaces is equality of row arrays.  Everything here is dense and exact;
ambients beyond a couple thousand dimensions are out of scope.
"""

import numpy as np

from . import _kernels
from .errors import DimensionMismatch
from .gf import PrimeExtField


class Subspace:
    """Row span in K^ambient, held in reduced echelon form."""

    __slots__ = ("field", "ambient", "rows", "pivots")

    def __init__(self, field: PrimeExtField, ambient: int, rows: np.ndarray, pivots: np.ndarray, _canonical: bool = False):
        self.field = field
        self.ambient = ambient
        if not _canonical:
            raise ValueError("use echelon() to build subspaces")
        self.rows = rows
        self.pivots = pivots

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field is other.field
            and self.ambient == other.ambient
            and self.rows.shape == other.rows.shape
            and np.array_equal(self.rows, other.rows)
        )

    def __hash__(self):
        return hash((id(self.field), self.ambient, self.rows.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Remainder of v after clearing all pivot coordinates; zero iff v is a member."""
        F = self.field
        out = np.array(v, dtype=np.int32)
        if out.shape != (self.ambient,):
            raise DimensionMismatch(f"vector length {out.shape} vs ambient {self.ambient}")
        for k, col in enumerate(self.pivots):
            c = out[col]
            if c != 0:
                out = F.ADD[out, F.MUL[int(F.NEG[c]), self.rows[k]]]
        return out


def echelon(vectors, field: PrimeExtField, ambient: int | None = None) -> Subspace:
    rows = np.asarray(vectors, dtype=np.int32)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if rows.size == 0:
        if ambient is None:
            raise DimensionMismatch("empty vector list needs an explicit ambient")
        return Subspace(field, ambient, np.zeros((0, ambient), dtype=np.int32), np.empty(0, dtype=np.int64), _canonical=True)
    amb = rows.shape[1]
    if ambient is not None and ambient != amb:
        raise DimensionMismatch(f"ambient {ambient} vs vector length {amb}")
    R, piv = _kernels.rref(rows, field)
    R = R[: len(piv)]
    return Subspace(field, amb, np.ascontiguousarray(R), piv, _canonical=True)


def full_space(field: PrimeExtField, ambient: int) -> Subspace:
    eye = np.zeros((ambient, ambient), dtype=np.int32)
    np.fill_diagonal(eye, 1)
    return Subspace(field, ambient, eye, np.arange(ambient, dtype=np.int64), _canonical=True)


def member(v, S: Subspace) -> bool:
    return not np.any(S.reduce(v))


class LinMap:
    """K-linear map as a matrix; row i is the image of domain basis vector i."""

    __slots__ = ("field", "matrix", "domain", "codomain")

    def __init__(self, field: PrimeExtField, matrix):
        self.field = field
        self.matrix = np.ascontiguousarray(matrix, dtype=np.int32)
        if self.matrix.ndim != 2:
            raise DimensionMismatch("matrix must be 2-dimensional")
        self.domain, self.codomain = self.matrix.shape

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int32)
        if v.shape != (self.domain,):
            raise DimensionMismatch(f"vector length {v.shape} vs domain {self.domain}")
        return _kernels.vec_mat(v, self.matrix, self.field)

    def compose(self, then: "LinMap") -> "LinMap":
        if self.codomain != then.domain:
            raise DimensionMismatch("composition shape mismatch")
        return LinMap(self.field, _kernels.matmul(self.matrix, then.matrix, self.field))

    def minus_identity(self) -> "LinMap":
        if self.domain != self.codomain:
            raise DimensionMismatch("needs a square matrix")
        F = self.field
        M = self.matrix.copy()
        d = np.arange(self.domain)
        M[d, d] = F.ADD[M[d, d], int(F.NEG[1])]
        return LinMap(F, M)

    def __repr__(self):
        return f"LinMap({self.domain} -> {self.codomain})"


def identity_map(field: PrimeExtField, n: int) -> LinMap:
    eye = np.zeros((n, n), dtype=np.int32)
    np.fill_diagonal(eye, 1)
    return LinMap(field, eye)


def kernel(M: LinMap) -> Subspace:
    """{v : v @ M = 0} via row reduction of [M | I]."""
    F = M.field
    n = M.domain
    aug = np.zeros((n, M.codomain + n), dtype=np.int32)
    aug[:, : M.codomain] = M.matrix
    aug[np.arange(n), M.codomain + np.arange(n)] = 1
    R, piv = _kernels.rref(aug, F)
    R = R[: len(piv)]
    null_rows = R[piv >= M.codomain][:, M.codomain :]
    return echelon(null_rows, F, ambient=n)


def image(M: LinMap) -> Subspace:
    return echelon(M.matrix, M.field, ambient=M.codomain)


def subspace_sum(S: Subspace, T: Subspace) -> Subspace:
    _same_ambient(S, T)
    return echelon(np.vstack([S.rows, T.rows]) if S.dim or T.dim else S.rows, S.field, ambient=S.ambient)


def intersect(S: Subspace, T: Subspace) -> Subspace:
    """Zassenhaus: reduce [[S|S],[T|0]]; rows with zero left half span S ∩ T on the right."""
    _same_ambient(S, T)
    F = S.field
    n = S.ambient
    if S.dim == 0 or T.dim == 0:
        return echelon(np.zeros((0, n), dtype=np.int32), F, ambient=n)
    top = np.hstack([S.rows, S.rows])
    bot = np.hstack([T.rows, np.zeros_like(T.rows)])
    R, piv = _kernels.rref(np.vstack([top, bot]), F)
    R = R[: len(piv)]
    inter_rows = R[piv >= n][:, n:]
    return echelon(inter_rows, F, ambient=n)


def preimage(M: LinMap, S: Subspace) -> Subspace:
    """{v : v @ M ∈ S}; reduction of rows mod S is linear, then a kernel solve."""
    if S.ambient != M.codomain:
        raise DimensionMismatch("subspace ambient must equal map codomain")
    reduced = np.vstack([S.reduce(row) for row in M.matrix]) if M.domain else M.matrix.copy()
    return kernel(LinMap(M.field, reduced.reshape(M.domain, M.codomain)))


def quotient_dim(S: Subspace, T: Subspace) -> int:
    """dim(T/S) for S ⊆ T."""
    _same_ambient(S, T)
    for row in S.rows:
        if not member(row, T):
            raise DimensionMismatch("first subspace is not contained in the second")
    return T.dim - S.dim


def _same_ambient(S: Subspace, T: Subspace):
    if S.field is not T.field or S.ambient != T.ambient:
        raise DimensionMismatch("subspaces live in different ambients")


def fixed_space(ops, field: PrimeExtField | None = None, ambient: int | None = None) -> Subspace:
    """∩ ker(u - id), computed by iterative restriction; result is re-verified."""
    ops = list(ops)
    if not ops:
        if field is None or ambient is None:
            raise DimensionMismatch("empty op list needs explicit field and ambient")
        return full_space(field, ambient)
    F = ops[0].field
    n = ops[0].domain
    for u in ops:
        if u.domain != u.codomain or u.domain != n or u.field is not F:
            raise DimensionMismatch("fixed_space needs square maps on one ambient")
    basis = None  # None means the full space
    for u in ops:
        delta = u.minus_identity().matrix
        if basis is None:
            coeffs = kernel(LinMap(F, delta))
            basis = coeffs.rows
        else:
            if basis.shape[0] == 0:
                break
            restricted = _kernels.matmul(basis, delta, F)
            coeffs = kernel(LinMap(F, restricted))
            basis = _kernels.matmul(coeffs.rows, basis, F)
    out = echelon(basis if basis is not None else np.zeros((0, n), dtype=np.int32), F, ambient=n)
    for u in ops:  # the result must be genuinely fixed
        for row in out.rows:
            assert np.array_equal(u.apply(row), row), "fixed_space post-check failed"
    return out


def coinvariant_complement(ops, field: PrimeExtField | None = None, ambient: int | None = None) -> Subspace:
    """Σ image(u - id); the coinvariants are the quotient by this subspace."""
    ops = list(ops)
    if not ops:
        if field is None or ambient is None:
            raise DimensionMismatch("empty op list needs explicit field and ambient")
        return echelon(np.zeros((0, ambient), dtype=np.int32), field, ambient=ambient)
    F = ops[0].field
    n = ops[0].domain
    stacked = []
    for u in ops:
        if u.domain != u.codomain or u.domain != n or u.field is not F:
            raise DimensionMismatch("coinvariant_complement needs square maps on one ambient")
        stacked.append(u.minus_identity().matrix)
    return echelon(np.vstack(stacked), F, ambient=n)
