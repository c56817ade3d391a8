"""Dense exact linear algebra over a prime field F_p.

Matrices are plain 2-D ``numpy`` arrays of dtype int64 holding residues in
``[0, p)``.  Every routine returns a fresh array; inputs are never mutated.
Elimination always pivots on the first nonzero entry of a column, so all
bases produced here are deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class FieldCtx:
    """The prime field F_p."""

    p: int

    def __post_init__(self):
        p = self.p
        if not isinstance(p, (int, np.integer)) or not 2 <= p < 2**31:
            raise ValueError(f"modulus must be an integer in [2, 2^31), got {p!r}")
        if not _is_prime(int(p)):
            raise ValueError(f"modulus {p} is not prime")
        object.__setattr__(self, "p", int(p))

    def mat(self, entries, shape=None) -> np.ndarray:
        """Reduce ``entries`` into a residue matrix (optionally reshaped)."""
        a = np.array(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
        return a % self.p

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def inv(self, a: int) -> int:
        return pow(int(a) % self.p, -1, self.p)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def matmul(A: np.ndarray, B: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Product ``A @ B`` reduced mod p, without int64 overflow."""
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
    p = ctx.p
    k = A.shape[1]
    if (p - 1) * (p - 1) * max(k, 1) < _INT64_SAFE:
        return (A @ B) % p
    # Python integers for large moduli.
    out = (A.astype(object) @ B.astype(object)) % p
    return out.astype(np.int64)


def mul(ctx: FieldCtx, *mats: np.ndarray) -> np.ndarray:
    """Chain product of several matrices."""
    out = mats[0]
    for m in mats[1:]:
        out = matmul(out, m, ctx)
    return out


def rref(M: np.ndarray, ctx: FieldCtx) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    p = ctx.p
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * ctx.inv(A[r, c])) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: np.ndarray, ctx: FieldCtx) -> int:
    if M.size == 0:
        return 0
    return len(rref(M, ctx)[1])


def kernel_basis(M: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Columns form a basis of ker M, one per free column in ascending order."""
    rows, cols = M.shape
    if rows == 0:
        return ctx.eye(cols)
    R, pivots = rref(M, ctx)
    free = [j for j in range(cols) if j not in set(pivots)]
    K = ctx.zeros(cols, len(free))
    for k, j in enumerate(free):
        K[j, k] = 1
        for i, pc in enumerate(pivots):
            K[pc, k] = (-R[i, j]) % ctx.p
    return K


def solve(A: np.ndarray, B: np.ndarray, ctx: FieldCtx) -> np.ndarray | None:
    """A particular solution X of ``A X = B`` (free variables set to 0), or None."""
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"row mismatch: A is {A.shape}, B is {B.shape}")
    n = A.shape[1]
    if A.shape[0] == 0:
        return ctx.zeros(n, B.shape[1])
    R, pivots = rref(np.hstack([A, B]), ctx)
    if pivots and pivots[-1] >= n:
        return None
    X = ctx.zeros(n, B.shape[1])
    for i, pc in enumerate(pivots):
        X[pc] = R[i, n:]
    return X


def inverse(A: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"not square: {A.shape}")
    X = solve(A, ctx.eye(n), ctx)
    if X is None:
        raise ValueError("matrix is singular")
    return X


def image_basis(M: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """The pivot columns of M, a basis of its column space."""
    if M.size == 0:
        return ctx.zeros(M.shape[0], 0)
    _, pivots = rref(M, ctx)
    return M[:, pivots] % ctx.p


def complement(U: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Unit vectors W such that ``[U | W]`` is invertible (U has independent columns)."""
    m, k = U.shape
    if k == 0:
        return ctx.eye(m)
    _, pivots = rref(U.T, ctx)
    if len(pivots) != k:
        raise ValueError("columns are not linearly independent")
    rest = [j for j in range(m) if j not in set(pivots)]
    return ctx.eye(m)[:, rest]


def cokernel_projection(M: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """A surjection Π with ker Π = im M (rows span the annihilator of im M)."""
    return kernel_basis(M.T, ctx).T.copy()


def is_injective(M: np.ndarray, ctx: FieldCtx) -> bool:
    return rank(M, ctx) == M.shape[1]


def is_surjective(M: np.ndarray, ctx: FieldCtx) -> bool:
    return rank(M, ctx) == M.shape[0]


def random_matrix(rows: int, cols: int, ctx: FieldCtx, rng) -> np.ndarray:
    """Uniform random matrix; ``rng`` is a :class:`random.Random`."""
    vals = [rng.randrange(ctx.p) for _ in range(rows * cols)]
    return np.array(vals, dtype=np.int64).reshape(rows, cols)


def random_invertible(n: int, ctx: FieldCtx, rng) -> np.ndarray:
    while True:
        T = random_matrix(n, n, ctx, rng)
        if rank(T, ctx) == n:
            return T
