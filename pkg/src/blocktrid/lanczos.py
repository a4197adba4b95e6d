"""Block Lanczos reduction of a Hermitian matrix to block tridiagonal form.

The driver orthonormalizes the starting block, then repeatedly applies the
matrix to the newest block and orthogonalizes against everything computed so
far (two passes of block Gram-Schmidt, so the certified block profile is not
destroyed by loss of orthogonality).  Rank loss in a candidate block shrinks
the block width permanently; a candidate of numerical rank zero before n
columns is a breakdown, which is logged and handled by restarting from the
first canonical basis vector not yet captured.  Across a breakdown boundary
the reduced matrix is block diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError
from .matcore import (
    DEFAULT_TOL,
    antihermitian_part,
    as_matrix,
    fro,
    hermitian_part,
    orthonormal_range,
    subspace_inclusion_residual,
)


@dataclass(frozen=True)
class BlockTridiagonalization:
    """Result of a block Lanczos run.

    ``basis`` is unitary with ``basis^H H basis = trid``; ``trid`` is Hermitian
    and exactly zero outside the block tridiagonal envelope induced by
    ``block_sizes``.  ``breakdown_events`` holds ``(step, columns_completed)``
    pairs, where ``step`` counts diagonal blocks finished when the breakdown
    was detected.
    """

    basis: np.ndarray
    trid: np.ndarray
    block_sizes: tuple[int, ...]
    breakdown_events: tuple[tuple[int, int], ...]
    restarted: bool

    @property
    def block_boundaries(self) -> tuple[int, ...]:
        """Cumulative column offsets 0 = c_0 < c_1 < ... < c_p = n."""
        out = [0]
        for w in self.block_sizes:
            out.append(out[-1] + w)
        return tuple(out)


def _project_out(U, cols, W, passes=2):
    """Return W with its components along U[:, :cols] removed."""
    if cols == 0:
        return W
    B = U[:, :cols]
    for _ in range(passes):
        W = W - B @ (B.conj().T @ W)
    return W


def block_lanczos(H, Z, tol: float = DEFAULT_TOL) -> BlockTridiagonalization:
    """Reduce Hermitian H to block tridiagonal form starting from block Z.

    Parameters
    ----------
    H : array_like (n, n)
        Hermitian matrix (checked to relative tolerance 1e-12).
    Z : array_like (n, l)
        Nonzero starting block, l <= n.  A 1-D array is taken as one column.
    tol : float
        Relative rank tolerance.  The orthonormal width of Z is decided
        against Z's own largest singular value; candidate blocks inside the
        iteration are ranked against ``tol * ||H||_F`` so that an invariant
        subspace registers as a breakdown.

    Returns
    -------
    BlockTridiagonalization
        The first ``rank(Z)`` basis columns span range(Z).  Block widths never
        grow within an unbroken run; each restart opens a width-1 run and the
        reduced matrix is block diagonal across every breakdown boundary.

    Raises
    ------
    ContractError
        If H is not Hermitian to relative tolerance 1e-12.
    ValueError
        If Z is identically zero.
    """
    H = as_matrix(H, "H")
    if H.shape[0] != H.shape[1]:
        raise DimensionError(f"H must be square, got shape {H.shape}")
    n = H.shape[0]
    scale = fro(H)
    if fro(H - H.conj().T) > 1e-12 * max(scale, 1e-300):
        raise ContractError("H is not Hermitian to relative tolerance 1e-12")
    Z = np.asarray(Z, dtype=np.complex128)
    if Z.ndim == 1:
        Z = Z[:, None]
    Z = as_matrix(Z, "Z")
    if Z.shape[0] != n:
        raise DimensionError(f"Z has {Z.shape[0]} rows, H is {n}x{n}")
    if Z.shape[1] > n:
        raise DimensionError(f"Z has {Z.shape[1]} > n = {n} columns")
    if fro(Z) == 0.0:
        raise ValueError("starting block Z is zero")

    cutoff = tol * scale if scale > 0 else tol

    U = np.zeros((n, n), dtype=np.complex128)
    Q0, s0 = orthonormal_range(Z, tol)
    U[:, :s0] = Q0
    cols = s0
    # (start column, width, run index) per diagonal block
    blocks: list[tuple[int, int, int]] = [(0, s0, 0)]
    events: list[tuple[int, int]] = []
    run = 0

    while cols < n:
        start, width, _ = blocks[-1]
        W = H @ U[:, start : start + width]
        W = _project_out(U, cols, W)
        Qw, sw, _ = np.linalg.svd(W, full_matrices=False)
        s_new = int(np.count_nonzero(sw > cutoff))
        if s_new == 0:
            events.append((len(blocks), cols))
            run += 1
            w = _restart_vector(U, cols, n, tol)
            U[:, cols] = w
            blocks.append((cols, 1, run))
            cols += 1
        else:
            U[:, cols : cols + s_new] = Qw[:, :s_new]
            blocks.append((cols, s_new, run))
            cols += s_new

    T = np.zeros((n, n), dtype=np.complex128)
    for i, (start, width, run_i) in enumerate(blocks):
        Ub = U[:, start : start + width]
        Ak = Ub.conj().T @ H @ Ub
        T[start : start + width, start : start + width] = (Ak + Ak.conj().T) / 2
        if i + 1 < len(blocks):
            nstart, nwidth, nrun = blocks[i + 1]
            if nrun == run_i:
                Un = U[:, nstart : nstart + nwidth]
                Bk = Un.conj().T @ H @ Ub
                T[nstart : nstart + nwidth, start : start + width] = Bk
                T[start : start + width, nstart : nstart + nwidth] = Bk.conj().T

    return BlockTridiagonalization(
        basis=U,
        trid=T,
        block_sizes=tuple(w for _, w, _ in blocks),
        breakdown_events=tuple(events),
        restarted=bool(events),
    )


def _restart_vector(U, cols, n, tol):
    """First canonical basis vector with a projection residual above tol,
    orthogonalized against the computed columns."""
    for j in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[j] = 1.0
        r = e - U[:, :cols] @ (U[:, :cols].conj().T @ e)
        if np.linalg.norm(r) > tol:
            r = r - U[:, :cols] @ (U[:, :cols].conj().T @ r)
            return r / np.linalg.norm(r)
    raise RuntimeError("no restart direction found; basis already complete")


def krylov_levels(M, Z, j_max: int, tol: float = DEFAULT_TOL):
    """Orthonormal bases of the nested block Krylov spaces K_0 .. K_{j_max}.

    K_j(M, Z) = range([Z, M Z, ..., M^j Z]).  Returns ``(B, dims)`` where the
    level-j basis is ``B[:, :dims[j]]``; new directions are only ever appended,
    so level bases are prefixes of one another.
    """
    M = as_matrix(M, "M")
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"M must be square, got shape {M.shape}")
    n = M.shape[0]
    Z = np.asarray(Z, dtype=np.complex128)
    if Z.ndim == 1:
        Z = Z[:, None]
    Z = as_matrix(Z, "Z")
    if Z.shape[0] != n:
        raise DimensionError(f"Z has {Z.shape[0]} rows, M is {n}x{n}")
    if fro(Z) == 0.0:
        raise ValueError("starting block Z is zero")
    if j_max < 0:
        raise ValueError("j_max must be >= 0")

    B = np.zeros((n, n), dtype=np.complex128)
    Q0, s0 = orthonormal_range(Z, tol)
    B[:, :s0] = Q0
    dims = [s0]
    f_start, f_width = 0, s0
    for _ in range(j_max):
        if f_width == 0 or dims[-1] == n:
            dims.append(dims[-1])
            f_width = 0
            continue
        R = M @ B[:, f_start : f_start + f_width]
        pre = float(np.linalg.norm(R, 2))
        if pre == 0.0:
            dims.append(dims[-1])
            f_width = 0
            continue
        c = dims[-1]
        R = _project_out(B, c, R)
        Qr, sr, _ = np.linalg.svd(R, full_matrices=False)
        keep = int(np.count_nonzero(sr > tol * pre))
        if keep == 0:
            dims.append(dims[-1])
            f_width = 0
            continue
        B[:, c : c + keep] = Qr[:, :keep]
        dims.append(c + keep)
        f_start, f_width = c, keep
    return B, dims


def krylov_basis(M, Z, j: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of K_j(M, Z) = range([Z, M Z, ..., M^j Z])."""
    B, dims = krylov_levels(M, Z, j, tol)
    return B[:, : dims[-1]].copy()


def krylov_inclusion_check(A, Z, j_max: int, tol: float = DEFAULT_TOL):
    """Residuals of K_j(A_AH, Z) inside K_j(A_H, Z) for j = 0 .. j_max.

    A_H and A_AH are the Hermitian and antihermitian parts of A.  For the
    matrix classes with Krylov inclusion (certified almost normal matrices
    with a suitable starting block, curve-normal plus rank one) every residual
    is at the tolerance level.
    """
    A = as_matrix(A, "A")
    AH = hermitian_part(A)
    AAH = antihermitian_part(A)
    Bx, dx = krylov_levels(AAH, Z, j_max, tol)
    By, dy = krylov_levels(AH, Z, j_max, tol)
    return [
        subspace_inclusion_residual(Bx[:, : dx[j]], By[:, : dy[j]], tol)
        for j in range(j_max + 1)
    ]
