"""Block profile detection and rank tracking under shifted QR iteration.

``block_profile`` certifies the shape of a reduced matrix: it finds the
partition with the smallest achievable maximum block size whose block
tridiagonal envelope covers every entry above the threshold.  The QR tracker
runs explicit single-shift steps on a block tridiagonal matrix while carrying
the commutator perturbation along the same similarity, recording the numerical
ranks of the upper triangular blocks that lie outside the initial profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError
from .matcore import DEFAULT_TOL, as_matrix, commutator, fro


@dataclass(frozen=True)
class BlockProfile:
    """A block tridiagonal envelope: sizes, their maximum, and the Frobenius
    norm of whatever the matrix leaves outside it."""

    block_sizes: tuple[int, ...]
    max_block: int
    off_profile_norm: float

    @property
    def boundaries(self) -> tuple[tuple[int, int], ...]:
        """Half-open (start, end) index ranges of the blocks."""
        out = []
        start = 0
        for w in self.block_sizes:
            out.append((start, start + w))
            start += w
        return tuple(out)


def _envelope_mask(sizes, n: int) -> np.ndarray:
    idx = np.repeat(np.arange(len(sizes)), sizes)
    if idx.size != n:
        raise DimensionError(
            f"profile sizes sum to {idx.size}, matrix has order {n}"
        )
    return np.abs(idx[:, None] - idx[None, :]) <= 1


def _column_reach(T: np.ndarray, thr: float) -> np.ndarray:
    """For each column j, the last row index where T or T^T exceeds thr
    (at least j itself)."""
    n = T.shape[0]
    big = np.maximum(np.abs(T), np.abs(T).T) > thr
    rows = np.where(big, np.arange(n)[:, None], -1)
    return np.maximum(rows.max(axis=0), np.arange(n))


def block_profile(T, tol: float = DEFAULT_TOL) -> BlockProfile:
    """Detect the block tridiagonal profile of T at threshold tol * ||T||_F.

    A boundary pair (c, c') is admissible when no column left of c reaches a
    row at or beyond c', which makes validity a condition on consecutive
    boundaries only.  A dynamic program over boundary positions then yields
    the partition with the smallest achievable maximum block size, taking the
    earliest boundary whenever there is a choice.  A dense matrix degenerates
    to one or two large blocks.
    """
    T = as_matrix(T, "T")
    if T.shape[0] != T.shape[1]:
        raise DimensionError("T must be square")
    n = T.shape[0]
    thr = tol * fro(T)
    low = _column_reach(T, thr)
    # M[c] = furthest row reached by any column left of boundary c
    M = np.full(n + 1, -1, dtype=int)
    if n > 0:
        M[1:] = np.maximum.accumulate(low)
    # f[c] = smallest achievable maximum block size on [c, n)
    f = np.zeros(n + 1, dtype=int)
    for c in range(n - 1, -1, -1):
        lo = max(c + 1, int(M[c]) + 1)
        f[c] = min(max(cp - c, int(f[cp])) for cp in range(lo, n + 1))
    bounds = [0]
    c = 0
    while c < n:
        lo = max(c + 1, int(M[c]) + 1)
        for cp in range(lo, n + 1):
            if max(cp - c, int(f[cp])) == f[c]:
                bounds.append(cp)
                c = cp
                break
    sizes = tuple(b - a for a, b in zip(bounds, bounds[1:]))
    mask = _envelope_mask(sizes, n)
    off = float(np.linalg.norm(T[~mask]))
    return BlockProfile(block_sizes=sizes, max_block=max(sizes), off_profile_norm=off)


def off_profile_residual(T, profile) -> float:
    """Frobenius norm of T outside the envelope of the given profile.

    ``profile`` is a BlockProfile or a plain sequence of block sizes, letting
    a claimed shape be checked instead of the detected one.
    """
    T = as_matrix(T, "T")
    if T.shape[0] != T.shape[1]:
        raise DimensionError("T must be square")
    sizes = tuple(getattr(profile, "block_sizes", profile))
    if any(w < 1 for w in sizes):
        raise DimensionError("profile sizes must be positive")
    mask = _envelope_mask(sizes, T.shape[0])
    return float(np.linalg.norm(T[~mask]))


@dataclass(frozen=True)
class QrStepRecord:
    """One shifted QR step: the shift, the ranks of the upper blocks outside
    the initial profile, the perturbation residual, and the relative mass
    outside the initial envelope."""

    step: int
    shift: complex
    off_profile_block_ranks: tuple[int, ...]
    c_residual: float
    profile_growth: float


@dataclass(frozen=True)
class QrTrackReport:
    iterations: tuple[QrStepRecord, ...]
    converged_eigenvalues: tuple[complex, ...]
    initial_profile: BlockProfile
    final_matrix: np.ndarray
    final_perturbation: np.ndarray


def _wilkinson_shift(block) -> complex:
    (a, b), (c, d) = block
    tr = a + d
    disc = np.sqrt((a - d) ** 2 + 4 * b * c + 0j)
    mu1 = (tr + disc) / 2
    mu2 = (tr - disc) / 2
    return complex(mu1) if abs(mu1 - d) <= abs(mu2 - d) else complex(mu2)


def qr_iteration_tracked(
    A0, C0, steps: int, tol: float = DEFAULT_TOL
) -> QrTrackReport:
    """Run explicit Wilkinson-shifted QR steps, tracking rank structure.

    The input must already be block tridiagonal with blocks of size at most 4
    (reduce it first otherwise).  Each step factors A_k - shift I of the
    active window, forms the similarity A_{k+1} = Q^H A_k Q, and applies the
    same congruence to the perturbation C_k, which preserves the commutator
    relation.  Per step the report records the numerical rank of every upper
    triangular block strictly outside the initial profile (row block index at
    least two below the column block index, enumerated row-major) at cutoff
    tol * ||A_0||_F.  Trailing eigenvalues deflate when the last active row
    below the diagonal falls under the same cutoff; the iteration stops early
    once everything has converged.
    """
    A = as_matrix(A0, "A0").copy()
    C = as_matrix(C0, "C0").copy()
    if A.shape != C.shape or A.shape[0] != A.shape[1]:
        raise DimensionError("A0 and C0 must be square with equal shape")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    n = A.shape[0]
    profile = block_profile(A, tol)
    if profile.max_block > 4:
        raise ContractError(
            f"input is not block tridiagonal with blocks <= 4 "
            f"(detected maximum {profile.max_block}); reduce the matrix first"
        )
    ranges = profile.boundaries
    outside = [
        (ra, rb)
        for i, ra in enumerate(ranges)
        for j, rb in enumerate(ranges)
        if j >= i + 2
    ]
    scale = fro(A)
    cut = tol * scale
    eigs: list[complex] = []
    m = n

    def deflate():
        nonlocal m
        while m >= 2 and np.linalg.norm(A[m - 1, : m - 1]) <= cut:
            eigs.append(complex(A[m - 1, m - 1]))
            m -= 1
        if m == 1:
            eigs.append(complex(A[0, 0]))
            m = 0

    def block_ranks():
        out = []
        for (r0, r1), (c0, c1) in outside:
            sv = np.linalg.svd(A[r0:r1, c0:c1], compute_uv=False)
            out.append(int(np.count_nonzero(sv > cut)))
        return tuple(out)

    records = []
    deflate()
    for step in range(1, steps + 1):
        if m == 0:
            break
        shift = _wilkinson_shift(A[m - 2 : m, m - 2 : m])
        try:
            Q, R = np.linalg.qr(A[:m, :m] - shift * np.eye(m))
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise ContractError(f"QR factorization failed: {exc}") from exc
        A[:m, :m] = R @ Q + shift * np.eye(m)
        A[:m, m:] = Q.conj().T @ A[:m, m:]
        A[m:, :m] = A[m:, :m] @ Q
        C[:m, :m] = Q.conj().T @ C[:m, :m] @ Q
        C[:m, m:] = Q.conj().T @ C[:m, m:]
        C[m:, :m] = C[m:, :m] @ Q
        c_res = fro(commutator(A) - (C @ A - A @ C)) / fro(A) ** 2
        records.append(
            QrStepRecord(
                step=step,
                shift=shift,
                off_profile_block_ranks=block_ranks(),
                c_residual=float(c_res),
                profile_growth=float(off_profile_residual(A, profile) / fro(A)),
            )
        )
        deflate()
    return QrTrackReport(
        iterations=tuple(records),
        converged_eigenvalues=tuple(eigs),
        initial_profile=profile,
        final_matrix=A,
        final_perturbation=C,
    )
