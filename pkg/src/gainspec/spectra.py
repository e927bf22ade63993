"""Hermitian eigendecomposition and the spectral functionals built on it.

The eigensolver embeds H = X + iY as the real symmetric matrix
[[X, -Y], [Y, X]], diagonalizes that with cyclic Jacobi rotations and folds
the doubled spectrum back into n complex eigenpairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gain_core import GainGraph, GraphError, HermitianMatrix, adjacency

HERMITIAN_TOL = 1e-12
OFF_REL_TOL = 1e-12
MAX_SWEEPS = 100
RANK_REL_TOL = 1e-10
RANK_ABS_FLOOR = 1e-10


class EigenConvergenceError(ArithmeticError):
    def __init__(self, msg, residual):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # column j pairs with eigenvalues[j]
    residual: float
    sweeps: int = 0

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max(initial=0.0))

    def unitarity_defect(self) -> float:
        q = self.eigenvectors
        if q.size == 0:
            return 0.0
        return float(np.abs(q.conj().T @ q - np.eye(self.n)).max())


@dataclass(frozen=True)
class EnergyProfile:
    total: float
    per_vertex: tuple[float, ...]
    spectral_radius: float
    positive_count: int
    rank: int


def _round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of 0..m-1 (m even) so each round is a set of disjoint pairs."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            ps.append(min(a, b))
            qs.append(max(a, b))
        order = np.argsort(ps)
        rounds.append((np.array(ps)[order], np.array(qs)[order]))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


_ROUNDS_CACHE: dict[int, list] = {}


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_symmetric(a: np.ndarray, tol: float = OFF_REL_TOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi on a real symmetric matrix of even order.

    Returns ``(eigenvalues, eigenvectors, sweeps, off_norm)``, unsorted.
    Rotations within one round act on disjoint index pairs, so they commute
    and are applied together.
    """
    a = np.array(a, dtype=float)
    m = a.shape[0]
    v = np.eye(m)
    if m < 2:
        return a.diagonal().copy(), v, 0, 0.0
    rounds = _ROUNDS_CACHE.get(m)
    if rounds is None:
        rounds = _ROUNDS_CACHE[m] = _round_robin(m)
    target = tol * np.linalg.norm(a)
    sweeps = 0
    off = _off_norm(a)
    while off > target and sweeps < max_sweeps:
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > 0.0
            if not active.any():
                continue
            app = a[p, p]
            aqq = a[q, q]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                theta = (aqq - app) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # A <- J^T A J with J[p,p]=c, J[p,q]=s, J[q,p]=-s, J[q,q]=c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
        sweeps += 1
        off = _off_norm(a)
    return a.diagonal().copy(), v, sweeps, off


def _as_hermitian_array(m) -> np.ndarray:
    if isinstance(m, HermitianMatrix):
        return m.array
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise GraphError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if a.size and np.abs(a - a.conj().T).max() > HERMITIAN_TOL * scale:
        raise GraphError("matrix is not Hermitian")
    return a


def eigendecompose(m, max_sweeps: int = MAX_SWEEPS) -> SpectralDecomposition:
    """Eigenpairs of a Hermitian matrix, eigenvalues in descending order."""
    h = _as_hermitian_array(m)
    n = h.shape[0]
    if n == 0:
        return SpectralDecomposition(np.zeros(0), np.zeros((0, 0), dtype=complex), 0.0)
    x, y = h.real, h.imag
    big = np.block([[x, -y], [y, x]])
    vals, vecs, sweeps, off = jacobi_symmetric(big, max_sweeps=max_sweeps)

    order = np.argsort(vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    zs = vecs[:n, :] + 1j * vecs[n:, :]
    scale = max(1.0, float(np.abs(vals).max()))
    cluster_tol = 1e-10 * scale

    lam = []
    cols = []
    start = 0
    while start < 2 * n:
        stop = start + 1
        while stop < 2 * n and (vals[stop] - vals[stop - 1] <= cluster_tol or (stop - start) % 2):
            stop += 1
        _fold_cluster(h, zs[:, start:stop], (stop - start) // 2, lam, cols)
        start = stop

    lam = np.array(lam)
    q = np.column_stack(cols)
    desc = np.argsort(-lam, kind="stable")
    lam, q = lam[desc], q[:, desc]
    residual = float(np.linalg.norm(h @ q - q * lam, axis=0).max())
    if off > OFF_REL_TOL * np.linalg.norm(big) and residual > 1e-9 * max(1.0, float(np.abs(lam).max())):
        raise EigenConvergenceError(f"Jacobi did not converge in {sweeps} sweeps", residual)
    return SpectralDecomposition(lam, q, residual, sweeps)


def _fold_cluster(h, z, k, lam, cols):
    """Pick k orthonormal complex vectors from the 2k folded real ones (pivoted Gram-Schmidt)."""
    z = z.copy()
    chosen = []
    for _ in range(k):
        norms = np.linalg.norm(z, axis=0)
        j = int(np.argmax(norms))
        u = z[:, j] / norms[j]
        for w in chosen:
            u = u - w * np.vdot(w, u)
        u = u / np.linalg.norm(u)
        chosen.append(u)
        z = z - np.outer(u, u.conj() @ z)
    for u in chosen:
        lam.append(float(np.vdot(u, h @ u).real))
        cols.append(u)


def _spectrum(g_or_m) -> SpectralDecomposition:
    if isinstance(g_or_m, SpectralDecomposition):
        return g_or_m
    if isinstance(g_or_m, GainGraph):
        return eigendecompose(adjacency(g_or_m))
    return eigendecompose(g_or_m)


def rank_tolerance(eigenvalues) -> float:
    n = len(eigenvalues)
    rho = float(np.abs(eigenvalues).max(initial=0.0))
    return max(n * rho * RANK_REL_TOL, RANK_ABS_FLOOR)


def energy(g) -> float:
    return float(np.abs(_spectrum(g).eigenvalues).sum())


def vertex_energy(g) -> np.ndarray:
    """Diagonal of |A|: entry i is sum_j |q_ij|^2 |lambda_j|."""
    d = _spectrum(g)
    if d.n == 0:
        return np.zeros(0)
    return (np.abs(d.eigenvectors) ** 2) @ np.abs(d.eigenvalues)


def spectral_radius(g) -> float:
    return _spectrum(g).spectral_radius


def walk_gain_sum(g: GainGraph, k: int, p: int) -> float:
    """Sum of gains of closed directed k-walks at p, i.e. Re (A^k)_pp."""
    if k < 0:
        raise ValueError("walk length must be non-negative")
    a = adjacency(g).array
    val = np.linalg.matrix_power(a, k)[p, p] if g.n else 1.0
    if abs(complex(val).imag) > 1e-10 * max(1.0, abs(val)):
        raise ArithmeticError(f"diagonal of A^{k} has imaginary part {complex(val).imag}")
    return float(complex(val).real)


def numerical_rank(m) -> int:
    vals = _spectrum(m).eigenvalues
    return int(np.sum(np.abs(vals) > rank_tolerance(vals)))


def positive_eigenvalue_count(g) -> int:
    vals = _spectrum(g).eigenvalues
    return int(np.sum(vals > rank_tolerance(vals)))


def near_tolerance(eigenvalues, factor: float = 100.0) -> bool:
    """True when some eigenvalue sits close enough to the rank cutoff to make counts fragile."""
    tol = rank_tolerance(eigenvalues)
    a = np.abs(eigenvalues)
    return bool(np.any((a > tol / factor) & (a <= tol * factor)))


def singular_value_sum(m) -> float:
    """Sum of singular values via the Hermitian dilation [[0, M], [M*, 0]], whose spectrum is +-sigma."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise GraphError(f"expected a square matrix, got shape {a.shape}")
    if a.size == 0:
        return 0.0
    zero = np.zeros_like(a)
    dilation = np.block([[zero, a], [a.conj().T, zero]])
    return 0.5 * float(np.abs(eigendecompose(dilation).eigenvalues).sum())


def energy_profile(g: GainGraph, decomposition: SpectralDecomposition | None = None) -> EnergyProfile:
    d = decomposition or _spectrum(g)
    per_vertex = vertex_energy(d)
    tol = rank_tolerance(d.eigenvalues)
    return EnergyProfile(
        total=float(np.abs(d.eigenvalues).sum()),
        per_vertex=tuple(float(x) for x in per_vertex),
        spectral_radius=d.spectral_radius,
        positive_count=int(np.sum(d.eigenvalues > tol)),
        rank=int(np.sum(np.abs(d.eigenvalues) > tol)),
    )


def abs_power_diagonal(d: SpectralDecomposition, power: float) -> np.ndarray:
    """Diagonal of |A|^power from an eigendecomposition (zero eigenvalues contribute 0)."""
    a = np.abs(d.eigenvalues)
    with np.errstate(divide="ignore"):
        w = np.where(a > 0.0, a ** power, 0.0)
    return (np.abs(d.eigenvectors) ** 2) @ w
