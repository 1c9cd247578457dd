"""Dense Hermitian linear algebra with a diagonal fast path.

Operators are immutable after construction.  Diagonal operators store only
their diagonal; spectral operations on them never build the dense matrix,
which keeps large diagonal scenario states cheap.  Materializing the dense
matrix of a diagonal operator is tracked so scenarios can assert the fast
path was never left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_REL_TOL = 1e-10
TRACE_ONE_TOL = 1e-10


class LinearAlgebraError(Exception):
    """Raised on eigensolver failures and ill-posed spectral calls."""


# Count of dense materializations of diagonal operators; scenarios with
# diagonal states assert this stays constant across a run.
_DENSE_MATERIALIZATIONS = 0


def dense_materialization_count() -> int:
    return _DENSE_MATERIALIZATIONS


class HermitianOperator:
    """A d x d Hermitian matrix, symmetrized at construction."""

    __slots__ = ("dim", "is_diagonal", "_diag", "_mat")

    def __init__(self, matrix=None, *, diagonal=None):
        if (matrix is None) == (diagonal is None):
            raise ValueError("provide exactly one of matrix= or diagonal=")
        if diagonal is not None:
            d = np.asarray(diagonal, dtype=float).copy()
            if d.ndim != 1 or d.size == 0:
                raise ValueError("diagonal must be a nonempty 1-d array")
            self.dim = int(d.size)
            self.is_diagonal = True
            self._diag = d
            self._mat = None
        else:
            m = np.asarray(matrix, dtype=complex)
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
                raise ValueError(f"matrix must be square and nonempty, got shape {m.shape}")
            m = 0.5 * (m + m.conj().T)
            self.dim = int(m.shape[0])
            self.is_diagonal = False
            self._diag = None
            self._mat = m

    @property
    def matrix(self) -> np.ndarray:
        if self._mat is None:
            global _DENSE_MATERIALIZATIONS
            _DENSE_MATERIALIZATIONS += 1
            self._mat = np.diag(self._diag).astype(complex)
        return self._mat

    @property
    def diag(self) -> np.ndarray:
        """Real diagonal entries (works for dense operators too)."""
        if self.is_diagonal:
            return self._diag
        return np.real(np.diagonal(self._mat))

    def trace(self) -> float:
        return float(np.sum(self.diag))

    def trace_norm(self) -> float:
        if self.is_diagonal:
            return float(np.sum(np.abs(self._diag)))
        return float(np.sum(np.abs(np.linalg.eigvalsh(self._mat))))

    def operator_norm(self) -> float:
        if self.is_diagonal:
            return float(np.max(np.abs(self._diag))) if self.dim else 0.0
        return float(np.max(np.abs(np.linalg.eigvalsh(self._mat))))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in non-increasing order."""
        if self.is_diagonal:
            return np.sort(self._diag)[::-1].copy()
        return np.linalg.eigvalsh(self._mat)[::-1].copy()

    def add(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_dim(other)
        if self.is_diagonal and other.is_diagonal:
            return HermitianOperator(diagonal=self._diag + other._diag)
        return HermitianOperator(self.matrix + other.matrix)

    def sub(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_dim(other)
        if self.is_diagonal and other.is_diagonal:
            return HermitianOperator(diagonal=self._diag - other._diag)
        return HermitianOperator(self.matrix - other.matrix)

    def scale(self, c: float) -> "HermitianOperator":
        if self.is_diagonal:
            return HermitianOperator(diagonal=c * self._diag)
        return HermitianOperator(c * self.matrix)

    def _check_dim(self, other: "HermitianOperator"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def allclose(self, other: "HermitianOperator", atol=1e-10) -> bool:
        if self.is_diagonal and other.is_diagonal:
            return bool(np.allclose(self._diag, other._diag, atol=atol))
        return bool(np.allclose(self.matrix, other.matrix, atol=atol))

    def __repr__(self):
        kind = "diagonal" if self.is_diagonal else "dense"
        return f"<{type(self).__name__} dim={self.dim} {kind}>"


class PositiveOperator(HermitianOperator):
    """Hermitian operator with spectrum >= -tau_psd; eigenvalues clamp to 0 on read."""

    __slots__ = ()

    def __init__(self, matrix=None, *, diagonal=None):
        super().__init__(matrix, diagonal=diagonal)
        if self.is_diagonal:
            lam_min = float(np.min(self._diag))
            lam_max = float(np.max(self._diag))
        else:
            eigs = np.linalg.eigvalsh(self._mat)
            lam_min = float(eigs[0])
            lam_max = float(eigs[-1])
        tol = PSD_REL_TOL * max(lam_max, 0.0) + 1e-15
        if lam_min < -tol:
            raise ValueError(f"operator is not PSD: min eigenvalue {lam_min:.3e} < -{tol:.3e}")

    def clamped_eigenvalues(self) -> np.ndarray:
        return np.clip(self.eigenvalues(), 0.0, None)

    def rank(self, rank_tol: float | None = None) -> int:
        lam = self.clamped_eigenvalues()
        tol = default_rank_tol(self.dim, lam[0] if lam.size else 0.0) if rank_tol is None else rank_tol
        return int(np.count_nonzero(lam > tol))


class DensityOperator(PositiveOperator):
    """Trace-one positive operator (a quantum state)."""

    __slots__ = ()

    def __init__(self, matrix=None, *, diagonal=None):
        super().__init__(matrix, diagonal=diagonal)
        t = self.trace()
        if abs(t - 1.0) > TRACE_ONE_TOL:
            raise ValueError(f"density operator must have unit trace, got {t!r}")


class Projector(HermitianOperator):
    """Orthogonal projector with known rank."""

    __slots__ = ("rank",)

    def __init__(self, matrix=None, *, diagonal=None, rank: int | None = None):
        super().__init__(matrix, diagonal=diagonal)
        if self.is_diagonal:
            d = self._diag
            if not np.all((np.abs(d) < 1e-10) | (np.abs(d - 1.0) < 1e-10)):
                raise ValueError("diagonal projector entries must be 0 or 1")
            inferred = int(np.count_nonzero(d > 0.5))
        else:
            m = self._mat
            if not np.allclose(m @ m, m, atol=1e-10):
                raise ValueError("P^2 != P beyond tolerance 1e-10")
            inferred = int(round(self.trace()))
        if rank is None:
            rank = inferred
        if abs(self.trace() - rank) > 1e-8:
            raise ValueError(f"trace {self.trace()} does not match rank {rank}")
        self.rank = rank

    def complement(self) -> "Projector":
        if self.is_diagonal:
            return Projector(diagonal=1.0 - self._diag, rank=self.dim - self.rank)
        return Projector(np.eye(self.dim) - self.matrix, rank=self.dim - self.rank)

    def leq(self, other: "Projector", atol=1e-9) -> bool:
        """Range inclusion: P <= Q iff QP = P."""
        if self.is_diagonal and other.is_diagonal:
            return bool(np.all(other._diag[self._diag > 0.5] > 0.5))
        return bool(np.allclose(other.matrix @ self.matrix, self.matrix, atol=atol))


def default_rank_tol(dim: int, lam_max: float) -> float:
    return dim * 1e-14 * max(lam_max, 0.0)


def identity(dim: int) -> Projector:
    return Projector(diagonal=np.ones(dim), rank=dim)


def zero_operator(dim: int) -> PositiveOperator:
    return PositiveOperator(diagonal=np.zeros(dim))


def coordinate_projector(dim: int, indices) -> Projector:
    d = np.zeros(dim)
    d[list(indices)] = 1.0
    return Projector(diagonal=d, rank=len(list(indices)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in non-increasing order with phase-canonicalized eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns; eigenvectors[:, i] pairs with eigenvalues[i]
    multiplicity_groups: list = field(default_factory=list)  # (start, stop) index ranges

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _canonical_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first component above 1e-12 is positive real."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            pivot = col[nz[0]]
            out[:, j] = col * (np.conj(pivot) / abs(pivot))
    return out


def _multiplicity_groups(lam: np.ndarray, gap_tol: float) -> list:
    groups = []
    start = 0
    for i in range(1, lam.size + 1):
        if i == lam.size or lam[start] - lam[i] > gap_tol:
            groups.append((start, i))
            start = i
    return groups


def eigh(a: HermitianOperator, gap_tol: float | None = None) -> SpectralDecomposition:
    """Spectral decomposition, eigenvalues sorted non-increasing.

    Ordering is deterministic: descending eigenvalues with stable index
    tie-break, eigenvector phases canonicalized to a positive-real pivot.
    """
    if a.is_diagonal:
        order = np.argsort(-a.diag, kind="stable")
        lam = a.diag[order].copy()
        vec = np.zeros((a.dim, a.dim), dtype=complex)
        vec[order, np.arange(a.dim)] = 1.0
    else:
        try:
            w, v = np.linalg.eigh(a.matrix)
        except np.linalg.LinAlgError as exc:
            norm = float(np.linalg.norm(a.matrix))
            raise LinearAlgebraError(
                f"eigensolver failed for dim-{a.dim} operator (frobenius norm {norm:.3e})"
            ) from exc
        lam = w[::-1].copy()
        vec = _canonical_phase(v[:, ::-1])
    lam_max = float(np.max(np.abs(lam))) if lam.size else 0.0
    tol = 1e-9 * lam_max if gap_tol is None else gap_tol
    return SpectralDecomposition(lam, vec, _multiplicity_groups(lam, tol))


def apply_spectral_function(a: PositiveOperator, f, rank_tol: float | None = None) -> HermitianOperator:
    """V f(Lambda) V*; eigenvalues at or below the rank tolerance become exactly 0."""
    if a.is_diagonal:
        lam = np.clip(a.diag, 0.0, None)
        tol = default_rank_tol(a.dim, float(np.max(lam, initial=0.0))) if rank_tol is None else rank_tol
        lam = np.where(lam > tol, lam, 0.0)
        vals = np.array([float(f(x)) for x in lam])
        _check_spectral_values(lam, vals, tol)
        return HermitianOperator(diagonal=vals)
    dec = eigh(a)
    lam = np.clip(dec.eigenvalues, 0.0, None)
    tol = default_rank_tol(a.dim, float(np.max(lam, initial=0.0))) if rank_tol is None else rank_tol
    lam = np.where(lam > tol, lam, 0.0)
    vals = np.array([float(f(x)) for x in lam])
    _check_spectral_values(lam, vals, tol)
    v = dec.eigenvectors
    return HermitianOperator((v * vals) @ v.conj().T)


def _check_spectral_values(lam: np.ndarray, vals: np.ndarray, tol: float):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = int(np.flatnonzero(bad)[0])
        raise LinearAlgebraError(f"scalar function undefined at eigenvalue {lam[idx]!r}")


def support_projector(a: PositiveOperator, rank_tol: float | None = None) -> Projector:
    """Projector onto the span of eigenvectors with eigenvalue above the rank tolerance."""
    if a.is_diagonal:
        lam = np.clip(a.diag, 0.0, None)
        tol = default_rank_tol(a.dim, float(np.max(lam, initial=0.0))) if rank_tol is None else rank_tol
        return Projector(diagonal=(lam > tol).astype(float))
    dec = eigh(a)
    lam = np.clip(dec.eigenvalues, 0.0, None)
    tol = default_rank_tol(a.dim, float(np.max(lam, initial=0.0))) if rank_tol is None else rank_tol
    keep = lam > tol
    v = dec.eigenvectors[:, keep]
    return Projector(v @ v.conj().T, rank=int(np.count_nonzero(keep)))


def moore_penrose_inverse(a: PositiveOperator, rank_tol: float | None = None) -> PositiveOperator:
    """Pseudoinverse: invert eigenvalues above the rank tolerance, zero the rest."""
    if a.is_diagonal:
        lam = np.clip(a.diag, 0.0, None)
        tol = default_rank_tol(a.dim, float(np.max(lam, initial=0.0))) if rank_tol is None else rank_tol
        inv = np.where(lam > tol, 1.0 / np.where(lam > tol, lam, 1.0), 0.0)
        return PositiveOperator(diagonal=inv)
    dec = eigh(a)
    lam = np.clip(dec.eigenvalues, 0.0, None)
    tol = default_rank_tol(a.dim, float(np.max(lam, initial=0.0))) if rank_tol is None else rank_tol
    inv = np.where(lam > tol, 1.0 / np.where(lam > tol, lam, 1.0), 0.0)
    v = dec.eigenvectors
    return PositiveOperator((v * inv) @ v.conj().T)


def tensor(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    if a.is_diagonal and b.is_diagonal:
        return HermitianOperator(diagonal=np.kron(a.diag, b.diag))
    return HermitianOperator(np.kron(a.matrix, b.matrix))


def partial_trace(a: HermitianOperator, keep: str, d_a: int, d_b: int) -> HermitianOperator:
    """Reduced operator on the kept factor ('A' or 'B'); trace is preserved."""
    if a.dim != d_a * d_b:
        raise ValueError(f"dim {a.dim} != d_a*d_b = {d_a * d_b}")
    if keep not in ("A", "B"):
        raise ValueError("keep must be 'A' or 'B'")
    if a.is_diagonal:
        grid = a.diag.reshape(d_a, d_b)
        red = grid.sum(axis=1) if keep == "A" else grid.sum(axis=0)
        return HermitianOperator(diagonal=red)
    t = a.matrix.reshape(d_a, d_b, d_a, d_b)
    red = np.einsum("ikjk->ij", t) if keep == "A" else np.einsum("kikj->ij", t)
    return HermitianOperator(red)


def purify(rho: DensityOperator, rank_tol: float | None = None) -> DensityOperator:
    """Minimal purification on H_A (x) H_R with dim(R) = rank(rho).

    The purifying vector is built in the non-increasing eigenbasis so the
    construction is reproducible.
    """
    dec = eigh(rho)
    lam = np.clip(dec.eigenvalues, 0.0, None)
    tol = default_rank_tol(rho.dim, float(np.max(lam, initial=0.0))) if rank_tol is None else rank_tol
    keep = lam > tol
    lam_r = lam[keep]
    v = dec.eigenvectors[:, keep]
    r = lam_r.size
    psi = np.zeros(rho.dim * r, dtype=complex)
    for i in range(r):
        psi += np.sqrt(lam_r[i]) * np.kron(v[:, i], _basis_vec(r, i))
    psi /= np.linalg.norm(psi)
    return DensityOperator(np.outer(psi, psi.conj()))


def _basis_vec(dim: int, i: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[i] = 1.0
    return e


def trace_norm_distance(a: HermitianOperator, b: HermitianOperator) -> float:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.is_diagonal and b.is_diagonal:
        return float(np.sum(np.abs(a.diag - b.diag)))
    return float(np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))


def as_positive(h: HermitianOperator) -> PositiveOperator:
    """Rewrap an arithmetic result as a positive operator (revalidates)."""
    if h.is_diagonal:
        return PositiveOperator(diagonal=np.clip(h.diag, 0.0, None))
    return PositiveOperator(h.matrix)


def as_density(h: HermitianOperator) -> DensityOperator:
    if h.is_diagonal:
        return DensityOperator(diagonal=np.clip(h.diag, 0.0, None))
    return DensityOperator(h.matrix)


# ---------------------------------------------------------------------------
# JSON matrix format: {"dim": d, "re": [[...]], "im": [[...]]} with the
# diagonal shorthand {"diag": [...]}.

def operator_to_json(a: HermitianOperator) -> dict:
    if a.is_diagonal:
        return {"diag": [float(x) for x in a.diag]}
    m = a.matrix
    return {
        "dim": a.dim,
        "re": np.real(m).tolist(),
        "im": np.imag(m).tolist(),
    }


def operator_from_json(obj: dict, cls=HermitianOperator) -> HermitianOperator:
    if "diag" in obj:
        return cls(diagonal=np.asarray(obj["diag"], dtype=float))
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    m = re + 1j * im
    if "dim" in obj and m.shape != (obj["dim"], obj["dim"]):
        raise ValueError(f"declared dim {obj['dim']} does not match shape {m.shape}")
    return cls(m)
