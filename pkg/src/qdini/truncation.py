"""Spectral truncation, stable indices and consistent projector schedules.

Psi_m compresses a positive operator onto its m largest-eigenvalue
directions.  Stable indices are the ranks m where a spectral gap makes the
projector basis-independent.  Projector schedules are double-indexed families
P^n_m validated against five consistency conditions: rank P^n_m <= m,
Tr P^n_m rho_n > 0, nesting in m, support coverage, and convergence of P^n_m
to P^0_m (the last one only as a finite-window trend).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .entropies import von_neumann_entropy
from .operators import (
    DensityOperator,
    HermitianOperator,
    PositiveOperator,
    Projector,
    coordinate_projector,
    default_rank_tol,
    eigh,
    support_projector,
)
from .verdicts import (
    CheckResult,
    TrendSummary,
    Verdict,
    combine_status,
)

GAP_REL_TOL = 1e-9


class OperatorSequence:
    """Indexed family n -> PositiveOperator; index 0 is the declared limit."""

    __slots__ = ("generator", "dim", "label", "_cache")

    def __init__(self, generator, dim: int, label: str = ""):
        self.generator = generator
        self.dim = int(dim)
        self.label = label
        self._cache = {}

    def __call__(self, n: int) -> PositiveOperator:
        if n not in self._cache:
            op = self.generator(n)
            if op.dim != self.dim:
                raise ValueError(f"member {n} has dim {op.dim}, expected {self.dim}")
            self._cache[n] = op
        return self._cache[n]


def constant_sequence(op: PositiveOperator, label: str = "") -> OperatorSequence:
    return OperatorSequence(lambda n: op, op.dim, label)


def normalize(sigma: PositiveOperator):
    """[sigma] = sigma / Tr sigma; returns None for (numerically) zero input."""
    t = sigma.trace()
    if t <= default_rank_tol(sigma.dim, sigma.operator_norm()):
        return None
    if sigma.is_diagonal:
        return DensityOperator(diagonal=np.clip(sigma.diag, 0.0, None) / t)
    return DensityOperator(sigma.matrix / t)


@dataclass(frozen=True)
class TruncationResult:
    head: PositiveOperator
    tail: PositiveOperator
    mass: float
    ambiguous: bool = False  # m fell inside a multiplicity group


def _sorted_clamped(rho: PositiveOperator):
    """(eigenvalues desc clamped at the rank tolerance, permutation or vectors)."""
    if rho.is_diagonal:
        order = np.argsort(-rho.diag, kind="stable")
        lam = np.clip(rho.diag[order], 0.0, None)
        tol = default_rank_tol(rho.dim, float(np.max(lam, initial=0.0)))
        return np.where(lam > tol, lam, 0.0), order, tol
    dec = eigh(rho)
    lam = np.clip(dec.eigenvalues, 0.0, None)
    tol = default_rank_tol(rho.dim, float(np.max(lam, initial=0.0)))
    return np.where(lam > tol, lam, 0.0), dec.eigenvectors, tol


def spectral_truncation(rho: PositiveOperator, m: int) -> TruncationResult:
    """Psi_m(rho) = P^rho_m rho with the deterministic eigenvalue tie-break.

    If m >= rank rho the head is rho itself.  When m cuts through a
    multiplicity group the result carries the ambiguous flag.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    d = rho.dim
    lam_max = rho.operator_norm()
    gap_tol = GAP_REL_TOL * lam_max
    if rho.is_diagonal:
        lam, order, tol = _sorted_clamped(rho)
        rank = int(np.count_nonzero(lam))
        if m >= rank:
            head = PositiveOperator(diagonal=np.clip(rho.diag, 0.0, None))
            return TruncationResult(head, PositiveOperator(diagonal=np.zeros(d)), float(np.sum(lam)))
        ambiguous = lam[m - 1] - lam[m] <= gap_tol
        hd = np.zeros(d)
        hd[order[:m]] = lam[:m]
        head = PositiveOperator(diagonal=hd)
        tl = np.clip(rho.diag, 0.0, None) - hd
        return TruncationResult(head, PositiveOperator(diagonal=np.clip(tl, 0.0, None)),
                                float(np.sum(lam[:m])), ambiguous)
    lam, vec, tol = _sorted_clamped(rho)
    rank = int(np.count_nonzero(lam))
    if m >= rank:
        return TruncationResult(PositiveOperator(rho.matrix),
                                PositiveOperator(np.zeros((d, d))), float(np.sum(lam)))
    ambiguous = lam[m - 1] - lam[m] <= gap_tol
    vm = vec[:, :m]
    head_m = (vm * lam[:m]) @ vm.conj().T
    vr = vec[:, m:]
    tail_m = (vr * lam[m:]) @ vr.conj().T
    return TruncationResult(PositiveOperator(head_m), PositiveOperator(tail_m),
                            float(np.sum(lam[:m])), ambiguous)


def truncated_state_entropy_bound(rho: PositiveOperator, m: int) -> bool:
    """S([Psi_m(rho)]) <= ln m within 1e-10."""
    head = spectral_truncation(rho, m).head
    state = normalize(head)
    if state is None:
        return True
    return float(von_neumann_entropy(state)) <= math.log(m) + 1e-10


def stable_index_set(rho: PositiveOperator, m_max: int, gap_tol: float | None = None):
    """Ranks m where lambda_{m+1} < lambda_m - gap_tol, or lambda_m is zero-rank."""
    lam, _, rank_tol = _sorted_clamped(rho)
    lam_max = float(lam[0]) if lam.size else 0.0
    tol = GAP_REL_TOL * lam_max if gap_tol is None else gap_tol
    out = []
    for m in range(1, min(m_max, rho.dim) + 1):
        nxt = lam[m] if m < rho.dim else 0.0
        if nxt < lam[m - 1] - tol or lam[m - 1] <= rank_tol:
            out.append(m)
    return out


def largest_stable_index(limit: PositiveOperator, m: int, m_max: int | None = None):
    """m-hat: the largest stable index of the limit operator not exceeding m."""
    cap = limit.dim if m_max is None else m_max
    candidates = [s for s in stable_index_set(limit, min(m, cap)) if s <= m]
    return candidates[-1] if candidates else None


def top_multiplicity(rho: PositiveOperator) -> int:
    """Multiplicity of the maximal eigenvalue (within the gap tolerance)."""
    lam, _, _ = _sorted_clamped(rho)
    tol = GAP_REL_TOL * float(lam[0]) if lam.size else 0.0
    k = 1
    while k < lam.size and lam[0] - lam[k] <= tol:
        k += 1
    return k


def dominated_truncation(tau: PositiveOperator, rho: PositiveOperator, c: float, m: int,
                         rho_limit: PositiveOperator, sigma_limit: PositiveOperator) -> TruncationResult:
    """Truncation of tau = c rho + sigma along stable indices of the limits.

    head = c Psi_{m-hat(rho_limit)}(rho) + Psi_{m-hat(sigma_limit)}(sigma)
    with sigma = tau - c rho; m must reach the top-eigenvalue multiplicities
    of both limit operators.
    """
    if tau.dim != rho.dim:
        raise ValueError(f"dimension mismatch: {tau.dim} vs {rho.dim}")
    diff = tau.sub(rho.scale(c))
    lam_min = float(np.min(diff.diag)) if diff.is_diagonal else float(np.min(np.linalg.eigvalsh(diff.matrix)))
    psd_tol = 1e-10 * max(tau.operator_norm(), 1e-30)
    if lam_min < -psd_tol:
        raise ValueError(f"tau - c*rho is not PSD: most negative eigenvalue {lam_min:.3e}")
    sigma = _clip_positive(diff)
    sigma_zero = sigma.trace() <= default_rank_tol(sigma.dim, sigma.operator_norm())
    m_star = top_multiplicity(rho_limit)
    if not sigma_zero:
        m_star = max(m_star, top_multiplicity(sigma_limit))
    if m < m_star:
        raise ValueError(f"m = {m} is below the multiplicity floor m_* = {m_star}")
    mh_rho = largest_stable_index(rho_limit, m)
    if mh_rho is None:
        raise ValueError(f"no stable index of the rho limit at or below m = {m}")
    head_rho = spectral_truncation(rho, mh_rho)
    if sigma_zero:
        head = head_rho.head.scale(c)
        tail = head_rho.tail.scale(c)
        return TruncationResult(_clip_positive(head), _clip_positive(tail),
                                head.trace(), head_rho.ambiguous)
    mh_sigma = largest_stable_index(sigma_limit, m)
    if mh_sigma is None:
        raise ValueError(f"no stable index of the sigma limit at or below m = {m}")
    head_sigma = spectral_truncation(sigma, mh_sigma)
    head = head_rho.head.scale(c).add(head_sigma.head)
    tail = head_rho.tail.scale(c).add(head_sigma.tail)
    return TruncationResult(_clip_positive(head), _clip_positive(tail), head.trace(),
                            head_rho.ambiguous or head_sigma.ambiguous)


def _clip_positive(h: HermitianOperator) -> PositiveOperator:
    if h.is_diagonal:
        return PositiveOperator(diagonal=np.clip(h.diag, 0.0, None))
    return PositiveOperator(h.matrix)


@dataclass(frozen=True)
class ApproximationScheme:
    """Psi_m family: plain spectral truncation or the dominated composite map.

    The dominated kind truncates tau_n = c rho_n + sigma_n by cutting rho_n
    and sigma_n = tau_n - c rho_n separately at stable indices of the limit
    operators.
    """

    kind: str = "spectral"  # "spectral" or "dominated"
    c: float = 1.0
    dominated: OperatorSequence | None = None

    def __post_init__(self):
        if self.kind not in ("spectral", "dominated"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "dominated" and self.dominated is None:
            raise ValueError("dominated scheme needs the dominated sequence")

    def truncate(self, seq: OperatorSequence, n: int, m: int) -> TruncationResult:
        if self.kind == "spectral":
            return spectral_truncation(seq(n), m)
        rho_limit = self.dominated(0)
        sigma_limit = _clip_positive(seq(0).sub(rho_limit.scale(self.c)))
        return dominated_truncation(seq(n), self.dominated(n), self.c, m, rho_limit, sigma_limit)

    def m_floor(self, seq: OperatorSequence) -> int:
        """Smallest usable m: 1 for spectral, the multiplicity floor otherwise."""
        if self.kind == "spectral":
            return 1
        rho_limit = self.dominated(0)
        sigma_limit = _clip_positive(seq(0).sub(rho_limit.scale(self.c)))
        m_star = top_multiplicity(rho_limit)
        if sigma_limit.trace() > default_rank_tol(sigma_limit.dim, sigma_limit.operator_norm()):
            m_star = max(m_star, top_multiplicity(sigma_limit))
        return m_star


@dataclass(frozen=True)
class ProjectorSchedule:
    """Double-indexed projector family (n, m) -> Projector on [0..n_max] x [m_0..m_max]."""

    m_0: int
    m_max: int
    n_max: int
    projectors: dict = field(repr=False)  # (n, m) -> Projector
    commuting: bool = False
    label: str = ""

    def projector(self, n: int, m: int) -> Projector:
        return self.projectors[(n, m)]


def fixed_basis_schedule(dim: int, m_max: int, seq: OperatorSequence,
                         n_max: int = 12, m_0: int = 1) -> ProjectorSchedule:
    """P^n_m = projector onto the first m coordinates, constant in n."""
    projs = {}
    for m in range(m_0, m_max + 1):
        p = coordinate_projector(dim, range(m))
        for n in range(n_max + 1):
            rho = seq(n)
            mass = float(np.sum(rho.diag[:m])) if rho.is_diagonal else float(np.real(np.trace(p.matrix @ rho.matrix)))
            if mass <= default_rank_tol(dim, rho.operator_norm()):
                raise ValueError(f"Tr P_m rho_n vanishes at (n, m) = ({n}, {m})")
            projs[(n, m)] = p
    return ProjectorSchedule(m_0, m_max, n_max, projs, commuting=False, label="fixed-basis")


def commuting_schedule(seq: OperatorSequence, m_max: int, n_max: int) -> ProjectorSchedule:
    """Schedule of spectral projectors of rho_n, cut at stable indices of the limit.

    Full-rank windows use P^n_m = top-(m-hat of rho_0) eigenprojector of
    rho_n.  If any member is rank deficient, the limit is first extended by a
    direct sum with an auxiliary full-rank state whose spectrum lies strictly
    below every positive eigenvalue in the window, so the induced cut always
    lands inside rho_n's spectrum and the restricted projectors stay nested.
    """
    dim = seq.dim
    members = [seq(n) for n in range(n_max + 1)]
    ranks = [op.rank() for op in members]
    if any(op.trace() <= default_rank_tol(dim, op.operator_norm()) for op in members):
        raise ValueError("commuting_schedule requires every window member to be nonzero")
    full_rank = all(r == dim for r in ranks)
    if full_rank:
        limit = members[0]
        m_0 = top_multiplicity(limit)
    else:
        limit = _extended_limit(members)
        m_0 = top_multiplicity(limit)
    if m_0 > m_max:
        raise ValueError(f"m_max = {m_max} is below the starting index m_0 = {m_0}; enlarge the window")
    decs = [_spectral_basis(op) for op in members]
    projs = {}
    for m in range(m_0, m_max + 1):
        mh = largest_stable_index(limit, m, m_max=limit.dim)
        if mh is None:
            raise ValueError(f"no stable index of the limit at or below m = {m}; enlarge m_max")
        for n in range(n_max + 1):
            k = min(mh, ranks[n])
            projs[(n, m)] = _top_k_projector(members[n], decs[n], k)
    return ProjectorSchedule(m_0, m_max, n_max, projs, commuting=True, label="commuting")


def _extended_limit(members) -> PositiveOperator:
    """rho_0 (+) auxiliary state with a geometric spectrum below the window."""
    dim = members[0].dim
    min_pos = min(
        float(np.min(lam[lam > 0.0]))
        for lam in (_sorted_clamped(op)[0] for op in members)
    )
    # fractional part of sqrt(2): keeps the auxiliary spectrum numerically
    # disjoint from the window spectra while staying strictly below them
    scale = (math.sqrt(2.0) - 1.0) * min_pos
    aux = scale * 0.5 ** np.arange(dim)
    rho_0 = members[0]
    base = np.clip(rho_0.diag, 0.0, None) if rho_0.is_diagonal else None
    if base is not None:
        return PositiveOperator(diagonal=np.concatenate([base, aux]))
    lam, _, _ = _sorted_clamped(rho_0)
    return PositiveOperator(diagonal=np.concatenate([lam, aux]))


def _spectral_basis(op: PositiveOperator):
    if op.is_diagonal:
        order = np.argsort(-op.diag, kind="stable")
        return order
    return eigh(op).eigenvectors


def _top_k_projector(op: PositiveOperator, basis, k: int) -> Projector:
    if k < 1:
        raise ValueError("projector rank must be at least 1")
    if op.is_diagonal:
        d = np.zeros(op.dim)
        d[basis[:k]] = 1.0
        return Projector(diagonal=d, rank=k)
    vk = basis[:, :k]
    return Projector(vk @ vk.conj().T, rank=k)


def validate_schedule(schedule: ProjectorSchedule, seq: OperatorSequence,
                      n_max: int | None = None, m_max: int | None = None) -> Verdict:
    """Check the five consistency conditions of a schedule on a finite window.

    The first four are hard checks; convergence of P^n_m to P^0_m is reported
    only as a probe-vector residual trend over n, never as a proof.
    """
    n_hi = schedule.n_max if n_max is None else min(n_max, schedule.n_max)
    m_hi = schedule.m_max if m_max is None else min(m_max, schedule.m_max)
    m_lo = schedule.m_0
    checks = []
    rank_ok, rank_slack, rank_detail = True, math.inf, ""
    mass_ok, mass_slack, mass_detail = True, math.inf, ""
    nest_ok, nest_detail = True, ""
    cover_ok, cover_detail = True, ""
    for n in range(n_hi + 1):
        rho = seq(n)
        for m in range(m_lo, m_hi + 1):
            p = schedule.projector(n, m)
            slack = m - p.rank
            if slack < rank_slack:
                rank_slack = slack
            if p.rank > m:
                rank_ok, rank_detail = False, f"rank {p.rank} > m at (n, m) = ({n}, {m})"
            mass = _projected_mass(p, rho)
            if mass < mass_slack:
                mass_slack = mass
            if mass <= 0.0:
                mass_ok, mass_detail = False, f"Tr P rho_n = {mass:.3e} at (n, m) = ({n}, {m})"
            if m < m_hi and not p.leq(schedule.projector(n, m + 1)):
                nest_ok, nest_detail = False, f"P^n_m not below P^n_(m+1) at (n, m) = ({n}, {m})"
        q_n = support_projector(rho)
        if not q_n.leq(schedule.projector(n, m_hi)):
            cover_ok, cover_detail = False, f"support of rho_n not covered at n = {n}, m = {m_hi}"
    checks.append(CheckResult("rank P^n_m <= m", rank_ok, float(rank_slack), rank_detail))
    checks.append(CheckResult("Tr P^n_m rho_n > 0", mass_ok, float(mass_slack), mass_detail))
    checks.append(CheckResult("P^n_m <= P^n_(m+1)", nest_ok, 0.0, nest_detail))
    checks.append(CheckResult("join of P^n_m covers supp rho_n", cover_ok, 0.0, cover_detail))
    probes = _probe_vectors(seq(0))
    trends = []
    trends_ok = True
    for m in range(m_lo, m_hi + 1):
        p0 = schedule.projector(0, m)
        res = []
        for n in range(1, n_hi + 1):
            pn = schedule.projector(n, m)
            res.append(_probe_residual(pn, p0, probes))
        trend = TrendSummary.from_residuals(f"probe residual ||(P^n_m - P^0_m)v||, m = {m}", res)
        trends.append(trend)
        trends_ok = trends_ok and trend.shrinks
    hypothesis_ok = rank_ok and mass_ok and nest_ok and cover_ok
    status = combine_status(True, not hypothesis_ok, trends_ok)
    return Verdict(
        name="schedule-consistency",
        status=status,
        hypothesis_checks=tuple(checks),
        conclusion_trends=tuple(trends),
        trend_only=True,
        notes=("projector convergence is certified only as a finite-window trend",),
    )


def _projected_mass(p: Projector, rho: PositiveOperator) -> float:
    if p.is_diagonal and rho.is_diagonal:
        return float(np.sum(rho.diag[p.diag > 0.5]))
    return float(np.real(np.trace(p.matrix @ rho.matrix)))


def _probe_vectors(rho_0: PositiveOperator) -> np.ndarray:
    if rho_0.is_diagonal:
        return np.eye(rho_0.dim, dtype=complex)
    return eigh(rho_0).eigenvectors


def _probe_residual(pn: Projector, p0: Projector, probes: np.ndarray) -> float:
    if pn.is_diagonal and p0.is_diagonal:
        diff = np.abs(pn.diag - p0.diag)
        return float(np.max(diff))
    d = pn.matrix - p0.matrix
    return float(np.max(np.linalg.norm(d @ probes, axis=0)))


def commutator_norm(p: Projector, rho: PositiveOperator) -> float:
    """||[P, rho]||_1, used to certify commuting schedules."""
    if p.is_diagonal and rho.is_diagonal:
        return 0.0
    c = p.matrix @ rho.matrix - rho.matrix @ p.matrix
    sv = np.linalg.svd(c, compute_uv=False)
    return float(np.sum(sv))
