"""Dense spectra of the truncated operators and eigenvalue-pair extraction.

Eigenvalues come from LAPACK (balancing, Hessenberg reduction, implicitly
shifted QR) through numpy; exactly Hermitian matrices take the symmetric
path so real potentials yield exactly real spectra.  Pairs are collected by
disc membership around the unperturbed centers and then sharpened by a
center-shifted two-dimensional subspace refinement, which decouples the
pair-splitting accuracy from the global matrix scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .seqspace import FourierSequence, normalize_zero_mode
from .operator import TruncatedOperator, build_T

__all__ = [
    "SolverError",
    "PairingConfigError",
    "EigenList",
    "EigenPairRow",
    "EigenPairTable",
    "lexicographic_sort",
    "eigenvalues",
    "LocalizationRadius",
    "FixedRadius",
    "GammaRadius",
    "pair_eigenvalues",
    "compute_pair_table",
    "converge_truncation",
    "LocalizationReport",
    "localization_report",
    "localization_radius",
]

ORDER_TOL_SCALE = 1e-9
RESIDUAL_TOL = 1e-8
HERMITIAN_REL_TOL = 1e-12
K_CAP = 1024


class SolverError(RuntimeError):
    """Eigensolver failure; carries any partial result as .partial."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PairingConfigError(ValueError):
    """Pairing discs overlap or the window is too small for the request."""


def lexicographic_sort(values, tol_scale: float = ORDER_TOL_SCALE) -> np.ndarray:
    """Ascending real part; ties (within tol_scale*(1+|lambda|)) by imag."""
    vals = np.asarray(values, dtype=complex)
    vals = vals[np.lexsort((vals.imag, vals.real))]
    out = vals.copy()
    i = 0
    n = len(vals)
    while i < n:
        j = i + 1
        while j < n and (
            out[j].real - out[j - 1].real <= tol_scale * (1.0 + abs(out[j]))
        ):
            j += 1
        if j - i > 1:
            grp = out[i:j]
            out[i:j] = grp[np.argsort(grp.imag, kind="stable")]
        i = j
    return out


@dataclass(frozen=True)
class EigenList:
    """All eigenvalues of a truncated operator, lexicographically ordered."""

    values: np.ndarray
    m: int
    K: int
    trace_defect: float
    residual_max: float | None

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def dim(self) -> int:
        return 2 * self.K


def _is_hermitian(mat: np.ndarray) -> bool:
    scale = np.max(np.abs(mat)) or 1.0
    return bool(np.max(np.abs(mat - mat.conj().T)) <= HERMITIAN_REL_TOL * scale)


def _inverse_iteration(mat: np.ndarray, lam: complex, b: np.ndarray) -> np.ndarray:
    dim = mat.shape[0]
    shifted = mat - lam * np.eye(dim)
    try:
        x = np.linalg.solve(shifted, b)
    except np.linalg.LinAlgError:
        bump = 1e-13 * (1.0 + abs(lam))
        x = np.linalg.solve(mat - (lam + bump) * np.eye(dim), b)
    nx = np.linalg.norm(x)
    if nx == 0.0 or not np.isfinite(nx):
        return b / np.linalg.norm(b)
    return x / nx


def _validate_values(mat: np.ndarray, values: np.ndarray, rng) -> float:
    """One inverse-iteration step per eigenvalue from a random start; returns
    the largest residual ||(T - lambda) x|| / ||T||_F."""
    dim = mat.shape[0]
    scale = np.linalg.norm(mat, "fro") or 1.0
    worst = 0.0
    for lam in values:
        b = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        x = _inverse_iteration(mat, lam, b)
        res = np.linalg.norm(mat @ x - lam * x) / scale
        worst = max(worst, float(res))
    return worst


def eigenvalues(op: TruncatedOperator, validate: bool = True) -> EigenList:
    """All 2K eigenvalues of the truncated operator, with multiplicity.

    Exactly (or near-exactly) Hermitian matrices are routed to the symmetric
    solver after symmetrization.  Each eigenvalue of a validated solve gets a
    residual certificate from one inverse-iteration step.
    """
    mat = op.matrix
    if not np.all(np.isfinite(mat)):
        raise ValueError("operator matrix carries non-finite entries")
    try:
        if _is_hermitian(mat):
            herm = (mat + mat.conj().T) / 2.0
            vals = np.linalg.eigvalsh(herm).astype(complex)
        else:
            vals = np.linalg.eigvals(mat)
    except np.linalg.LinAlgError as exc:  # QR non-convergence
        raise SolverError(f"eigen decomposition failed: {exc}", partial=None) from exc

    vals = lexicographic_sort(vals)
    tr = np.trace(mat)
    scale = np.linalg.norm(mat, "fro") or 1.0
    trace_defect = float(abs(vals.sum() - tr) / scale)

    residual_max = None
    if validate:
        rng = np.random.default_rng([0x5E1F, op.m, op.K])
        residual_max = _validate_values(mat, vals, rng)
        if residual_max > RESIDUAL_TOL:
            raise SolverError(
                f"eigenvalue residual {residual_max:.3e} exceeds {RESIDUAL_TOL}",
                partial=vals,
            )
    return EigenList(vals, op.m, op.K, trace_defect, residual_max)


# ---------------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------------

def localization_radius(m: int, alpha: float, C: float, R: float, n: int) -> float:
    """Localization disc radius 3^m sqrt(2) C R (2n-1)^{m alpha}."""
    return 3.0**m * math.sqrt(2.0) * C * R * float(2 * n - 1) ** (m * alpha)


@dataclass(frozen=True)
class LocalizationRadius:
    C: float
    R: float
    alpha: float

    def radius(self, m: int, n: int) -> float:
        return localization_radius(m, self.alpha, self.C, self.R, n)


@dataclass(frozen=True)
class FixedRadius:
    r: float

    def radius(self, m: int, n: int) -> float:
        return self.r


@dataclass(frozen=True)
class GammaRadius:
    """Radius scale * (2n-1)^m, the contour radius used by the projectors."""

    scale: float = 1.0

    def radius(self, m: int, n: int) -> float:
        return self.scale * float(2 * n - 1) ** m


@dataclass(frozen=True)
class EigenPairRow:
    n: int
    lambda_lo: complex
    lambda_hi: complex
    tau: complex
    gamma: complex
    disc_radius_used: float
    converged: bool


@dataclass(frozen=True)
class EigenPairTable:
    m: int
    K: int
    rows: tuple[EigenPairRow, ...]
    flagged: dict[int, int] = field(default_factory=dict)

    def row(self, n: int) -> EigenPairRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(f"no paired row for n = {n}")

    def ns(self) -> list[int]:
        return [r.n for r in self.rows]

    def shifted(self, c: complex) -> "EigenPairTable":
        if c == 0:
            return self
        rows = tuple(
            replace(r, lambda_lo=r.lambda_lo + c, lambda_hi=r.lambda_hi + c, tau=r.tau + c)
            for r in self.rows
        )
        return EigenPairTable(self.m, self.K, rows, dict(self.flagged))


def _check_disc_overlap(m: int, radius_rule, n_max: int):
    for n in range(1, n_max):
        c0 = float(2 * n - 1) ** (2 * m) * math.pi ** (2 * m)
        c1 = float(2 * n + 1) ** (2 * m) * math.pi ** (2 * m)
        if c1 - c0 <= radius_rule.radius(m, n) + radius_rule.radius(m, n + 1):
            raise PairingConfigError(
                f"pairing discs for n = {n} and n = {n + 1} overlap"
            )


def _refine_pair(
    mat: np.ndarray, center: float, pair: np.ndarray, radius: float, rng
) -> tuple[complex, complex] | None:
    """Center-shifted Rayleigh-Ritz on the two-dimensional subspace spanned by
    inverse-iteration vectors of the pair.

    Returns the refined pair RELATIVE to the center, ordered
    lexicographically; working in the shifted frame keeps the pair splitting
    meaningful far below one ulp of the center itself.  Returns None (keep
    the raw pair) if the refinement wanders outside a quarter of the disc.
    """
    dim = mat.shape[0]
    vecs = []
    for lam in pair:
        b = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        vecs.append(_inverse_iteration(mat, lam, b))
    w = np.linalg.qr(np.column_stack(vecs))[0]
    shifted = mat - center * np.eye(dim)
    h = w.conj().T @ (shifted @ w)
    h_scale = np.max(np.abs(h)) or 1.0
    if np.max(np.abs(h - h.conj().T)) <= 1e-13 * h_scale:
        # Hermitian block: keep the refined pair exactly real
        local = np.linalg.eigvalsh((h + h.conj().T) / 2.0).astype(complex)
    else:
        local = lexicographic_sort(np.linalg.eigvals(h))
    if np.max(np.abs((center + local) - pair)) > 0.25 * radius:
        return None
    return complex(local[0]), complex(local[1])


def pair_eigenvalues(
    eigs: EigenList,
    m: int,
    radius_rule,
    n_max: int | None = None,
    matrix: np.ndarray | None = None,
    refine: bool = True,
) -> EigenPairTable:
    """Collect eigenvalue pairs inside discs around the unperturbed centers.

    For each n up to n_max (default K/4, the trusted quarter of the window)
    the eigenvalues within radius_rule.radius(m, n) of (2n-1)^{2m} pi^{2m}
    are gathered; exactly-two hits become a paired row, anything else is
    flagged with its hit count.  Passing the operator matrix enables the
    subspace refinement of each pair.
    """
    if n_max is None:
        n_max = eigs.K // 4
    if eigs.K < 4 * n_max:
        raise PairingConfigError(
            f"window K = {eigs.K} too small for n_max = {n_max} (need K >= 4 n_max)"
        )
    _check_disc_overlap(m, radius_rule, n_max)

    vals = eigs.values
    rows = []
    flagged: dict[int, int] = {}
    rng = np.random.default_rng([0xA11CE, m, eigs.K])
    for n in range(1, n_max + 1):
        c = float(2 * n - 1) ** (2 * m) * math.pi ** (2 * m)
        r = radius_rule.radius(m, n)
        hits = vals[np.abs(vals - c) < r]
        if len(hits) != 2:
            flagged[n] = len(hits)
            continue
        pair = lexicographic_sort(hits)
        local = None
        if refine and matrix is not None and pair[0] != pair[1]:
            # an exactly coincident raw pair is already a perfect double
            # eigenvalue; refinement could only add rounding noise
            local = _refine_pair(matrix, c, pair, r, rng)
        if local is None:
            lo, hi = complex(pair[0]), complex(pair[1])
            tau, gamma = (lo + hi) / 2.0, hi - lo
        else:
            # tau and gamma keep the precision of the center-shifted frame
            lo, hi = c + local[0], c + local[1]
            tau = c + (local[0] + local[1]) / 2.0
            gamma = local[1] - local[0]
        rows.append(
            EigenPairRow(
                n=n,
                lambda_lo=lo,
                lambda_hi=hi,
                tau=tau,
                gamma=gamma,
                disc_radius_used=r,
                converged=False,
            )
        )
    return EigenPairTable(m, eigs.K, tuple(rows), flagged)


def compute_pair_table(
    v: FourierSequence,
    m: int,
    K: int,
    radius_rule=None,
    n_max: int | None = None,
    validate: bool = True,
    refine: bool = True,
) -> EigenPairTable:
    """Spectrum pipeline: normalize the zero mode, solve the truncated
    operator, pair around the centers, and re-add the removed constant."""
    v0, c = normalize_zero_mode(v)
    if radius_rule is None:
        radius_rule = GammaRadius()
    op = build_T(v0, m, K)
    eigs = eigenvalues(op, validate=validate)
    table = pair_eigenvalues(
        eigs, m, radius_rule, n_max=n_max, matrix=op.matrix, refine=refine
    )
    return table.shifted(c)


def converge_truncation(
    v: FourierSequence,
    m: int,
    n_max: int,
    tol: float = 1e-9,
    radius_rule=None,
    K_start: int | None = None,
    K_cap: int = K_CAP,
    validate: bool = True,
) -> tuple[int, EigenPairTable]:
    """Double the window until every paired eigenvalue with n <= n_max moves
    less than tol between consecutive windows; rows still moving when the
    window cap is reached stay flagged unconverged."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if radius_rule is None:
        radius_rule = GammaRadius()
    K = K_start if K_start is not None else max(32, 4 * n_max)
    if K < 4 * n_max:
        raise PairingConfigError(f"K_start = {K} too small for n_max = {n_max}")

    v0, c = normalize_zero_mode(v)

    def solve(KK: int):
        op = build_T(v0, m, KK)
        eigs = eigenvalues(op, validate=False)
        table = pair_eigenvalues(
            eigs, m, radius_rule, n_max=n_max, matrix=op.matrix, refine=True
        )
        return table.shifted(c), op, eigs

    table, op, eigs = solve(K)
    while 2 * K <= K_cap:
        cur, cur_op, cur_eigs = solve(2 * K)
        rows = []
        for r in cur.rows:
            try:
                p = table.row(r.n)
            except KeyError:
                rows.append(replace(r, converged=False))
                continue
            # pair movement as a set: the lexicographic label assignment of a
            # near-degenerate pair may flip between windows without the
            # values themselves moving
            direct = max(abs(r.lambda_lo - p.lambda_lo), abs(r.lambda_hi - p.lambda_hi))
            crossed = max(abs(r.lambda_lo - p.lambda_hi), abs(r.lambda_hi - p.lambda_lo))
            rows.append(replace(r, converged=min(direct, crossed) < tol))
        K = 2 * K
        table = EigenPairTable(cur.m, cur.K, tuple(rows), dict(cur.flagged))
        op, eigs = cur_op, cur_eigs
        if rows and all(r.converged for r in rows):
            break

    if validate:
        rng = np.random.default_rng([0x5E1F, m, K])
        worst = _validate_values(op.matrix, eigs.values, rng)
        if worst > RESIDUAL_TOL:
            raise SolverError(
                f"eigenvalue residual {worst:.3e} exceeds {RESIDUAL_TOL}",
                partial=table,
            )
    return K, table


@dataclass(frozen=True)
class DiscCensusRow:
    n: int
    radius: float
    hits: int
    max_deviation: float  # largest |lambda - center| among the hits; nan if none


@dataclass(frozen=True)
class LocalizationReport:
    m: int
    alpha: float
    R: float
    C: float
    K: int
    n0_empirical: int
    cone_count: int
    cone_threshold: float
    cone_M: float
    violations: tuple[int, ...]
    disc_rows: tuple[DiscCensusRow, ...]


def localization_report(
    v: FourierSequence,
    m: int,
    alpha: float,
    R: float,
    C: float,
    K: int,
    validate: bool = True,
) -> LocalizationReport:
    """Empirical localization census against the localization-disc radii.

    n0_empirical is the smallest N such that every disc with N < n <= K/4
    holds exactly two eigenvalues inside radius 3^m sqrt(2) C R (2n-1)^{m a};
    the cone census counts eigenvalues left of ((2n0)^{2m}-(2n0)^m) pi^{2m}
    with the cone opening M set just above the largest imaginary part seen,
    so the left edge is inactive at truncation.
    """
    v0, c = normalize_zero_mode(v)
    op = build_T(v0, m, K)
    eigs = eigenvalues(op, validate=validate)
    vals = eigs.values + c
    n_max = K // 4

    failing = []
    rows = []
    for n in range(1, n_max + 1):
        center = float(2 * n - 1) ** (2 * m) * math.pi ** (2 * m)
        r = localization_radius(m, alpha, C, R, n)
        dev = np.abs(vals - center)
        inside = dev < r
        hits = int(inside.sum())
        max_dev = float(np.max(dev[inside])) if hits else math.nan
        rows.append(DiscCensusRow(n=n, radius=r, hits=hits, max_deviation=max_dev))
        if hits != 2:
            failing.append(n)
    n0 = max(failing, default=0)
    violations = tuple(n for n in failing if n > n0)  # empty by construction

    big_m = max(1.0, float(np.max(np.abs(vals.imag)))) + 1.0
    thresh = ((2.0 * n0) ** (2 * m) - (2.0 * n0) ** m) * math.pi ** (2 * m)
    in_cone = (vals.real >= np.abs(vals.imag) - big_m) & (vals.real <= thresh)
    return LocalizationReport(
        m=m,
        alpha=alpha,
        R=R,
        C=C,
        K=K,
        n0_empirical=n0,
        cone_count=int(in_cone.sum()),
        cone_threshold=thresh,
        cone_M=big_m,
        violations=violations,
        disc_rows=tuple(rows),
    )
