"""Causality checks and spectral stability diagnostics for per-multipole AR models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spharcp.types import ArCoefficients, SegmentSpec

# Roots with modulus in (1, 1 + EPS_ROOT] are treated as non-causal so that
# near-unit-root models are rejected before they blow up a simulation.
EPS_ROOT = 1e-9

DEFAULT_GRID = 4096


def ar_char_roots(phi: np.ndarray) -> np.ndarray:
    """Roots of 1 - phi_1 z - ... - phi_p z^p (empty for an all-zero vector)."""
    phi = np.asarray(phi, dtype=float)
    if not np.isfinite(phi).all():
        raise ValueError("phi contains non-finite entries")
    # np.roots builds the companion matrix of the reversed polynomial and
    # trims exactly-zero leading coefficients, so trailing zero lags do
    # not change the root set. Near-zero leading coefficients would
    # overflow the companion matrix while only contributing roots of
    # modulus >= ~(1e30)^(1/p) >> 1; drop them too.
    coeffs = np.concatenate(([1.0], -phi))[::-1]
    tiny = 1e-30 * np.abs(coeffs).max()
    start = 0
    while start < len(coeffs) - 1 and abs(coeffs[start]) <= tiny:
        start += 1
    return np.roots(coeffs[start:])


def is_causal(phi: np.ndarray) -> bool:
    """True iff all characteristic roots have modulus > 1 + EPS_ROOT."""
    roots = ar_char_roots(phi)
    if roots.size == 0:
        return True
    return bool((np.abs(roots) > 1.0 + EPS_ROOT).all())


def check_causality(coeffs: ArCoefficients) -> np.ndarray:
    """Per-multipole causality flags for a set of AR coefficient vectors.

    Multipole ell passes iff every root of its characteristic polynomial
    lies outside the unit circle by more than the EPS_ROOT margin.
    """
    return np.array([is_causal(coeffs.phi[ell]) for ell in range(coeffs.L)])


def _char_poly_sq_modulus(phi: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """|1 - sum_j phi_j e^{-i nu j}|^2 evaluated elementwise over nu."""
    phi = np.asarray(phi, dtype=float)
    j = np.arange(1, phi.size + 1)
    z = 1.0 - np.exp(-1j * np.multiply.outer(nu, j)) @ phi.astype(complex)
    return np.abs(z) ** 2


def spectral_density(
    phi_ell: np.ndarray, c_noise: float, nu: float | np.ndarray
) -> float | np.ndarray:
    """AR spectral density c_noise / (2 pi |1 - sum_j phi_j e^{-i nu j}|^2).

    Parameters
    ----------
    phi_ell : array of shape (p,)
        Causal AR coefficient vector.
    c_noise : float
        Innovation variance, > 0.
    nu : float or array
        Frequencies in [-pi, pi].
    """
    if c_noise <= 0:
        raise ValueError("c_noise must be > 0")
    if not is_causal(phi_ell):
        raise ValueError("phi is not causal; spectral density undefined on the unit circle")
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    dens = c_noise / (2.0 * np.pi * _char_poly_sq_modulus(phi_ell, nu_arr))
    return float(dens[0]) if np.isscalar(nu) or np.ndim(nu) == 0 else dens


@dataclass(frozen=True)
class StabilityMeasures:
    """Grid extrema of one multipole's spectral density.

    ``mu_min``/``mu_max`` are the extrema of the squared characteristic
    polynomial modulus over the frequency grid; ``M_f = c/(2 pi mu_min)``
    and ``m_f = c/(2 pi mu_max)`` hold exactly at grid resolution.
    """

    M_f: float
    m_f: float
    mu_min: float
    mu_max: float


def stability_measures(
    phi_ell: np.ndarray, c_noise: float, grid: int = DEFAULT_GRID
) -> StabilityMeasures:
    """Spectral density extrema of a causal AR model over a uniform frequency grid.

    The grid spans [-pi, pi] with ``grid`` points (endpoints included).
    This is an approximation of the exact unit-circle extrema, adequate
    for diagnostics; pass an odd ``grid`` to place nu = 0 on the grid.
    """
    if grid < 64:
        raise ValueError("grid must be >= 64")
    if c_noise <= 0:
        raise ValueError("c_noise must be > 0")
    if not is_causal(phi_ell):
        raise ValueError("phi is not causal")
    nu = np.linspace(-np.pi, np.pi, grid)
    a = _char_poly_sq_modulus(phi_ell, nu)
    mu_min = float(a.min())
    mu_max = float(a.max())
    return StabilityMeasures(
        M_f=c_noise / (2.0 * np.pi * mu_min),
        m_f=c_noise / (2.0 * np.pi * mu_max),
        mu_min=mu_min,
        mu_max=mu_max,
    )


def coefficient_jump(phi_a: np.ndarray, phi_b: np.ndarray) -> float:
    """sum_ell (2 ell + 1) ||phi_ell^a - phi_ell^b||_2^2 for (L, p) arrays."""
    phi_a = np.asarray(phi_a, dtype=float)
    phi_b = np.asarray(phi_b, dtype=float)
    if phi_a.shape != phi_b.shape:
        raise ValueError(f"coefficient shapes differ: {phi_a.shape} vs {phi_b.shape}")
    diff = phi_a - phi_b
    weights = 2 * np.arange(phi_a.shape[0]) + 1
    return float(weights @ (diff * diff).sum(axis=1))


def jump_size(spec_a: SegmentSpec, spec_b: SegmentSpec) -> float:
    """Multipole-weighted squared distance between two segments' AR parameters."""
    if spec_a.p != spec_b.p or spec_a.L != spec_b.L:
        raise ValueError(
            f"segment shapes differ: (p={spec_a.p}, L={spec_a.L}) vs "
            f"(p={spec_b.p}, L={spec_b.L})"
        )
    return coefficient_jump(spec_a.coeffs.phi, spec_b.coeffs.phi)


def noise_ratio(segments: list[SegmentSpec]) -> np.ndarray:
    """Per-multipole ratio max_k C_{ell;Z} / min_k C_{ell;Z} across segments.

    Reported for diagnostics only; nothing is enforced on it at finite L.
    """
    spectra = np.stack([s.noise_spectrum for s in segments])
    return spectra.max(axis=0) / spectra.min(axis=0)


@dataclass(frozen=True)
class TuningBounds:
    """Signal-to-noise quantities entering the detector's tuning rules.

    ``alpha`` is per-multipole; ``C_L`` aggregates the penalized fitting
    error budget; ``kappa_L`` is the minimal jump size between consecutive
    segments (None when fewer than two segments are supplied).
    """

    alpha: np.ndarray
    C_L: float
    kappa_L: float | None


def theory_tuning_bounds(
    segments: list[SegmentSpec],
    lam: float | np.ndarray,
    p: int,
    grid: int = DEFAULT_GRID,
) -> TuningBounds:
    """Compute the tuning diagnostics alpha_ell, C_L and kappa_L.

    Parameters
    ----------
    segments : list of SegmentSpec
        Candidate per-segment models, all causal with common (p, L).
    lam : float or array of shape (L,)
        Per-multipole L1 penalty levels, >= 0.
    p : int
        Autoregressive order (must match the segments).
    grid : int
        Frequency grid size used for the mu_max extrema.

    Notes
    -----
    alpha_ell = (1/2) min_k C_{ell;Z}^(k) / max_k mu_max(phi_ell^(k));
    C_L = max{48, 32 p} max{C_Phi, 1} max_k sum_ell max{q_ell^(k), 1}
    lam_ell^2 / alpha_ell, with C_Phi the largest squared coefficient
    norm across segments and multipoles; kappa_L is the smallest jump
    size over consecutive segment pairs.
    """
    if not segments:
        raise ValueError("need at least one segment")
    L = segments[0].L
    for seg in segments:
        if seg.p != p or seg.L != L:
            raise ValueError("all segments must share the given p and L")
        if not check_causality(seg.coeffs).all():
            raise ValueError("all segments must be causal")
    lam_arr = np.asarray(lam, dtype=float)
    if lam_arr.ndim == 0:
        lam_arr = np.full(L, float(lam_arr))
    if lam_arr.shape != (L,) or (lam_arr < 0).any():
        raise ValueError("lam must be a scalar or a length-L vector with entries >= 0")

    mu_max = np.array(
        [
            max(stability_measures(seg.coeffs.phi[ell], 1.0, grid).mu_max for seg in segments)
            for ell in range(L)
        ]
    )
    c_min = np.stack([seg.noise_spectrum for seg in segments]).min(axis=0)
    alpha = 0.5 * c_min / mu_max

    c_phi = max(float((seg.coeffs.phi**2).sum(axis=1).max()) for seg in segments)
    per_segment = [
        float(
            np.sum(
                np.maximum([seg.coeffs.sparsity_index(ell) for ell in range(L)], 1)
                * lam_arr**2
                / alpha
            )
        )
        for seg in segments
    ]
    c_l = max(48.0, 32.0 * p) * max(c_phi, 1.0) * max(per_segment)

    kappa = None
    if len(segments) >= 2:
        kappa = min(jump_size(a, b) for a, b in zip(segments, segments[1:]))
    return TuningBounds(alpha=alpha, C_L=c_l, kappa_L=kappa)
