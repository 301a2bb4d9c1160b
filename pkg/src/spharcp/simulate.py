"""Synthetic piecewise-stationary SPHAR(p) coefficient series.

Every (ell, m) stream draws from its own RNG substream keyed by
(seed, slot), so output is deterministic, independent of evaluation
order, and stable under extending L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spharcp.diagnostics import check_causality
from spharcp.types import ArCoefficients, CoefficientSeries, Partition, SegmentSpec, slot_index

DEFAULT_BURN_IN = 500


@dataclass(frozen=True)
class ScenarioSpec:
    """Full recipe for one synthetic series.

    Parameters
    ----------
    n, L, p : int
        Series length, number of multipoles, AR order.
    partition : Partition
        True change points.
    segments : list of SegmentSpec
        One model per segment (K + 1 entries), all causal.
    burn_in : int
        Warm-up steps discarded before t = 1 (and after each restart
        when ``junction="restart"``).
    seed : int
        Base seed of the per-(ell, m) substreams.
    junction : {"continue", "restart"}
        How the path behaves at a change point: "continue" runs the new
        dynamics from the previous segment's trailing values (a single
        concatenated observed path); "restart" re-warms the new segment
        from scratch, approximating independent stationary segments.
    """

    n: int
    L: int
    p: int
    partition: Partition
    segments: tuple[SegmentSpec, ...]
    burn_in: int = DEFAULT_BURN_IN
    seed: int = 0
    junction: str = "continue"

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.partition.n != self.n:
            raise ValueError("partition.n does not match n")
        if len(self.segments) != self.partition.K + 1:
            raise ValueError(
                f"expected {self.partition.K + 1} segment specs, got {len(self.segments)}"
            )
        for seg in self.segments:
            if seg.p != self.p or seg.L != self.L:
                raise ValueError("segment spec shape differs from scenario (p, L)")
            if not check_causality(seg.coeffs).all():
                raise ValueError("non-causal segment in scenario")
        if self.partition.min_spacing <= self.p:
            raise ValueError(
                f"minimal segment spacing {self.partition.min_spacing} must exceed p={self.p}"
            )
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.junction not in ("continue", "restart"):
            raise ValueError("junction must be 'continue' or 'restart'")


def build_beta(q: int, d: float, L: int) -> np.ndarray:
    """Decaying coefficient profile 0.9 (ell+1)^(-1/(8-d)) truncated at q.

    ``q`` sets the number of non-zero leading entries; ``d`` (< 8)
    controls the decay and hence the separation between the two regimes
    built from +/- beta.
    """
    if not 1 <= q <= L:
        raise ValueError(f"q={q} outside 1..L={L}")
    if d >= 8:
        raise ValueError("d must be < 8")
    ells = np.arange(L, dtype=float)
    beta = 0.9 * (ells + 1.0) ** (-1.0 / (8.0 - d))
    beta[q:] = 0.0
    return beta


def _noise_base(L: int) -> np.ndarray:
    """First-regime noise spectrum: 1 at ell=0, then 1/(ell(ell+1))."""
    c = np.empty(L)
    c[0] = 1.0
    ells = np.arange(1, L, dtype=float)
    c[1:] = 1.0 / (ells * (ells + 1.0))
    return c


def _noise_reduced(L: int) -> np.ndarray:
    """Second-regime noise spectrum: 0.5 at ell=0, then 0.5/(2 ell(ell+1))."""
    c = np.empty(L)
    c[0] = 0.5
    ells = np.arange(1, L, dtype=float)
    c[1:] = 0.5 / (2.0 * ells * (ells + 1.0))
    return c


def _segment(beta_signed: np.ndarray, noise: np.ndarray) -> SegmentSpec:
    return SegmentSpec(
        coeffs=ArCoefficients(p=1, phi=beta_signed.reshape(-1, 1)),
        noise_spectrum=noise,
    )


def scenario_table1(
    variant: str,
    q: int,
    d: float,
    seed: int,
    burn_in: int = DEFAULT_BURN_IN,
    junction: str = "continue",
) -> ScenarioSpec:
    """Single change point benchmark: n=200, L=10, AR(1).

    ``variant="balanced"`` places the change point at t=100 (relative
    location 0.5), ``"unbalanced"`` at t=50 (location 0.25). The first
    regime uses coefficients -beta with the base noise spectrum, the
    second +beta with the reduced spectrum.
    """
    if variant not in ("balanced", "unbalanced"):
        raise ValueError("variant must be 'balanced' or 'unbalanced'")
    n, L = 200, 10
    eta = 100 if variant == "balanced" else 50
    beta = build_beta(q, d, L)
    segments = (
        _segment(-beta, _noise_base(L)),
        _segment(+beta, _noise_reduced(L)),
    )
    return ScenarioSpec(
        n=n,
        L=L,
        p=1,
        partition=Partition(n=n, change_points=(eta,)),
        segments=segments,
        burn_in=burn_in,
        seed=seed,
        junction=junction,
    )


def scenario_epidemic(
    q: int,
    d: float,
    seed: int,
    burn_in: int = DEFAULT_BURN_IN,
    junction: str = "continue",
) -> ScenarioSpec:
    """Two change point benchmark: n=225, breaks at t=75 and t=150.

    The model parameters revert after the second change point, so the
    outer segments share coefficients -beta and the base noise spectrum
    while the middle segment uses +beta with the reduced spectrum.
    """
    n, L = 225, 10
    beta = build_beta(q, d, L)
    segments = (
        _segment(-beta, _noise_base(L)),
        _segment(+beta, _noise_reduced(L)),
        _segment(-beta, _noise_base(L)),
    )
    return ScenarioSpec(
        n=n,
        L=L,
        p=1,
        partition=Partition(n=n, change_points=(75, 150)),
        segments=segments,
        burn_in=burn_in,
        seed=seed,
        junction=junction,
    )


def _step_program(spec: ScenarioSpec) -> list[tuple[int, int, bool, bool]]:
    """Sequence of (count, segment, emit, reset_history) blocks."""
    program: list[tuple[int, int, bool, bool]] = [(spec.burn_in, 0, False, False)]
    for k, (start, end) in enumerate(spec.partition.segments()):
        if k > 0 and spec.junction == "restart":
            program.append((spec.burn_in, k, False, True))
        program.append((end - start + 1, k, True, False))
    return program


def simulate(spec: ScenarioSpec) -> CoefficientSeries:
    """Generate the coefficient series described by a scenario.

    Each (ell, m) component is an AR(p) recursion whose coefficients and
    innovation variance switch at the change points; the series starts
    from ``burn_in`` discarded warm-up steps of the first segment's
    dynamics. Output is bit-reproducible for a fixed spec.
    """
    program = _step_program(spec)
    total = sum(count for count, _, _, _ in program)
    data = np.empty((spec.n, spec.L * spec.L))

    for ell in range(spec.L):
        width = 2 * ell + 1
        noise = np.empty((total, width))
        for m in range(-ell, ell + 1):
            rng = np.random.default_rng([spec.seed, slot_index(ell, m)])
            noise[:, m + ell] = rng.standard_normal(total)

        hist = np.zeros((spec.p, width))  # hist[j-1] = value at lag j
        emitted = np.empty((spec.n, width))
        pos = 0
        row = 0
        for count, k, emit, reset in program:
            if reset:
                hist = np.zeros_like(hist)
            phi = spec.segments[k].coeffs.phi[ell]
            sigma = math.sqrt(spec.segments[k].noise_spectrum[ell])
            for _ in range(count):
                val = phi @ hist + sigma * noise[pos]
                hist[1:] = hist[:-1]
                hist[0] = val
                if emit:
                    emitted[row] = val
                    row += 1
                pos += 1
        data[:, ell * ell : (ell + 1) * (ell + 1)] = emitted

    return CoefficientSeries(n=spec.n, L=spec.L, data=data)
