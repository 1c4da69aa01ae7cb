"""
Periodic coarse-graining masks and the masked (prepared) states.

A ``PcgBasis`` with ``d`` outcomes, period ``T`` and origin ``z_cen`` assigns
outcome ``j`` to every ``z`` with ``j*s <= (z - z_cen) mod T < (j+1)*s``,
``s = T/d``.  The bins are half-open, so every real ``z`` belongs to exactly
one of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .exceptions import DomainMismatchError, WindowTooSmallError, ZeroSupportError
from .grid import (
    DOMAINS,
    GAUSSIAN_SPAN,
    MOMENTUM,
    POSITION,
    GaussianSpec,
    Grid,
    Wavefunction,
    aligned_grid,
)

ZERO_SUPPORT = 1e-30
# standard normal tail beyond this many sigma is below 1e-16 relative
ISLAND_SPAN = 8.5
SAMPLES_PER_SIGMA = 32


@dataclass(frozen=True)
class PcgBasis:
    """``d`` periodic square-wave masks of period ``period`` on one domain."""

    d: int
    period: float
    origin: float = 0.0
    domain: str = POSITION

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def bin_width(self) -> float:
        return self.period / self.d

    @property
    def shift_quantum(self) -> float:
        """Conjugate shift ``2*pi/T`` probed by this basis' Fourier harmonics."""
        return 2.0 * np.pi / self.period

    def bin_index(self, z) -> np.ndarray:
        """Outcome label of every ``z``."""
        z = np.asarray(z, dtype=float)
        u = np.mod(z - self.origin, self.period)
        j = np.floor(u / self.bin_width).astype(np.int64)
        # u can round up to exactly `period` for tiny negative offsets
        return np.minimum(j, self.d - 1)

    def _check_index(self, j):
        if int(j) != j or not 0 <= j < self.d:
            raise IndexError(f"bin index {j} outside 0..{self.d - 1}")


def mask_value(basis: PcgBasis, j: int, z):
    """Indicator ``M_j(z - z_cen; T)``; scalar in, int out; array in, int array out."""
    basis._check_index(j)
    out = (basis.bin_index(z) == j).astype(int)
    return int(out) if np.ndim(out) == 0 else out


def apply_mask(wf: Wavefunction, basis: PcgBasis, j: int) -> Wavefunction:
    """Project ``wf`` onto mask ``j`` (unnormalised); norm**2 of the result is q_j."""
    if wf.domain != basis.domain:
        raise DomainMismatchError(
            f"wavefunction is in {wf.domain} domain, basis in {basis.domain} domain"
        )
    return wf.with_amplitudes(wf.amplitudes * mask_value(basis, j, wf.grid.points))


def _envelope(spec: GaussianSpec, domain: str) -> tuple[float, float]:
    """(centre, standard deviation) of the density envelope in ``domain``."""
    if domain == POSITION:
        return spec.center, spec.sigma
    return 0.0, spec.momentum_sigma


def islands(basis: PcgBasis, k: int, lo: float, hi: float) -> np.ndarray:
    """Start points of the intervals of mask ``k`` that meet ``[lo, hi]``."""
    first = basis.origin + k * basis.bin_width
    n0 = math.floor((lo - first) / basis.period) - 1
    n1 = math.ceil((hi - first) / basis.period) + 1
    return first + basis.period * np.arange(n0, n1 + 1)


def gaussian_bin_mass(spec: GaussianSpec, basis: PcgBasis, k: int) -> float:
    """Analytic ``q_k`` of the Gaussian for mask ``k`` (sum of normal-CDF differences)."""
    mu, sd = _envelope(spec, basis.domain)
    a = islands(basis, k, mu - ISLAND_SPAN * sd, mu + ISLAND_SPAN * sd)
    return float(np.sum(ndtr((a + basis.bin_width - mu) / sd) - ndtr((a - mu) / sd)))


@dataclass(frozen=True)
class PreparedState:
    """Normalised projection of a Gaussian onto mask ``k`` of ``basis``.

    ``norm_const`` is ``sqrt(q_k)``.  When ``basis`` lives in momentum space
    the state is the Gaussian's momentum amplitude masked in momentum.
    """

    base: GaussianSpec
    basis: PcgBasis
    k: int
    norm_const: float

    @property
    def domain(self) -> str:
        return self.basis.domain

    def amplitude(self, z) -> np.ndarray:
        """Amplitude in the state's own domain."""
        if self.domain == POSITION:
            g = self.base.amplitude(z)
        else:
            g = self.base.momentum_amplitude(z)
        return mask_value(self.basis, self.k, z) * g / self.norm_const


def state_grid(spec: GaussianSpec, basis: PcgBasis, conjugate_period: float | None = None,
               samples_per_bin: int = 32) -> Grid:
    """Mask-aligned grid for a prepared state.

    ``conjugate_period`` is the period of the basis the state will be
    measured in; the grid spacing then divides its shift quantum whenever
    possible.  The spacing is also kept below ``sd/32`` so a narrow
    envelope inside a wide bin is still resolved.
    """
    mu, sd = _envelope(spec, basis.domain)
    quantum = None if conjugate_period is None else 2.0 * np.pi / conjugate_period
    per_bin = max(samples_per_bin, math.ceil(SAMPLES_PER_SIGMA * basis.bin_width / sd))
    return aligned_grid(basis.period, basis.d, basis.origin, mu, (GAUSSIAN_SPAN + 1) * sd,
                        quantum, per_bin)


def prepare_state(g: GaussianSpec, basis: PcgBasis, k: int, grid: Grid | None = None):
    """Masked, normalised Gaussian ``|Psi_k>``.

    Parameters
    ----------
    g : GaussianSpec
    basis : PcgBasis
        Preparation masks; a momentum-domain basis masks the momentum amplitude.
    k : int
    grid : Grid, optional
        Grid in the basis' domain; defaults to :func:`state_grid`.

    Returns
    -------
    (PreparedState, Wavefunction)
        The analytic description and its grid representation.

    Raises
    ------
    ZeroSupportError
        If the mask captures less than 1e-30 of the state on the grid.
    WindowTooSmallError
        If the grid does not cover the envelope +/- 8 sigma.
    """
    basis._check_index(k)
    if grid is None:
        grid = state_grid(g, basis)
    x = grid.points
    if basis.domain == POSITION:
        amps = g.amplitude(x)
    else:
        amps = g.momentum_amplitude(x)
    amps = amps * mask_value(basis, k, x)
    captured = float(np.sum(np.abs(amps) ** 2) * grid.dx)
    if not captured >= ZERO_SUPPORT:
        raise ZeroSupportError(f"mask {k} captures {captured:.3g} of the state on this grid")
    mu, sd = _envelope(g, basis.domain)
    if not grid.covers(mu - GAUSSIAN_SPAN * sd, mu + GAUSSIAN_SPAN * sd):
        raise WindowTooSmallError(
            f"grid [{grid.lower:g}, {grid.upper:g}] does not cover the state's "
            f"{GAUSSIAN_SPAN:g}-sigma envelope around {mu:g}"
        )
    wf = Wavefunction(grid, amps, basis.domain).normalized()
    return masked_state(g, basis, k), wf


def masked_state(g: GaussianSpec, basis: PcgBasis, k: int) -> PreparedState:
    """Analytic description of ``|Psi_k>`` without building a grid."""
    basis._check_index(k)
    q = gaussian_bin_mass(g, basis, k)
    if not q >= ZERO_SUPPORT:
        raise ZeroSupportError(f"q_{k} = {q:.3g}")
    return PreparedState(g, basis, int(k), math.sqrt(q))


def _overlap_pieces(s: float, period: float, shift):
    """Per-period intersection of ``[0, s)`` with ``[0, s) - shift`` (mod period).

    Returns two candidate intervals ``(lo, hi)`` relative to an island start;
    at most one is non-empty when ``s <= period/2``, both may be for d = 1.
    """
    u = np.mod(shift, period)
    lo1, hi1 = np.maximum(0.0, -u), np.minimum(s, s - u)
    lo2, hi2 = np.maximum(0.0, period - u), np.minimum(s, period - u + s)
    return (lo1, hi1), (lo2, hi2)


def masked_gaussian_overlap(prep: PreparedState, shift):
    """Closed-form ``integral dz psi_k*(z) psi_k(z + shift)``.

    The product of the Gaussian with its shifted copy is a Gaussian of the
    same width centred half a shift away, damped by
    ``exp(-shift**2/(8 sd**2))``; the masked overlap is that Gaussian
    integrated over the intersection of the islands with their shifted
    images.  Islands where the envelope is below 1e-16 are dropped.
    Accepts scalar or array ``shift``.
    """
    shift_arr = np.atleast_1d(np.asarray(shift, dtype=float))
    mu0, sd = _envelope(prep.base, prep.domain)
    basis = prep.basis
    s = basis.bin_width
    (lo1, hi1), (lo2, hi2) = _overlap_pieces(s, basis.period, shift_arr)
    mu = mu0 - 0.5 * shift_arr
    starts = islands(basis, prep.k, mu.min() - ISLAND_SPAN * sd, mu.max() + ISLAND_SPAN * sd)
    rel = (starts[None, :] - mu[:, None]) / sd
    total = np.zeros(shift_arr.shape)
    for lo, hi in ((lo1, hi1), (lo2, hi2)):
        width = np.maximum(hi - lo, 0.0)
        z0 = rel + (lo / sd)[:, None]
        z1 = rel + (lo + width)[:, None] / sd
        total += np.sum(ndtr(z1) - ndtr(z0), axis=1)
    out = (np.exp(-(shift_arr**2) / (8.0 * sd * sd)) * total).astype(complex)
    out /= prep.norm_const**2
    if prep.domain == MOMENTUM and prep.base.center != 0.0:
        out *= np.exp(-1j * shift_arr * prep.base.center)
    return complex(out[0]) if np.ndim(shift) == 0 else out
