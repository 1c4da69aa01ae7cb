"""
Outcome probabilities of periodic coarse-grained measurements.

Two independent routes give the probability ``p_l`` of outcome ``l`` when a
prepared state is measured with masks in the conjugate domain:

``pcg_probs_series``
    Fourier series of the measuring mask combined with closed-form overlaps
    of the masked Gaussian,

        p_l = 1/d + sum_{N != 0} c_N exp(i N phi_l) A(N tau),
        c_N = (1 - exp(-2 pi i N/d)) / (2 pi i N),
        phi_l = -2 pi l/d - z_cen tau,  tau = 2 pi / T,

    where ``A`` is the autocorrelation of the prepared amplitude.

``pcg_probs_quadrature``
    FFT of the grid state followed by direct integration of the conjugate
    density over each mask's intervals.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import (
    DomainMismatchError,
    NonConvergenceError,
    TruncationCapExceededError,
    WindowLeakageWarning,
)
from .grid import POSITION, GaussianSpec, Wavefunction, fourier_transform
from .masks import (
    PcgBasis,
    PreparedState,
    _envelope,
    masked_gaussian_overlap,
    masked_state,
    prepare_state,
    state_grid,
)

NEGATIVE_TOL = 1e-12
IMAG_TOL = 1e-8
LEAKAGE_TOL = 1e-6


@dataclass(frozen=True)
class SeriesParams:
    """Truncation controls for the autocorrelation series."""

    eps_truncate: float = 1e-12
    n_max_cap: int = 10**6

    def __post_init__(self):
        if not 0 < self.eps_truncate <= 1e-8:
            raise ValueError(f"eps_truncate must be in (0, 1e-8], got {self.eps_truncate}")


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """``d`` outcome probabilities.

    Values in ``[-1e-12, 0)`` are rounding noise and are clipped to zero;
    anything more negative is rejected.
    """

    probs: np.ndarray
    n_terms: int | None = None
    imag_residue: float = 0.0

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("need a 1-D array of at least two probabilities")
        if np.any(p < -NEGATIVE_TOL):
            raise ValueError(f"negative probability {p.min():.3g}")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def d(self) -> int:
        return self.probs.size

    @property
    def total(self) -> float:
        return float(np.sum(self.probs))

    def conditional(self) -> np.ndarray:
        return self.probs / self.total


def mask_coefficients(n, d: int) -> np.ndarray:
    """Fourier coefficients ``c_N`` of mask 0 for nonzero ``N``."""
    n = np.asarray(n, dtype=float)
    return (1.0 - np.exp(-2j * np.pi * n / d)) / (2j * np.pi * n)


def _check_domains(prep_domain: str, basis: PcgBasis):
    if prep_domain == basis.domain:
        raise DomainMismatchError(
            "measurement basis must live in the domain conjugate to the prepared state"
        )


def series_terms(prep: PreparedState, tau: float, params: SeriesParams) -> int:
    """Number of positive harmonics kept.

    ``|A(a)| <= exp(-a**2/(8 sd**2)) / q_k`` bounds every masked overlap, so
    terms beyond the returned ``N`` are below ``eps_truncate``.
    """
    _, sd = _envelope(prep.base, prep.domain)
    q = prep.norm_const**2
    log_ratio = math.log(1.0 / (params.eps_truncate * q))
    if log_ratio <= 0:
        return 1
    n_max = max(1, math.ceil(math.sqrt(8.0 * sd * sd * log_ratio) / tau))
    if n_max > params.n_max_cap:
        raise TruncationCapExceededError(
            f"series needs {n_max} terms, cap is {params.n_max_cap}"
        )
    return n_max


def pcg_probs_series(prep: PreparedState, basis: PcgBasis,
                     params: SeriesParams | None = None) -> OutcomeDistribution:
    """Outcome distribution from the autocorrelation series.

    ``basis`` must live in the domain conjugate to ``prep``.  For a
    momentum-prepared state measured in position the characteristic function
    at ``lambda`` is the momentum overlap at ``-lambda``.

    Raises
    ------
    TruncationCapExceededError
        If more than ``params.n_max_cap`` harmonics are needed.
    NonConvergenceError
        If pairing ``N`` with ``-N`` leaves an imaginary part above 1e-8 or a
        probability below -1e-12.
    """
    params = params or SeriesParams()
    _check_domains(prep.domain, basis)
    d = basis.d
    tau = basis.shift_quantum
    n_max = series_terms(prep, tau, params)
    n = np.concatenate([np.arange(-n_max, 0), np.arange(1, n_max + 1)])
    sign = 1.0 if prep.domain == POSITION else -1.0
    overlaps = masked_gaussian_overlap(prep, sign * n * tau)
    coeffs = mask_coefficients(n, d) * overlaps
    phi = -2.0 * np.pi * np.arange(d) / d - basis.origin * tau
    # reduce N*phi mod 2pi first: N*phi can be large
    phase = np.exp(1j * np.mod(np.outer(phi, n), 2.0 * np.pi))
    probs = 1.0 / d + phase @ coeffs
    residue = float(np.max(np.abs(probs.imag)))
    if residue > IMAG_TOL:
        raise NonConvergenceError(f"imaginary residue {residue:.3g} exceeds {IMAG_TOL:g}")
    if np.any(probs.real < -NEGATIVE_TOL):
        raise NonConvergenceError(f"series produced probability {probs.real.min():.3g}")
    return OutcomeDistribution(probs.real, n_terms=n_max, imag_residue=residue)


def _interval_edges(basis: PcgBasis, lo: float, hi: float):
    """Start points (shape d x n) of every mask interval meeting ``[lo, hi]``."""
    n0 = math.floor((lo - basis.origin) / basis.period) - 1
    n1 = math.ceil((hi - basis.origin) / basis.period) + 1
    periods = basis.origin + basis.period * np.arange(n0, n1 + 1)
    return periods[None, :] + basis.bin_width * np.arange(basis.d)[:, None]


def pcg_probs_quadrature(prep_wf: Wavefunction, basis: PcgBasis, pad: int = 8) -> OutcomeDistribution:
    """Outcome distribution by integrating the transformed grid density.

    The state is zero-padded ``pad``-fold and Fourier transformed.  The
    sampled density is periodic over the Brillouin zone ``2 pi/dx``; it is
    interpolated with a periodic cubic spline and each mask interval inside
    the zone is integrated from the spline antiderivative, so bins whose
    edges fall between samples get their exact fractional share of the
    interpolant.

    When the zone is a whole number of mask periods (``2 pi/T`` a multiple
    of ``dx``; see :func:`pcg_mub.masks.state_grid`) the binned result
    differs from the continuum only through the grid quadrature of the
    state.  Otherwise the aliased tail near the zone edge is binned
    approximately and a :class:`WindowLeakageWarning` gives the mass at risk.
    """
    _check_domains(prep_wf.domain, basis)
    conj = fourier_transform(prep_wf.padded(pad))
    grid = conj.grid
    zone = grid.length
    lo = grid.x_min
    hi = lo + zone
    z = np.append(grid.points, hi)
    rho = np.append(conj.density, conj.density[0])
    antider = CubicSpline(z, rho, bc_type="periodic").antiderivative()

    starts = _interval_edges(basis, lo, hi)
    a = np.clip(starts, lo, hi)
    b = np.clip(starts + basis.bin_width, lo, hi)
    probs = np.sum(antider(b) - antider(a), axis=1)

    periods = zone / basis.period
    if abs(periods - round(periods)) > 1e-9 * periods:
        edge = np.abs(grid.points - lo) < basis.period
        edge |= np.abs(grid.points - hi) < basis.period
        at_risk = float(np.sum(conj.density[edge]) * grid.dx)
        warnings.warn(
            f"zone holds {periods:.6g} mask periods (not an integer); "
            f"up to {at_risk:.2e} probability near the zone edge may be misbinned",
            WindowLeakageWarning, stacklevel=2,
        )
    total = float(np.sum(probs))
    if total < 1.0 - LEAKAGE_TOL:
        warnings.warn(f"outcome probabilities sum to {total:.9f}", WindowLeakageWarning,
                      stacklevel=2)
    return OutcomeDistribution(probs)


def shannon_entropy(dist) -> float:
    """Entropy in bits of a distribution (``0 log 0 = 0``).

    Accepts an :class:`OutcomeDistribution` or a probability array; the
    result is clamped to ``[0, log2 d]`` to absorb rounding.
    """
    p = dist.probs if isinstance(dist, OutcomeDistribution) else np.asarray(dist, dtype=float)
    nz = p[p > 0]
    h = float(-np.sum(nz * np.log2(nz)))
    return min(max(h, 0.0), math.log2(p.size))


def _row(g, prep_basis, meas_basis, k, method, params, pad, samples_per_bin):
    if method == "series":
        prep = masked_state(g, prep_basis, k)
        dist = pcg_probs_series(prep, meas_basis, params)
    elif method == "quadrature":
        grid = state_grid(g, prep_basis, meas_basis.period, samples_per_bin)
        _, wf = prepare_state(g, prep_basis, k, grid)
        dist = pcg_probs_quadrature(wf, meas_basis, pad)
    else:
        raise ValueError(f"unknown method {method!r}")
    return dist.conditional()


def conditional_matrix(g: GaussianSpec, prep_basis: PcgBasis, meas_basis: PcgBasis,
                       method: str = "series", params: SeriesParams | None = None,
                       pad: int = 8, samples_per_bin: int = 32, jobs: int | None = None) -> np.ndarray:
    """``d x d`` matrix of ``p_{l|k}``: row ``k`` is the outcome distribution of ``|Psi_k>``.

    Parameters
    ----------
    g : GaussianSpec
        Building state.
    prep_basis, meas_basis : PcgBasis
        Preparation and measurement masks, in conjugate domains.  The usual
        arrangement prepares in position; preparing in momentum gives the
        swapped test.
    method : {"series", "quadrature"}
    jobs : int, optional
        Rows are independent and computed on up to ``jobs`` threads; the
        result does not depend on the number of workers.
    """
    if prep_basis.d != meas_basis.d:
        raise ValueError(f"dimension mismatch: {prep_basis.d} vs {meas_basis.d}")
    _check_domains(prep_basis.domain, meas_basis)

    def row(k):
        return _row(g, prep_basis, meas_basis, k, method, params, pad, samples_per_bin)

    ks = range(prep_basis.d)
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(row, ks))
    else:
        rows = [row(k) for k in ks]
    return np.vstack(rows)


def row_entropies(matrix: np.ndarray) -> np.ndarray:
    return np.array([shannon_entropy(r) for r in matrix])
