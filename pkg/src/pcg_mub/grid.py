"""
Uniform-grid wavefunctions in canonical units (hbar = 1).

Lengths are in micrometres and momenta in rad/um.  Samples sit at cell
centres, ``x_n = x_min + n*dx``, so the cell boundaries are
``x_min - dx/2 + n*dx``.  Grids built by :func:`aligned_grid` put every mask
edge on a cell boundary, which removes the O(dx) edge error a pointwise mask
would otherwise introduce.

The Fourier convention is the unitary plane-wave one,

    psi~(p) = (2*pi)**-0.5 * integral dx exp(-i p x) psi(x),

evaluated on the conjugate grid with spacing ``dp = 2*pi/(N*dx)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import ShiftOutOfRangeError, WindowTooSmallError

POSITION = "position"
MOMENTUM = "momentum"
DOMAINS = (POSITION, MOMENTUM)

# a Gaussian envelope is below 1e-14 of its peak density beyond 8 sigma
GAUSSIAN_SPAN = 8.0


def other_domain(domain: str) -> str:
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}")
    return MOMENTUM if domain == POSITION else POSITION


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D sample grid.

    Parameters
    ----------
    n_samples : int
        Number of samples, at least 2.
    x_min : float
        Location of the first sample (a cell centre).
    dx : float
        Sample spacing.
    """

    n_samples: int
    x_min: float
    dx: float

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ValueError(f"n_samples must be an integer >= 2, got {self.n_samples}")
        if not self.dx > 0:
            raise ValueError(f"dx must be positive, got {self.dx}")
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_samples)

    @property
    def lower(self) -> float:
        """Left edge of the first cell."""
        return self.x_min - 0.5 * self.dx

    @property
    def upper(self) -> float:
        """Right edge of the last cell."""
        return self.x_min + (self.n_samples - 0.5) * self.dx

    @property
    def length(self) -> float:
        return self.n_samples * self.dx

    @property
    def conjugate_spacing(self) -> float:
        return 2.0 * np.pi / (self.n_samples * self.dx)

    def conjugate(self) -> Grid:
        """Centred conjugate grid, ``p_k = (k - N//2) * dp``."""
        dp = self.conjugate_spacing
        return Grid(self.n_samples, -(self.n_samples // 2) * dp, dp)

    def covers(self, lo: float, hi: float) -> bool:
        return self.lower <= lo and hi <= self.upper

    def padded(self, factor: int) -> Grid:
        """Same spacing and origin, ``factor`` times as many samples."""
        return Grid(self.n_samples * int(factor), self.x_min, self.dx)


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian building state ``psi(x) ~ exp(-(x - center)**2 / (4 sigma**2))``.

    ``sigma`` is the position standard deviation of ``|psi|**2``.
    """

    sigma: float
    center: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def momentum_sigma(self) -> float:
        return 0.5 / self.sigma

    def amplitude(self, x) -> np.ndarray:
        """Analytically normalised position amplitude."""
        x = np.asarray(x, dtype=float)
        norm = (2.0 * np.pi * self.sigma**2) ** -0.25
        return norm * np.exp(-((x - self.center) ** 2) / (4.0 * self.sigma**2))

    def momentum_amplitude(self, p) -> np.ndarray:
        """Analytically normalised momentum amplitude (carries the centre phase)."""
        p = np.asarray(p, dtype=float)
        sp = self.momentum_sigma
        norm = (2.0 * np.pi * sp**2) ** -0.25
        return norm * np.exp(-(p**2) / (4.0 * sp**2)) * np.exp(-1j * p * self.center)


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """Complex amplitudes on a grid, tagged with their domain.

    ``conjugate_min`` is the first sample of the conjugate-domain grid the
    amplitudes were (or will be) transformed from/to; the Fourier phase
    depends on it.
    """

    grid: Grid
    amplitudes: np.ndarray
    domain: str = POSITION
    conjugate_min: float | None = None

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n_samples,):
            raise ValueError(
                f"amplitudes have shape {amps.shape}, grid expects ({self.grid.n_samples},)"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.conjugate_min is None:
            object.__setattr__(self, "conjugate_min", self.grid.conjugate().x_min)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(self.density) * self.grid.dx)

    def normalized(self) -> Wavefunction:
        n2 = self.norm_squared()
        if n2 <= 0:
            raise ValueError("cannot normalise a zero wavefunction")
        return self.with_amplitudes(self.amplitudes / math.sqrt(n2))

    def with_amplitudes(self, amplitudes) -> Wavefunction:
        return Wavefunction(self.grid, amplitudes, self.domain, self.conjugate_min)

    def padded(self, factor: int) -> Wavefunction:
        """Zero-pad on the right to ``factor`` times the window.

        Padding refines the conjugate grid; the conjugate origin is reset to
        the centred convention of the new grid.
        """
        grid = self.grid.padded(factor)
        amps = np.zeros(grid.n_samples, dtype=complex)
        amps[: self.grid.n_samples] = self.amplitudes
        return Wavefunction(grid, amps, self.domain)


def make_gaussian(grid: Grid, spec: GaussianSpec) -> Wavefunction:
    """Normalised position-domain Gaussian sampled on ``grid``.

    Raises
    ------
    WindowTooSmallError
        If the grid does not cover ``center +/- 8 sigma``.
    """
    lo = spec.center - GAUSSIAN_SPAN * spec.sigma
    hi = spec.center + GAUSSIAN_SPAN * spec.sigma
    if not grid.covers(lo, hi):
        raise WindowTooSmallError(
            f"grid window [{grid.lower:g}, {grid.upper:g}] does not cover "
            f"[{lo:g}, {hi:g}] (center +/- {GAUSSIAN_SPAN:g} sigma)"
        )
    return Wavefunction(grid, spec.amplitude(grid.points), POSITION).normalized()


def _fourier(amps, grid: Grid, out_min: float, sign: int) -> np.ndarray:
    # sum_n a_n exp(sign*i*q_k*x_n) with q_k = out_min + k*dq, dq*dx = 2*pi/N
    n = grid.n_samples
    dq = 2.0 * np.pi / (n * grid.dx)
    idx = np.arange(n)
    pre = amps * np.exp(sign * 1j * out_min * idx * grid.dx)
    core = np.fft.fft(pre) if sign < 0 else np.fft.ifft(pre) * n
    q = out_min + dq * idx
    return core * np.exp(sign * 1j * q * grid.x_min)


def fourier_transform(wf: Wavefunction) -> Wavefunction:
    """Unitary transform to the conjugate domain.

    Position input gives ``psi~(p_k) = dx/sqrt(2 pi) sum_n exp(-i p_k x_n) psi_n``;
    momentum input is transformed back with the opposite sign, so
    ``fourier_transform(fourier_transform(wf))`` reproduces ``wf``.
    """
    grid = wf.grid
    out_grid = Grid(grid.n_samples, wf.conjugate_min, grid.conjugate_spacing)
    sign = -1 if wf.domain == POSITION else 1
    amps = _fourier(wf.amplitudes, grid, out_grid.x_min, sign)
    amps = amps * grid.dx / math.sqrt(2.0 * np.pi)
    return Wavefunction(out_grid, amps, other_domain(wf.domain), grid.x_min)


def inverse_fourier_transform(wf: Wavefunction) -> Wavefunction:
    if wf.domain != MOMENTUM:
        raise ValueError("inverse transform expects a momentum-domain wavefunction")
    return fourier_transform(wf)


def _is_commensurate(shift: float, dx: float, tol: float = 1e-9) -> tuple[bool, int]:
    j = round(shift / dx)
    return abs(shift / dx - j) <= tol, int(j)


def autocorrelation(wf: Wavefunction, shift: float) -> complex:
    """Overlap ``integral dx psi*(x) psi(x + shift)`` of a grid state.

    Grid-commensurate shifts are an exact sample sum.  Other shifts use
    band-limited (Fourier-phase) interpolation on a 2x zero-padded copy:
    the result is then the characteristic function of the sampled state's
    momentum density at ``shift``.  This is exact for states whose spectrum
    vanishes near the Nyquist band ``|p| = pi/dx``; otherwise the error is
    bounded by twice the momentum mass beyond that band (O(dx/s) for a state
    with jumps at spacing ``s``, so use commensurate shifts for masked states).

    Raises
    ------
    ShiftOutOfRangeError
        If ``|shift|`` is not smaller than the window length.
    """
    grid = wf.grid
    if not abs(shift) < grid.length:
        raise ShiftOutOfRangeError(
            f"|shift| = {abs(shift):g} must be smaller than the window {grid.length:g}"
        )
    psi = wf.amplitudes
    exact, j = _is_commensurate(shift, grid.dx)
    if exact:
        if j >= 0:
            val = np.vdot(psi[: grid.n_samples - j], psi[j:])
        else:
            val = np.vdot(psi[-j:], psi[: grid.n_samples + j])
        return complex(val * grid.dx)
    n2 = 2 * grid.n_samples
    spec = np.fft.fft(psi, n2)
    freq = 2.0 * np.pi * np.fft.fftfreq(n2, d=grid.dx)
    shifted = np.fft.ifft(spec * np.exp(1j * freq * shift))[: grid.n_samples]
    return complex(np.vdot(psi, shifted) * grid.dx)


def momentum_autocorrelation(wf: Wavefunction, shift: float) -> complex:
    """``integral dp e^{i shift p} |psi~(p)|^2`` evaluated on the momentum grid."""
    mom = fourier_transform(wf.padded(2)) if wf.domain == POSITION else wf
    p = mom.grid.points
    return complex(np.sum(np.exp(1j * shift * p) * mom.density) * mom.grid.dx)


def commensurate_subdivision(
    bin_width: float, shift_quantum: float | None, minimum: int = 32, max_denominator: int = 64
) -> tuple[int, bool]:
    """Samples per bin so that ``shift_quantum`` is a whole number of samples.

    Returns ``(n, exact)`` where ``dx = bin_width/n``.  ``exact`` is False if
    ``shift_quantum/bin_width`` is not a rational with denominator at most
    ``max_denominator``; ``n`` is then just ``minimum``.
    """
    if shift_quantum is None:
        return minimum, True
    ratio = shift_quantum / bin_width
    frac = Fraction(ratio).limit_denominator(max_denominator)
    if abs(float(frac) - ratio) > 1e-9 * max(ratio, 1.0):
        return minimum, False
    q = frac.denominator
    return q * math.ceil(minimum / q), True


def aligned_grid(
    period: float,
    d: int,
    origin: float,
    center: float,
    half_width: float,
    shift_quantum: float | None = None,
    samples_per_bin: int = 32,
) -> Grid:
    """Grid whose cell boundaries contain every edge of a periodic mask.

    The window is a whole number of periods starting on a mask edge and
    covers ``center +/- half_width``.  With ``shift_quantum`` given (the
    conjugate ``2*pi/T`` of the measured period) the spacing is chosen so the
    quantum is a whole number of samples when that is possible.
    """
    s = period / d
    n_sub, _ = commensurate_subdivision(s, shift_quantum, samples_per_bin)
    dx = s / n_sub
    start = origin + math.floor((center - half_width - origin) / period) * period
    stop = origin + math.ceil((center + half_width - origin) / period) * period
    n = int(round((stop - start) / dx))
    return Grid(n, start + 0.5 * dx, dx)


def default_grid(tx: float, d: int, spec: GaussianSpec, x_cen: float = 0.0) -> Grid:
    """Position grid covering +/- 8 sigma with 32 samples per mask bin."""
    return aligned_grid(tx, d, x_cen, spec.center, GAUSSIAN_SPAN * spec.sigma)
