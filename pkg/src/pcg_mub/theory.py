"""
Number-theoretic side of periodic coarse graining.

With hbar = 1, position masks of period ``T_x`` and momentum masks of period
``T_p`` are mutually unbiased when ``T_x*T_p = 2*pi*d/m`` for a positive
integer ``m`` such that ``m*n/d`` is never an integer for ``n = 1..d-1``.
Only ``m mod d`` matters for the second condition.

Standard (contiguous, non-periodic) binning is included as the biased
counterexample: a flat state filling one position bin spreads over the
momentum bins with a sinc**2 profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

REL_TOL = 1e-12


def is_unbiased_config(d: int, m: int) -> bool:
    """True iff ``m*n`` is not divisible by ``d`` for every ``n`` in ``1..d-1``.

    Pure integer arithmetic; the coprimality shortcut is deliberately not used.
    """
    d, m = int(d), int(m)
    if d < 2 or m < 1:
        raise ValueError(f"need d >= 2 and m >= 1, got d={d}, m={m}")
    return all((m * n) % d != 0 for n in range(1, d))


def unbiased_residue_table(d: int) -> np.ndarray:
    """Boolean table over residues ``r = 0..d-1`` of the same literal predicate.

    Vectorised: builds ``r*n mod d`` for all ``n = 1..d-1`` in int32 (exact
    for ``d < 46341``).
    """
    d = int(d)
    if d < 2:
        raise ValueError(f"need d >= 2, got d={d}")
    if d >= 46341:
        raise ValueError("d too large for the int32 table")
    r = np.arange(d, dtype=np.int32)
    prod = np.multiply.outer(r, r[1:])
    prod %= d
    return prod.all(axis=1)


def is_unbiased_many(d: int, m) -> np.ndarray:
    """:func:`is_unbiased_config` over an integer array ``m``.

    ``m*n = (m mod d)*n (mod d)``, so the residue table decides every entry.
    """
    m = np.asarray(m, dtype=np.int64)
    if np.any(m < 1):
        raise ValueError("need m >= 1")
    return unbiased_residue_table(d)[m % d]


def allowed_m_residues(d: int) -> list[int]:
    """Residues ``m' in 1..d-1`` that give unbiased measurements."""
    return [m for m in range(1, d) if is_unbiased_config(d, m)]


def momentum_period(d: int, m: int, tx: float) -> float:
    """``T_p = 2*pi*d/(m*T_x)``."""
    if d < 2 or m < 1 or not tx > 0:
        raise ValueError(f"need d >= 2, m >= 1, T_x > 0; got d={d}, m={m}, T_x={tx}")
    return 2.0 * np.pi * d / (m * tx)


def shift_quantum(tp: float) -> float:
    """``tau_p = 2*pi/T_p``, equal to ``m*T_x/d`` on an unbiased configuration."""
    return 2.0 * np.pi / tp


@dataclass(frozen=True)
class MubConfig:
    d: int
    m: int
    tx: float
    tp: float

    @classmethod
    def from_m(cls, d: int, m: int, tx: float) -> MubConfig:
        return cls(d, m, tx, momentum_period(d, m, tx))

    @property
    def m_residue(self) -> int:
        return self.m % self.d

    @property
    def sx(self) -> float:
        return self.tx / self.d

    @property
    def sp(self) -> float:
        return self.tp / self.d

    @property
    def tau_p(self) -> float:
        return shift_quantum(self.tp)

    def period_condition(self) -> bool:
        """``T_x*T_p/(2*pi) == d/m`` to relative 1e-12."""
        return math.isclose(self.tx * self.tp / (2 * np.pi), self.d / self.m, rel_tol=REL_TOL)

    def is_unbiased(self) -> bool:
        return self.period_condition() and is_unbiased_config(self.d, self.m)


def equivalent_forms_check(cfg: MubConfig, rel_tol: float = REL_TOL) -> bool:
    """Check ``s_x*s_p = 2pi/(m d)``, ``T_x*s_p = 2pi/m`` and ``s_x*T_p = 2pi/m``."""
    two_pi = 2.0 * np.pi
    forms = (
        (cfg.sx * cfg.sp, two_pi / (cfg.m * cfg.d)),
        (cfg.tx * cfg.sp, two_pi / cfg.m),
        (cfg.sx * cfg.tp, two_pi / cfg.m),
    )
    return all(math.isclose(lhs, rhs, rel_tol=rel_tol) for lhs, rhs in forms)


@dataclass(frozen=True)
class StandardCgConfig:
    """Contiguous binning: position bins of width ``delta_x``, momentum bins ``delta_p``."""

    delta_x: float
    delta_p: float

    def __post_init__(self):
        if not (self.delta_x > 0 and self.delta_p > 0):
            raise ValueError("bin widths must be positive")


def rect_momentum_density(p, width: float):
    """``|psi~(p)|**2 = (width/2pi) sinc**2(p*width/2)`` for the flat state on ``|x| <= width/2``."""
    u = np.asarray(p, dtype=float) * width / 2.0
    return width / (2.0 * np.pi) * np.sinc(u / np.pi) ** 2


def standard_cg_distribution(cfg: StandardCgConfig, l_range, epsrel: float = 1e-10) -> np.ndarray:
    """Momentum-bin probabilities of the flat state filling position bin 0.

    Bin ``l`` is ``[(l - 1/2) delta_p, (l + 1/2) delta_p]``.  Each probability
    is an adaptive-quadrature integral of the sinc**2 density.

    Parameters
    ----------
    cfg : StandardCgConfig
    l_range : iterable of int
        Bin labels, e.g. ``range(-200, 201)``.
    """
    labels = np.asarray(list(l_range), dtype=int)
    out = np.empty(labels.shape)
    # integrate in the dimensionless variable u = p*delta_x/2: density sinc**2(u)/pi
    scale = cfg.delta_x * cfg.delta_p / 2.0
    for i, l in enumerate(labels):
        a, b = (l - 0.5) * scale, (l + 0.5) * scale
        val, _ = integrate.quad(lambda u: np.sinc(u / np.pi) ** 2, a, b,
                                epsabs=0.0, epsrel=epsrel, limit=200)
        out[i] = val / np.pi
    return out
