"""
Virtual optical experiment: Fourier-lens unit bridge, SLM pixel quantisation,
entropy scans over the measurement period and the optimal-period search.

Physical measurement-plane periods ``tp_phys`` (um) map to canonical momentum
periods through ``T_p = tp_phys / alpha`` with ``alpha = f_e * lambda / (2 pi)``
(um**2).  Unbiasedness with ``m = 1`` then sits at ``tp_phys = f_e*lambda*d/T_x``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterator, Sequence

import numpy as np

from .exceptions import DegenerateWidthError, WindowMissError
from .grid import MOMENTUM, POSITION, GaussianSpec
from .masks import PcgBasis
from .probability import SeriesParams, conditional_matrix, row_entropies


@dataclass(frozen=True)
class PhysicalSetup:
    """Fourier-lens setup; defaults are a HeNe beam, 100 mm lens and 8 um SLM pixels."""

    f_e_mm: float = 100.0
    lambda_nm: float = 633.0
    slm_pixel_um: float = 8.0

    def __post_init__(self):
        if not (self.f_e_mm > 0 and self.lambda_nm > 0 and self.slm_pixel_um > 0):
            raise ValueError("setup constants must be positive")

    @property
    def f_lambda_um2(self) -> float:
        """``f_e * lambda`` in um**2."""
        return (self.f_e_mm * 1e3) * (self.lambda_nm * 1e-3)

    @property
    def alpha(self) -> float:
        return self.f_lambda_um2 / (2.0 * math.pi)

    def predicted_period(self, d: int, tx: float, m: int = 1) -> float:
        """Physical measurement period satisfying ``T_x * tp_phys = f_e lambda d / m``."""
        return self.f_lambda_um2 * d / (tx * m)


def physical_to_canonical(tp_phys: float, setup: PhysicalSetup) -> float:
    if not tp_phys > 0:
        raise ValueError(f"period must be positive, got {tp_phys}")
    return tp_phys / setup.alpha


def canonical_to_physical(tp: float, setup: PhysicalSetup) -> float:
    if not tp > 0:
        raise ValueError(f"period must be positive, got {tp}")
    return tp * setup.alpha


def pixel_quantize(length: float, setup: PhysicalSetup) -> float:
    """Nearest whole number of SLM pixels, halves rounded away from zero.

    Raises
    ------
    DegenerateWidthError
        If the result would be zero pixels.
    """
    ratio = Decimal(repr(length)) / Decimal(repr(setup.slm_pixel_um))
    n = int(ratio.to_integral_value(rounding=ROUND_HALF_UP))
    if n == 0:
        raise DegenerateWidthError(f"{length:g} um rounds to zero pixels")
    return n * setup.slm_pixel_um


@dataclass(frozen=True, eq=False)
class ScanRow:
    """Entropies ``E_k`` of every preparation at one measurement period."""

    tp_phys: float
    entropies: np.ndarray
    matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def e_min(self) -> float:
        return float(np.min(self.entropies))

    @property
    def e_max(self) -> float:
        return float(np.max(self.entropies))


@dataclass(frozen=True)
class ScanSettings:
    """Everything except the period needed to evaluate one scan point."""

    d: int
    tx: float
    g: GaussianSpec
    setup: PhysicalSetup = PhysicalSetup()
    x_cen: float = 0.0
    p_cen: float | None = None
    method: str = "series"
    params: SeriesParams = SeriesParams()
    keep_matrix: bool = False

    def bases(self, tp_phys: float) -> tuple[PcgBasis, PcgBasis]:
        """Position and momentum masks; ``p_cen=None`` centres momentum bin 0 on p = 0."""
        tp = physical_to_canonical(tp_phys, self.setup)
        p_cen = -0.5 * tp / self.d if self.p_cen is None else self.p_cen
        return (PcgBasis(self.d, self.tx, self.x_cen, POSITION),
                PcgBasis(self.d, tp, p_cen, MOMENTUM))

    def evaluate(self, tp_phys: float) -> ScanRow:
        bx, bp = self.bases(tp_phys)
        mat = conditional_matrix(self.g, bx, bp, self.method, self.params)
        return ScanRow(float(tp_phys), row_entropies(mat), mat if self.keep_matrix else None)


def scan_points(tp_range: tuple[float, float], step: float, setup: PhysicalSetup | None = None,
                max_tp: float | None = None) -> list[float]:
    """``lo, lo + step, ...`` up to ``hi`` (inclusive), optionally pixel-quantised.

    With ``setup`` given, ``lo`` is snapped to the pixel grid first so every
    point is a realisable period.  ``max_tp`` caps the points at a detection
    range.
    """
    lo, hi = tp_range
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if hi < lo:
        raise ValueError(f"empty scan range [{lo:g}, {hi:g}]")
    if setup is not None:
        lo = pixel_quantize(lo, setup)
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    pts = [lo + i * step for i in range(max(count, 1))]
    if max_tp is not None:
        pts = [p for p in pts if p <= max_tp]
    return pts


def _ordered_map(func, items: Sequence, jobs: int | None) -> Iterator:
    # results come back in input order regardless of worker scheduling
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            yield from pool.map(func, items)
    else:
        for item in items:
            yield func(item)


def iter_entropy_scan(settings: ScanSettings, points: Sequence[float],
                      jobs: int | None = None) -> Iterator[ScanRow]:
    """Yield one :class:`ScanRow` per period, in the order of ``points``."""
    yield from _ordered_map(settings.evaluate, list(points), jobs)


def entropy_scan(d: int, tx: float, g: GaussianSpec, setup: PhysicalSetup,
                 tp_range: tuple[float, float], step: float | None = None, *,
                 quantize: bool = True, method: str = "series", x_cen: float = 0.0,
                 p_cen: float | None = None, max_tp: float | None = None, keep_matrix: bool = False,
                 jobs: int | None = None) -> list[ScanRow]:
    """Entropies of all preparations across measurement periods.

    Parameters
    ----------
    d, tx : int, float
        Dimension and position period (um).
    g : GaussianSpec
    setup : PhysicalSetup
    tp_range : (float, float)
        Physical period range (um), inclusive.
    step : float, optional
        Period step.  Defaults to ``d * slm_pixel_um``: one pixel of bin
        width per step, as on the SLM.  Must be at least one pixel when
        ``quantize`` is set.
    quantize : bool
        Snap the start to the pixel grid (experimental mode).  Set False
        with a fine step for the continuous theory curve.
    p_cen : float, optional
        Momentum mask origin (rad/um).  By default bin 0 is centred on the
        optical axis, ``p_cen = -s_p/2``; even-``m`` periods are then the
        entropy minima.
    """
    if step is None:
        step = d * setup.slm_pixel_um
    if quantize and step < setup.slm_pixel_um:
        raise ValueError(f"step {step:g} um is below one pixel ({setup.slm_pixel_um:g} um)")
    settings = ScanSettings(d, tx, g, setup, x_cen, p_cen, method, keep_matrix=keep_matrix)
    points = scan_points(tp_range, step, setup if quantize else None, max_tp)
    return list(iter_entropy_scan(settings, points, jobs))


@dataclass(frozen=True, eq=False)
class PeakResult:
    tp_opt: float
    entropies: np.ndarray
    rows: list[ScanRow]

    @property
    def e_min(self) -> float:
        return float(np.min(self.entropies))


def optimal_period_search(d: int, tx: float, g: GaussianSpec, setup: PhysicalSetup,
                          window: tuple[float, float] | None = None, step: float | None = None,
                          *, method: str = "series", x_cen: float = 0.0, p_cen: float | None = None,
                          jobs: int | None = None) -> PeakResult:
    """Pixel-quantised period maximising the worst-case entropy ``min_k E_k``.

    ``window`` defaults to the ``m = 1`` prediction plus or minus ``4 d``
    pixels; candidates are whole pixels (``step`` defaults to one pixel).

    Raises
    ------
    WindowMissError
        If the best candidate is the first or last one in the window.
    """
    if window is None:
        centre = setup.predicted_period(d, tx)
        half = 4 * d * setup.slm_pixel_um
        window = (centre - half, centre + half)
    if step is None:
        step = setup.slm_pixel_um
    rows = entropy_scan(d, tx, g, setup, window, step, method=method, x_cen=x_cen,
                        p_cen=p_cen, jobs=jobs)
    objective = np.array([r.e_min for r in rows])
    best = int(np.argmax(objective))
    if len(rows) > 1 and best in (0, len(rows) - 1):
        raise WindowMissError(
            f"maximum at window boundary {rows[best].tp_phys:g} um; widen the window"
        )
    return PeakResult(rows[best].tp_phys, rows[best].entropies, rows)


CSV_DIGITS = 12


def _fmt(x: float) -> str:
    return f"{x:.{CSV_DIGITS}g}"


def scan_header(d: int) -> list[str]:
    return ["tp_phys_um", *[f"e_{k}" for k in range(d)], "e_min", "e_max"]


def scan_row_fields(row: ScanRow) -> list[str]:
    return [_fmt(row.tp_phys), *[_fmt(e) for e in row.entropies], _fmt(row.e_min), _fmt(row.e_max)]


def write_scan_csv(stream, rows: Sequence[ScanRow], d: int, incomplete: bool = False):
    """CSV with header ``tp_phys_um,e_0,...,e_{d-1},e_min,e_max``, LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(scan_header(d))
    for row in rows:
        writer.writerow(scan_row_fields(row))
    if incomplete:
        stream.write("# INCOMPLETE\n")


def scan_to_json(rows: Sequence[ScanRow], d: int, full: bool = False, incomplete: bool = False) -> str:
    out = []
    for row in rows:
        item = {
            "tp_phys_um": float(_fmt(row.tp_phys)),
            **{f"e_{k}": float(_fmt(e)) for k, e in enumerate(row.entropies)},
            "e_min": float(_fmt(row.e_min)),
            "e_max": float(_fmt(row.e_max)),
        }
        if full and row.matrix is not None:
            item["matrix"] = [[float(_fmt(v)) for v in r] for r in row.matrix]
        out.append(item)
    doc = {"d": d, "rows": out}
    if incomplete:
        doc["incomplete"] = True
    return json.dumps(doc, indent=2) + "\n"


def scan_to_csv_text(rows: Sequence[ScanRow], d: int) -> str:
    buf = io.StringIO()
    write_scan_csv(buf, rows, d)
    return buf.getvalue()
