# The same probabilities from two unrelated calculations:
#   series:     Fourier series of the mask + closed-form masked-Gaussian overlaps
#   quadrature: FFT of the sampled state, integrate |psi(p)|^2 over each bin
import time

import numpy as np

from pcg_mub.grid import MOMENTUM, GaussianSpec
from pcg_mub.masks import PcgBasis
from pcg_mub.probability import conditional_matrix
from pcg_mub.theory import allowed_m_residues, momentum_period

rng = np.random.default_rng(1)
beam = GaussianSpec(520.0)
for d, m in [(3, 1), (4, 2), (6, 4), (10, 5), (11, 7)]:
    tx = 48.0 * d
    tp = momentum_period(d, m, tx)
    bx = PcgBasis(d, tx, rng.uniform(0, tx))
    bp = PcgBasis(d, tp, rng.uniform(0, tp), MOMENTUM)
    t0 = time.perf_counter()
    s = conditional_matrix(beam, bx, bp, "series")
    t1 = time.perf_counter()
    q = conditional_matrix(beam, bx, bp, "quadrature")
    t2 = time.perf_counter()
    tag = "allowed" if m % d in allowed_m_residues(d) else "not allowed"
    print(f"d={d:2d} m={m} ({tag:11s})  max|series-quad| = {np.abs(s - q).max():.1e}"
          f"  series {t1 - t0:.3f}s  quadrature {t2 - t1:.3f}s")
