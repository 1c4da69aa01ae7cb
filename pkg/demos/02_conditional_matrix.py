# Prepare a Gaussian beam in one position bin and measure momentum bins.
import numpy as np

from pcg_mub.grid import MOMENTUM, GaussianSpec
from pcg_mub.masks import PcgBasis
from pcg_mub.probability import conditional_matrix, row_entropies
from pcg_mub.theory import momentum_period

np.set_printoptions(precision=6, suppress=True)
beam = GaussianSpec(520.0)  # um
d, tx = 4, 192.0
bx = PcgBasis(d, tx)

# m = 1: every row of p(l|k) is flat
bp = PcgBasis(d, momentum_period(d, 1, tx), 0.0, MOMENTUM)
print(conditional_matrix(beam, bx, bp))

# m = 2 is not allowed for d = 4.  With bin 0 centred on p = 0 the bias shows:
tp = momentum_period(d, 2, tx)
bp2 = PcgBasis(d, tp, -tp / (2 * d), MOMENTUM)
mat = conditional_matrix(beam, bx, bp2)
print(mat)
print("entropies (bits):", row_entropies(mat))

# with the origin on the axis instead, the bins are mirror images of each
# other and a real beam lands evenly even though m = 2
bp2_axis = PcgBasis(d, tp, 0.0, MOMENTUM)
print(conditional_matrix(beam, bx, bp2_axis))
