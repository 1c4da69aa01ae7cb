# Ordinary contiguous bins are not unbiased: a flat state filling one
# position bin spreads over momentum bins with a sinc^2 profile.
import math

import numpy as np

from pcg_mub.theory import StandardCgConfig, standard_cg_distribution

cfg = StandardCgConfig(delta_x=1.0, delta_p=2 * math.pi / 8)
labels = np.arange(-8, 9)
probs = standard_cg_distribution(cfg, labels)
for l, p in zip(labels, probs):
    print(f"{l:3d}  {p:.5f}  " + "#" * int(300 * p))
print("sum over |l| <= 200:", standard_cg_distribution(cfg, range(-200, 201)).sum())
