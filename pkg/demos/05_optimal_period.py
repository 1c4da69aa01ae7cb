# Search for the period that makes every preparation maximally spread.
import math

from pcg_mub.experiment import PhysicalSetup, optimal_period_search
from pcg_mub.grid import GaussianSpec

setup = PhysicalSetup()
beam = GaussianSpec(520.0)

print("fixed bin width s_x = 48 um: the optimum should not depend on d")
for d in range(3, 16):
    res = optimal_period_search(d, 48.0 * d, beam, setup)
    print(f"d={d:2d}  T_p,opt = {res.tp_opt:6.0f} um   min E_k - log2 d = "
          f"{res.e_min - math.log2(d):+.1e}")

print("\nd = 7, varying T_x: the optimum follows f_e lambda d / T_x")
for sx in (40, 48, 56, 64, 72):
    tx = 7.0 * sx
    res = optimal_period_search(7, tx, beam, setup)
    print(f"T_x={tx:5.0f}  opt {res.tp_opt:6.0f}  predicted {setup.predicted_period(7, tx):8.2f}")
