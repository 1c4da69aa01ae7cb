# Entropy of the momentum outcomes as the measurement period is scanned,
# in lab units (f_e = 100 mm, lambda = 633 nm, 8 um SLM pixels).
import numpy as np

from pcg_mub.experiment import PhysicalSetup, ScanSettings, entropy_scan
from pcg_mub.grid import GaussianSpec

setup = PhysicalSetup()
beam = GaussianSpec(520.0)
d, tx = 4, 192.0

for m in range(1, 7):
    tp = setup.predicted_period(d, tx, m)
    row = ScanSettings(d, tx, beam, setup).evaluate(tp)
    print(f"m={m}  period {tp:8.2f} um   E_0 = {row.entropies[0]:.4f}")
# odd m sit on maxima (2 bits), even m on minima

# what the SLM can do: periods in steps of d pixels
rows = entropy_scan(d, tx, beam, setup, (1000.0, 1700.0))
for r in rows:
    bar = "#" * int(40 * r.entropies[0] / 2)
    print(f"{r.tp_phys:7.0f}  {r.entropies[0]:.4f}  {bar}")
best = max(rows, key=lambda r: r.entropies[0])
print("peak at", best.tp_phys, "um; prediction", setup.predicted_period(d, tx), "um")
