# Which integers m make periodic bins in x and p mutually unbiased?
#
# Position masks of period T_x and momentum masks of period T_p are unbiased
# when T_x * T_p = 2 pi d / m and m*n/d is never an integer for n = 1..d-1.
# Only m mod d matters.
import math

from pcg_mub.theory import MubConfig, allowed_m_residues, is_unbiased_config

for d in range(2, 13):
    print(f"d={d:2d}  allowed m' = {allowed_m_residues(d)}")

# a prime d allows everything; d = 10 keeps only the residues coprime to 10
print(is_unbiased_config(7, 3), is_unbiased_config(10, 5))

# the literal predicate and gcd(m, d) = 1 are the same thing
agree = all(
    is_unbiased_config(d, m) == (m % d != 0 and math.gcd(m, d) == 1)
    for d in range(2, 60) for m in range(1, 300)
)
print("predicate == coprimality:", agree)

# periods for the d = 4 setup with 192 um position period
cfg = MubConfig.from_m(4, 1, 192.0)
print(f"T_p = {cfg.tp:.6f} rad/um, s_p = {cfg.sp:.6f}, tau_p = {cfg.tau_p:g} um")
