"""Pulse-level transfer |v,0> -> |u,1> in a three-level Lambda system.

The laser ramps up while the cavity coupling stays fixed, so the dark state
rotates from the ground level toward the photon-carrying level. Longer pulses
suppress the intermediate population; the final transfer is capped by the
mixing angle reached at the end of the ramp.
"""

import math

from multiphoton.stirap import LAMBDA_BASIS, stirap_single_photon

omega_max, g = 10.0, 1.0
ceiling = math.sin(math.atan2(omega_max / 2, g)) ** 2
print(f"dark-state ceiling at Omega_max/g={omega_max / g:g}: {ceiling:.6f}")
print(" g*T    P(u,1)     max P(f)    norm drift")
for t in (25.0, 50.0, 100.0, 200.0, 400.0):
    traj = stirap_single_photon(omega_max, g, t)
    drift = abs(traj.norms - 1).max()
    print(f"{g * t:5g}  {traj.final_population(LAMBDA_BASIS[2]):.6f}  {traj.max_f_population:.3e}  {drift:.1e}")

for om in (20.0, 40.0):
    traj = stirap_single_photon(om, g, 200.0)
    print(f"Omega_max/g={om:g}: P(u,1)={traj.final_population(LAMBDA_BASIS[2]):.6f}")
