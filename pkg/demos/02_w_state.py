"""Three atoms behind a symmetric three-port: heralding a W state.

A pattern with one + click and two - clicks projects the atoms onto an
equal superposition of the three single-excitation configurations.
"""

import numpy as np

from multiphoton import ProtocolConfig, enumerate_outcomes, fidelity, w_state_reference

table = enumerate_outcomes(ProtocolConfig(n_sites=3, network="dft"))
out = table["+--"]
print(f"P(+--) = {out.probability:.6f}  (1/72 = {1 / 72:.6f})")
for label, amp in out.conditional_state.items():
    print(f"  {label}   |a|={abs(amp):.6f}  arg={np.angle(amp):+.4f}")
print(f"fidelity to W: {fidelity(out.conditional_state, w_state_reference(3)):.12f}")

# every single-+ pattern heralds a W state, up to relative phases
for o in table.outcomes:
    if str(o.pattern).count("+") == 1 and o.probability > 0:
        mags = sorted(round(abs(a), 9) for _, a in o.conditional_state.items())
        print(f"{o.pattern}: p={o.probability:.6f}, magnitudes {mags}")
