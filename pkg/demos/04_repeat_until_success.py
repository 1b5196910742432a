"""Repeat-until-success statistics.

Failed heralds are discarded and the atoms re-prepared. The attempt count is
geometric, so its mean is the inverse of the heralding probability.
"""

from multiphoton import ProtocolConfig, monte_carlo_repeat, run_full_protocol

for accept in ("singlet", "all", "+-"):
    cfg = ProtocolConfig(n_sites=2, network="bs5050", accept=accept, seed=11, trials=20_000)
    mc = monte_carlo_repeat(cfg)
    print(f"accept={accept:<8} p={mc.acceptance_probability:.4f}  "
          f"mean attempts {mc.mean_attempts:.3f} +- {mc.std_error:.3f}  (1/p = {1 / mc.acceptance_probability:.3f})")

final, log = run_full_protocol(ProtocolConfig(n_sites=2, network="bs5050", accept="singlet", seed=3))
print(f"seed 3: {log.attempts} attempt(s), patterns {log.per_attempt_patterns}")
for label, amp in final.items():
    print(f"  {amp:+.6f}  {label}")
