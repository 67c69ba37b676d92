"""
Equilibrium against the baseline schemes
========================================

Stackelberg, Nash, Average, Random (median of many draws) and a genetic
algorithm, followed by a sweep over the number of RIS elements.
"""

from lawn_isac.config import ScenarioConfig
from lawn_isac.experiments import SCHEMES, scheme_results, sweep_table

cfg = ScenarioConfig()
res = scheme_results(cfg, SCHEMES)
print("scheme        u_bs       u_ris      u_att      AAoI")
for name in SCHEMES:
    u = res[name][1].utilities
    print(f"{name:12s} {u.u_bs:9.5f}  {u.u_ris:9.5f}  {u.u_att:9.5f}  {res[name][1].aaoi:10.4g}")

# more RIS elements raise the cascaded gain, and the attacker loses ground
rows = sweep_table(cfg, "ris_elements", [8, 12, 16], 1, ["stackelberg"])
for r in rows:
    print(f"P={r['value']:2d}: u_att {r['u_att']:.5f}  AAoI {r['aaoi']:.4f}")
