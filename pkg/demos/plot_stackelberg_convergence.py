"""
Leader and followers on the default scenario
============================================

The attacker moves first, then the RIS drone picks its reflection gain and the
base station picks its update rate.  We print the outer iterations.
"""

from lawn_isac.config import ScenarioConfig
from lawn_isac.experiments import build_game
from lawn_isac.game import solve_stackelberg

cfg = ScenarioConfig()
game = build_game(cfg)
trace = solve_stackelberg(game, cfg)

print("iter  lambda     g         sigma_att   AAoI    u_bs     u_ris    u_att")
for row in trace.rows:
    s, ev = row.strategy, row.evaluation
    u = ev.utilities
    print(f"{row.iteration:4d}  {s.lambda_rate:.5f}  {s.g:.6f}  {s.sigma_att_w:.3e}  "
          f"{ev.aaoi:.4f}  {u.u_bs:.5f}  {u.u_ris:.5f}  {u.u_att:.5f}")
print("stopped:", trace.termination)

# with an ample sensing rate the BS rate approaches sqrt(zeta1 / cost_bs)
print("large-capacity rate:", (cfg.zeta1 / cfg.cost_bs) ** 0.5)

# the comm links are interference limited, so extra jamming noise buys the
# attacker nothing and its optimum sits at zero power
s = trace.final.strategy
for frac in (0.0, 0.5, 1.0):
    ev = game.evaluate(s.with_("att", frac * cfg.sigma_att_max_w))
    print(f"sigma_att = {frac:.1f} x bound: ASINR {ev.asinr:.6f}, u_att {ev.utilities.u_att:.6f}")
