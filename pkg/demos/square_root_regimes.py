"""The three capacity scalings (constant, square-root, proportional margin)
and where the square-root rule sits between them.

As the load grows, the constant-margin rule drifts to fully-loaded
(efficiency-driven), the proportional rule to mostly-idle
(quality-driven), while the square-root rule keeps the delay probability
pinned at a constant strictly between 0 and 1 -- the balanced regime.
"""

from qedq import (
    QueueModel,
    SimConfig,
    erlang_c,
    qed_delay_prob,
    sample_path,
    scaled_servers,
    simulate,
)

beta = 0.5
print("delay probability under the three scalings (beta = %.1f)" % beta)
print("  lam     ED(s)   P      QED(s)  P       QD(s)   P")
for lam in (10.0, 50.0, 100.0, 500.0):
    row = ["%6.0f" % lam]
    for rule in ("ED", "QED", "QD"):
        s = scaled_servers(lam, beta, rule)
        row.append("%5d  %7.4f" % (s, erlang_c(s, lam)))
    print("  " + "   ".join(row))
print("square-root limit value: %.6f" % qed_delay_prob(beta))

print("\nfraction of time with a queue, simulated at lam = 100:")
for rule in ("ED", "QED", "QD"):
    s = scaled_servers(100.0, beta, rule)
    cfg = SimConfig(model=QueueModel(lam=100.0, s=s), horizon=800.0,
                    warmup=50.0, replications=4, seed=17)
    est = simulate(cfg, ["frac_above_zero"])["frac_above_zero"]
    print("  %-3s s=%3d  %.4f" % (rule, s, est.point))

print("\ncentered-scaled occupancy excursions (square-root rule):")
for lam in (10.0, 50.0, 100.0):
    s = scaled_servers(lam, beta, "QED")
    path = sample_path(SimConfig(model=QueueModel(lam=lam, s=s), horizon=200.0,
                                 replications=1, seed=3), centered=True)
    print("  lam=%5.0f  s=%3d   path range [%+.2f, %+.2f]"
          % (lam, s, path.values.min(), path.values.max()))
print("(the centered range stays O(1): that is the square-root scaling at work)")
