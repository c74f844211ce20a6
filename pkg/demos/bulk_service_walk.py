"""The bulk-service queue (Poisson demand, fixed batch capacity per period)
and its scaling limit, the maximum of a Gaussian random walk.

The stationary empty probability and scaled mean queue converge to the
walk constants along the square-root capacity ladder; the same constants
power the many-sources staffing rule for overdispersed demand.
"""

import math

from qedq import (
    BulkModel,
    SimConfig,
    bulk_stationary,
    gaussian_walk_max,
    many_sources_staffing,
    simulate,
)

beta = 0.5
walk = gaussian_walk_max(beta)
print("walk-maximum constants at beta=%.1f: P(M=0)=%.6f  E[M]=%.6f  (%d terms)"
      % (beta, walk.p_zero, walk.mean_max, walk.terms_used))

print("\nconvergence along s = lam + beta sqrt(lam):")
print("   lam    s    P(Q=0)    E[Q]/sqrt(lam)")
for lam in (4.0, 16.0, 36.0, 100.0, 400.0):
    s = int(round(lam + beta * math.sqrt(lam)))
    st = bulk_stationary(BulkModel(lam=lam, s=s))
    print("%6.0f  %4d   %.6f   %.6f" % (lam, s, st.p_empty,
                                        st.mean_queue / math.sqrt(lam)))
print("        limits:  %.6f   %.6f" % (walk.p_zero, walk.mean_max))

print("\nsimulated check at lam=4, s=5:")
st = bulk_stationary(BulkModel(lam=4.0, s=5))
est = simulate(SimConfig(model=BulkModel(lam=4.0, s=5), horizon=100_000,
                         warmup=1000, replications=8, seed=4),
               ["p_empty", "mean_queue"])
print("  p_empty    analytic %.6f   simulated %.6f +- %.6f"
      % (st.p_empty, est["p_empty"].point, est["p_empty"].stderr))
print("  mean_queue analytic %.6f   simulated %.6f +- %.6f"
      % (st.mean_queue, est["mean_queue"].point, est["mean_queue"].stderr))

print("\nmany-sources rule: demand mean 100, sd 20 (overdispersed), beta=0.5")
cap = many_sources_staffing(100.0, 20.0, beta)
print("  capacity  = %.1f per period" % cap)
print("  predicted mean backlog ~ sd * E[M] = %.4f" % (20.0 * walk.mean_max))
