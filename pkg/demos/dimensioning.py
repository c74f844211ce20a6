"""Capacity dimensioning four ways: exact search, the square-root rule,
the refined (finite-size corrected) rule, and the uncertainty hedge.

The square-root rule lands within one server of the exact answer across
the board; the refined cost rule closes most of the remaining gap; and
when the load itself is estimated with error, the hedge widens from
sqrt(lam) to sqrt(sigma^2 + lam).
"""

from qedq import (
    cost_exhaustive,
    cost_qed,
    cost_refined,
    normal_dist,
    staff_exact,
    staff_qed,
    staff_uncertain,
    staffing_cost,
)

print("delay-probability targets (value in parentheses = achieved delay):")
print("  lam    eps    s_exact      s_sqrt")
for lam in (10.0, 100.0, 500.0):
    for eps in (0.1, 0.3, 0.5):
        e = staff_exact(lam, eps)
        q = staff_qed(lam, eps)
        print("%6.0f  %4.2f   %4d (%.3f)  %4d (%.3f)"
              % (lam, eps, e.s, e.achieved, q.s, q.achieved))

print("\ncost ratio r = (server cost)/(delay cost):")
print("  lam     r    s_opt  s_sqrt  s_refined   extra cost of sqrt rule")
for lam in (50.0, 100.0, 500.0):
    for r in (0.1, 1.0, 10.0):
        s_opt = cost_exhaustive(lam, r)
        s_q = cost_qed(lam, r).s
        s_r = cost_refined(lam, r).s
        gap = staffing_cost(s_q, lam, r) - staffing_cost(s_opt, lam, r)
        print("%6.0f  %5.1f   %4d   %4d     %4d       %.2e"
              % (lam, r, s_opt, s_q, s_r, gap))

print("\nload known only as an estimate (target exceedance 15.87%):")
eps = 1.0 - normal_dist(1.0).cdf
for sigma in (0.0, 5.0, 10.0, 20.0):
    print("  sigma=%5.1f  ->  s = %d" % (sigma, staff_uncertain(100.0, sigma, eps)))
print("(sigma=0 recovers the plain square-root rule)")
