"""How accurate is the square-root-regime limit at finite sizes, and how
much do the sandwich bounds and the finite-size correction recover?

Reproduces the beta = 1 ladder: the plain limit is off by up to 70% at
s = 1, the corrected value and the bounds track the exact Erlang C to a
few 1e-4 already for moderate s.
"""

import math

from qedq import corrected_delay_prob, erlang_c, qed_bounds, qed_delay_prob

print("   s        lam    lower     exact     upper   corrected   limit")
for s in (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000):
    lam = ((-1.0 + math.sqrt(1.0 + 4.0 * s)) / 2.0) ** 2  # solves s = lam + sqrt(lam)
    b = qed_bounds(s, lam)
    c = erlang_c(s, lam)
    print("%5d  %9.5f  %.5f   %.5f   %.5f   %.5f    %.5f"
          % (s, lam, b.lower, c, b.upper, corrected_delay_prob(s, lam),
             qed_delay_prob(1.0)))

print("\nthe exact value always dominates the limit (lower-bound property):")
for lam in (2.0, 20.0, 200.0):
    s = int(math.ceil(lam + 0.8 * math.sqrt(lam)))
    beta = (s - lam) / math.sqrt(lam)
    print("  lam=%6.1f s=%4d:  C=%.6f  >=  g(beta)=%.6f"
          % (lam, s, erlang_c(s, lam), qed_delay_prob(beta)))
