"""Why pooling servers helps: one shared s-server station versus s separate
single-server queues facing the same per-server load.

The separate queues keep the single-server delay no matter how many there
are; the pooled station's delay probability and mean delay fall steadily
with s.
"""

from qedq import QueueModel, mms_measures

for per_server_load in (0.6, 0.8, 0.95):
    print("\nper-server load %.2f" % per_server_load)
    print("  s   P(delay)   E[delay]")
    for s in range(1, 11):
        m = mms_measures(QueueModel(lam=per_server_load * s, s=s))
        print("%3d   %8.6f   %8.6f" % (s, m.delay_prob, m.mean_delay))
    single = mms_measures(QueueModel(lam=per_server_load, s=1))
    print("  (s single-server queues would stay at P=%.6f, E=%.6f)"
          % (single.delay_prob, single.mean_delay))
