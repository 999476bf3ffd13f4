"""
The crawling model
==================

Each control step reshapes the body; the new shape is re-anchored to the
ground by the rigid fit that minimizes grip-weighted slip against the
previous module positions.  Modules momentarily still within the shape grip
hardest, so coordinated multi-joint waves crawl while a single flapping
hinge cancels itself out.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaitevo import SimConfig, decode, simulate

cfg = SimConfig()

# two joints, phase-shifted by their weights: a tuned crawler
crawler = decode(
    ["C", "mount-front", "A", "mount-front", "B", "mount-front", "A", "mount-front", "B"]
)
w_crawler = np.array(
    [0.8276753353463258, -0.0477058560624939, 0.7275724821941698,
     0.4031371321237456, -0.4121514880508847, 0.5353045399669472]
)

# one joint: back-and-forth flapping, no net motion
flapper = decode(["C", "mount-front", "A", "mount-front", "B"])
w_flapper = np.array([-0.9, 0.9, 0.8])

fig, ax = plt.subplots(figsize=(6, 6))
for body, weights, label in ((crawler, w_crawler, "two joints"), (flapper, w_flapper, "one joint")):
    fitness, traj = simulate(body, weights, cfg)
    com_mm = traj.com * 1000
    ax.plot(com_mm[:, 0] - com_mm[0, 0], com_mm[:, 1] - com_mm[0, 1], label=f"{label}: {fitness:.4f} cm/s")
    print(f"{label}: fitness {fitness:.4f} cm/s")
ax.set_xlabel("x (mm)")
ax.set_ylabel("y (mm)")
ax.axis("equal")
ax.legend()
ax.set_title("center-of-mass paths over 30 s")
fig.tight_layout()
fig.savefig("crawling.png", dpi=110)
print("wrote crawling.png")
