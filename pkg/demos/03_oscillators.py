"""
Joint oscillators
=================

Every active hinge is driven by an (x, y) neuron pair: each neuron
integrates the other's activation through one weight, and a tanh output
neuron bounds the servo command to (-1, 1).  Antisymmetric weights give
clean oscillation; same-sign weights saturate against the state clip.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaitevo import decode, init_network

body = decode(["C", "mount-front", "A"])
dt = 1 / 240
steps = int(12 / dt)

fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
for ax, weights, label in (
    (axes[0], [-0.9, 0.9, 0.8], "antisymmetric: w_xy=-0.9, w_yx=+0.9"),
    (axes[1], [0.7, 0.9, 0.8], "same sign: saturates, output plateaus"),
):
    net = init_network(body, weights)
    outputs = [net.outputs()[0]] + [net.step(dt)[0] for _ in range(steps)]
    ax.plot(np.arange(steps + 1) * dt, outputs)
    ax.set_title(label)
    ax.set_ylabel("output")
axes[1].set_xlabel("time (s)")
fig.tight_layout()
fig.savefig("oscillators.png", dpi=110)
print("wrote oscillators.png")
