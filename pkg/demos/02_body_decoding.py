"""
From symbol strings to bodies
=============================

A turtle walk places modules on a planar grid: module symbols drop a brick
or an active hinge on the selected face and step onto it, mounting commands
pick the face, and collisions are skipped.  Six descriptors summarize the
resulting shape.
"""

import numpy as np

from gaitevo import decode, descriptors, format_body, random_genotype, rewrite

# hand-written sequence: core, then a hinge, then a brick, straight ahead
body = decode(["C", "mount-front", "A", "mount-front", "B"])
print("hand-built chain:")
print(format_body(body))
print(descriptors(body), "\n")

# decoded random genotypes span a range of shapes
for seed in (1, 2, 29):
    genotype = random_genotype(np.random.default_rng(seed))
    symbols = rewrite(genotype.grammar, 3)
    body = decode(symbols)
    d = descriptors(body)
    print(
        f"seed {seed:3d}: {d.absolute_size:2d} modules, {d.n_active_hinges} hinges, "
        f"bounding box {body.bounding_box}, rel_limbs {d.rel_limbs:.2f}"
    )
