"""
Growing strings from a grammar
==============================

An L-system rewrites every replaceable symbol simultaneously, once per
iteration.  The classic three-symbol example first, then a real robot
genotype with controller weights attached to its module genes.
"""

import numpy as np

from gaitevo import Grammar, format_genotype, random_genotype, rewrite

# the textbook example: watch the string grow
grammar = Grammar(
    alphabet=frozenset("XYZ"),
    axiom="X",
    rules={"X": ("X", "Y"), "Y": ("Z",), "Z": ("X", "Z")},
)
for i in range(4):
    print(f"iteration {i}: {''.join(rewrite(grammar, i))}")

# a robot genotype does the same over the module/command alphabet
genotype = random_genotype(np.random.default_rng(7))
print("\nrobot genotype:")
print(format_genotype(genotype))

print("rewritten body string (3 passes, capped at 30 symbols):")
print(" ".join(rewrite(genotype.grammar, 3)))
