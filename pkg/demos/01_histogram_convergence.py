"""How a long simulation of the eight-site ring settles onto the exact law.

We run the PBCA on L=8, m=4 at alpha=0.5, build the histogram of visited
configurations, and compare its rotation-class heights with the exact
stationary distribution.  The total-variation distance shrinks roughly like
one over the square root of the run length.
"""
import numpy as np

from pbca_lab.markov import build_matrix, class_masses, stationary
from pbca_lab.ring import count_10, enumerate_binary
from pbca_lab.rules import ModelParams
from pbca_lab.simulate import run

space = enumerate_binary(8, 4)
params = ModelParams("pbca", 0.5)
pi = stationary(build_matrix(space, params)).as_array()

print("steps      TV distance")
for steps in (10**3, 10**4, 10**5, 10**6):
    stats = run(space.configs[0], params, steps, seed=7, space=space, from_zero=True)
    emp = np.zeros(len(space))
    for i, c in stats.histogram.items():
        emp[i] = c
    emp /= emp.sum()
    print(f"{steps:>8d}   {0.5 * np.abs(emp - pi).sum():.4f}")

# per-state heights depend only on #10: each 10 pattern doubles the weight at alpha=1/2
print("\nclass representative  #10  class mass   mass / size")
for rep, members, mass in zip(space.representatives, space.classes, class_masses(space, pi)):
    print(f"{rep}            {count_10(rep)}   {mass:.5f}     {mass / len(members):.5f}")
