"""Exact stationary laws in rational arithmetic.

Passing Fractions as hop probabilities keeps every transition probability and
the stationary vector exact.  For the four-site ring the stationary law is
proportional to (1-a, 1-a, 1-a, 1-a, 1, 1); for the two-rate extension the
rotation-class vector on L=8, m=4 has a closed form in alpha and beta.
"""
from fractions import Fraction

from pbca_lab.markov import (build_matrix, lump_by_rotation, stationary,
                             stationary_class_vector)
from pbca_lab.ring import enumerate_binary
from pbca_lab.rules import ModelParams

for a in (Fraction(1, 4), Fraction(1, 2), Fraction(4, 5)):
    space = enumerate_binary(4, 2)
    pi = stationary(build_matrix(space, ModelParams("pbca", a))).probabilities
    scaled = [p / pi[-1] for p in pi]
    print(f"alpha={a}: " + ", ".join(f"{x}={s}" for x, s in zip(space.configs, scaled)))

a, b = Fraction(4, 5), Fraction(1, 10)
space = enumerate_binary(8, 4)
lumped = lump_by_rotation(build_matrix(space, ModelParams("epbca1", a, b)))
vec = stationary_class_vector(lumped, reference=len(space.classes) - 1, value=1)
print(f"\nclass vector for L=8, m=4 at alpha={a}, beta={b}, last class scaled to 1")
for rep, v in zip(space.representatives, vec):
    print(f"  {rep}  {v}")
print("first component from the closed form:", 4 * (1 - a) ** 2 * b ** 3 * (1 - b) / a ** 3)
