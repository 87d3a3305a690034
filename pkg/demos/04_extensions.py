"""The two extensions: look-ahead hopping and two particle species.

For the look-ahead model a particle facing 100 hops with alpha and one facing
101 with beta.  In the two-species model A and B hop with their own rates and
never overtake each other, so a state space is the set of rings reachable
from a seed.  Closed-form weights are checked against the exact chain, and
the fundamental diagrams against simulation.
"""
from pbca_lab.conjecture import verify_conjecture
from pbca_lab.flux import fd_closed_form, fd_monte_carlo
from pbca_lab.ring import RingConfig, enumerate_binary, enumerate_species_reachable
from pbca_lab.rules import ModelParams

for L, m in ((8, 4), (9, 3)):
    rep = verify_conjecture(enumerate_binary(L, m), ModelParams("epbca1", 0.8, 0.1))
    print(f"look-ahead L={L} m={m}: {rep.n_states} states, max rel dev {rep.max_rel_dev:.1e}")

for seed in ("AABAAB00", "AABA000"):
    space = enumerate_species_reachable(RingConfig.parse(seed))
    rep = verify_conjecture(space, ModelParams("epbca2", 0.3, 0.6))
    print(f"two-species seed {seed}: {rep.n_states} states in {len(space.classes)} classes, "
          f"max rel dev {rep.max_rel_dev:.1e}")

closed = fd_closed_form("epbca2", 30, 0.3, 0.6, rho_b=0.5)
mc = fd_monte_carlo("epbca2", 30, 0.3, 0.6, steps=50_000, seed=1, rho_b=0.5)
print("\ntwo species, L=30, rhoB=0.5")
print(" rhoA   closed     simulated")
for c, s in zip(closed, mc):
    print(f"{c.rho_a:.3f}  {c.flux:.5f}   {s.flux:.5f}")
