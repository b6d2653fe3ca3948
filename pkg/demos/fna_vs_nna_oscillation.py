"""A workload that punishes eager migration.

Ten fragments live on the reference network while the hot site flips
between the neighbours G and H every 50 accesses. The nearest-neighbour
policy dutifully chases each flip back and forth; the fuzzy policy
watches its own recent migration history, recognises the ping-pong, and
inhibits further moves after a short learning phase.

Same seed, same access streams, four policies side by side.
"""

from fragsim import (
    Fragment,
    Oscillation,
    PolicySpec,
    SimConfig,
    WorkloadSpec,
    parse_policy_token,
    reference_topology,
    run,
)

topo = reference_topology()

print("hot mass 0.8 flipping G <-> H every 50 accesses, 10 fragments x 10000 steps")
print()
print("  policy        migrations   hop cost   residency at G")
for token in ("optimal", "threshold:5", "nna", "fna"):
    cfg = SimConfig(
        topology=topo,
        fragments=[Fragment(i) for i in range(10)],
        initial_owners=[0] * 10,
        policy=parse_policy_token(token),
        workload=WorkloadSpec.symmetric(
            10, 9, 0.8, hot=6, seed=1, oscillation=Oscillation(6, 7, 50)
        ),
        num_steps=10_000,
        designated=6,
    )
    m = run(cfg)
    print(f"  {token:<12}  {m.migrations:>10}   {m.migration_hop_cost:>8.0f}   {m.o_s_hat:>14.3f}")

print()
print("The counter-driven policies re-migrate on every flip; fna makes a")
print("few exploratory moves per fragment, recognises the ping-pong, and")
print("freezes wherever it happens to stand -- an order of magnitude fewer")
print("migrations, bought by giving up residency at the (moving) hot site.")
