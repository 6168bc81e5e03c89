"""Two species, one intention calculus.

The predator's rule `pounce :- preyNear.` fails while the prey is far;
the blocked literal becomes the intention (increase, preyNear), served
by `stalk` (`ensure: increase preyNear` — it walks toward the prey).
Once adjacent, `pounce` is proven directly and consumes the prey. The
prey meanwhile grazes, fires an explicit `intend(increase, energy)` rule
when reserves run low, and flees when its scan perception reports a
close predator.
"""

import pathlib

from intentsim import Simulation, parse_program

SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / "scenarios"

sim = Simulation.load(parse_program((SCENARIOS / "prey_predator.iag").read_text()))

for _ in range(30):
    report = sim.tick()
    prey = report["agents"]["p1"]
    pred = report["agents"]["pr1"]
    if not prey["alive"]:
        print(f"tick {report['tick']:2}: the prey is gone; the predator is fed")
        break
    print(
        f"tick {report['tick']:2}: prey ran {prey['actions_run']} "
        f"(energy {sim.agents['p1'].store.read('energy')}) | "
        f"predator intends {pred['intentions']} ran {pred['actions_run']}"
    )

print()
print(sim.explain("pr1").to_text())
