"""The cat, both ways: safe (eats directly) and endangered (intends).

The same two rules drive both behaviours. With no dog nearby the proof
of `main` goes through and `eat` runs as a directly proven action. With
a dog in range the proof fails on `not(danger)`, the blocked literal
becomes the intention (reduce, danger), and the solver picks `run`
because of its `ensure: reduce danger` annotation.
"""

import pathlib

from intentsim import Simulation, parse_program

SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / "scenarios"

program = parse_program((SCENARIOS / "cat.iag").read_text())
sim = Simulation.load(program)

for _ in range(8):
    report = sim.tick()
    cat = report["agents"]["cat1"]
    dog = next(e for e in report["entities"] if e[1] == "dog")
    me = next(e for e in report["entities"] if e[1] == "cat")
    distance = max(abs(me[2] - dog[2]), abs(me[3] - dog[3]))
    print(
        f"tick {report['tick']}: dog {distance} cells away | "
        f"danger={sim.agents['cat1'].store.read('danger')} | "
        f"direct={cat['direct']} solved={cat['solved']} ran={cat['actions_run']}"
    )

print()
print(sim.explain("cat1").to_text())
