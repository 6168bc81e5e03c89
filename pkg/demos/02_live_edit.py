"""In-line prototyping: teach the running cat that mewing reduces danger.

The cat starts on the dog's cell, so running never helps and every cycle
selects only `run`. Mid-run we add the annotation `mew ensure: reduce
danger` — an alternative behaviour is defined without any restart, and
the next completed cycle selects both actions.
"""

import pathlib

from intentsim import AddEffect, Simulation, parse_program

SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / "scenarios"

source = (SCENARIOS / "cat.iag").read_text()
head, _, _ = source.partition("scenario {")
source = head + """scenario {
  world 10 x 10
  seed 42
  spawn cat cat1 at (4, 4)
  thing dog at (4, 4)
}
"""

sim = Simulation.load(parse_program(source))

for tick in range(1, 7):
    if tick == 4:
        sim.queue_edit("cat1", AddEffect("mew", "reduce", "danger"))
        print('--- edit queued: effect add cat1 mew reduce danger')
    cat = sim.tick()["agents"]["cat1"]
    print(f"tick {tick}: intentions={cat['intentions']} solved={cat['solved']} "
          f"scores={cat['scores']}")

print()
print(sim.explain("cat1").to_text())
