"""The resolver as a machine you can pause: budgets, suspension, resumption.

A proof advances one counted step at a time (clause try, builtin,
property read, backtrack). Slicing the same proof into budgets of 1, 3
and 200 steps lands on the same status, bindings and blocked literals —
which is what lets many agents interleave fairly inside one tick.
"""

from intentsim import ClauseDb, StaticProps, parse_clause, parse_query, solve_start

db = ClauseDb([
    parse_clause("main :- eat."),
    parse_clause("eat :- not(danger)."),
    parse_clause("intend(increase, energy) :- getProperty(energy, E), lt(E, 40)."),
])

for danger in (False, True):
    props = StaticProps({"danger": danger, "energy": 25})
    print(f"danger={danger}:")
    for budget in (1, 3, 200):
        r = solve_start(db, parse_query("main"), props)
        slices = 0
        while r.status in ("running", "suspended"):
            r.solve_step(budget)
            slices += 1
        blocked = [(b.property, b.polarity) for b in r.blocked]
        print(f"  budget {budget:>3}: {r.status} after {slices} slice(s), "
              f"{r.steps_used} steps, blocked={blocked}")

print("\nexplicit intentions via intend/2 under energy=25:")
r = solve_start(db, parse_query("intend(T, P)"), StaticProps({"danger": False, "energy": 25}))
while r.status in ("running", "suspended"):
    r.solve_step(50)
print(f"  {r.status}: {r.solution}")
