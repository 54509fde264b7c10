#!/usr/bin/env python3
"""Why the scheme changes the attacker's bill.

Three conservative strategies against a 16-word dictionary: sweep every
(password, permutation) pair through the verifier, pay a human for every
guess, or pay a human for a quarter of the guesses.  Exact query counts,
the cost lower bound, and the pre-generated-puzzle-store comparison."""

import math

from gotcha.attacklab import (
    CostModel,
    SimulatedHuman,
    brute_force_all,
    hosp_economics,
    human_on_subset,
    human_per_guess,
    run_attack,
    theorem1_bound,
)
from gotcha.puzzle import PuzzleParams

dictionary = tuple(f"pw{i:02d}" for i in range(16))
params = PuzzleParams(k=3, alpha=0)
cost_model = CostModel(c_h=1.0, c_H=1000.0)
human = SimulatedHuman(beta=1.0, alpha=0)

print("strategy sweep, |D|=16, k=3, 500 trials each:\n")
for strategy in (brute_force_all, human_per_guess, human_on_subset(4)):
    report = run_attack(dictionary, strategy, cost_model, human, 500,
                        params=params, hash_cost=0, seed=42)
    print(report.to_text())
    print()

bound = theorem1_bound(params, cost_model, len(dictionary), 1.0, 0)
print(f"cost lower bound for certain success with no human help: "
      f"{bound:.0f} = 1.0 * 16 * 3! * c_h")
print(f"(brute force above spent up to {16 * math.factorial(3)} hash queries; "
      "human strategies trade hash cost for far pricier human queries)\n")

econ = hosp_economics(8e12, 8e3, 0.001)
print("the pre-generated-puzzle alternative, for contrast:")
print(f"  {econ.database_size:,} stored puzzles, "
      f"${econ.full_solve_cost:,.0f} to out-source them all, "
      f"${econ.half_solve_cost:,.0f} for half")
print(f"  ({econ.note})")
