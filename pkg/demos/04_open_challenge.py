#!/usr/bin/env python3
"""The open-challenge kit at desk scale: publish a tuple, crack it, and
check the exact cost accounting; then see the refusal that keeps anyone
from accidentally starting a 10^7 * 10! sweep."""

from gotcha.challengekit import (
    brute_force_solve,
    generate_challenge,
    predicted_hash_calls,
)
from gotcha.errors import BudgetExceededError
from gotcha.seedcore import Seed, stream_from

import secrets

rng = stream_from(Seed(secrets.token_bytes(32)), b"GOTCHA-v1 challenge")

print("planting a secret in a 500-password space at k=3 ...")
tup, (password, pi) = generate_challenge(
    (0, 500), 3, ["evil clown", "big frog", "poofy dress"], 0, rng
)
print("  published tuple:", tup.to_json().replace("\n", " ")[:120], "...")

result = brute_force_solve(tup, budget=500 * 6)
print(f"  cracked: password={result.password} pi={result.pi.to_list()}")
print(f"  hash calls: {result.hash_calls} "
      f"(predicted from sweep rank: {predicted_hash_calls(tup, password, pi)})")

print("\ntrying the real-scale variant (10^7 passwords, k=10, heavy hash) ...")
big, _ = generate_challenge((0, 10**7), 10, [f"label {j}" for j in range(10)], 15, rng)
try:
    brute_force_solve(big)
except BudgetExceededError as exc:
    print(f"  refused, as it should be: {exc}")
