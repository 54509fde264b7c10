#!/usr/bin/env python3
"""The tolerance math: how many ways to almost-match k images, and what
the server pays for accepting them.

A login response is a permutation; the server accepts anything within
distance alpha of the truth (distance = positions that disagree, never
exactly 1).  Exact ball sizes come from derangement numbers; the
closed-form bound is what caps the server's hash work."""

import math

from gotcha import count_close, count_close_upper_bound, enumerate_close
from gotcha.matching import Permutation

k = 10
print(f"k = {k}, |S_k| = {math.factorial(k):,}\n")
print("alpha   exact ball   upper bound   fraction of all k!")
for alpha in (0, 2, 3, 4, 5):
    exact = count_close(k, alpha)
    bound = count_close_upper_bound(k, alpha)
    print(f"{alpha:>5}   {exact:>10,}   {bound:>11,}   {exact / math.factorial(k):.2e}")

print("""
Reading the alpha = 5 row: a login sweeps 13,264 hash candidates (never
more than the 36,091 bound), and a blind guesser lands inside the ball
with probability 3.66e-3.  Tolerance costs hash work, not much security.
""")

pivot = Permutation.identity(4)
ball = enumerate_close(pivot, 2)
print(f"the distance-2 ball around identity(4): {len(ball)} permutations")
for p in ball:
    print("   ", p.to_list())
