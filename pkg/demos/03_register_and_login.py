#!/usr/bin/env python3
"""The full protocol round trip, with a scripted stand-in for the human.

Registration: the user labels password-derived inkblots shown in a hidden
random order.  Login: the same inkblots come back in canonical order next
to the stored labels, and re-matching them reveals the hidden order.  The
demo 'human' solves the matching by comparing rasters -- which is exactly
the step assumed hard for software when it only has labels to go on."""

from gotcha import AuthEngine
from gotcha.authcore import AccountStore
from gotcha.puzzle import PuzzleParams

engine = AuthEngine(AccountStore(), params=PuzzleParams(k=4, alpha=2), hash_cost=4)

print("registering 'alice' ...")
session, presented = engine.begin_registration("alice", "correct horse")
labels = [f"my title for what I see in image {i}" for i in range(1, 5)]
record = engine.complete_registration(session.token, labels)
print(f"  stored record: {len(record.permuted_labels)} labels, "
      f"{len(record.password_hash)}-byte digest, no password, no permutation")

print("\nlogging in with the right password ...")
login, challenge = engine.begin_login("alice", "correct horse")
# the scripted human: find each remembered (label, raster) pair among the
# challenge images; position i of the stored labels belonged to presented
# image i, so matching rasters recovers the hidden permutation
response = []
for i, label in enumerate(challenge.labels, start=1):
    source = presented[i - 1]
    match = next(j for j, img in enumerate(challenge.images, start=1) if img == source)
    response.append(match)
result = engine.complete_login(login.token, response)
print(f"  response {response} -> {'ACCEPT' if result.accepted else 'DENY'}"
      f" after {result.hash_evaluations} slow hashes")

print("\nlogging in with a wrong password ...")
login, challenge = engine.begin_login("alice", "incorrect horse")
# images are now unrelated to the labels; the human shrugs and guesses
result = engine.complete_login(login.token, [1, 2, 3, 4])
print(f"  -> {'ACCEPT' if result.accepted else 'DENY'}"
      f" after {result.hash_evaluations} slow hashes (same work either way)")
