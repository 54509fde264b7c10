"""Open-challenge tuples: publishable puzzles whose passwords are crackable
only by sweeping password/permutation pairs through a slow hash.

A tuple T = (salt, h(pw, salt, pi(1..k)), labels in pi-order, space bounds,
cost level).  The inkblots for any password guess are regenerated from a
fixed public extractor salt, so a tuple is self-contained: an attacker has
everything except pw and pi.  The brute-force solver here doubles as a test
oracle at tiny scale and refuses outright beyond its hash-call budget.
"""

from __future__ import annotations

import base64
import itertools
import json
import math
import struct
from dataclasses import dataclass

from .authcore import slow_hash
from .errors import BudgetExceededError, ValidationError
from .inkblot import InkblotImage, generate_inkblot_images
from .matching import Permutation, random_permutation
from .puzzle import normalize_labels
from .seedcore import RandomStream, Seed, extract

CHALLENGE_HASH_LABEL = b"GOTCHA-v1 challenge hash"
# Fixed public salt: inkblots must be derivable from a password guess alone.
CHALLENGE_EXTRACTOR_SALT = Seed(b"GOTCHA-v1 open challenge seed..\0")

DEFAULT_SOLVE_BUDGET = 10**6
CHALLENGE_SCHEMA_VERSION = "gotcha-challenge-v1"


def _length_prefixed(*fields: bytes) -> bytes:
    out = bytearray()
    for f in fields:
        out += struct.pack(">I", len(f)) + f
    return bytes(out)


def challenge_digest(password: str, salt: Seed, pi: Permutation, cost: int) -> bytes:
    """h(pw, s, pi(1..k)) -- unlike account hashes there is no username."""
    if pi.k > 255:
        raise ValidationError("k must fit in one byte")
    message = CHALLENGE_HASH_LABEL + _length_prefixed(
        password.encode("utf-8"), bytes(pi.mapping)
    )
    return slow_hash(message, salt.bytes, cost)


def challenge_images(password: str, k: int) -> list[InkblotImage]:
    """The inkblots a given password guess implies for a challenge tuple."""
    return generate_inkblot_images(k, extract(password, CHALLENGE_EXTRACTOR_SALT))


@dataclass(frozen=True)
class ChallengeTuple:
    salt: Seed
    digest: bytes
    permuted_labels: tuple[str, ...]
    space_low: int
    space_high: int        # passwords are decimal texts of low..high-1
    k: int
    hash_cost: int

    def __post_init__(self):
        if len(self.permuted_labels) != self.k:
            raise ValidationError("label count must equal k")
        if self.space_high <= self.space_low:
            raise ValidationError("password space must be non-empty")

    @property
    def space_size(self) -> int:
        return self.space_high - self.space_low

    def to_json(self) -> str:
        return json.dumps(
            {
                "version": CHALLENGE_SCHEMA_VERSION,
                "salt": base64.b64encode(self.salt.bytes).decode(),
                "digest": base64.b64encode(self.digest).decode(),
                "labels": list(self.permuted_labels),
                "space": {"low": self.space_low, "high": self.space_high},
                "k": self.k,
                "hash_cost": self.hash_cost,
            },
            ensure_ascii=False,
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ChallengeTuple":
        obj = json.loads(text)
        if obj.get("version") != CHALLENGE_SCHEMA_VERSION:
            raise ValidationError(f"unsupported challenge version {obj.get('version')!r}")
        return cls(
            salt=Seed(base64.b64decode(obj["salt"])),
            digest=base64.b64decode(obj["digest"]),
            permuted_labels=tuple(obj["labels"]),
            space_low=obj["space"]["low"],
            space_high=obj["space"]["high"],
            k=obj["k"],
            hash_cost=obj["hash_cost"],
        )


def generate_challenge(
    pw_space: tuple[int, int],
    k: int,
    labels,
    hash_cost: int,
    rng: RandomStream,
) -> tuple[ChallengeTuple, tuple[str, Permutation]]:
    """Plant a random (pw, pi) and publish the tuple; the secret stays local.

    All randomness comes from the supplied stream, so a fixed stream state
    reproduces the tuple bit-for-bit.  labels arrive in canonical image
    order (the labeler saw images 1..k) and are stored permuted.
    """
    low, high = pw_space
    if high <= low:
        raise ValidationError("password space must be non-empty")
    normalized = normalize_labels(labels, k)
    pw = str(low + rng.draw_uniform(high - low))
    pi = random_permutation(k, rng)
    salt = Seed(rng.next_bytes(32))
    digest = challenge_digest(pw, salt, pi, hash_cost)
    permuted = tuple(normalized[pi(i) - 1] for i in range(1, k + 1))
    tup = ChallengeTuple(
        salt=salt,
        digest=digest,
        permuted_labels=permuted,
        space_low=low,
        space_high=high,
        k=k,
        hash_cost=hash_cost,
    )
    return tup, (pw, pi)


def verify_solution(tup: ChallengeTuple, password: str, pi: Permutation) -> bool:
    return challenge_digest(password, tup.salt, pi, tup.hash_cost) == tup.digest


@dataclass(frozen=True)
class SolveResult:
    found: bool
    password: str | None
    pi: Permutation | None
    hash_calls: int


def lex_rank(pi: Permutation) -> int:
    """1-based rank of pi among all k! permutations in lexicographic order."""
    entries = list(pi.mapping)
    rank = 0
    for pos, value in enumerate(entries):
        smaller_remaining = sum(1 for later in entries[pos + 1 :] if later < value)
        rank += smaller_remaining * math.factorial(pi.k - 1 - pos)
    return rank + 1


def predicted_hash_calls(tup: ChallengeTuple, password: str, pi: Permutation) -> int:
    """Sweep-order rank of (pw, pi): (pw rank - 1) * k! + lex rank of pi."""
    pw_rank = int(password) - tup.space_low + 1
    return (pw_rank - 1) * math.factorial(tup.k) + lex_rank(pi)


def brute_force_solve(
    tup: ChallengeTuple, budget: int = DEFAULT_SOLVE_BUDGET, workers: int = 1
) -> SolveResult:
    """Sweep passwords ascending, permutations in lexicographic order.

    Refuses outright (no partial sweep) if space * k! exceeds the budget.
    With workers=1 the hash-call count of a hit equals its sweep rank
    exactly; parallel sweeps report the exact aggregate of calls made.
    """
    total = tup.space_size * math.factorial(tup.k)
    if total > budget:
        raise BudgetExceededError(
            f"sweep needs {total} hash calls, budget is {budget}; refusing"
        )
    if workers <= 1:
        calls = 0
        for pw_int in range(tup.space_low, tup.space_high):
            pw = str(pw_int)
            for cand in itertools.permutations(range(1, tup.k + 1)):
                calls += 1
                pi = Permutation(cand)
                if challenge_digest(pw, tup.salt, pi, tup.hash_cost) == tup.digest:
                    return SolveResult(True, pw, pi, calls)
        return SolveResult(False, None, None, calls)

    return _solve_parallel(tup, workers)


def _solve_parallel(tup: ChallengeTuple, workers: int) -> SolveResult:
    """Password sweep chunked across threads; call counts aggregated exactly."""
    import threading

    perms = [Permutation(c) for c in itertools.permutations(range(1, tup.k + 1))]
    found = threading.Event()
    results: list[tuple[str, Permutation]] = []
    counts: list[int] = [0] * workers
    lock = threading.Lock()

    def sweep(worker_id: int):
        calls = 0
        for pw_int in range(tup.space_low + worker_id, tup.space_high, workers):
            if found.is_set():
                break
            pw = str(pw_int)
            for pi in perms:
                calls += 1
                if challenge_digest(pw, tup.salt, pi, tup.hash_cost) == tup.digest:
                    with lock:
                        results.append((pw, pi))
                    found.set()
                    break
        counts[worker_id] = calls

    threads = [threading.Thread(target=sweep, args=(i,)) for i in range(workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    calls = sum(counts)
    if results:
        pw, pi = results[0]
        return SolveResult(True, pw, pi, calls)
    return SolveResult(False, None, None, calls)
