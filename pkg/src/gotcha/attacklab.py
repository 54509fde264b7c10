"""Offline-attack cost laboratory.

Models the breached-server game: the attacker holds a stolen record and may
only (1) call VerifyHash(pw', response) -- which runs the server's own
alpha-ball check -- at cost c_h per query, and (2) ask a (simulated) human
to solve the challenge a password guess implies, at cost c_H per query.
Everything else (the planted password, the hidden permutation, inkblot
rasters, seeds) sits behind the oracle boundary.

The headline bound being exercised: an attack with n_h hash queries and
n_H human queries against a dictionary D succeeds with probability at most
about n_h / (|D| * 2^mu) + n_H / |D|  (mu = log2 k! for the uniform
response model), i.e. total cost at least gamma * |D| * 2^mu * c_h +
n_H * c_H for success probability gamma.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import struct
from dataclasses import dataclass

from .authcore import AccountRecord, auth_digest, tolerant_verify
from .errors import ConservativeViolationError, ValidationError
from .matching import Permutation, enumerate_close, random_permutation
from .puzzle import PuzzleParams
from .seedcore import RandomStream, Seed, stream_from

LAB_SEED_LABEL = b"GOTCHA-v1 lab seed"
LAB_TRIAL_LABEL = b"GOTCHA-v1 lab trial "

_U64 = 1 << 64


@dataclass(frozen=True)
class CostModel:
    """Query prices and the attack budget of Theorem-style accounting."""

    c_h: float = 1.0
    c_H: float = 1000.0
    budget: float | None = None   # None = unlimited
    gamma: float = 1.0            # target success probability (informational)

    def __post_init__(self):
        if self.c_h < 0 or self.c_H < 0:
            raise ValidationError("query costs must be non-negative")
        if not (0.0 <= self.gamma <= 1.0):
            raise ValidationError("gamma must be a probability")


@dataclass(frozen=True)
class SimulatedHuman:
    """Behavioral stand-in for the account owner.

    On the correct-password challenge: with probability beta, answer within
    distance alpha of the true permutation (uniform over that ball);
    otherwise, and on every wrong-password challenge, answer uniformly over
    all k! permutations.  Defaults mirror the reported matching study
    (69% of participants within distance 5 at k=10).
    """

    beta: float = 0.69
    alpha: int = 5

    def __post_init__(self):
        if not (0.0 <= self.beta <= 1.0):
            raise ValidationError("beta must be a probability")
        if self.alpha < 0:
            raise ValidationError("alpha must be non-negative")

    def respond(self, correct_challenge: bool, true_pi: Permutation | None,
                k: int, stream: RandomStream) -> Permutation:
        if correct_challenge:
            if true_pi is None:
                raise ValidationError("correct challenge needs the true permutation")
            accurate = stream.draw_u64() / _U64 < self.beta
            if accurate:
                ball = enumerate_close(true_pi, min(self.alpha, k))
                return ball[stream.draw_uniform(len(ball))]
        return random_permutation(k, stream)


class _BudgetExhausted(Exception):
    """Internal: next query would exceed the budget; trial stops here."""


class _QueryLedger:
    """Exact Def-7 bookkeeping: cost is always n_h*c_h + n_H*c_H."""

    def __init__(self, cost_model: CostModel):
        self.cost_model = cost_model
        self.n_h = 0
        self.n_H = 0
        self.succeeded = False

    @property
    def cost(self) -> float:
        return self.n_h * self.cost_model.c_h + self.n_H * self.cost_model.c_H

    def charge_hash(self):
        if self.cost_model.budget is not None and self.cost + self.cost_model.c_h > self.cost_model.budget:
            raise _BudgetExhausted
        self.n_h += 1

    def charge_human(self):
        if self.cost_model.budget is not None and self.cost + self.cost_model.c_H > self.cost_model.budget:
            raise _BudgetExhausted
        self.n_H += 1


class AttackContext:
    """Everything a conservative strategy may touch; nothing else exists here.

    Attribute access outside the sealed surface raises
    ConservativeViolationError, which run_attack treats as a broken contract
    rather than a failed trial.
    """

    __slots__ = ("dictionary", "k", "alpha", "verify_hash", "query_human", "spent")

    def __init__(self, dictionary, k, alpha, verify_hash, query_human, spent):
        object.__setattr__(self, "dictionary", dictionary)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "verify_hash", verify_hash)
        object.__setattr__(self, "query_human", query_human)
        object.__setattr__(self, "spent", spent)

    def __setattr__(self, name, value):
        raise ConservativeViolationError("attack context is read-only")

    def __getattr__(self, name):
        raise ConservativeViolationError(
            f"{name!r} is outside the conservative-adversary oracle boundary"
        )


def make_victim(
    password: str, params: PuzzleParams, hash_cost: int, stream: RandomStream,
    username: str = "victim",
) -> tuple[AccountRecord, Permutation]:
    """A registered account for the lab: record plus the hidden permutation."""
    r_prime = Seed(stream.next_bytes(params.n_bits // 8), params.n_bits)
    hash_salt = Seed(stream.next_bytes(params.n_bits // 8), params.n_bits)
    pi = random_permutation(params.k, stream)
    digest = auth_digest(username, password, pi, hash_salt, hash_cost)
    labels = tuple(f"blot {j}" for j in range(1, params.k + 1))
    permuted = tuple(labels[pi(i) - 1] for i in range(1, params.k + 1))
    record = AccountRecord(
        username=username,
        extractor_salt=r_prime,
        hash_salt=hash_salt,
        password_hash=digest,
        permuted_labels=permuted,
        params=params,
        hash_cost=hash_cost,
    )
    return record, pi


# -- strategies ---------------------------------------------------------------


def brute_force_all(ctx: AttackContext):
    """Sweep every (password, permutation) pair; no human feedback."""
    for pw in ctx.dictionary:
        for cand in itertools.permutations(range(1, ctx.k + 1)):
            if ctx.verify_hash(pw, Permutation(cand)):
                return pw
    return None


def human_per_guess(ctx: AttackContext):
    """Ask the human about every guess, hash-check the answer once."""
    for pw in ctx.dictionary:
        response = ctx.query_human(pw)
        if ctx.verify_hash(pw, response):
            return pw
    return None


def human_on_subset(subset_size: int):
    """Human feedback on the first subset_size guesses only; no hash sweep
    of the rest."""

    def strategy(ctx: AttackContext):
        for pw in ctx.dictionary[:subset_size]:
            response = ctx.query_human(pw)
            if ctx.verify_hash(pw, response):
                return pw
        return None

    strategy.__name__ = f"human_on_subset_{subset_size}"
    return strategy


STRATEGIES = {
    "brute-force": brute_force_all,
    "human-per-guess": human_per_guess,
}


# -- the harness ---------------------------------------------------------------


@dataclass(frozen=True)
class AttackReport:
    """Exact query accounting over a batch of trials."""

    strategy: str
    trials: int
    successes: int
    n_h: int
    n_H: int
    total_cost: float
    n_h_max: int
    n_H_max: int
    cost_max: float
    dictionary_size: int
    k: int
    alpha: int
    c_h: float
    c_H: float
    budget: float | None

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def to_dict(self) -> dict:
        out = {f: getattr(self, f) for f in self.__dataclass_fields__}
        out["success_rate"] = self.success_rate
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [
            f"strategy          {self.strategy}",
            f"trials            {self.trials}",
            f"success rate      {self.success_rate:.4f} ({self.successes}/{self.trials})",
            f"hash queries      total {self.n_h}, worst trial {self.n_h_max}",
            f"human queries     total {self.n_H}, worst trial {self.n_H_max}",
            f"total cost        {self.total_cost:.2f} = {self.n_h}*{self.c_h} + {self.n_H}*{self.c_H}",
            f"worst-trial cost  {self.cost_max:.2f}",
            f"dictionary        {self.dictionary_size} entries, k={self.k}, alpha={self.alpha}",
            f"budget per trial  {'unlimited' if self.budget is None else self.budget}",
        ]
        return "\n".join(lines)


def _master_stream(seed: int, trial: int) -> RandomStream:
    digest = hashlib.sha256(LAB_SEED_LABEL + struct.pack(">q", seed)).digest()
    return stream_from(Seed(digest), LAB_TRIAL_LABEL + str(trial).encode())


def run_attack(
    dictionary,
    strategy,
    cost_model: CostModel,
    human: SimulatedHuman,
    trials: int,
    *,
    params: PuzzleParams | None = None,
    hash_cost: int = 0,
    seed: int = 0,
) -> AttackReport:
    """Monte Carlo over freshly planted victims, one per trial.

    Each trial draws the victim's password uniformly from the dictionary
    (per-trial randomness is keyed by (seed, trial index) so batches are
    reproducible and comparable point-by-point across parameter sweeps).
    A trial succeeds when some VerifyHash query returns true; it ends when
    the strategy returns or the budget cannot cover the next query.
    """
    if trials < 1:
        raise ValidationError("at least one trial")
    dictionary = tuple(dictionary)
    if not dictionary:
        raise ValidationError("dictionary must be non-empty")
    if params is None:
        params = PuzzleParams(k=3, alpha=0)

    name = getattr(strategy, "__name__", str(strategy))
    n_h_total = n_H_total = 0
    n_h_max = n_H_max = 0
    cost_total = cost_max = 0.0
    successes = 0

    for t in range(trials):
        stream = _master_stream(seed, t)
        true_pw = dictionary[stream.draw_uniform(len(dictionary))]
        record, true_pi = make_victim(true_pw, params, hash_cost, stream)
        ledger = _QueryLedger(cost_model)

        def verify_hash(pw: str, response: Permutation, ledger=ledger, record=record) -> bool:
            ledger.charge_hash()
            ok, _ = tolerant_verify(record, pw, response)
            if ok:
                ledger.succeeded = True
            return ok

        def query_human(pw: str, ledger=ledger, stream=stream, true_pw=true_pw,
                        true_pi=true_pi) -> Permutation:
            ledger.charge_human()
            return human.respond(pw == true_pw, true_pi, params.k, stream)

        ctx = AttackContext(
            dictionary=dictionary,
            k=params.k,
            alpha=params.alpha,
            verify_hash=verify_hash,
            query_human=query_human,
            spent=lambda ledger=ledger: ledger.cost,
        )
        try:
            strategy(ctx)
        except _BudgetExhausted:
            pass

        n_h_total += ledger.n_h
        n_H_total += ledger.n_H
        cost_total += ledger.cost
        n_h_max = max(n_h_max, ledger.n_h)
        n_H_max = max(n_H_max, ledger.n_H)
        cost_max = max(cost_max, ledger.cost)
        if ledger.succeeded:
            successes += 1

    return AttackReport(
        strategy=name,
        trials=trials,
        successes=successes,
        n_h=n_h_total,
        n_H=n_H_total,
        total_cost=cost_total,
        n_h_max=n_h_max,
        n_H_max=n_H_max,
        cost_max=cost_max,
        dictionary_size=len(dictionary),
        k=params.k,
        alpha=params.alpha,
        c_h=cost_model.c_h,
        c_H=cost_model.c_H,
        budget=cost_model.budget,
    )


def theorem1_bound(
    params: PuzzleParams, cost_model: CostModel, dictionary_size: int,
    gamma: float, n_H: int,
) -> float:
    """Minimum budget for gamma success: gamma * |D| * 2^mu * c_h + n_H * c_H.

    mu defaults to log2 k! (the uniform response model), in which case
    2^mu is taken as k! exactly.
    """
    if dictionary_size < 1:
        raise ValidationError("dictionary size must be positive")
    if not (0.0 <= gamma <= 1.0):
        raise ValidationError("gamma must be a probability")
    if n_H < 0:
        raise ValidationError("n_H must be non-negative")
    response_space = 2.0 ** params.mu
    if abs(response_space - round(response_space)) < 1e-6:
        response_space = float(round(response_space))
    return gamma * dictionary_size * response_space * cost_model.c_h + n_H * cost_model.c_H


@dataclass(frozen=True)
class HospEconomics:
    database_size: int
    full_solve_cost: float
    half_solve_cost: float
    note: str

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


def hosp_economics(drive_bytes: float, captcha_bytes: float,
                   human_cost_per_captcha: float) -> HospEconomics:
    """Pre-generated-puzzle economics: paying humans to solve the whole store.

    |D| = drive_bytes / captcha_bytes puzzles fit; solving them all costs
    |D| * c, half of them half that.  Note the drive-count convention: one
    4 TB drive at 8 KB per puzzle holds 5*10^8; the round |D| ~ 10^9 figure
    assumes 8 TB total (two drives), so pass total bytes across drives.
    """
    if captcha_bytes <= 0:
        raise ValidationError("captcha size must be positive")
    if drive_bytes < 0 or human_cost_per_captcha < 0:
        raise ValidationError("inputs must be non-negative")
    database_size = int(drive_bytes // captcha_bytes)
    full = database_size * human_cost_per_captcha
    return HospEconomics(
        database_size=database_size,
        full_solve_cost=full,
        half_solve_cost=full / 2,
        note=(
            "database size counts TOTAL bytes passed in; the round 1e9-puzzle "
            "figure corresponds to 8 TB across two 4 TB drives (a single 4 TB "
            "drive holds 5e8 puzzles at 8 KB each)"
        ),
    )
