"""GOTCHA password hardening: inkblot puzzles whose generation needs a human.

A stolen record here is not enough for an automated dictionary attack:
verifying a password guess requires matching user-authored labels to
password-derived inkblot images, which (by assumption) takes a human.
The package covers the whole scheme -- seeded generation, tolerant
authentication, an HTTP service, a publishable challenge kit, and a cost
laboratory for the offline-attack economics.
"""

from .attacklab import (
    AttackReport,
    CostModel,
    SimulatedHuman,
    hosp_economics,
    run_attack,
    theorem1_bound,
)
from .authcore import (
    AccountRecord,
    AccountStore,
    AuthEngine,
    LoginResult,
    auth_digest,
    slow_hash,
    tolerant_verify,
)
from .challengekit import (
    ChallengeTuple,
    brute_force_solve,
    generate_challenge,
    verify_solution,
)
from .errors import (
    BudgetExceededError,
    ConservativeViolationError,
    DuplicateUserError,
    GotchaError,
    LockoutError,
    SessionError,
    StoreError,
    ValidationError,
)
from .inkblot import (
    CANVAS_HEIGHT,
    CANVAS_WIDTH,
    PALETTE,
    InkblotImage,
    decode_png,
    draw_random_ellipse_pairs,
    export_png,
    generate_inkblot_images,
)
from .matching import (
    MatchingChallenge,
    Permutation,
    count_close,
    count_close_upper_bound,
    derangement_number,
    distance,
    enumerate_close,
    random_permutation,
)
from .puzzle import PuzzleParams, g1, g2
from .seedcore import RandomStream, Seed, extract, stream_from

__version__ = "0.1.0"
