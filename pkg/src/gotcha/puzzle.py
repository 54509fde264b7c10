"""The two-stage puzzle generators behind account creation and login.

g1 produces k inkblots in a secretly permuted order for the user to label;
g2 later regenerates the same inkblots in canonical order and pairs them
with the stored labels.  When the login password matches, the g2 images are
byte-identical to the g1 images, so the user recognizes their own labels;
with a wrong password the images are unrelated and the labels match nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .inkblot import InkblotImage, generate_inkblot_images
from .matching import MatchingChallenge, Permutation, random_permutation
from .seedcore import PERM_STREAM_LABEL, Seed, stream_from

MAX_LABEL_BYTES = 128


@dataclass(frozen=True)
class PuzzleParams:
    """Operating parameters; epsilon/delta/mu are declared, never measured.

    They parameterize the attack-cost bound only: epsilon and delta are the
    assumed distinguishing advantages against the puzzle, mu the min-entropy
    of responses to wrong-password challenges (log2 k! for the uniform
    model, filled in when left as None).
    """

    k: int = 10
    alpha: int = 5
    n_bits: int = 256
    epsilon: float = 0.0
    delta: float = 0.0
    mu: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("k must be at least 1")
        if not (0 <= self.alpha <= self.k):
            raise ValidationError(f"alpha must be in 0..{self.k}")
        if self.mu is None:
            object.__setattr__(self, "mu", math.log2(math.factorial(self.k)))


def normalize_label(label: str) -> str:
    """Trim surrounding whitespace; reject empty or oversized labels.

    Labels are matched by position, never compared as strings, so this is
    purely a storage bound (128 UTF-8 bytes).
    """
    if not isinstance(label, str):
        raise ValidationError("label must be a string")
    trimmed = label.strip()
    if trimmed == "":
        raise ValidationError("label must be non-empty after trimming")
    if len(trimmed.encode("utf-8")) > MAX_LABEL_BYTES:
        raise ValidationError(f"label exceeds {MAX_LABEL_BYTES} UTF-8 bytes")
    return trimmed


def normalize_labels(labels, k: int) -> tuple[str, ...]:
    labels = list(labels)
    if len(labels) != k:
        raise ValidationError(f"expected {k} labels, got {len(labels)}")
    return tuple(normalize_label(lb) for lb in labels)


def g1(k: int, r1: Seed, r2: Seed) -> tuple[list[InkblotImage], Permutation]:
    """Inkblots from r1, presented in an order drawn from r2 alone.

    Returns (images in permuted order, permutation).  Position i of the
    output carries image pi(i); the permutation stays server-side, bound
    into the password hash and never shown to anyone.
    """
    images = generate_inkblot_images(k, r1)
    pi = random_permutation(k, stream_from(r2, PERM_STREAM_LABEL))
    return [images[pi(i) - 1] for i in range(1, k + 1)], pi


def g2(k: int, r1: Seed, labels) -> MatchingChallenge:
    """Final challenge: canonical-order inkblots from r1 + permuted labels.

    The labels arrive exactly as stored (permuted order) and pass through
    byte-unchanged; solving the challenge means recovering the permutation
    that re-pairs each label with its image.
    """
    normalized = normalize_labels(labels, k)
    images = generate_inkblot_images(k, r1)
    return MatchingChallenge(images=tuple(images), labels=normalized, k=k)
