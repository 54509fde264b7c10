"""Deterministic randomness: password extraction and seeded byte streams.

Everything generated by this package (inkblot geometry, permutations,
challenge secrets) is a pure function of a Seed, so the exact primitives
matter.  They are pinned in FORMATS.md:

  extract   HKDF-SHA256(salt=public_salt, ikm=utf8(password), info=label)
  stream    block i = HMAC-SHA256(key=seed, msg=label || uint64_be(i))

Two streams with different labels are independent byte sequences even when
they share a seed.
"""

from __future__ import annotations

import hashlib
import hmac
import math
from dataclasses import dataclass, field

from .errors import ValidationError

DEFAULT_SEED_BITS = 256

# Context labels (protocol-version-1 constants, see FORMATS.md).
EXTRACT_LABEL = b"GOTCHA-v1 extract"
STREAM_LABEL = b"GOTCHA-v1 stream"
IMAGE_STREAM_LABEL = b"GOTCHA-v1 img"
PERM_STREAM_LABEL = b"GOTCHA-v1 perm"
CHALLENGE_STREAM_LABEL = b"GOTCHA-v1 challenge"

_U64 = 1 << 64


@dataclass(frozen=True)
class Seed:
    """Fixed-length byte string; holds r1, r2, r', salts and friends."""

    bytes: bytes
    n_bits: int = DEFAULT_SEED_BITS

    def __post_init__(self):
        if self.n_bits % 8 != 0 or self.n_bits <= 0:
            raise ValidationError(f"seed length must be a positive multiple of 8 bits, got {self.n_bits}")
        if len(self.bytes) != self.n_bits // 8:
            raise ValidationError(
                f"seed must be exactly {self.n_bits // 8} bytes, got {len(self.bytes)}"
            )

    @classmethod
    def from_hex(cls, hex_string: str, n_bits: int = DEFAULT_SEED_BITS) -> "Seed":
        return cls(bytes.fromhex(hex_string), n_bits)

    def hex(self) -> str:
        return self.bytes.hex()


def _hkdf_sha256(ikm: bytes, salt: bytes, info: bytes, length: int) -> bytes:
    """RFC 5869 extract-then-expand with SHA-256."""
    prk = hmac.new(salt, ikm, hashlib.sha256).digest()
    okm = b""
    block = b""
    counter = 1
    while len(okm) < length:
        block = hmac.new(prk, block + info + bytes([counter]), hashlib.sha256).digest()
        okm += block
        counter += 1
    return okm[:length]


def extract(password: str, public_salt: Seed, n_bits: int = DEFAULT_SEED_BITS) -> Seed:
    """Derive the generation seed from (password, public salt).

    Deterministic, and sensitive to both arguments.  The salt is public:
    anyone holding the stored record can recompute the seed for a password
    guess, which is exactly what the authentication protocol requires.
    """
    if not isinstance(password, str) or password == "":
        raise ValidationError("password must be a non-empty string")
    okm = _hkdf_sha256(password.encode("utf-8"), public_salt.bytes, EXTRACT_LABEL, n_bits // 8)
    return Seed(okm, n_bits)


@dataclass
class RandomStream:
    """Counter-mode PRG over a seed; single-owner, not thread-safe.

    Byte layout is fixed so independent implementations stay in lockstep:
    every draw_* method consumes 8 bytes per attempt (see draw_uniform for
    the rejection rule).
    """

    seed: Seed
    label: bytes = STREAM_LABEL
    _block_index: int = field(default=0, repr=False)
    _buffer: bytes = field(default=b"", repr=False)
    draws: int = field(default=0, repr=False)

    def next_bytes(self, n: int) -> bytes:
        if n < 0:
            raise ValidationError("byte count must be non-negative")
        while len(self._buffer) < n:
            counter = self._block_index.to_bytes(8, "big")
            self._buffer += hmac.new(self.seed.bytes, self.label + counter, hashlib.sha256).digest()
            self._block_index += 1
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    def draw_u64(self) -> int:
        self.draws += 1
        return int.from_bytes(self.next_bytes(8), "big")

    def draw_uniform(self, m: int) -> int:
        """Unbiased uniform integer in [0, m).

        8 bytes per attempt; values >= floor(2^64/m)*m are rejected and a
        fresh 8 bytes drawn.  For the moduli used here (m <= 2^32) the
        rejection probability is below 2^-32, so layouts never drift in
        practice while staying exactly uniform.
        """
        if m <= 0:
            raise ValidationError("modulus must be positive")
        limit = (_U64 // m) * m
        while True:
            v = self.draw_u64()
            if v < limit:
                return v % m

    def draw_angle(self) -> float:
        """Uniform rotation in [0, 2*pi); one 8-byte draw, scaled."""
        return self.draw_u64() / _U64 * (2.0 * math.pi)

    def draw_color(self, palette: tuple) -> tuple:
        """Uniform choice from a palette of RGB triples; one 8-byte draw."""
        return palette[self.draw_uniform(len(palette))]


def stream_from(seed: Seed, label: bytes = STREAM_LABEL) -> RandomStream:
    """New stream positioned at draw 0.  Distinct labels give independent streams."""
    return RandomStream(seed=seed, label=label)
