"""Account creation and tolerant login, plus the persistent account record.

Registration: a fresh public salt r' turns the password into the image
seed r1, a throwaway seed r2 picks the hidden permutation pi, the user
labels the permuted inkblots, and the record binds pi inside a slow salted
hash h(u, s, pw, pi(1..k)).  Neither the password nor pi is stored in
recoverable form.

Login: the submitted password regenerates candidate images, the user
re-matches their stored labels, and the server accepts iff some
permutation within distance alpha of the response reproduces the stored
hash.  Verification always sweeps the whole alpha-ball (count_close(k,
alpha) slow-hash calls, never more than the closed-form bound): constant
work for accept and deny alike, so timing says nothing.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import secrets
import struct
import threading
import time
from dataclasses import dataclass, field

from .errors import (
    DuplicateUserError,
    LockoutError,
    SessionError,
    StoreError,
    ValidationError,
)
from .inkblot import InkblotImage, generate_inkblot_images
from .matching import Permutation, MatchingChallenge, count_close, enumerate_close, random_permutation
from .puzzle import PuzzleParams, normalize_labels
from .seedcore import PERM_STREAM_LABEL, Seed, extract, stream_from

AUTH_HASH_LABEL = b"GOTCHA-v1 auth"
DECOY_SALT_LABEL = b"GOTCHA-v1 decoy r-prime"
DECOY_LABELS_LABEL = b"GOTCHA-v1 decoy labels"
STORE_HEADER = "gotcha-store v1"

DEFAULT_HASH_COST = 12  # PBKDF2 iterations = 2**cost
DEFAULT_SESSION_TTL = 15 * 60
DEFAULT_STRIKE_LIMIT = 10
DEFAULT_LOCKOUT_SECONDS = 3 * 3600

_DECOY_WORDS = (
    ("dancing", "sleepy", "angry", "gentle", "spotted", "crooked",
     "smiling", "frozen", "velvet", "hollow", "dizzy", "brave"),
    ("clown", "moth", "dragon", "lantern", "violin", "beetle",
     "mask", "garden", "pirate", "jellyfish", "castle", "crow"),
)


def slow_hash(message: bytes, salt: bytes, cost: int) -> bytes:
    """Cost-parameterized password hash: PBKDF2-HMAC-SHA256, 2**cost rounds.

    cost=0 (one round) is for tests and simulations only; see FORMATS.md
    for the deployment trade-off between cost level and the alpha-ball
    sweep size.
    """
    if cost < 0 or cost > 32:
        raise ValidationError("hash cost must be in 0..32")
    return hashlib.pbkdf2_hmac("sha256", message, salt, 1 << cost, dklen=32)


def _length_prefixed(*fields: bytes) -> bytes:
    out = bytearray()
    for f in fields:
        out += struct.pack(">I", len(f)) + f
    return bytes(out)


def auth_digest(username: str, password: str, pi: Permutation, hash_salt: Seed, cost: int) -> bytes:
    """h(u, s, pw, pi(1),..,pi(k)) with an unambiguous field encoding.

    Fields are length-prefixed and the permutation entries are single
    bytes, so no two distinct (u, pw, pi) triples share an input string.
    """
    if pi.k > 255:
        raise ValidationError("k must fit in one byte")
    message = AUTH_HASH_LABEL + _length_prefixed(
        username.encode("utf-8"),
        password.encode("utf-8"),
        bytes(pi.mapping),
    )
    return slow_hash(message, hash_salt.bytes, cost)


@dataclass(frozen=True)
class AccountRecord:
    """The stored tuple (u, r', s, h_pw, permuted labels) plus parameters."""

    username: str
    extractor_salt: Seed
    hash_salt: Seed
    password_hash: bytes
    permuted_labels: tuple[str, ...]
    params: PuzzleParams
    hash_cost: int

    def __post_init__(self):
        if len(self.permuted_labels) != self.params.k:
            raise ValidationError("label count must equal k")

    def to_json(self) -> str:
        return json.dumps(
            {
                "u": self.username,
                "r_prime": base64.b64encode(self.extractor_salt.bytes).decode(),
                "s": base64.b64encode(self.hash_salt.bytes).decode(),
                "h_pw": base64.b64encode(self.password_hash).decode(),
                "labels": list(self.permuted_labels),
                "k": self.params.k,
                "alpha": self.params.alpha,
                "n_bits": self.params.n_bits,
                "hash_cost": self.hash_cost,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "AccountRecord":
        try:
            obj = json.loads(line)
            params = PuzzleParams(k=obj["k"], alpha=obj["alpha"], n_bits=obj["n_bits"])
            return cls(
                username=obj["u"],
                extractor_salt=Seed(base64.b64decode(obj["r_prime"]), obj["n_bits"]),
                hash_salt=Seed(base64.b64decode(obj["s"]), obj["n_bits"]),
                password_hash=base64.b64decode(obj["h_pw"]),
                permuted_labels=tuple(obj["labels"]),
                params=params,
                hash_cost=obj["hash_cost"],
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise StoreError(f"corrupt account record: {exc}") from exc


class AccountStore:
    """Append-only, one JSON record per line under a versioned header.

    path=None keeps everything in memory (tests and simulations).
    """

    def __init__(self, path=None):
        self._path = path
        self._records: dict[str, AccountRecord] = {}
        if path is not None:
            self._load_or_create()

    def _load_or_create(self):
        try:
            with open(self._path, "r", encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except FileNotFoundError:
            with open(self._path, "w", encoding="utf-8") as fh:
                fh.write(STORE_HEADER + "\n")
            return
        except OSError as exc:
            raise StoreError(f"cannot open store: {exc}") from exc
        if not lines or lines[0] != STORE_HEADER:
            raise StoreError(f"store missing header {STORE_HEADER!r}")
        for line in lines[1:]:
            if not line.strip():
                continue
            record = AccountRecord.from_json(line)
            self._records[record.username] = record

    def add(self, record: AccountRecord) -> None:
        if record.username in self._records:
            raise DuplicateUserError(f"username {record.username!r} already registered")
        self._records[record.username] = record
        if self._path is not None:
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(record.to_json() + "\n")

    def get(self, username: str):
        return self._records.get(username)

    def __contains__(self, username: str) -> bool:
        return username in self._records

    def __len__(self) -> int:
        return len(self._records)


@dataclass
class RegistrationSession:
    token: str
    username: str
    password: str          # transient; dropped with the session
    r_prime: Seed
    r1: Seed
    r2: Seed
    pi: Permutation
    expires_at: float
    _image_cache: list = field(default=None, repr=False)

    def images(self) -> list[InkblotImage]:
        """The k inkblots as presented (pi-order); rendered once, cached."""
        if self._image_cache is None:
            canonical = generate_inkblot_images(self.pi.k, self.r1)
            self._image_cache = [canonical[self.pi(i) - 1] for i in range(1, self.pi.k + 1)]
        return self._image_cache


@dataclass
class LoginSession:
    token: str
    username: str
    password_attempt: str  # transient; needed for the hash check, never logged
    r1_prime: Seed
    record: AccountRecord | None   # None for decoy (unknown user) sessions
    k: int
    expires_at: float
    _image_cache: list = field(default=None, repr=False)

    def images(self) -> list[InkblotImage]:
        """Challenge inkblots in canonical order, from the submitted password."""
        if self._image_cache is None:
            self._image_cache = generate_inkblot_images(self.k, self.r1_prime)
        return self._image_cache


@dataclass(frozen=True)
class LoginResult:
    accepted: bool
    hash_evaluations: int


def tolerant_verify(
    record: AccountRecord, password_attempt: str, response: Permutation
) -> tuple[bool, int]:
    """The alpha-ball check: accept iff some close permutation hashes right.

    Sweeps the entire ball with no early exit, so the slow-hash call count
    is always count_close(k, alpha).  Shared by complete_login and the
    attack lab's VerifyHash oracle.
    """
    if response.k != record.params.k:
        raise ValidationError(f"response must be a permutation of 1..{record.params.k}")
    accepted = False
    evaluations = 0
    for pi0 in enumerate_close(response, record.params.alpha):
        digest = auth_digest(
            record.username, password_attempt, pi0, record.hash_salt, record.hash_cost
        )
        evaluations += 1
        if hmac.compare_digest(digest, record.password_hash):
            accepted = True
    return accepted, evaluations


@dataclass(frozen=True)
class AuditEntry:
    timestamp: float
    username: str
    outcome: str            # "accept" | "deny" | "register" | "lockout"
    hash_evaluations: int


class AuthEngine:
    """Shared mutable state (accounts, sessions, strikes) behind one lock.

    render_images=False skips rasterization for mass simulations where the
    human is an oracle; every protocol decision (hashing, tolerance,
    strikes) is identical in both modes.
    """

    def __init__(
        self,
        store: AccountStore | None = None,
        params: PuzzleParams = PuzzleParams(),
        hash_cost: int = DEFAULT_HASH_COST,
        *,
        rng=secrets.token_bytes,
        clock=time.time,
        session_ttl: float = DEFAULT_SESSION_TTL,
        strike_limit: int = DEFAULT_STRIKE_LIMIT,
        lockout_seconds: float = DEFAULT_LOCKOUT_SECONDS,
        render_images: bool = True,
        server_secret: bytes | None = None,
        audit_path: str | None = None,
    ):
        self.store = store if store is not None else AccountStore()
        self.params = params
        self.hash_cost = hash_cost
        self._rng = rng
        self._clock = clock
        self._session_ttl = session_ttl
        self._strike_limit = strike_limit
        self._lockout_seconds = lockout_seconds
        self.render_images = render_images
        self._server_secret = server_secret if server_secret is not None else rng(32)
        self._registrations: dict[str, RegistrationSession] = {}
        self._logins: dict[str, LoginSession] = {}
        self._strikes: dict[str, int] = {}
        self._lockout_until: dict[str, float] = {}
        self.audit_log: list[AuditEntry] = []
        self._audit_path = audit_path
        self._lock = threading.RLock()

    def _audit(self, entry: AuditEntry) -> None:
        self.audit_log.append(entry)
        if self._audit_path is not None:
            with open(self._audit_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({
                    "time": entry.timestamp,
                    "username": entry.username,
                    "outcome": entry.outcome,
                    "hash_evaluations": entry.hash_evaluations,
                }) + "\n")

    # -- helpers ------------------------------------------------------------

    def _fresh_seed(self) -> Seed:
        return Seed(self._rng(self.params.n_bits // 8), self.params.n_bits)

    def _token(self) -> str:
        return secrets.token_hex(16)

    def _expiry(self) -> float:
        return self._clock() + self._session_ttl

    def _take_session(self, table: dict, token: str):
        session = table.pop(token, None)
        if session is None:
            raise SessionError("unknown or already-consumed session")
        if self._clock() > session.expires_at:
            raise SessionError("session expired")
        return session

    def _purge_expired(self) -> None:
        now = self._clock()
        for table in (self._registrations, self._logins):
            dead = [token for token, s in table.items() if now > s.expires_at]
            for token in dead:
                del table[token]

    def _decoy_seed_and_labels(self, username: str) -> tuple[Seed, tuple[str, ...]]:
        """Stable fake r' and labels so unknown users are indistinguishable."""
        raw = hmac.new(self._server_secret, DECOY_SALT_LABEL + username.encode("utf-8"),
                       hashlib.sha256).digest()
        r_prime = Seed(raw[: self.params.n_bits // 8].ljust(self.params.n_bits // 8, b"\0"),
                       self.params.n_bits)
        label_key = hmac.new(self._server_secret, DECOY_LABELS_LABEL + username.encode("utf-8"),
                             hashlib.sha256).digest()
        stream = stream_from(Seed(label_key), DECOY_LABELS_LABEL)
        adjectives, nouns = _DECOY_WORDS
        labels, seen = [], set()
        while len(labels) < self.params.k:
            pick = (stream.draw_uniform(len(adjectives)), stream.draw_uniform(len(nouns)))
            if pick in seen:
                continue
            seen.add(pick)
            labels.append(f"{adjectives[pick[0]]} {nouns[pick[1]]}")
        return r_prime, tuple(labels)

    # -- protocol: create account -------------------------------------------

    def begin_registration(self, username: str, password: str):
        """Fresh salts, password-derived inkblots in hidden-permutation order.

        Returns (session, images in pi-order); images is None when the
        engine was built with render_images=False.
        """
        if not username or not username.strip():
            raise ValidationError("username must be non-empty")
        if len(username.encode("utf-8")) > 128:
            raise ValidationError("username exceeds 128 UTF-8 bytes")
        if not password:
            raise ValidationError("password must be non-empty")
        with self._lock:
            self._purge_expired()
            if username in self.store or any(
                s.username == username for s in self._registrations.values()
            ):
                raise DuplicateUserError(f"username {username!r} already registered")
            r_prime = self._fresh_seed()
            r1 = extract(password, r_prime, self.params.n_bits)
            r2 = self._fresh_seed()
            pi = random_permutation(self.params.k, stream_from(r2, PERM_STREAM_LABEL))
            session = RegistrationSession(
                token=self._token(),
                username=username,
                password=password,
                r_prime=r_prime,
                r1=r1,
                r2=r2,
                pi=pi,
                expires_at=self._expiry(),
            )
            self._registrations[session.token] = session
        images = session.images() if self.render_images else None
        return session, images

    def complete_registration(self, token: str, labels=None, reject: bool = False):
        """Bind the permutation into the slow hash and persist the record.

        reject=True drops the session without storing anything (the
        confusing-images escape hatch); the caller starts over.
        """
        with self._lock:
            session = self._take_session(self._registrations, token)
            if reject:
                return None
            if labels is None:
                raise ValidationError("labels are required unless rejecting")
            normalized = normalize_labels(labels, self.params.k)
            hash_salt = self._fresh_seed()
            digest = auth_digest(
                session.username, session.password, session.pi, hash_salt, self.hash_cost
            )
            record = AccountRecord(
                username=session.username,
                extractor_salt=session.r_prime,
                hash_salt=hash_salt,
                password_hash=digest,
                permuted_labels=normalized,
                params=self.params,
                hash_cost=self.hash_cost,
            )
            self.store.add(record)
            self._audit(AuditEntry(self._clock(), session.username, "register", 1))
            return record

    # -- protocol: authenticate ----------------------------------------------

    def begin_login(self, username: str, password_attempt: str):
        """Regenerate candidate inkblots from the attempt and issue the challenge.

        Unknown usernames get a decoy challenge derived from the server
        secret, indistinguishable from a real one, so login cannot be used
        to probe account existence.
        """
        if not password_attempt:
            raise ValidationError("password must be non-empty")
        with self._lock:
            self._purge_expired()
            now = self._clock()
            if self._lockout_until.get(username, 0.0) > now:
                raise LockoutError(f"{username!r} is temporarily locked out")
            record = self.store.get(username)
            if record is not None:
                r_prime, labels, k = record.extractor_salt, record.permuted_labels, record.params.k
            else:
                r_prime, labels = self._decoy_seed_and_labels(username)
                k = self.params.k
            r1_prime = extract(password_attempt, r_prime, self.params.n_bits)
            session = LoginSession(
                token=self._token(),
                username=username,
                password_attempt=password_attempt,
                r1_prime=r1_prime,
                record=record,
                k=k,
                expires_at=self._expiry(),
            )
            self._logins[session.token] = session
        images = tuple(session.images()) if self.render_images else tuple([None] * k)
        challenge = MatchingChallenge(images=images, labels=tuple(labels), k=k)
        return session, challenge

    def complete_login(self, token: str, response) -> LoginResult:
        """Accept iff some permutation alpha-close to the response hashes right.

        The sweep always covers the entire ball -- count_close(k, alpha)
        slow-hash evaluations, accept or deny, real account or decoy.
        """
        if not isinstance(response, Permutation):
            response = Permutation.from_list(response)
        with self._lock:
            session = self._take_session(self._logins, token)
        if response.k != session.k:
            raise ValidationError(f"response must be a permutation of 1..{session.k}")

        record = session.record
        if record is not None:
            accepted, evaluations = tolerant_verify(record, session.password_attempt, response)
            alpha = record.params.alpha
        else:
            # Decoy: same work profile against an unmatchable digest.
            alpha = self.params.alpha
            accepted = False
            evaluations = 0
            fake_salt = self._fresh_seed()
            for pi0 in enumerate_close(response, alpha):
                auth_digest(
                    session.username, session.password_attempt, pi0, fake_salt, self.hash_cost
                )
                evaluations += 1
        assert evaluations == count_close(session.k, alpha)

        with self._lock:
            now = self._clock()
            if accepted:
                self._strikes.pop(session.username, None)
                self._audit(AuditEntry(now, session.username, "accept", evaluations))
            else:
                strikes = self._strikes.get(session.username, 0) + 1
                self._strikes[session.username] = strikes
                outcome = "deny"
                if strikes >= self._strike_limit:
                    self._lockout_until[session.username] = now + self._lockout_seconds
                    self._strikes.pop(session.username, None)
                    outcome = "lockout"
                self._audit(AuditEntry(now, session.username, outcome, evaluations))
        return LoginResult(accepted=accepted, hash_evaluations=evaluations)

    # -- service support -----------------------------------------------------

    def registration_session(self, token: str) -> RegistrationSession | None:
        session = self._registrations.get(token)
        if session is not None and self._clock() > session.expires_at:
            return None
        return session

    def login_session(self, token: str) -> LoginSession | None:
        session = self._logins.get(token)
        if session is not None and self._clock() > session.expires_at:
            return None
        return session
