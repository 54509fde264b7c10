import itertools
import json

import pytest

from gotcha.authcore import (
    AccountStore,
    AuthEngine,
    STORE_HEADER,
    auth_digest,
    slow_hash,
    tolerant_verify,
)
from gotcha.errors import (
    DuplicateUserError,
    LockoutError,
    SessionError,
    StoreError,
    ValidationError,
)
from gotcha.inkblot import generate_inkblot_images
from gotcha.matching import Permutation, count_close, distance, enumerate_close
from gotcha.puzzle import PuzzleParams
from gotcha.seedcore import Seed, stream_from

from conftest import deterministic_rng, seed_for


def labels_for(k):
    return [f"title {j}" for j in range(1, k + 1)]


def register(engine, username="alice", password="hunter2"):
    session, _ = engine.begin_registration(username, password)
    pi = session.pi
    record = engine.complete_registration(session.token, labels_for(engine.params.k))
    return record, pi


def response_at_distance(pi, d):
    """Cyclically shift d entries: a derangement on those positions."""
    if d == 0:
        return pi
    entries = list(pi.mapping)
    idx = list(range(d))
    values = [entries[i] for i in idx]
    for pos, i in enumerate(idx):
        entries[i] = values[(pos + 1) % d]
    moved = Permutation(tuple(entries))
    assert distance(pi, moved) == d
    return moved


class TestSlowHash:
    def test_deterministic_and_cost_sensitive(self):
        assert slow_hash(b"m", b"s", 0) == slow_hash(b"m", b"s", 0)
        assert slow_hash(b"m", b"s", 0) != slow_hash(b"m", b"s", 1)

    def test_matches_pbkdf2_oracle(self):
        import hashlib

        assert slow_hash(b"msg", b"salt", 4) == hashlib.pbkdf2_hmac("sha256", b"msg", b"salt", 16)

    def test_cost_range(self):
        with pytest.raises(ValidationError):
            slow_hash(b"m", b"s", -1)

    def test_encoding_is_unambiguous(self):
        pi = Permutation.identity(3)
        s = seed_for("salt")
        assert auth_digest("ab", "c", pi, s, 0) != auth_digest("a", "bc", pi, s, 0)


class TestRegistration:
    def test_happy_path_then_exact_login(self, fast_engine):
        engine = fast_engine(k=4, alpha=2)
        record, pi = register(engine)
        session, challenge = engine.begin_login("alice", "hunter2")
        assert challenge.k == 4
        result = engine.complete_login(session.token, pi)
        assert result.accepted

    def test_duplicate_username(self, fast_engine):
        engine = fast_engine()
        register(engine)
        with pytest.raises(DuplicateUserError):
            engine.begin_registration("alice", "other")

    def test_empty_password(self, fast_engine):
        with pytest.raises(ValidationError):
            fast_engine().begin_registration("bob", "")

    def test_fresh_salt_gives_fresh_images(self):
        # same password, five registrations, rendered images must differ
        engine = AuthEngine(
            AccountStore(), params=PuzzleParams(k=1, alpha=0), hash_cost=0,
            rng=deterministic_rng("fresh"), render_images=True,
        )
        seen = set()
        for i in range(5):
            session, images = engine.begin_registration(f"user{i}", "same password")
            seen.add(images[0].pixels.tobytes())
            engine.complete_registration(session.token, ["t"])
        assert len(seen) == 5

    def test_injected_rng_reproduces_session(self):
        def build():
            return AuthEngine(
                AccountStore(), params=PuzzleParams(k=3, alpha=0), hash_cost=0,
                rng=deterministic_rng("inject"), render_images=True,
            )

        s1, images1 = build().begin_registration("alice", "pw")
        s2, images2 = build().begin_registration("alice", "pw")
        assert s1.pi == s2.pi
        assert all(x == y for x, y in zip(images1, images2))

    def test_reject_and_regenerate(self, fast_engine):
        engine = fast_engine(render=True, k=1, alpha=0)
        session1, images1 = engine.begin_registration("alice", "pw")
        assert engine.complete_registration(session1.token, reject=True) is None
        session2, images2 = engine.begin_registration("alice", "pw")
        assert images1[0] != images2[0]
        engine.complete_registration(session2.token, ["t"])
        assert engine.store.get("alice") is not None

    def test_record_leaks_no_secrets(self, fast_engine):
        engine = fast_engine(k=3)
        password = "extremely-distinctive-password-zq81"
        session, _ = engine.begin_registration("alice", password)
        pi = session.pi
        record = engine.complete_registration(session.token, labels_for(3))
        serialized = record.to_json()
        assert password not in serialized
        assert json.dumps(pi.to_list()) not in serialized
        assert set(json.loads(serialized)) == {
            "u", "r_prime", "s", "h_pw", "labels", "k", "alpha", "n_bits", "hash_cost",
        }

    def test_labels_stored_in_presented_order(self):
        engine = AuthEngine(
            AccountStore(), params=PuzzleParams(k=3, alpha=0), hash_cost=0,
            rng=deterministic_rng("order"), render_images=True,
        )
        session, presented = engine.begin_registration("alice", "pw")
        canonical = generate_inkblot_images(3, session.r1)
        for i in range(1, 4):
            assert presented[i - 1] == canonical[session.pi(i) - 1]
        record = engine.complete_registration(session.token, ["first", "second", "third"])
        assert record.permuted_labels == ("first", "second", "third")

    def test_session_single_use(self, fast_engine):
        engine = fast_engine()
        session, _ = engine.begin_registration("alice", "pw")
        engine.complete_registration(session.token, labels_for(3))
        with pytest.raises(SessionError):
            engine.complete_registration(session.token, labels_for(3))

    def test_session_expiry(self):
        now = [0.0]
        engine = AuthEngine(
            AccountStore(), params=PuzzleParams(k=3, alpha=0), hash_cost=0,
            rng=deterministic_rng("expiry"), clock=lambda: now[0],
            render_images=False,
        )
        session, _ = engine.begin_registration("alice", "pw")
        now[0] += 15 * 60 + 1
        with pytest.raises(SessionError):
            engine.complete_registration(session.token, labels_for(3))

    def test_abandoned_registration_frees_username(self):
        # an expired pending session must not block the name forever
        now = [0.0]
        engine = AuthEngine(
            AccountStore(), params=PuzzleParams(k=3, alpha=0), hash_cost=0,
            rng=deterministic_rng("abandon"), clock=lambda: now[0],
            render_images=False,
        )
        engine.begin_registration("alice", "pw")
        with pytest.raises(DuplicateUserError):
            engine.begin_registration("alice", "pw")  # still pending
        now[0] += 15 * 60 + 1
        session, _ = engine.begin_registration("alice", "pw")
        engine.complete_registration(session.token, labels_for(3))
        assert engine.store.get("alice") is not None


class TestLogin:
    def test_every_ball_member_accepts_exhaustive_small_k(self, fast_engine):
        # k <= 5: every response within the tolerance ball must accept
        for k, alpha in ((3, 2), (4, 2), (5, 3)):
            engine = fast_engine(k=k, alpha=alpha, tag=f"ball-{k}-{alpha}")
            record, pi = register(engine)
            for response in enumerate_close(pi, alpha):
                session, _ = engine.begin_login("alice", "hunter2")
                assert engine.complete_login(session.token, response).accepted

    def test_ball_members_accept_sampled_k10(self, fast_engine):
        engine = fast_engine(k=10, alpha=5, tag="ball-ten")
        record, pi = register(engine)
        ball = enumerate_close(pi, 5)
        stream = stream_from(seed_for("k10 sample"))
        for _ in range(5):
            response = ball[stream.draw_uniform(len(ball))]
            session, _ = engine.begin_login("alice", "hunter2")
            result = engine.complete_login(session.token, response)
            assert result.accepted
            assert result.hash_evaluations == count_close(10, 5) == 13_264

    def test_accept_at_alpha_deny_just_outside(self, fast_engine):
        engine = fast_engine(k=5, alpha=3)
        record, pi = register(engine)
        for d in (0, 2, 3):
            session, _ = engine.begin_login("alice", "hunter2")
            assert engine.complete_login(session.token, response_at_distance(pi, d)).accepted
        session, _ = engine.begin_login("alice", "hunter2")
        assert not engine.complete_login(session.token, response_at_distance(pi, 4)).accepted

    def test_wrong_password_denied_all_responses_k3(self, fast_engine):
        engine = fast_engine(k=3, alpha=0)
        register(engine)
        for cand in itertools.permutations((1, 2, 3)):
            session, _ = engine.begin_login("alice", "wrong password")
            assert not engine.complete_login(session.token, list(cand)).accepted

    def test_work_bound_exact(self, fast_engine):
        engine = fast_engine(k=4, alpha=2)
        record, pi = register(engine)
        session, _ = engine.begin_login("alice", "hunter2")
        result = engine.complete_login(session.token, pi)
        assert result.hash_evaluations == count_close(4, 2)

    def test_challenge_labels_are_stored_order(self, fast_engine):
        engine = fast_engine(k=3)
        record, _ = register(engine)
        _, challenge = engine.begin_login("alice", "anything")
        assert challenge.labels == record.permuted_labels

    def test_wrong_password_different_images(self):
        engine = AuthEngine(
            AccountStore(), params=PuzzleParams(k=1, alpha=0), hash_cost=0,
            rng=deterministic_rng("imgs"), render_images=True, strike_limit=100,
        )
        session, images = engine.begin_registration("alice", "right")
        registered = images[0]
        engine.complete_registration(session.token, ["t"])
        differing = 0
        for i in range(20):
            s, challenge = engine.begin_login("alice", f"wrong{i}")
            if challenge.images[0] != registered:
                differing += 1
            engine.complete_login(s.token, [1])
        assert differing == 20

    def test_correct_password_reproduces_registration_images(self):
        engine = AuthEngine(
            AccountStore(), params=PuzzleParams(k=2, alpha=0), hash_cost=0,
            rng=deterministic_rng("same"), render_images=True,
        )
        session, presented = engine.begin_registration("alice", "right")
        pi = session.pi
        engine.complete_registration(session.token, ["a", "b"])
        _, challenge = engine.begin_login("alice", "right")
        for i in range(1, 3):
            assert challenge.images[pi(i) - 1] == presented[i - 1]

    def test_replay_rejected(self, fast_engine):
        engine = fast_engine()
        record, pi = register(engine)
        session, _ = engine.begin_login("alice", "hunter2")
        engine.complete_login(session.token, pi)
        with pytest.raises(SessionError):
            engine.complete_login(session.token, pi)

    def test_response_size_checked(self, fast_engine):
        engine = fast_engine(k=3)
        register(engine)
        session, _ = engine.begin_login("alice", "hunter2")
        with pytest.raises(ValidationError):
            engine.complete_login(session.token, [1, 2, 3, 4])


class TestDecoyAndStrikes:
    def test_unknown_user_gets_plausible_challenge(self, fast_engine):
        engine = fast_engine(k=3)
        session, challenge = engine.begin_login("ghost", "whatever")
        assert challenge.k == 3
        assert len(challenge.labels) == 3
        assert all(challenge.labels)
        result = engine.complete_login(session.token, [1, 2, 3])
        assert not result.accepted
        assert result.hash_evaluations == count_close(3, 2)

    def test_decoy_is_stable_per_username(self, fast_engine):
        engine = fast_engine(k=3)
        _, c1 = engine.begin_login("ghost", "pw")
        _, c2 = engine.begin_login("ghost", "pw")
        assert c1.labels == c2.labels

    def test_decoy_differs_across_usernames(self, fast_engine):
        engine = fast_engine(k=3)
        _, c1 = engine.begin_login("ghost", "pw")
        _, c2 = engine.begin_login("spirit", "pw")
        assert c1.labels != c2.labels

    def test_strikes_lock_out(self):
        now = [1000.0]
        engine = AuthEngine(
            AccountStore(), params=PuzzleParams(k=3, alpha=0), hash_cost=0,
            rng=deterministic_rng("strikes"), clock=lambda: now[0],
            strike_limit=3, lockout_seconds=3600, render_images=False,
        )
        record, pi = register(engine)
        for _ in range(3):
            session, _ = engine.begin_login("alice", "wrong")
            engine.complete_login(session.token, pi)
        with pytest.raises(LockoutError):
            engine.begin_login("alice", "hunter2")
        now[0] += 3601
        session, _ = engine.begin_login("alice", "hunter2")
        assert engine.complete_login(session.token, pi).accepted

    def test_accept_resets_strikes(self, fast_engine):
        engine = fast_engine(k=3, alpha=0)
        record, pi = register(engine)
        for _ in range(5):
            session, _ = engine.begin_login("alice", "wrong")
            engine.complete_login(session.token, pi)
            session, _ = engine.begin_login("alice", "hunter2")
            assert engine.complete_login(session.token, pi).accepted

    def test_audit_log_has_no_secrets(self, fast_engine):
        engine = fast_engine(k=3, alpha=0)
        record, pi = register(engine, password="super-secret-pw")
        session, _ = engine.begin_login("alice", "super-secret-pw")
        engine.complete_login(session.token, pi)
        dumped = repr(engine.audit_log)
        assert "super-secret-pw" not in dumped
        assert [e.outcome for e in engine.audit_log] == ["register", "accept"]

    def test_audit_file_sink(self, tmp_path):
        path = tmp_path / "audit.jsonl"
        engine = AuthEngine(
            AccountStore(), params=PuzzleParams(k=3, alpha=0), hash_cost=0,
            rng=deterministic_rng("audit"), render_images=False,
            audit_path=str(path),
        )
        record, pi = register(engine, password="hush")
        session, _ = engine.begin_login("alice", "hush")
        engine.complete_login(session.token, pi)
        lines = [json.loads(line) for line in path.read_text().splitlines()]
        assert [entry["outcome"] for entry in lines] == ["register", "accept"]
        assert "hush" not in path.read_text()
        assert lines[1]["hash_evaluations"] == count_close(3, 0)


class TestTolerantVerify:
    def test_no_early_exit(self, fast_engine):
        engine = fast_engine(k=4, alpha=3)
        record, pi = register(engine)
        accepted, evals = tolerant_verify(record, "hunter2", pi)
        assert accepted and evals == count_close(4, 3)
        denied, evals2 = tolerant_verify(record, "nope", pi)
        assert not denied and evals2 == count_close(4, 3)


class TestAccountStore:
    def test_file_round_trip(self, tmp_path, fast_engine):
        path = tmp_path / "accounts.jsonl"
        store = AccountStore(str(path))
        engine = AuthEngine(store, params=PuzzleParams(k=3, alpha=2), hash_cost=0,
                            rng=deterministic_rng("store"), render_images=False)
        record, pi = register(engine)

        reloaded = AccountStore(str(path))
        again = reloaded.get("alice")
        assert again == record
        # a fresh engine over the reloaded store still authenticates
        engine2 = AuthEngine(reloaded, params=PuzzleParams(k=3, alpha=2), hash_cost=0,
                             rng=deterministic_rng("store2"), render_images=False)
        session, _ = engine2.begin_login("alice", "hunter2")
        assert engine2.complete_login(session.token, pi).accepted

    def test_header_written_and_required(self, tmp_path):
        path = tmp_path / "accounts.jsonl"
        AccountStore(str(path))
        assert path.read_text().splitlines()[0] == STORE_HEADER
        path.write_text("not a header\n")
        with pytest.raises(StoreError):
            AccountStore(str(path))

    def test_corrupt_record_refused(self, tmp_path):
        path = tmp_path / "accounts.jsonl"
        path.write_text(STORE_HEADER + "\n{\"u\": \"alice\"}\n")
        with pytest.raises(StoreError):
            AccountStore(str(path))

    def test_duplicate_refused(self, tmp_path, fast_engine):
        engine = fast_engine()
        record, _ = register(engine)
        with pytest.raises(DuplicateUserError):
            engine.store.add(record)
