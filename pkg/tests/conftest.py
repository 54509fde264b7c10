import hashlib

import pytest
from hypothesis import HealthCheck, settings

from gotcha.authcore import AccountStore, AuthEngine
from gotcha.puzzle import PuzzleParams
from gotcha.seedcore import Seed, stream_from

settings.register_profile(
    "gotcha",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("gotcha")


def seed_for(tag: str) -> Seed:
    """Distinct, reproducible seed per tag."""
    return Seed(hashlib.sha256(b"gotcha test seed: " + tag.encode()).digest())


def deterministic_rng(tag: str):
    """Drop-in for secrets.token_bytes, fully reproducible."""
    stream = stream_from(seed_for(tag), b"test rng")
    return stream.next_bytes


@pytest.fixture
def fast_engine():
    """Minimal-cost engine with deterministic randomness and no rendering."""

    def build(k=3, alpha=2, tag="engine", render=False, **kwargs):
        return AuthEngine(
            AccountStore(),
            params=PuzzleParams(k=k, alpha=alpha),
            hash_cost=0,
            rng=deterministic_rng(tag),
            render_images=render,
            **kwargs,
        )

    return build
