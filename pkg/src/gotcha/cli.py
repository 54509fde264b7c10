"""Operator command line; every subcommand is a thin adapter over one module.

Exit codes are enumerated in docs/CLI.md: 0 success, 1 negative outcome
(deny / not found / mismatch), 2 usage, 3 validation, 4 budget refusal,
5 store corruption, 6 duplicate user, 7 lockout, 8 dead session.
"""

from __future__ import annotations

import argparse
import getpass
import hashlib
import json
import math
import os
import sys
import tempfile

from . import attacklab, challengekit
from .authcore import AccountStore, AuthEngine
from .authservice import ServiceConfig, serve
from .errors import (
    BudgetExceededError,
    DuplicateUserError,
    GotchaError,
    LockoutError,
    SessionError,
    StoreError,
    ValidationError,
)
from .inkblot import export_png, generate_inkblot_images
from .matching import Permutation, count_close, count_close_upper_bound
from .puzzle import PuzzleParams
from .seedcore import Seed, stream_from

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_BUDGET = 4
EXIT_STORE = 5
EXIT_DUPLICATE = 6
EXIT_LOCKOUT = 7
EXIT_SESSION = 8


def _sci(x: float) -> str:
    """3 significant figures with a bare exponent: 3.66e-3, not 3.66e-03."""
    mantissa, exponent = f"{x:.2e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def _test_rng(seed_hex: str):
    """Deterministic replacement for secrets.token_bytes (test mode only)."""
    stream = stream_from(Seed(hashlib.sha256(bytes.fromhex(seed_hex)).digest()), b"GOTCHA-v1 cli rng")
    return stream.next_bytes


def _require_test_mode(args) -> None:
    if getattr(args, "seed", None) and not getattr(args, "test_mode", False):
        raise ValidationError("--seed overrides protocol randomness; it requires --test-mode")


def _engine_for(args, render_images: bool = True) -> AuthEngine:
    _require_test_mode(args)
    store = AccountStore(args.store)
    kwargs = {}
    if getattr(args, "seed", None):
        kwargs["rng"] = _test_rng(args.seed)
    params = PuzzleParams(k=args.k, alpha=args.alpha)
    return AuthEngine(store, params=params, hash_cost=args.hash_cost,
                      render_images=render_images, **kwargs)


# -- subcommands ----------------------------------------------------------------


def cmd_count_perms(args) -> int:
    exact = count_close(args.k, args.alpha)
    bound = count_close_upper_bound(args.k, args.alpha)
    fraction = exact / math.factorial(args.k)
    if args.json:
        print(json.dumps({"k": args.k, "alpha": args.alpha, "count": exact,
                          "bound": bound, "fraction": fraction}))
    else:
        print(f"{exact} (bound {bound}, fraction {_sci(fraction)})")
    return EXIT_OK


def cmd_inkblot_gen(args) -> int:
    seed = Seed.from_hex(args.seed)
    images = generate_inkblot_images(args.k, seed)
    os.makedirs(args.out, exist_ok=True)
    paths = []
    for img in images:
        path = os.path.join(args.out, f"inkblot_{img.index:02d}.png")
        with open(path, "wb") as fh:
            fh.write(export_png(img))
        paths.append(path)
    if args.json:
        print(json.dumps({"k": args.k, "seed": args.seed, "files": paths}))
    else:
        for p in paths:
            print(p)
    return EXIT_OK


def _show_images(images, directory: str) -> list[str]:
    """Terminals cannot draw rasters portably; write PNGs and print paths."""
    paths = []
    for i, img in enumerate(images, start=1):
        path = os.path.join(directory, f"challenge_{i:02d}.png")
        with open(path, "wb") as fh:
            fh.write(export_png(img))
        paths.append(path)
    return paths


def cmd_register(args) -> int:
    engine = _engine_for(args)
    username = args.username or input("username: ")
    password = args.password or getpass.getpass("password: ")
    session, images = engine.begin_registration(username, password)
    workdir = tempfile.mkdtemp(prefix="gotcha-register-")
    paths = _show_images(images, workdir)
    print("Look at each image and invent a creative title for it")
    print("(you will only ever need to RECOGNIZE these titles, not recall them):")
    for p in paths:
        print(f"  {p}")
    labels = []
    for i in range(1, engine.params.k + 1):
        labels.append(input(f"label for image {i}: "))
    engine.complete_registration(session.token, labels)
    print(f"account {username!r} created")
    return EXIT_OK


def cmd_login(args) -> int:
    engine = _engine_for(args)
    username = args.username or input("username: ")
    password = args.password or getpass.getpass("password: ")
    session, challenge = engine.begin_login(username, password)
    workdir = tempfile.mkdtemp(prefix="gotcha-login-")
    paths = _show_images(challenge.images, workdir)
    print("Match each of your titles to the image it describes.")
    print("Images (numbered 1..k):")
    for i, p in enumerate(paths, start=1):
        print(f"  image {i}: {p}")
    response = []
    for i, label in enumerate(challenge.labels, start=1):
        response.append(int(input(f"which image matches {label!r}? ")))
    result = engine.complete_login(session.token, response)
    print("accepted" if result.accepted else "denied")
    return EXIT_OK if result.accepted else EXIT_NEGATIVE


def _parse_space(text: str) -> tuple[int, int]:
    if ":" in text:
        low, high = text.split(":", 1)
        return int(low), int(high)
    return 0, int(text)


def cmd_challenge_gen(args) -> int:
    _require_test_mode(args)
    if args.seed:
        stream = stream_from(Seed(hashlib.sha256(bytes.fromhex(args.seed)).digest()),
                             b"GOTCHA-v1 cli challenge")
    else:
        import secrets

        stream = stream_from(Seed(secrets.token_bytes(32)), b"GOTCHA-v1 cli challenge")
    if args.labels:
        labels = [part.strip() for part in args.labels.split(",")]
    elif args.labels_file:
        with open(args.labels_file, encoding="utf-8") as fh:
            labels = [line.strip() for line in fh if line.strip()]
    else:
        labels = [f"blot {j}" for j in range(1, args.k + 1)]
        print("note: using fixture labels; supply --labels for a real challenge",
              file=sys.stderr)
    space = _parse_space(args.space)
    tup, (password, pi) = challengekit.generate_challenge(
        space, args.k, labels, args.cost, stream
    )
    text = tup.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(args.out)
    else:
        print(text)
    if args.secret_out:
        with open(args.secret_out, "w", encoding="utf-8") as fh:
            json.dump({"password": password, "pi": pi.to_list()}, fh)
            fh.write("\n")
    return EXIT_OK


def _load_challenge(path: str) -> challengekit.ChallengeTuple:
    with open(path, encoding="utf-8") as fh:
        return challengekit.ChallengeTuple.from_json(fh.read())


def cmd_challenge_verify(args) -> int:
    tup = _load_challenge(args.challenge)
    pi = Permutation.from_list([int(x) for x in args.pi.split(",")])
    ok = challengekit.verify_solution(tup, args.password, pi)
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_challenge_solve(args) -> int:
    tup = _load_challenge(args.challenge)
    result = challengekit.brute_force_solve(tup, budget=args.budget, workers=args.workers)
    if args.json:
        print(json.dumps({
            "found": result.found,
            "password": result.password,
            "pi": result.pi.to_list() if result.pi else None,
            "hash_calls": result.hash_calls,
        }))
    elif result.found:
        print(f"password={result.password} pi={','.join(map(str, result.pi.to_list()))} "
              f"hash_calls={result.hash_calls}")
    else:
        print(f"not found after {result.hash_calls} hash calls")
    return EXIT_OK if result.found else EXIT_NEGATIVE


def cmd_attack_sim(args) -> int:
    if args.dict_file:
        with open(args.dict_file, encoding="utf-8") as fh:
            dictionary = [line.strip() for line in fh if line.strip()]
    else:
        dictionary = [f"pw{i:04d}" for i in range(args.dict_size)]
    if args.strategy == "human-on-subset":
        strategy = attacklab.human_on_subset(args.subset)
    else:
        strategy = attacklab.STRATEGIES[args.strategy]
    cost_model = attacklab.CostModel(c_h=args.c_h, c_H=args.c_H, budget=args.budget)
    human = attacklab.SimulatedHuman(beta=args.beta, alpha=args.human_alpha)
    params = PuzzleParams(k=args.k, alpha=args.alpha)
    report = attacklab.run_attack(
        dictionary, strategy, cost_model, human, args.trials,
        params=params, hash_cost=args.hash_cost, seed=args.sim_seed,
    )
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK


def cmd_hosp_econ(args) -> int:
    econ = attacklab.hosp_economics(args.drive_bytes, args.captcha_bytes,
                                    args.cost_per_captcha)
    if args.json:
        print(json.dumps(econ.to_dict()))
    else:
        print(f"database size     {econ.database_size}")
        print(f"full-solve cost   ${econ.full_solve_cost:,.2f}")
        print(f"half-solve cost   ${econ.half_solve_cost:,.2f}")
        print(f"note: {econ.note}")
    return EXIT_OK


def cmd_serve(args) -> int:
    config = ServiceConfig(
        host=args.host,
        port=args.port,
        store_path=args.store,
        params=PuzzleParams(k=args.k, alpha=args.alpha),
        hash_cost=args.hash_cost,
        ui_origin=args.ui_origin,
        audit_path=args.audit_log,
    )
    service = serve(config)
    print(f"listening on {service.url} (store: {args.store or 'in-memory'})")
    try:
        service.serve_forever()
    except KeyboardInterrupt:
        service.stop()
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def _add_protocol_args(sub, with_store=True):
    if with_store:
        sub.add_argument("--store", default=None, help="account store path (default: in-memory)")
    sub.add_argument("--k", type=int, default=10)
    sub.add_argument("--alpha", type=int, default=5)
    sub.add_argument("--hash-cost", type=int, default=12,
                     help="slow-hash cost level (PBKDF2 rounds = 2^cost)")
    sub.add_argument("--test-mode", action="store_true",
                     help="allow deterministic randomness overrides")
    sub.add_argument("--seed", default=None,
                     help="hex RNG override; refused without --test-mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gotcha", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("count-perms", help="close-permutation count, bound and fraction")
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--alpha", type=int, required=True)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_count_perms)

    sub = subs.add_parser("inkblot-gen", help="render k inkblots from a hex seed")
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--seed", required=True, help="64 hex chars")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_inkblot_gen)

    sub = subs.add_parser("register", help="interactive account creation")
    _add_protocol_args(sub)
    sub.add_argument("--username", default=None)
    sub.add_argument("--password", default=None, help="insecure; prompts when omitted")
    sub.set_defaults(func=cmd_register)

    sub = subs.add_parser("login", help="interactive authentication")
    _add_protocol_args(sub)
    sub.add_argument("--username", default=None)
    sub.add_argument("--password", default=None, help="insecure; prompts when omitted")
    sub.set_defaults(func=cmd_login)

    sub = subs.add_parser("challenge-gen", help="publishable tuple with a planted secret")
    sub.add_argument("--space", required=True, help="N for [0,N) or LOW:HIGH")
    sub.add_argument("--k", type=int, default=10)
    sub.add_argument("--cost", type=int, default=12, help="hash cost level (0 = minimal)")
    sub.add_argument("--labels", default=None, help="comma-separated k labels")
    sub.add_argument("--labels-file", default=None)
    sub.add_argument("--out", default=None)
    sub.add_argument("--secret-out", default=None, help="write the planted (pw, pi) here")
    sub.add_argument("--test-mode", action="store_true")
    sub.add_argument("--seed", default=None, help="hex; requires --test-mode")
    sub.set_defaults(func=cmd_challenge_gen)

    sub = subs.add_parser("challenge-verify", help="check a claimed (password, permutation)")
    sub.add_argument("--challenge", required=True)
    sub.add_argument("--password", required=True)
    sub.add_argument("--pi", required=True, help="comma-separated 1-based entries")
    sub.set_defaults(func=cmd_challenge_verify)

    sub = subs.add_parser("challenge-solve", help="budgeted brute-force sweep")
    sub.add_argument("--challenge", required=True)
    sub.add_argument("--budget", type=int, default=challengekit.DEFAULT_SOLVE_BUDGET)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_challenge_solve)

    sub = subs.add_parser("attack-sim", help="Monte Carlo offline-attack cost run")
    sub.add_argument("--strategy", choices=["brute-force", "human-per-guess", "human-on-subset"],
                     default="brute-force")
    sub.add_argument("--subset", type=int, default=8, help="subset size for human-on-subset")
    sub.add_argument("--dict-file", default=None, help="one password per line")
    sub.add_argument("--dict-size", type=int, default=16, help="synthetic dictionary size")
    sub.add_argument("--trials", type=int, default=100)
    sub.add_argument("--k", type=int, default=3)
    sub.add_argument("--alpha", type=int, default=0)
    sub.add_argument("--hash-cost", type=int, default=0)
    sub.add_argument("--c-h", type=float, default=1.0)
    sub.add_argument("--c-H", dest="c_H", type=float, default=1000.0)
    sub.add_argument("--budget", type=float, default=None)
    sub.add_argument("--beta", type=float, default=0.69)
    sub.add_argument("--human-alpha", type=int, default=5)
    sub.add_argument("--sim-seed", type=int, default=0)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_attack_sim)

    sub = subs.add_parser("hosp-econ", help="pre-generated CAPTCHA store economics")
    sub.add_argument("--drive-bytes", type=float, required=True)
    sub.add_argument("--captcha-bytes", type=float, required=True)
    sub.add_argument("--cost-per-captcha", type=float, required=True)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_hosp_econ)

    sub = subs.add_parser("serve", help="run the HTTP authentication service")
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--port", type=int, default=8431)
    sub.add_argument("--store", default=None)
    sub.add_argument("--k", type=int, default=10)
    sub.add_argument("--alpha", type=int, default=5)
    sub.add_argument("--hash-cost", type=int, default=12)
    sub.add_argument("--ui-origin", default="*")
    sub.add_argument("--audit-log", default=None,
                     help="append authentication attempts (no secrets) to this JSONL file")
    sub.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EOFError, KeyboardInterrupt):
        print("aborted", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DuplicateUserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DUPLICATE
    except LockoutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOCKOUT
    except SessionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SESSION
    except StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STORE
    except GotchaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
