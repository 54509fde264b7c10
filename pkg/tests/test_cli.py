import json
import subprocess
import sys

import pytest

from gotcha.cli import EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK, EXIT_VALIDATION, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


SEED_HEX = "11" * 32


class TestCountPerms:
    def test_paper_point_exact_output(self, capsys):
        code, out, _ = run_cli(capsys, "count-perms", "--k", "10", "--alpha", "5")
        assert code == EXIT_OK
        assert out.strip() == "13264 (bound 36091, fraction 3.66e-3)"

    def test_json_output(self, capsys):
        code, out, _ = run_cli(capsys, "count-perms", "--k", "10", "--alpha", "5", "--json")
        body = json.loads(out)
        assert code == EXIT_OK
        assert (body["count"], body["bound"]) == (13264, 36091)

    def test_alpha_out_of_range(self, capsys):
        code, _, err = run_cli(capsys, "count-perms", "--k", "3", "--alpha", "4")
        assert code == EXIT_VALIDATION
        assert "alpha" in err


class TestInkblotGen:
    def test_repeated_runs_identical_bytes(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_cli(capsys, "inkblot-gen", "--k", "2", "--seed", SEED_HEX, "--out", str(out1))
        run_cli(capsys, "inkblot-gen", "--k", "2", "--seed", SEED_HEX, "--out", str(out2))
        for name in ("inkblot_01.png", "inkblot_02.png"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_lists_written_files(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "inkblot-gen", "--k", "2", "--seed", SEED_HEX,
                               "--out", str(tmp_path / "blots"))
        assert code == EXIT_OK
        assert out.count("inkblot_") == 2


class TestChallengeCommands:
    def test_gen_solve_round_trip(self, tmp_path, capsys):
        challenge = tmp_path / "challenge.json"
        secret = tmp_path / "secret.json"
        code, _, _ = run_cli(
            capsys, "challenge-gen", "--space", "100", "--k", "3", "--cost", "0",
            "--labels", "frog,clown,mask", "--out", str(challenge),
            "--secret-out", str(secret), "--test-mode", "--seed", SEED_HEX,
        )
        assert code == EXIT_OK
        code, out, _ = run_cli(capsys, "challenge-solve", "--challenge", str(challenge),
                               "--json")
        assert code == EXIT_OK
        solved = json.loads(out)
        planted = json.loads(secret.read_text())
        assert solved["found"]
        assert solved["password"] == planted["password"]
        assert solved["pi"] == planted["pi"]

    def test_verify_subcommand(self, tmp_path, capsys):
        challenge = tmp_path / "challenge.json"
        secret = tmp_path / "secret.json"
        run_cli(capsys, "challenge-gen", "--space", "50", "--k", "3", "--cost", "0",
                "--out", str(challenge), "--secret-out", str(secret),
                "--test-mode", "--seed", SEED_HEX)
        planted = json.loads(secret.read_text())
        code, out, _ = run_cli(
            capsys, "challenge-verify", "--challenge", str(challenge),
            "--password", planted["password"],
            "--pi", ",".join(map(str, planted["pi"])),
        )
        assert code == EXIT_OK and "valid" in out
        code, out, _ = run_cli(
            capsys, "challenge-verify", "--challenge", str(challenge),
            "--password", "999999", "--pi", ",".join(map(str, planted["pi"])),
        )
        assert code == EXIT_NEGATIVE

    def test_budget_refusal_exit_code(self, tmp_path, capsys):
        challenge = tmp_path / "challenge.json"
        run_cli(capsys, "challenge-gen", "--space", "10000000", "--k", "10",
                "--cost", "15", "--out", str(challenge),
                "--test-mode", "--seed", SEED_HEX)
        code, _, err = run_cli(capsys, "challenge-solve", "--challenge", str(challenge))
        assert code == EXIT_BUDGET
        assert "refus" in err

    def test_seed_requires_test_mode(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "challenge-gen", "--space", "10", "--k", "3",
                               "--cost", "0", "--seed", SEED_HEX)
        assert code == EXIT_VALIDATION
        assert "--test-mode" in err


class TestAttackSim:
    def test_json_report(self, capsys):
        code, out, _ = run_cli(
            capsys, "attack-sim", "--strategy", "brute-force", "--dict-size", "8",
            "--trials", "20", "--k", "3", "--alpha", "0", "--json",
        )
        body = json.loads(out)
        assert code == EXIT_OK
        assert body["success_rate"] == 1.0
        assert body["n_H"] == 0

    def test_text_report(self, capsys):
        code, out, _ = run_cli(
            capsys, "attack-sim", "--strategy", "human-per-guess", "--dict-size", "8",
            "--trials", "10", "--k", "3", "--beta", "1.0", "--human-alpha", "0",
        )
        assert code == EXIT_OK
        assert "success rate" in out


class TestHospEcon:
    def test_paper_numbers(self, capsys):
        code, out, _ = run_cli(
            capsys, "hosp-econ", "--drive-bytes", "8e12", "--captcha-bytes", "8e3",
            "--cost-per-captcha", "0.001", "--json",
        )
        body = json.loads(out)
        assert code == EXIT_OK
        assert body["database_size"] == 10**9
        assert body["full_solve_cost"] == 1_000_000.0
        assert body["half_solve_cost"] == 500_000.0

    def test_note_surfaces_drive_convention(self, capsys):
        _, out, _ = run_cli(capsys, "hosp-econ", "--drive-bytes", "4e12",
                            "--captcha-bytes", "8e3", "--cost-per-captcha", "0.001")
        assert "4 TB" in out


class TestInteractiveFlows:
    def test_register_then_login_round_trip(self, tmp_path):
        store = str(tmp_path / "accounts.jsonl")
        base = ["--store", store, "--k", "3", "--alpha", "3", "--hash-cost", "0",
                "--username", "smoke"]

        def run(command, password, stdin):
            return subprocess.run(
                [sys.executable, "-m", "gotcha.cli", command, *base,
                 "--password", password],
                input=stdin, capture_output=True, text=True,
            )

        created = run("register", "pw1", "evil clown\nbig frog\nlady\n")
        assert created.returncode == EXIT_OK, created.stderr
        assert "created" in created.stdout

        # alpha = k means any bijective answer works with the right password
        accepted = run("login", "pw1", "1\n2\n3\n")
        assert accepted.returncode == EXIT_OK
        assert "accepted" in accepted.stdout

        denied = run("login", "wrong", "1\n2\n3\n")
        assert denied.returncode == EXIT_NEGATIVE
        assert "denied" in denied.stdout

    def test_duplicate_registration_exit_code(self, tmp_path):
        store = str(tmp_path / "accounts.jsonl")
        args = [sys.executable, "-m", "gotcha.cli", "register", "--store", store,
                "--k", "3", "--alpha", "3", "--hash-cost", "0",
                "--username", "dup", "--password", "pw"]
        first = subprocess.run(args, input="a\nb\nc\n", capture_output=True, text=True)
        assert first.returncode == EXIT_OK
        second = subprocess.run(args, input="a\nb\nc\n", capture_output=True, text=True)
        assert second.returncode == 6  # EXIT_DUPLICATE


class TestUsage:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["definitely-not-a-command"])
        assert err.value.code == 2

    def test_module_entry_point(self):
        result = subprocess.run(
            [sys.executable, "-m", "gotcha.cli", "count-perms", "--k", "10", "--alpha", "5"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert result.stdout.strip() == "13264 (bound 36091, fraction 3.66e-3)"
