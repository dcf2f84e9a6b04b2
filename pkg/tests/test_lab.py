import json
import math

import pytest

from oddaut import lab
from oddaut.autmap import nagata_map, parse_map, verify_inverse_pair
from oddaut.gf import make_field
from oddaut.lab import (ConfigError, DegreeGuardError, ExperimentConfig, ReportRecord,
                        ReportWriter, cmd_parity, cmd_search, cmd_slice_check,
                        cmd_theorem_check, cmd_verify_inverse, register_family,
                        tame_alphabet)
from oddaut.permgrp import permutation_from_map

from oracles import naive_inversion_parity

RECORD_KEYS = ["experiment", "field", "n", "map", "word", "parity", "fixed_points",
               "cycle_histogram", "group_order", "seed", "elapsed_ms", "version"]


def test_parity_nagata(F4):
    N = nagata_map(F4)
    rec = cmd_parity(N, N.inverse)
    assert rec.parity == "even" and rec.fixed_points == 28
    assert rec.cycle_histogram == {"1": 28, "2": 18}
    assert rec.inverse_verified and not rec.witness


def test_parity_transposition(F2):
    rec = cmd_parity(parse_map("X1+X2; X2", F2))
    assert rec.parity == "odd"
    assert rec.inverse_verified is None


def test_parity_frobenius_note(F4):
    rec = cmd_parity(parse_map("X1^2; X2^2", F4))
    assert rec.parity == "even"
    assert "not verified" in rec.note
    bad = cmd_parity(parse_map("X1^2; X2^2", F4), parse_map("X1^2; X2^2", F4))
    assert bad.inverse_verified is False and "failed" in bad.note


def test_parity_rejects_non_bijection(F2):
    with pytest.raises(ValueError):
        cmd_parity(parse_map("X1*X2; X1", F2))


def test_verify_inverse_reports(fields):
    F3 = fields["F3"]
    rec = cmd_verify_inverse(parse_map("X1 + X2^2; X2", F3), parse_map("X1 - X2^2; X2", F3))
    assert rec.inverse_verified and rec.details["F_after_G"] == "X1; X2"
    N = nagata_map(fields["F5"])
    assert cmd_verify_inverse(N, N.inverse).inverse_verified
    Fr = parse_map("X1^2; X2^2", fields["F4"])
    rec = cmd_verify_inverse(Fr, Fr)
    assert rec.inverse_verified is False
    assert rec.details["F_after_G"] == "X1^4; X2^4"
    assert "as functions" in rec.note


@pytest.mark.parametrize("p, m, n, order", [
    (2, 1, 2, math.factorial(4)),
    (3, 1, 2, math.factorial(9)),
    (2, 2, 2, math.factorial(16) // 2),
    (2, 1, 3, math.factorial(8)),
    (3, 1, 3, math.factorial(27)),
])
def test_theorem_check_small(p, m, n, order):
    rec = cmd_theorem_check(make_field(p, m), n)
    assert int(rec.group_order) == order
    q = p**m
    expected = "Alt" if p == 2 and m >= 2 else "Sym"
    assert rec.details["matches"] == expected
    assert rec.details["all_generators_even"] == (expected == "Alt")


def test_theorem_check_guard():
    with pytest.raises(DegreeGuardError):
        cmd_theorem_check(make_field(2, 3), 5)
    # 16^3 = 4096 is exactly on the guard
    assert lab._check_points(make_field(2, 4), 3) == 4096


@pytest.mark.parametrize("p, m, n", [(2, 1, 2), (2, 2, 2), (3, 1, 3), (2, 2, 3)])
def test_alphabet_is_sound(p, m, n):
    F = make_field(p, m)
    for name, M in tame_alphabet(F, n):
        assert verify_inverse_pair(M, M.inverse), name


def test_slice_check_examples(fields):
    F4, F2 = fields["F4"], fields["F2"]
    rec = cmd_slice_check(parse_map("X1 + X2*X3; X2 + X3^2; X3", F4), 3)
    assert len(rec.details["slice_parities"]) == 4
    assert rec.details["product"] == rec.parity and rec.details["law_holds"]
    rec = cmd_slice_check(parse_map("X1; X2; X3", F4))
    assert rec.details["slice_parities"] == ["even"] * 4 and rec.parity == "even"
    assert rec.details["all_slices_even"]
    rec = cmd_slice_check(parse_map("X1 + X2; X2; X3", F2), 3)
    assert rec.details["slice_parities"] == ["odd", "odd"]
    assert rec.parity == "even" and "all_slices_even" not in rec.details
    with pytest.raises(ValueError):
        cmd_slice_check(parse_map("X1 + X3; X2; X3 + X1", F2), 3)


def test_search_tame_words_even_and_deterministic():
    cfg = ExperimentConfig(field="GF(2^2)", n=2, samples=50, seed=42)
    first = list(cmd_search(cfg))
    second = list(cmd_search(cfg))
    assert len(first) == 50
    assert all(r.parity == "even" and not r.witness for r in first)
    assert [r.stable_json() for r in first] == [r.stable_json() for r in second]


def test_search_parity_matches_naive_oracle(F4):
    cfg = ExperimentConfig(field="GF(2)", n=2, samples=40, seed=3)
    F2 = make_field(2)
    seen = set()
    for rec in cmd_search(cfg):
        p = permutation_from_map(parse_map(rec.map, F2, 2))
        assert rec.parity == naive_inversion_parity(p.images)
        seen.add(rec.parity)
    assert seen == {"even", "odd"}


def test_search_odd_outside_open_problem_is_not_witness():
    cfg = ExperimentConfig(field="GF(2)", n=2, samples=40, seed=3)
    recs = list(cmd_search(cfg))
    odd = [r for r in recs if r.parity == "odd"]
    assert odd and all(r.inverse_verified and not r.witness for r in odd)


def test_search_nagata_family():
    cfg = ExperimentConfig(field="GF(2^2)", n=3, samples=10, seed=1,
                           family="nagata-conjugate")
    recs = list(cmd_search(cfg))
    assert len(recs) == 10 and all(r.parity == "even" for r in recs)
    with pytest.raises(ConfigError):
        list(cmd_search(ExperimentConfig(n=2, family="nagata-conjugate")))


def test_search_candidate_file(tmp_path):
    empty = tmp_path / "empty.tsv"
    empty.write_text("")
    cfg = ExperimentConfig(field="GF(2^2)", n=2, family="candidates", candidates=str(empty))
    assert list(cmd_search(cfg)) == []
    good = tmp_path / "c.tsv"
    good.write_text("# comment\nX1 + X2^2; X2\tX1 + X2^2; X2\nX1^2; X2^2\n")
    recs = list(cmd_search(ExperimentConfig(field="GF(2^2)", n=2, family="candidates",
                                            candidates=str(good))))
    assert [r.details["line"] for r in recs] == [2, 3]
    bad = tmp_path / "bad.tsv"
    bad.write_text("X1 + X7; X2\t\n")
    with pytest.raises(ConfigError, match="bad.tsv:1"):
        list(cmd_search(ExperimentConfig(family="candidates", candidates=str(bad))))


def test_search_halts_on_witness(monkeypatch):
    # pretend F_2 were an open-problem field so that odd tame maps count
    monkeypatch.setattr(lab, "_is_open_problem_field", lambda field: True)
    recs = list(cmd_search(ExperimentConfig(field="GF(2)", n=2, samples=40, seed=3)))
    assert recs[-1].witness and recs[-1].parity == "odd"
    assert all(not r.witness for r in recs[:-1])
    assert "WITNESS" in recs[-1].note


def test_register_family():
    @register_family("test-identity")
    def fam(cfg, field):
        from oddaut.autmap import identity_map
        for _ in range(cfg.samples):
            M = identity_map(field, cfg.n)
            yield lab.Candidate(M, lambda: M)

    try:
        recs = list(cmd_search(ExperimentConfig(samples=3, family="test-identity")))
        assert len(recs) == 3 and recs[0].fixed_points == 16
    finally:
        lab.SEARCH_FAMILIES.pop("test-identity")


@pytest.mark.parametrize("data", [
    {"experiment": "bogus"},
    {"samples": 0},
    {"seed": -1},
    {"n": "3"},
    {"unknown_key": 1},
    {"field": {"m": 2}},
])
def test_config_schema(data):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(data)


def test_config_field_object(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"field": {"p": 2, "m": 3, "modulus": [1, 0, 1, 1]},
                                "n": 2, "experiment": "theorem-check"}))
    cfg = ExperimentConfig.from_json(path)
    assert cfg.make_field().modulus == (1, 0, 1, 1)


def test_report_writer_key_order(tmp_path, F4):
    out = tmp_path / "r" / "out.jsonl"
    with ReportWriter(out) as w:
        w.write(cmd_parity(nagata_map(F4)))
        w.write(ReportRecord("x", "GF(2)", 2))
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert list(json.loads(lines[0]))[:len(RECORD_KEYS)] == RECORD_KEYS
