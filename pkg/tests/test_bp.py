import math

import numpy as np
import pytest

from ldpc_qaoa.bp import (
    BpConfig,
    bp_decode,
    check_to_variable,
    hard_decision,
    variable_to_check,
    write_message_dump,
)
from ldpc_qaoa.channel import make_rng, transmit_codeword
from ldpc_qaoa.energy import ml_codeword
from ldpc_qaoa.errors import InputError
from ldpc_qaoa.gf2 import LinearCode, ParityCheckMatrix, build_tanner_graph, is_codeword

from conftest import FIG1_CODEWORD


def test_variable_to_check():
    assert variable_to_check(2.0, []) == 2.0
    assert variable_to_check(1.0, [0.5, -0.25]) == 1.25
    assert variable_to_check(40.0, [40.0], clip=30.0) == 30.0


def test_check_to_variable():
    assert check_to_variable([0.0, 3.0, -1.0]) == 0.0
    assert check_to_variable([], clip=30.0) == 30.0
    # 2 atanh(tanh(1)^2), evaluated with mpmath at 30 digits
    assert check_to_variable([2.0, 2.0]) == pytest.approx(1.3250027473578644, abs=1e-12)


def test_check_to_variable_saturation_is_finite():
    v = check_to_variable([60.0, 60.0], clip=100.0)
    assert math.isfinite(v) and v > 0


def test_hard_decision_tie_is_zero():
    assert hard_decision([1.0, -1.0, 0.0]).tolist() == [0, 1, 0]


def test_strong_correct_evidence(table1):
    res = bp_decode(build_tanner_graph(table1.h), np.full(6, 10.0))
    assert res.decoded.tolist() == [0] * 6
    assert res.converged and res.iterations_used == 1


def test_single_check_flips_weak_bit():
    g = build_tanner_graph(ParityCheckMatrix(np.array([[1, 1]])))
    res = bp_decode(g, [1.0, -3.0])
    assert res.decoded.tolist() == [1, 1]
    assert res.final_llrs.tolist() == pytest.approx([-2.0, -2.0])


def test_near_noiseless_fig1(fig1):
    g = build_tanner_graph(fig1.h)
    for seed in range(10):
        _, llr = transmit_codeword(FIG1_CODEWORD, 0.1, make_rng(seed))
        res = bp_decode(g, llr)
        assert res.decoded.tolist() == FIG1_CODEWORD
        assert np.array_equal(ml_codeword(fig1, llr), res.decoded)


def test_length_mismatch(table1):
    with pytest.raises(InputError):
        bp_decode(build_tanner_graph(table1.h), [1.0, 2.0])


def test_config_validation():
    with pytest.raises(InputError):
        BpConfig(max_iterations=0)
    with pytest.raises(InputError):
        BpConfig(message_clip=0)


def test_converged_flag_sound_and_deterministic(table1, rng):
    g = build_tanner_graph(table1.h)
    for _ in range(200):
        llr = rng.normal(0, 2, 6)
        a = bp_decode(g, llr)
        b = bp_decode(g, llr)
        assert np.array_equal(a.decoded, b.decoded) and np.array_equal(a.final_llrs, b.final_llrs)
        assert a.iterations_used <= 50
        if a.converged:
            assert is_codeword(table1.h, a.decoded)
        assert np.array_equal(a.decoded, (a.final_llrs < 0).astype(np.uint8))


def test_no_early_stop_runs_all_iterations(table1):
    res = bp_decode(build_tanner_graph(table1.h), np.full(6, 10.0), BpConfig(max_iterations=7, early_stop=False))
    assert res.iterations_used == 7 and res.converged


def test_tree_code_matches_ml(rng):
    # a length-5 repetition code as a chain of checks is cycle-free
    rows = np.array([[1, 1, 0, 0, 0], [0, 1, 1, 0, 0], [0, 0, 1, 1, 0], [0, 0, 0, 1, 1]])
    code = LinearCode.from_matrix(rows)
    g = build_tanner_graph(code.h)
    pair = LinearCode.from_matrix(np.array([[1, 1]]))
    gp = build_tanner_graph(pair.h)
    for _ in range(200):
        llr = rng.normal(0, 2, 5)
        assert np.array_equal(bp_decode(g, llr).decoded, ml_codeword(code, llr))
        llr2 = rng.normal(0, 2, 2)
        assert np.array_equal(bp_decode(gp, llr2).decoded, ml_codeword(pair, llr2))


def test_sign_symmetry_on_tree(rng):
    rows = np.array([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]])
    g = build_tanner_graph(ParityCheckMatrix(rows))
    for _ in range(100):
        llr = rng.normal(0, 2, 4)
        a = bp_decode(g, llr).decoded
        b = bp_decode(g, -llr).decoded
        assert np.array_equal(a, 1 - b)


def test_message_dump(tmp_path, table1):
    dump = []
    bp_decode(build_tanner_graph(table1.h), [1, -1, 0.5, 2, -0.3, 1], BpConfig(max_iterations=3, early_stop=False), dump)
    edges = int(table1.h.rows.sum())
    assert len(dump) == 3 * 2 * edges
    path = tmp_path / "msgs.csv"
    write_message_dump(dump, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,check,variable,direction,value"
    assert len(lines) == 1 + len(dump)
