import numpy as np
import pytest

from ldpc_qaoa.energy import (
    DecodingHamiltonian,
    bits_to_index,
    bits_to_spins,
    brute_force_min,
    build_energy_table,
    channel_energy,
    index_to_bits,
    ml_codeword,
    parity_energy,
    spins_to_bits,
    total_energy,
)
from ldpc_qaoa.errors import CapacityError, InputError
from ldpc_qaoa.gf2 import builtin_code, builtin_names, syndrome

from conftest import FIG1_CODEWORD, all_bitstrings


def ham(code, llr):
    return DecodingHamiltonian.from_matrix(code.h, llr)


def oracle_energy(rows, llr, x):
    """Violated checks plus |LLR| of every bit disagreeing with the LLR sign."""
    violated = int(((np.asarray(rows) @ x) % 2).sum())
    disagree = sum(abs(h) for h, b in zip(llr, x) if (h > 0 and b == 1) or (h < 0 and b == 0))
    return violated + disagree


def test_spin_mapping():
    assert bits_to_spins([0, 1]).tolist() == [1, -1]
    assert bits_to_spins([0] * 5).tolist() == [1] * 5
    for x in all_bitstrings(6):
        assert np.array_equal(spins_to_bits(bits_to_spins(x)), x)


def test_index_convention():
    assert bits_to_index([1, 0, 0]) == 1
    assert bits_to_index([0, 0, 1]) == 4
    assert index_to_bits(6, 3).tolist() == [0, 1, 1]


def test_parity_examples(table1, fig1):
    h = ham(fig1, np.zeros(6))
    assert parity_energy(h, bits_to_spins(FIG1_CODEWORD)) == 0
    assert parity_energy(ham(table1, np.zeros(6)), bits_to_spins([1, 0, 0, 0, 0, 0])) == 2
    assert parity_energy(h, bits_to_spins([0] * 6)) == 0


def test_channel_examples():
    h = DecodingHamiltonian(((0, 1),), [2.0, -3.0])
    assert channel_energy(h, np.array([1, -1])) == 0
    assert channel_energy(h, np.array([-1, -1])) == 2
    zero = DecodingHamiltonian(((0, 1),), [0.0, 0.0])
    for z in ([1, 1], [1, -1], [-1, 1], [-1, -1]):
        assert channel_energy(zero, np.array(z)) == 0


def test_total_energy_example(table1):
    assert total_energy(ham(table1, np.ones(6)), [1, 0, 0, 0, 0, 0]) == 3


def test_zero_energy_for_agreeing_codeword(fig1):
    llr = 4.0 * (-1.0) ** np.array(FIG1_CODEWORD)
    assert total_energy(ham(fig1, llr), FIG1_CODEWORD) == 0


def test_energy_table_small():
    h = DecodingHamiltonian(((0, 1),), [0.0, 0.0])
    assert build_energy_table(h).tolist() == [0, 1, 1, 0]


def test_hamiltonian_validation():
    with pytest.raises(InputError):
        DecodingHamiltonian(((0, 5),), [1.0, 1.0])
    with pytest.raises(InputError):
        DecodingHamiltonian(((),), [1.0, 1.0])
    with pytest.raises(InputError):
        DecodingHamiltonian(((0,),), [np.nan])


def test_table_capacity():
    h = DecodingHamiltonian(((0, 1),), np.zeros(25))
    with pytest.raises(CapacityError):
        build_energy_table(h)


@pytest.mark.parametrize("name", builtin_names())
def test_exhaustive_agreement_with_oracle(name, rng):
    code = builtin_code(name)
    xs = all_bitstrings(code.n)
    for _ in range(5):
        llr = rng.uniform(-4, 4, code.n)
        llr[rng.integers(code.n)] = 0.0
        h = ham(code, llr)
        table = build_energy_table(h)
        assert (table >= 0).all()
        for x in xs:
            z = bits_to_spins(x)
            e = table[bits_to_index(x)]
            assert e == pytest.approx(total_energy(h, x), abs=1e-12)
            assert e == pytest.approx(oracle_energy(code.h.rows, llr, x), abs=1e-12)
            assert parity_energy(h, z) == syndrome(code.h, x).sum()
            if not syndrome(code.h, x).any():
                assert e == pytest.approx(channel_energy(h, z), abs=1e-12)


def test_zero_energy_characterization(table1, rng):
    for _ in range(20):
        llr = rng.uniform(-4, 4, 6)
        llr[rng.integers(6)] = 0.0
        table = build_energy_table(ham(table1, llr))
        hard = (llr < 0).astype(np.uint8)
        for x in all_bitstrings(6):
            agrees = all(llr[i] == 0 or x[i] == hard[i] for i in range(6))
            zero = table[bits_to_index(x)] == 0
            assert zero == (agrees and not syndrome(table1.h, x).any())


def test_brute_force_min_examples(fig1, table1):
    llr = 10.0 * (-1.0) ** np.array(FIG1_CODEWORD)
    x, e = brute_force_min(ham(fig1, llr))
    assert x.tolist() == FIG1_CODEWORD and e == 0
    x, e = brute_force_min(ham(table1, np.zeros(6)))
    assert x.tolist() == [0] * 6 and e == 0


def test_ml_codeword_example(table1):
    llr = np.array([-1, 1, -1, -1, 1, 1], dtype=float)
    # disagreement costs by hand: 000000 -> 3, 011100 -> 2, 101100 -> 0, 110000 -> 3
    costs = {tuple(w): oracle_energy(table1.h.rows, llr, w) for w in table1.codewords}
    assert costs == {(0, 0, 0, 0, 0, 0): 3, (0, 1, 1, 1, 0, 0): 2, (1, 0, 1, 1, 0, 0): 0, (1, 1, 0, 0, 0, 0): 3}
    assert ml_codeword(table1, llr).tolist() == [1, 0, 1, 1, 0, 0]


def test_ml_noiseless(table1):
    for w in table1.codewords:
        assert np.array_equal(ml_codeword(table1, 5.0 * (-1.0) ** w), w)


def test_ml_subset_bound_and_scale_covariance(table1, rng):
    for _ in range(100):
        llr = rng.uniform(-4, 4, 6)
        h = ham(table1, llr)
        ml = ml_codeword(table1, llr)
        _, emin = brute_force_min(h)
        assert total_energy(h, ml) >= emin
        lam = rng.uniform(0.1, 10)
        assert np.array_equal(ml_codeword(table1, lam * llr), ml)
        z = bits_to_spins(rng.integers(0, 2, 6))
        assert channel_energy(ham(table1, lam * llr), z) == pytest.approx(lam * channel_energy(h, z))
