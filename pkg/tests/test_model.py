import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import KINDS, random_network
from oracles import SHIFTS, fock_block
from pseudomode.exceptions import ChannelUndefinedError, EmptySectorError, ValidationError
from pseudomode.model import (
    MAX_SECTOR_DIM,
    CouplingKind,
    ModeNetwork,
    channel_target,
    charges_of,
    diagonal_energy,
    enumerate_sector,
    matrix_element,
    sector_dimension,
    transition_frequencies,
)

occupation = st.integers(min_value=0, max_value=5)


def net_of(kind, seed, **kw):
    return random_network(np.random.default_rng(seed), kind, **kw)


# -- construction and validation ------------------------------------------------

def test_mode_count_must_match_kind():
    with pytest.raises(ValidationError):
        ModeNetwork.build([1.0, 2.0, 3.0], kind="bilinear2", g=0.1)


def test_cross_kerr_must_be_symmetric_with_zero_diagonal():
    with pytest.raises(ValidationError):
        ModeNetwork.build([1.0, 2.0], cross_kerr=[[0, 0.1], [0.2, 0]], kind="bilinear2", g=0.1)
    with pytest.raises(ValidationError):
        ModeNetwork.build([1.0, 2.0], cross_kerr=[[0.1, 0], [0, 0]], kind="bilinear2", g=0.1)


def test_negative_coupling_rejected():
    with pytest.raises(ValidationError):
        ModeNetwork.build([1.0, 2.0], kind="bilinear2", g=-0.1)


def test_dict_round_trip(rng):
    for kind in KINDS:
        net = random_network(rng, kind, drive_mode=3 if kind is CouplingKind.FOUR_WAVE else None)
        again = ModeNetwork.from_dict(net.to_dict())
        assert again.to_dict() == net.to_dict()


def test_from_dict_names_missing_field():
    data = ModeNetwork.build([1.0, 2.0], kind="bilinear2", g=0.1).to_dict()
    del data["coupling"]["g"]
    with pytest.raises(ValidationError, match="coupling.g"):
        ModeNetwork.from_dict(data)


# -- diagonal energy ---------------------------------------------------------------

def test_energy_hand_value():
    net = ModeNetwork.build([5, 6], [-0.2, -0.2], [[0, -0.05], [-0.05, 0]], kind="bilinear2", g=0.1)
    assert diagonal_energy(net, (2, 1)) == pytest.approx(15.7, abs=1e-12)


def test_energy_vacuum_and_free_sum(rng):
    for kind in KINDS:
        net = random_network(rng, kind)
        assert diagonal_energy(net, (0,) * net.n_modes) == 0.0
    free = ModeNetwork.build([1, 1, 1], kind="three_wave", g=0.1)
    assert diagonal_energy(free, (1, 1, 1)) == 3.0


@pytest.mark.parametrize("kind", KINDS)
def test_energy_matches_ladder_operator_oracle(kind):
    rng = np.random.default_rng(7)
    net = random_network(rng, kind)
    states = [tuple(rng.integers(0, 3, net.n_modes)) for _ in range(6)]
    block = fock_block(net.omegas, net.kerrs, net.cross_kerr, kind.value, 0.0, states)
    for i, s in enumerate(states):
        assert diagonal_energy(net, s) == pytest.approx(block[i, i], abs=1e-12)


# -- matrix elements -----------------------------------------------------------------

def test_matrix_element_examples():
    two = ModeNetwork.build([1, 1], kind="bilinear2", g=0.1)
    assert matrix_element(two, (1, 0), (0, 1)) == pytest.approx(0.1)
    three = ModeNetwork.build([1, 2, 3], kind="three_wave", g=0.1)
    assert matrix_element(three, (2, 3, 1), (1, 2, 2)) == pytest.approx(0.1 * math.sqrt(12))
    four = ModeNetwork.build([1, 2, 3, 4], kind="bilinear4", g=0.7)
    assert matrix_element(four, (1, 2, 0, 3), (1, 2, -1, 4)) == 0.0


def test_off_channel_element_is_zero():
    net = ModeNetwork.build([1, 1], kind="bilinear2", g=0.1)
    assert matrix_element(net, (2, 0), (0, 2)) == 0.0
    assert matrix_element(net, (2, 0), (2, 0)) == 0.0


@pytest.mark.parametrize("kind", KINDS)
@given(data=st.data())
def test_hermitian_and_charge_conserving(kind, data):
    net = net_of(kind, 3)
    n = net.n_modes
    s = tuple(data.draw(occupation) for _ in range(n))
    t = tuple(x + d for x, d in zip(s, SHIFTS[kind.value]))
    if min(t) < 0:
        return
    assert matrix_element(net, s, t) == matrix_element(net, t, s)
    if matrix_element(net, s, t) != 0:
        assert charges_of(net, s) == charges_of(net, t)


@pytest.mark.parametrize("kind", KINDS)
def test_matrix_element_matches_ladder_oracle(kind):
    net = net_of(kind, 11, g=0.37)
    rng = np.random.default_rng(2)
    for _ in range(5):
        s = tuple(int(x) for x in rng.integers(1, 3, net.n_modes))
        t = channel_target(net, s)
        block = fock_block(net.omegas, net.kerrs, net.cross_kerr, kind.value, net.g, [s, t])
        assert matrix_element(net, s, t) == pytest.approx(block[0, 1], rel=1e-13)


# -- transition frequencies -------------------------------------------------------------

def test_transition_frequency_examples():
    lin = ModeNetwork.build([1, 2], kind="bilinear2", g=0.1)
    assert transition_frequencies(lin, (1, 0)) == (1.0, 2.0)
    kerr = ModeNetwork.build([5, 6], [-0.2, -0.2], [[0, -0.05], [-0.05, 0]], kind="bilinear2", g=0.1)
    assert transition_frequencies(kerr, (2, 1))[0] == pytest.approx(4.75, abs=1e-12)
    tw = ModeNetwork.build([1, 2, 3], kind="three_wave", g=0.1)
    assert transition_frequencies(tw, (1, 1, 0)) == (3.0, 3.0)


@pytest.mark.parametrize("kind", KINDS)
@given(data=st.data())
def test_frequency_difference_is_energy_difference(kind, data):
    net = net_of(kind, 5)
    s = tuple(data.draw(st.integers(1, 5)) for _ in range(net.n_modes))
    wa, wb = transition_frequencies(net, s)
    gap = diagonal_energy(net, s) - diagonal_energy(net, channel_target(net, s))
    assert wa - wb == pytest.approx(gap, abs=1e-12)


@pytest.mark.parametrize("kind", KINDS)
@given(data=st.data())
def test_linear_limit_is_occupation_independent(kind, data):
    n = len(SHIFTS[kind.value])
    net = ModeNetwork.build(np.linspace(1.0, 2.0, n), kind=kind, g=0.1)
    s1 = tuple(data.draw(st.integers(1, 5)) for _ in range(n))
    s2 = tuple(data.draw(st.integers(1, 5)) for _ in range(n))
    assert transition_frequencies(net, s1) == pytest.approx(transition_frequencies(net, s2))


def test_undefined_channel_raises():
    net = ModeNetwork.build([1, 2], kind="bilinear2", g=0.1)
    with pytest.raises(ChannelUndefinedError):
        transition_frequencies(net, (0, 3))
    tw = ModeNetwork.build([1, 2, 3], kind="three_wave", g=0.1)
    with pytest.raises(ChannelUndefinedError):
        transition_frequencies(tw, (1, 0, 0))


# -- sectors ------------------------------------------------------------------------------

def test_sector_examples():
    net = ModeNetwork.build([1, 1], kind="bilinear2", g=0.2)
    sec = enumerate_sector(net, {"N": 2})
    assert sec.states == ((2, 0), (1, 1), (0, 2))
    assert np.allclose(sec.jumps, [0.2 * math.sqrt(2)] * 2, rtol=1e-15)
    vac = enumerate_sector(net, {"N": 0})
    assert vac.states == ((0, 0),) and vac.jumps.size == 0
    tw = ModeNetwork.build([1, 2, 3], kind="three_wave", g=0.2)
    sec = enumerate_sector(tw, {"Q": 3, "D": 1})
    assert sec.states == ((2, 1, 0), (1, 0, 1))
    assert sec.jumps[0] == pytest.approx(0.2 * math.sqrt(2))


def test_infeasible_charges():
    tw = ModeNetwork.build([1, 2, 3], kind="three_wave", g=0.2)
    with pytest.raises(EmptySectorError):
        enumerate_sector(tw, {"Q": 4, "D": 1})
    net = ModeNetwork.build([1, 1], kind="bilinear2", g=0.2)
    with pytest.raises(EmptySectorError):
        enumerate_sector(net, {"N": -1})
    with pytest.raises(ValidationError):
        enumerate_sector(net, {"Q": 1})


def test_dimension_guard():
    net = ModeNetwork.build([1, 1], kind="bilinear2", g=0.2)
    with pytest.raises(EmptySectorError):
        enumerate_sector(net, {"N": MAX_SECTOR_DIM + 5})


@pytest.mark.parametrize("kind", KINDS)
@given(data=st.data())
def test_sector_is_a_complete_chain(kind, data):
    net = net_of(kind, 9)
    s = tuple(data.draw(st.integers(0, 4)) for _ in range(net.n_modes))
    q = charges_of(net, s)
    sec = enumerate_sector(net, q)
    assert s in sec.states
    assert sec.dim == sector_dimension(net, q)
    for st_ in sec.states:
        assert charges_of(net, st_) == q
    # brute force: every state with these charges is on the chain
    import itertools
    top = max(max(x) for x in sec.states) + 1
    same = [c for c in itertools.product(range(top + 1), repeat=net.n_modes)
            if charges_of(net, c) == q]
    assert sorted(same) == sorted(sec.states)
    # tridiagonal: only chain neighbours couple
    for i, a in enumerate(sec.states):
        for j, b in enumerate(sec.states):
            if abs(i - j) != 1:
                assert matrix_element(net, a, b) == 0.0


@pytest.mark.parametrize("kind", KINDS)
def test_sector_matches_ladder_operator_hamiltonian(kind):
    net = net_of(kind, 13)
    rng = np.random.default_rng(4)
    for _ in range(3):
        s = tuple(int(x) for x in rng.integers(0, 3, net.n_modes))
        sec = enumerate_sector(net, charges_of(net, s))
        block = fock_block(net.omegas, net.kerrs, net.cross_kerr, kind.value, net.g,
                           list(sec.states))
        np.testing.assert_allclose(sec.hamiltonian(), block, atol=1e-12)
