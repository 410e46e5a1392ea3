import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadric_motives.exact_linalg import ZZ, CoeffRing
from quadric_motives.split_chow import (
    Cell,
    Cycle,
    GaloisContext,
    SplitQuadric,
    chow_rank,
    degree,
    gal_act,
    h_mult,
    h_power,
    pairing,
    pairing_matrix,
)


def quadrics(r=2, max_dim=6):
    def build(D, bits):
        return SplitQuadric(D, bits if D % 2 == 0 else (0,) * r)
    return st.builds(build, st.integers(1, max_dim), st.tuples(*[st.integers(0, 1)] * r))


def cyc(X, **cells):
    return Cycle(X, ZZ, {Cell.parse(k.replace("_", "'")): v for k, v in cells.items()})


def test_galois_context_validation():
    assert GaloisContext(2, 3).disc_chars() == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(ValueError):
        GaloisContext(1, 0)
    with pytest.raises(ValueError):
        GaloisContext(3, 2)
    assert GaloisContext.from_json({"r": 1, "n": 2}) == GaloisContext(1, 2)


def test_odd_quadric_rejects_disc():
    with pytest.raises(ValueError):
        SplitQuadric(3, (1,))
    with pytest.raises(ValueError):
        SplitQuadric(0)


def test_chow_rank_examples():
    assert chow_rank(SplitQuadric(2), 1) == 2
    assert chow_rank(SplitQuadric(3), 1) == 1
    assert chow_rank(SplitQuadric(4), 0) == 1
    with pytest.raises(ValueError):
        chow_rank(SplitQuadric(2), 3)


@given(quadrics())
def test_basis_size(X):
    total = sum(chow_rank(X, i) for i in range(X.dim + 1))
    assert total == X.dim + 1 + (1 if X.is_even else 0) == len(X.basis())
    for i in range(X.dim + 1):
        assert len(X.cells_in_dim(i)) == chow_rank(X, i)


def test_cell_names():
    assert [str(c) for c in SplitQuadric(2).basis()] == ["L0", "L1", "L1'", "H0"]
    assert Cell.parse("L1'") == Cell("L'", 1)
    assert Cell.parse("H2") == Cell("H", 2)


def test_h_mult_examples():
    X2 = SplitQuadric(2)
    assert h_mult(h_power(X2, 1)) == h_power(X2, 2) == cyc(X2, L0=2)
    assert h_mult(cyc(X2, L0=1)).is_zero()
    X4 = SplitQuadric(4)
    assert h_mult(cyc(X4, L2=1)) == cyc(X4, L1=1)
    assert h_mult(cyc(X4, L2_=1)) == cyc(X4, L1=1)
    assert h_mult(h_power(X4, 2)) == h_power(X4, 3) == cyc(X4, L1=2)


def test_degree_examples():
    X = SplitQuadric(3)
    assert degree(cyc(X, L0=1)) == 1
    assert degree(h_power(X, 3)) == 2
    assert degree(3 * cyc(X, L0=1)) == 3
    with pytest.raises(ValueError):
        degree(cyc(X, L1=1))


def test_pairing_examples():
    X2 = SplitQuadric(2)
    assert pairing(cyc(X2, L1=1), cyc(X2, L1_=1)) == 1
    assert pairing(cyc(X2, L1=1), cyc(X2, L1=1)) == 0
    assert pairing(h_power(X2, 1), cyc(X2, L1=1)) == 1
    X4 = SplitQuadric(4)
    assert pairing(cyc(X4, L2=1), cyc(X4, L2=1)) == 1
    with pytest.raises(ValueError):
        pairing(cyc(X4, L1=1), cyc(X4, L1=1))


@given(quadrics(), st.data())
def test_h_powers_pair_to_two(X, data):
    a = data.draw(st.integers(0, X.dim))
    assert pairing(h_power(X, a), h_power(X, X.dim - a)) == 2


@given(quadrics())
def test_h_mult_nilpotent(X):
    x = Cycle(X, ZZ, [1] * len(X.basis()))
    for _ in range(X.dim + 1):
        x = h_mult(x)
    assert x.is_zero()


@given(quadrics())
def test_pairing_is_perfect(X):
    for i in range(X.dim + 1):
        G = pairing_matrix(X, i)
        assert abs(G.det()) == 1
        if 2 * i != X.dim:
            assert G.to_rows() == [[1]]


@given(quadrics())
def test_middle_relation(X):
    if X.is_even:
        d = X.half
        assert h_power(X, d) == cyc(X, **{f"L{d}": 1, f"L{d}_": 1})


@given(quadrics(), st.data())
def test_galois_isometry_and_involution(X, data):
    gamma = data.draw(st.sampled_from(GaloisContext(X.r, max(X.r, 1)).elements()))
    for i in range(X.dim + 1):
        for a in X.cells_in_dim(i):
            x = Cycle.cell(X, a)
            assert gal_act(gamma, gal_act(gamma, x)) == x
            for b in X.cells_in_dim(X.dim - i):
                u = Cycle.cell(X, b)
                assert pairing(gal_act(gamma, x), gal_act(gamma, u)) == pairing(x, u)


def test_galois_action_examples():
    X = SplitQuadric(2, (1, 0))
    assert gal_act((1, 0), cyc(X, L1=1)) == cyc(X, L1_=1)
    assert gal_act((0, 1), cyc(X, L1=1)) == cyc(X, L1=1)
    for a in range(3):
        assert gal_act((1, 1), h_power(X, a)) == h_power(X, a)
    Y = SplitQuadric(2, (0, 0))
    for g in GaloisContext(2, 2).elements():
        assert gal_act(g, cyc(Y, L1=1)) == cyc(Y, L1=1)


def test_cycle_json_roundtrip():
    X = SplitQuadric(4, (1,))
    x = Cycle(X, CoeffRing.pow2(2), {Cell("L'", 2): 3, Cell("H", 1): 1})
    data = x.to_json()
    assert data["cells"] == {"L2'": 3, "H1": 1}
    assert Cycle.from_json(data) == x
    assert SplitQuadric.from_json(X.to_json()) == X
