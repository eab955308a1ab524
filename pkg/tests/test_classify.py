import numpy as np
import pytest

from cmvscatter import (
    CircleFunction,
    CircleGrid,
    VerblunskySeq,
    a2_constant,
    besov_half_norm,
    classify,
    forward_scatter,
    hankel_from_symbol,
    widom_det,
    winding_index,
)
from cmvscatter.classify import jacobi_verblunsky

from conftest import random_complex_seq


def test_besov_constant(grid):
    assert besov_half_norm(CircleFunction.constant(grid, 1.0)) < 1e-20


def test_besov_monomial(grid):
    f = CircleFunction(grid, grid.nodes ** 2)
    assert abs(besov_half_norm(f) - 2.0) < 1e-10


def test_besov_stable_across_grids():
    vals = []
    for n in (2048, 4096):
        g = CircleGrid(n)
        data = forward_scatter(VerblunskySeq(a_minus1=1.0, a=(0.5,)), g)
        vals.append(besov_half_norm(data.s))
    assert abs(vals[0] - vals[1]) < 1e-8


def test_besov_equals_hankel_frobenius_on_window(grid):
    # the negative-frequency half of the Besov sum is the squared Frobenius
    # norm of the Hankel matrix when the window is triangular-complete
    rng = np.random.default_rng(29)
    data = forward_scatter(random_complex_seq(rng, 3), grid)
    m = 64
    h = hankel_from_symbol(data.s, m)
    weights = np.minimum(np.arange(1, 2 * m), 2 * m - np.arange(1, 2 * m))
    windowed = float(np.sum(weights * np.abs(h.neg[: 2 * m - 1]) ** 2))
    assert abs(h.frobenius_sq() - windowed) < 1e-14 * max(windowed, 1.0)
    neg_besov = float(np.sum(np.arange(1, 2 * m) * np.abs(h.neg[: 2 * m - 1]) ** 2))
    assert h.frobenius_sq() <= neg_besov + 1e-12


def test_winding_trivial(grid):
    assert winding_index(CircleFunction.constant(grid, 1.0)) == 0
    assert winding_index(CircleFunction(grid, grid.nodes ** 2)) == 2
    assert winding_index(CircleFunction(grid, grid.nodes ** -3)) == -3


def test_winding_rejects_non_unimodular(grid):
    with pytest.raises(ValueError):
        winding_index(CircleFunction(grid, 2.0 * np.ones(grid.size)))


def test_winding_zero_on_corpus(grid, corpus):
    for seq in corpus:
        data = forward_scatter(seq, grid)
        assert winding_index(data.s) == 0


def test_a2_unit_weight(grid):
    assert a2_constant(CircleFunction.constant(grid, 1.0)) == 1.0


def test_a2_stable_for_mild_jacobi_weight():
    # |1 - zeta t|^(1/2): inside the A2 range, scan stable between grids
    vals = []
    for n in (2048, 4096):
        g = CircleGrid(n)
        zeta = np.exp(1j * np.pi / n)
        w = CircleFunction(g, np.abs(1.0 - zeta * g.nodes) ** 0.5)
        vals.append(a2_constant(w))
    assert (vals[1] - vals[0]) / vals[0] < 0.05


def test_a2_diverges_for_quartic_weight():
    vals = []
    for n in (2048, 4096):
        g = CircleGrid(n)
        zeta = np.exp(1j * np.pi / n)
        w = CircleFunction(g, np.abs(1.0 - zeta * g.nodes) ** 4 / 6.0)
        vals.append(a2_constant(w))
    assert vals[1] > 2.0 * vals[0]


def test_a2_rejects_nonpositive(grid):
    w = np.ones(grid.size)
    w[0] = 0.0
    with pytest.raises(ValueError):
        a2_constant(CircleFunction(grid, w))


def test_widom_free(grid):
    rows = widom_det(VerblunskySeq(a_minus1=-1.0), [16, 32], grid)
    for _, det, product, gap in rows:
        assert abs(det - 1.0) < 1e-12
        assert product == 1.0
        assert gap < 1e-12


def test_widom_single(grid):
    rows = widom_det(VerblunskySeq(a_minus1=1.0, a=(0.5,)), [64, 128, 256], grid)
    for _, det, product, gap in rows:
        assert abs(product - 0.75) < 1e-12
        assert gap < 1e-6
    dets = [r[1] for r in rows]
    for k in range(len(dets) - 1):
        assert dets[k + 1] <= dets[k] + 1e-12
        assert dets[k + 1] >= product - 1e-9


def test_widom_two_coefficients(grid):
    rows = widom_det(VerblunskySeq(a_minus1=1.0, a=(0.5, 1.0 / 3.0)), [256], grid)
    m, det, product, gap = rows[0]
    assert abs(product - 0.75 * (8.0 / 9.0) ** 2) < 1e-12
    assert gap < 1e-6


def test_classify_free(grid):
    rep = classify(seq=VerblunskySeq(a_minus1=-1.0), grid=grid, M=64)
    assert rep.regular and rep.hs_member and rep.gi_member
    assert rep.szego_sum == 0.0 and rep.gi_sum == 0.0
    assert rep.besov < 1e-12
    assert rep.index == 0


def test_classify_corpus_members(grid, corpus):
    for seq in corpus[:4]:
        rep = classify(seq=seq, grid=grid, M=128)
        assert rep.regular
        assert rep.hs_member
        assert rep.gi_member
        assert rep.index == 0


def test_classify_inclusions_never_violated(grid, corpus):
    seqs = corpus + [jacobi_verblunsky(0.25, 0.0, 200), jacobi_verblunsky(2.0, 0.0, 100)]
    for seq in seqs:
        rep = classify(seq=seq, grid=grid, M=128)
        assert not (rep.gi_member and not rep.hs_member)
        assert not (rep.hs_member and not rep.regular)


def test_classify_jacobi_quarter(grid4096):
    rep = classify(seq=jacobi_verblunsky(0.25, 0.0, 200), grid=grid4096, M=256)
    assert rep.hs_member
    assert rep.gi_divergent
    assert not rep.gi_member
    assert rep.index == 0


def test_classify_monomial_scattering(grid4096):
    s = CircleFunction(grid4096, grid4096.nodes ** 2)
    rep = classify(s=s, M=128)
    assert rep.index == 2
    assert not rep.regular
    assert not rep.gi_member
