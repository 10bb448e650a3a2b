# tests/unit/test_window_law.py
from __future__ import annotations

import logging

import numpy as np
import pytest

from services.errors import EnumerationLimitError
from services.lab import (
    WindowKind,
    conditional_mutual_information,
    copy_left_spec,
    diagonal_switch_spec,
    exact_window_law,
    iid_spec,
)
from services.lab.mmm import gen_mmm_symbols
from services.lab.window_law import grouped_joint
from services.resampler.rng import stream
from services.settings import LabDefaults


def test_iid_law_is_product():
    law = exact_window_law(iid_spec((0.3, 0.7)), WindowKind.Q, depth=3)
    p = np.array([0.3, 0.7])
    expected = np.einsum("a,b,c,d->abcd", p, p, p, p)
    np.testing.assert_allclose(law.pmf, expected, atol=1e-12)
    assert law.boundary_gap < 1e-12


def test_copy_left_law_is_two_row_chains():
    law = exact_window_law(copy_left_spec(0.9), WindowKind.Q, depth=5)
    pair = 0.5 * np.array([[0.9, 0.1], [0.1, 0.9]])
    expected = np.einsum("ab,cd->abcd", pair, pair)
    np.testing.assert_allclose(law.pmf, expected, atol=1e-12)
    assert abs(law.pmf.sum() - 1.0) < 1e-12


def test_v_window_law_and_stationary_marginals():
    law = exact_window_law(copy_left_spec(0.8), WindowKind.V, depth=6)
    assert law.side == 3
    assert law.pmf.shape == (2,) * 9
    assert abs(law.pmf.sum() - 1.0) < 1e-12
    for cell in range(9):
        np.testing.assert_allclose(law.marginal([cell]), [0.5, 0.5], atol=1e-12)


def test_law_matches_monte_carlo():
    spec = diagonal_switch_spec()
    law = exact_window_law(spec, WindowKind.Q, depth=12)
    counts = np.zeros(16)
    for r in range(3):
        sym = gen_mmm_symbols(spec, 200, 200, stream(21, r), burn_in=16)
        win = np.stack(
            [sym[0:-1:3, 0:-1:3], sym[0:-1:3, 1::3], sym[1::3, 0:-1:3], sym[1::3, 1::3]]
        )
        n = min(a.shape[0] for a in win), min(a.shape[1] for a in win)
        cells = [a[: n[0], : n[1]].ravel() for a in win]
        np.add.at(counts, np.ravel_multi_index(cells, (2, 2, 2, 2)), 1.0)
    freq = counts / counts.sum()
    assert np.abs(freq - law.pmf.ravel()).max() < 0.02


def test_enumeration_guard():
    lab = LabDefaults(max_oracle_states=8)
    with pytest.raises(EnumerationLimitError, match="smaller k or w"):
        exact_window_law(copy_left_spec(), WindowKind.Q, depth=4, lab=lab)
    lab = LabDefaults(max_configurations=100)
    with pytest.raises(EnumerationLimitError):
        exact_window_law(copy_left_spec(), WindowKind.V, lab=lab)


def test_boundary_gap_warning(caplog):
    lab = LabDefaults(oracle_tolerance=1e-12)
    with caplog.at_level(logging.WARNING, logger="services.lab.window_law"):
        law = exact_window_law(diagonal_switch_spec(), WindowKind.Q, depth=1, lab=lab)
    assert law.boundary_gap > 1e-12
    assert "boundary gap" in caplog.text


def test_conditional_mutual_information():
    indep = np.einsum("x,a,b->xab", [0.3, 0.7], [0.5, 0.5], [0.2, 0.8])
    assert conditional_mutual_information(indep) == pytest.approx(0.0, abs=1e-12)
    copy = np.zeros((2, 2, 2))
    for a in range(2):
        for b in range(2):
            copy[b, a, b] = 0.25
    assert conditional_mutual_information(copy) == pytest.approx(np.log(2.0))
    # unnormalised counts give the plug-in estimate
    assert conditional_mutual_information(copy * 40) == pytest.approx(np.log(2.0))


def test_grouped_joint_shape():
    law = exact_window_law(diagonal_switch_spec(), WindowKind.V, depth=4)
    joint = grouped_joint(law, [8], [4, 5], [0, 1, 2, 3])
    assert joint.shape == (2, 4, 16)
    assert joint.sum() == pytest.approx(1.0)


def test_diagonal_switch_has_a_clear_conditional_dependence():
    # V window of w=2 with top-left (0, -1); X1 at (2, 1)
    law = exact_window_law(diagonal_switch_spec(), WindowKind.V, depth=8)
    joint = grouped_joint(law, [8], [4, 5], [0, 1, 2, 3])
    assert conditional_mutual_information(joint) > 0.02
