import math

import numpy as np
import pytest

from catamp import (ALL_PATTERNS, BOTH_CLICK, BeamSplitterParams, ClickPattern,
                    DetectorModel, MultiModeState, apply_beam_splitter,
                    cat_state, click_povm, coherent_state, condition,
                    fidelity_mixed, fock_state, tensor)

FIFTY = BeamSplitterParams.fifty_fifty()


def _conditioning_circuit(input_a, input_b, gamma, cutoff=30):
    psi = tensor(tensor(input_a, input_b), coherent_state(gamma, cutoff))
    psi = apply_beam_splitter(psi, 0, 1, FIFTY)
    return apply_beam_splitter(psi, 1, 2, FIFTY)


def test_click_povm_perfect_detector():
    m = click_povm(DetectorModel(1.0, 30))
    want = np.eye(30)
    want[0, 0] = 0.0
    assert np.array_equal(m, want)


def test_click_povm_dead_detector():
    assert np.all(click_povm(DetectorModel(0.0, 30)) == 0.0)


def test_click_povm_half_efficiency():
    m = click_povm(DetectorModel(0.5, 8))
    assert m[0, 0] == 0.0
    assert np.isclose(m[2, 2], 0.75, atol=1e-15)


def test_click_povm_completeness_is_exact():
    for eta in (0.0, 0.3, 0.77, 1.0):
        model = DetectorModel(eta, 16)
        noclick = np.diag((1 - eta) ** np.arange(16))
        assert np.array_equal(click_povm(model) + noclick, np.eye(16))


def test_detector_model_rejects_bad_efficiency():
    with pytest.raises(ValueError):
        DetectorModel(1.2, 30)
    with pytest.raises(ValueError):
        DetectorModel(-0.1, 30)


@pytest.mark.parametrize("eta", [0.2, 0.6, 1.0])
def test_pattern_probabilities_sum_to_one(eta):
    rng = np.random.default_rng(11)
    amp = rng.standard_normal((8, 8, 8)) + 1j * rng.standard_normal((8, 8, 8))
    psi = MultiModeState(amp / np.linalg.norm(amp))
    model = DetectorModel(eta, 8)
    total = sum(condition(psi, 1, 2, pat, model)[1] for pat in ALL_PATTERNS)
    assert abs(total - 1.0) < 1e-10


def test_condition_validates_inputs():
    psi = MultiModeState(np.ones((4, 4, 4)) / 8.0)
    model = DetectorModel(1.0, 4)
    with pytest.raises(ValueError):
        condition(psi, 1, 1, BOTH_CLICK, model)
    with pytest.raises(ValueError):
        condition(MultiModeState(0.5 * psi.amplitudes), 1, 2, BOTH_CLICK, model)
    with pytest.raises(ValueError):
        condition(tensor(fock_state(0, 4), fock_state(0, 4)), 0, 1, BOTH_CLICK, model)


def test_double_click_on_interfered_cats_yields_amplified_cat():
    # two odd cats of size 1/sqrt2 condition onto the even cat of size 1
    a = 2 ** -0.5
    psi = _conditioning_circuit(cat_state(a, math.pi), cat_state(a, math.pi),
                                gamma=math.sqrt(2) * a)
    rho, prob = condition(psi, 1, 2, BOTH_CLICK, DetectorModel(1.0, 30))
    assert abs(prob - 0.2199460174696386) < 1e-4
    f = fidelity_mixed(rho.normalized(), cat_state(1.0, 0.0))
    assert f >= 1 - 1e-9
    assert abs(rho.trace_value - prob) < 1e-14


def test_double_noclick_keeps_the_rejected_branch():
    a = 2 ** -0.5
    psi = _conditioning_circuit(cat_state(a, math.pi), cat_state(a, math.pi),
                                gamma=math.sqrt(2) * a)
    rho, prob = condition(psi, 1, 2, ClickPattern(False, False), DetectorModel(1.0, 30))
    assert prob > 0.1
    assert fidelity_mixed(rho.normalized(), cat_state(1.0, 0.0)) < 0.6


def test_normalized_output_is_eta_independent_for_ideal_cats():
    a = 2 ** -0.5
    psi = _conditioning_circuit(cat_state(a, math.pi), cat_state(a, math.pi),
                                gamma=math.sqrt(2) * a)
    outputs, probs = [], []
    for eta in (0.1, 0.5, 1.0):
        rho, prob = condition(psi, 1, 2, BOTH_CLICK, DetectorModel(eta, 30))
        outputs.append(rho.normalized().matrix)
        probs.append(prob)
    assert np.max(np.abs(outputs[0] - outputs[2])) < 1e-9
    assert np.max(np.abs(outputs[1] - outputs[2])) < 1e-9
    assert probs[0] < probs[1] < probs[2]


def test_vacuum_detector_mode_never_clicks():
    # exact zero, not merely small: the click element annihilates vacuum
    psi = tensor(tensor(coherent_state(0.7, 12), fock_state(0, 12)),
                 coherent_state(0.4, 12))
    model = DetectorModel(1.0, 12)
    _, p_click = condition(psi, 1, 2, ClickPattern(True, True), model)
    assert p_click == 0.0
    _, p_single = condition(psi, 1, 2, ClickPattern(True, False), model)
    assert p_single == 0.0


def test_conditioning_output_is_physical():
    rng = np.random.default_rng(3)
    amp = rng.standard_normal((10, 10, 10)) + 1j * rng.standard_normal((10, 10, 10))
    psi = MultiModeState(amp / np.linalg.norm(amp))
    for pat in ALL_PATTERNS:
        rho, prob = condition(psi, 0, 2, pat, DetectorModel(0.8, 10))
        assert 0.0 <= prob <= 1.0 + 1e-10
        assert np.linalg.eigvalsh(rho.matrix)[0] >= -1e-10
