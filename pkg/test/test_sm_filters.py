"""
Unit Tests for the Adaptive Receiver Updates

Set-membership updates (SM-NLMS, SM-AP, BEACON), the NLMS / AP / RLS
baselines, hard decisions and the receiver factory.
"""

import numpy as np
import pytest

from src.smcdma.models.config import AlgorithmSpec
from src.smcdma.models.errors import (
    DegenerateInputError,
    IllConditionedWindowError,
    StateCorruptionError,
)
from src.smcdma.models.filters import ApState, BeaconState, ReceiverWeights, RlsState
from src.smcdma.services.cdma_model import build_convolution_matrix, gold_family
from src.smcdma.services.sm_filters import (
    ApReceiver,
    BeaconReceiver,
    NlmsReceiver,
    RlsReceiver,
    SmNlmsReceiver,
    ap_update,
    beacon_update,
    detect,
    make_filter,
    matched_filter_init,
    nlms_update,
    rls_update,
    sm_ap_update,
    sm_nlms_update,
)


def complex_vector(rng, M):
    return rng.standard_normal(M) + 1j * rng.standard_normal(M)


def posterior_error(w, r, b):
    return b - np.vdot(w, r)


class TestSmNlms:
    """Test cases for the SM-NLMS update."""

    def test_worked_example(self):
        """Test w=[0,0], r=[1,0], b=2, gamma=1 moves w to [1,0] with step 0.5."""
        state = ReceiverWeights(np.zeros(2))
        outcome = sm_nlms_update(state, np.array([1.0, 0.0]), 2.0, 1.0)

        assert outcome.updated
        assert np.allclose(state.w, [1.0, 0.0])
        assert outcome.step_or_lambda == pytest.approx(0.5)
        assert outcome.prior_error == 2.0

    def test_no_update_inside_bound(self):
        """Test that an error inside the bound leaves the weights alone."""
        state = ReceiverWeights(np.array([1.0, 0.0]))
        outcome = sm_nlms_update(state, np.array([1.0, 0.0]), 1.5, 1.0)

        assert not outcome.updated
        assert outcome.step_or_lambda == 0.0
        assert np.array_equal(state.w, [1.0, 0.0])

    def test_zero_bound_is_full_projection(self):
        """Test that gamma = 0 zeroes the a posteriori error."""
        rng = np.random.default_rng(0)
        r = complex_vector(rng, 6)
        state = ReceiverWeights(complex_vector(rng, 6))
        sm_nlms_update(state, r, 1.0, 0.0)

        assert abs(posterior_error(state.w, r, 1.0)) < 1e-12

    def test_zero_input_needing_update(self):
        """Test that a zero observation with a large error is rejected."""
        with pytest.raises(DegenerateInputError):
            sm_nlms_update(ReceiverWeights(np.zeros(3)), np.zeros(3), 1.0, 0.5)

    def test_bound_attainment(self):
        """Test that every update lands the a posteriori error on gamma."""
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(10000):
            r = complex_vector(rng, 8)
            state = ReceiverWeights(complex_vector(rng, 8))
            b = rng.choice([-1.0, 1.0])
            e = abs(b - np.vdot(state.w, r))
            gamma = rng.uniform(0.05, 0.95) * e
            outcome = sm_nlms_update(state, r, b, gamma)
            assert outcome.updated
            worst = max(worst, abs(abs(posterior_error(state.w, r, b)) - gamma))

        assert worst < 1e-9


    def test_error_on_bound_is_not_an_update(self):
        """Test the tie-break |e| = gamma: no update."""
        state = ReceiverWeights(np.zeros(2))
        outcome = sm_nlms_update(state, np.array([1.0, 0.0]), 1.0, 1.0)

        assert not outcome.updated
        assert np.array_equal(state.w, [0.0, 0.0])

    def test_step_range(self):
        """Test mu = (1 - gamma/|e|) / r^H r lies in [0, 1 / r^H r)."""
        rng = np.random.default_rng(11)
        for _ in range(1000):
            r = complex_vector(rng, 6)
            state = ReceiverWeights(complex_vector(rng, 6))
            b = rng.choice([-1.0, 1.0])
            e = abs(b - np.vdot(state.w, r))
            energy = np.vdot(r, r).real
            outcome = sm_nlms_update(state, r, b, 0.5 * e)

            assert outcome.step_or_lambda == pytest.approx(0.5 / energy, rel=1e-12)
            assert 0.0 <= outcome.step_or_lambda < 1.0 / energy

    def test_infinite_bound_never_updates(self):
        """Test that gamma = inf skips every symbol for each selective receiver."""
        rng = np.random.default_rng(12)
        receivers = [make_filter(AlgorithmSpec.parse(text), complex_vector(rng, 6))
                     for text in ("sm-nlms:fixed", "sm-ap:fixed(P=2)", "beacon:fixed")]
        updates = 0
        for _ in range(500):
            r = complex_vector(rng, 6)
            b = rng.choice([-1.0, 1.0])
            updates += sum(receiver.update(r, b, np.inf).updated for receiver in receivers)

        assert updates == 0

    def test_update_rate_non_increasing_in_gamma(self):
        """Test that a larger bound never updates more often on the same stream."""
        rng = np.random.default_rng(13)
        M = 4
        w_true = complex_vector(rng, M)
        data = []
        for _ in range(3000):
            r = complex_vector(rng, M)
            noise = 0.3 * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0)
            data.append((r, np.vdot(w_true, r) + noise))

        rates = []
        for gamma in (0.05, 0.2, 0.6, 2.0):
            state = ReceiverWeights(np.zeros(M))
            updates = sum(sm_nlms_update(state, r, b, gamma).updated for r, b in data)
            rates.append(updates / len(data))

        assert all(later <= earlier for earlier, later in zip(rates, rates[1:]))
        assert rates[0] > 0.5
        assert rates[-1] < 0.05


class TestSmAp:
    """Test cases for the SM-AP update."""

    def test_bound_attainment_and_memory(self):
        """Test that the newest error hits gamma and older errors are kept."""
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(10000):
            M, P = 8, 3
            window = ApState.empty(M, P, delta=0.0)
            for _ in range(P):
                window.push(complex_vector(rng, M), rng.choice([-1.0, 1.0]))
            state = ReceiverWeights(complex_vector(rng, M))
            before = window.Y.conj().T @ state.w
            b = window.desired[0]
            e = abs(b - np.vdot(state.w, window.Y[:, 0]))
            gamma = rng.uniform(0.05, 0.95) * e

            outcome = sm_ap_update(state, window, b, gamma)
            after = window.Y.conj().T @ state.w

            assert outcome.updated
            worst = max(worst, abs(abs(b - np.conj(after[0])) - gamma))
            assert np.allclose(after[1:], before[1:], atol=1e-8)

        assert worst < 1e-9

    def test_order_one_equals_sm_nlms(self):
        """Test that SM-AP with P=1 and delta=0 reproduces SM-NLMS exactly."""
        rng = np.random.default_rng(3)
        M = 8
        w0 = complex_vector(rng, M)
        nlms_state = ReceiverWeights(w0)
        ap_state = ReceiverWeights(w0)
        window = ApState.empty(M, 1, delta=0.0)

        deviation = 0.0
        for _ in range(10000):
            r = complex_vector(rng, M)
            b = rng.choice([-1.0, 1.0])
            first = sm_nlms_update(nlms_state, r, b, 0.3)
            window.push(r, b)
            second = sm_ap_update(ap_state, window, b, 0.3)
            assert first == second
            deviation = max(deviation, np.max(np.abs(nlms_state.w - ap_state.w)))

        assert deviation < 1e-12

    def test_singular_window(self):
        """Test that a repeated observation without regularisation is rejected."""
        rng = np.random.default_rng(4)
        r = complex_vector(rng, 6)
        window = ApState.empty(6, 2, delta=0.0)
        window.push(r, 1.0)
        window.push(r, 1.0)

        with pytest.raises(IllConditionedWindowError):
            sm_ap_update(ReceiverWeights(np.zeros(6)), window, 1.0, 0.0)

    def test_empty_window(self):
        """Test that an update on an empty window is refused."""
        with pytest.raises(ValueError):
            sm_ap_update(ReceiverWeights(np.zeros(4)), ApState.empty(4, 2), 1.0, 0.1)


    def test_orthogonal_two_column_window(self):
        """Test P=2 with orthogonal columns against the hand-solved normal equations."""
        r_old = np.array([0.0, 0.0, 2.0])
        r_new = np.array([1.0, 1j, 0.0])
        window = ApState.empty(3, 2, delta=0.0)
        window.push(r_old, -1.0)
        window.push(r_new, 1.0)
        state = ReceiverWeights(np.zeros(3))

        outcome = sm_ap_update(state, window, 1.0, 0.25)

        # mu = 0.75, Y^H Y = diag(2, 4): w = Y diag(1/2, 1/4) [0.75, 0] = 0.375 r_new
        assert outcome.updated
        assert np.allclose(state.w, [0.375, 0.375j, 0.0], atol=1e-15)
        Y = window.active()
        expected = Y @ np.linalg.solve(Y.conj().T @ Y, np.array([0.75, 0.0]))
        assert np.allclose(state.w, expected, atol=1e-15)
        assert abs(1.0 - np.vdot(state.w, r_new)) == pytest.approx(0.25)
        assert np.vdot(state.w, r_old) == 0

    def test_order_one_reports_nlms_step(self):
        """Test that a one-column window reports the same step as SM-NLMS."""
        r = np.array([2.0, 0.0])
        window = ApState.empty(2, 1, delta=0.0)
        window.push(r, 2.0)

        first = sm_nlms_update(ReceiverWeights(np.zeros(2)), r, 2.0, 1.0)
        second = sm_ap_update(ReceiverWeights(np.zeros(2)), window, 2.0, 1.0)

        assert first.step_or_lambda == pytest.approx(0.125)
        assert second == first

    def test_error_on_bound_is_not_an_update(self):
        """Test the tie-break |e| = gamma for SM-AP and BEACON."""
        window = ApState.empty(2, 2, delta=0.0)
        window.push(np.array([1.0, 0.0]), 1.0)
        state = ReceiverWeights(np.zeros(2))
        beacon = BeaconState.initial(np.zeros(2))

        assert not sm_ap_update(state, window, 1.0, 1.0).updated
        assert not beacon_update(beacon, np.array([1.0, 0.0]), 1.0, 1.0).updated


class TestBeacon:
    """Test cases for the BEACON update."""

    def test_bound_attainment(self):
        """Test that every BEACON update lands the a posteriori error on gamma."""
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(10000):
            M = 6
            A = complex_vector(rng, M * M).reshape(M, M)
            state = BeaconState(w=complex_vector(rng, M), P_mat=A @ A.conj().T + 0.1 * np.eye(M))
            r = complex_vector(rng, M)
            b = rng.choice([-1.0, 1.0])
            xi = abs(b - np.vdot(state.w, r))
            gamma = rng.uniform(0.05, 0.95) * xi

            outcome = beacon_update(state, r, b, gamma)
            assert outcome.updated
            assert outcome.step_or_lambda > 0
            worst = max(worst, abs(abs(posterior_error(state.w, r, b)) - gamma) / gamma)

        assert worst < 1e-9

    def test_innovation_check(self):
        """Test that no update happens inside the bound."""
        state = BeaconState.initial(np.array([1.0, 0.0]))
        outcome = beacon_update(state, np.array([1.0, 0.0]), 1.2, 0.5)

        assert not outcome.updated
        assert np.allclose(state.P_mat, 100 * np.eye(2))

    def test_p_stays_hermitian(self):
        """Test that P remains Hermitian over a stream of updates."""
        rng = np.random.default_rng(6)
        state = BeaconState.initial(np.zeros(5))
        for _ in range(30):
            beacon_update(state, complex_vector(rng, 5), rng.choice([-1.0, 1.0]), 0.5)

        assert state.hermitian_defect() == 0.0
        assert np.all(np.linalg.eigvalsh(state.P_mat) > 0)

    def test_zero_bound_with_error(self):
        """Test that gamma = 0 with a non-zero error is degenerate."""
        with pytest.raises(DegenerateInputError):
            beacon_update(BeaconState.initial(np.zeros(2)), np.array([1.0, 0.0]), 1.0, 0.0)

    def test_corrupted_p(self):
        """Test that a P matrix without positive curvature is reported."""
        state = BeaconState(w=np.zeros(2, dtype=complex), P_mat=np.zeros((2, 2), dtype=complex))
        with pytest.raises(StateCorruptionError):
            beacon_update(state, np.array([1.0, 0.0]), 1.0, 0.1)


class TestBaselines:
    """Test cases for NLMS, AP and RLS."""

    def test_nlms_always_updates(self):
        """Test that NLMS updates even when the error is tiny."""
        state = ReceiverWeights(np.array([1.0, 0.0]))
        outcome = nlms_update(state, np.array([1.0, 0.0]), 1.0 + 1e-9, mu=0.05)

        assert outcome.updated

    def test_order_one_ap_equals_nlms(self):
        """Test that AP with P=1 reproduces NLMS exactly."""
        rng = np.random.default_rng(7)
        M = 8
        w0 = complex_vector(rng, M)
        nlms_state = ReceiverWeights(w0)
        ap_state = ReceiverWeights(w0)
        window = ApState.empty(M, 1, delta=0.0)

        deviation = 0.0
        for _ in range(10000):
            r = complex_vector(rng, M)
            b = rng.choice([-1.0, 1.0])
            nlms_update(nlms_state, r, b, mu=0.05)
            window.push(r, b)
            ap_update(ap_state, window, b, mu=0.05)
            deviation = max(deviation, np.max(np.abs(nlms_state.w - ap_state.w)))

        assert deviation < 1e-12

    def test_ap_unit_step_solves_window(self):
        """Test that AP with mu=1 satisfies all window equations."""
        rng = np.random.default_rng(8)
        window = ApState.empty(8, 3, delta=0.0)
        for _ in range(3):
            window.push(complex_vector(rng, 8), rng.choice([-1.0, 1.0]))
        state = ReceiverWeights(np.zeros(8))
        ap_update(state, window, window.desired[0], mu=1.0)

        assert np.allclose(window.Y.conj().T @ state.w, np.conj(window.desired))

    def test_rls_identifies_linear_model(self):
        """Test that RLS recovers noiseless linear weights."""
        rng = np.random.default_rng(9)
        w_true = complex_vector(rng, 4)
        state = RlsState.initial(np.zeros(4), lam=0.99, epsilon=0.01)
        for _ in range(500):
            r = complex_vector(rng, 4)
            rls_update(state, r, np.vdot(w_true, r))

        assert np.linalg.norm(state.w - w_true) < 1e-3

    def test_rls_without_forgetting_is_least_squares(self):
        """Test RLS with lambda = 1 against the closed-form least-squares weights."""
        rng = np.random.default_rng(10)
        w_true = complex_vector(rng, 2)
        state = RlsState.initial(np.zeros(2), lam=1.0, epsilon=0.01)
        rows, targets = [], []
        for _ in range(500):
            r = complex_vector(rng, 2)
            b = np.vdot(w_true, r) + 0.1 * (rng.standard_normal() + 1j * rng.standard_normal())
            rls_update(state, r, b)
            rows.append(r.conj())
            targets.append(np.conj(b))

        w_ls, *_ = np.linalg.lstsq(np.array(rows), np.array(targets), rcond=None)
        assert np.linalg.norm(state.w - w_ls) < 1e-3


class TestDetection:
    """Test cases for hard decisions and initial weights."""

    def test_sign_decision(self):
        """Test the sign of the real part of w^H r."""
        assert detect(np.array([1.0]), np.array([-2.0 + 5j]))[0] == -1.0
        assert detect(np.array([1.0]), np.array([0.1 - 5j]))[0] == 1.0

    def test_zero_output_decides_plus_one(self):
        """Test the tie-break at z = 0."""
        decision, z = detect(np.zeros(3), np.ones(3))

        assert decision == 1.0
        assert z == 0

    def test_matched_filter_init(self):
        """Test that w0 = C h / N."""
        C = build_convolution_matrix(gold_family(5)[0], 3)
        h = np.array([1.0, 0.0, 0.0])
        w0 = matched_filter_init(C, h)

        assert np.allclose(w0 * 31, C.apply(h))
        assert np.vdot(w0, C.apply(h)).real == pytest.approx(1.0)


class TestFactory:
    """Test cases for make_filter and the receiver objects."""

    @pytest.mark.parametrize(
        "text, cls",
        [
            ("nlms", NlmsReceiver),
            ("sm-nlms:pdb", SmNlmsReceiver),
            ("ap", ApReceiver),
            ("sm-ap:pidb", ApReceiver),
            ("rls", RlsReceiver),
            ("beacon:fixed", BeaconReceiver),
        ],
    )
    def test_families(self, text, cls):
        """Test that each family maps to its receiver class."""
        receiver = make_filter(AlgorithmSpec.parse(text), np.zeros(4))

        assert isinstance(receiver, cls)
        assert receiver.weights.shape == (4,)

    def test_sm_ap_receiver_is_selective(self):
        """Test that SM-AP skips updates inside the bound while AP does not."""
        r = np.array([1.0, 0.0, 0.0])
        sm = make_filter(AlgorithmSpec.parse("sm-ap:fixed(P=2)"), np.array([1.0, 0.0, 0.0]))
        ap = make_filter(AlgorithmSpec.parse("ap(P=2)"), np.array([1.0, 0.0, 0.0]))

        assert not sm.update(r, 1.1, 0.5).updated
        assert ap.update(r, 1.1, 0.5).updated

    def test_reset(self):
        """Test that reset restores the initial weights."""
        receiver = make_filter(AlgorithmSpec.parse("rls"), np.zeros(3))
        receiver.update(np.array([1.0, 2.0, 0.5]), 1.0, 0.0)
        receiver.reset(np.ones(3))

        assert np.allclose(receiver.weights, 1.0)
