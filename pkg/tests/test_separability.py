"""Tests for the two-qubit Peres-Horodecki classifier and witness values."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wbcast.registers import DensityMatrix, QubitLabel, StateVector, partial_trace
from wbcast.separability import (
    ENTANGLED,
    SEPARABLE,
    PairVerdict,
    negativity,
    ppt_verdict,
    w_determinants,
)

from oracles import (
    min_pt_eigenvalue,
    partial_transpose_second,
    random_product_mixture,
    random_two_qubit_dm,
    random_unitary,
)

D = QubitLabel.data
LABELS = (D(1), D(2))


def _dm(matrix) -> DensityMatrix:
    return DensityMatrix(LABELS, np.asarray(matrix, dtype=complex))


def _bell_dm() -> DensityMatrix:
    amps = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    return _dm(np.outer(amps, amps.conj()))


class TestKnownStates:
    def test_product_basis_state(self):
        v = ppt_verdict(_dm(np.diag([1.0, 0, 0, 0])))
        assert v.classification == SEPARABLE
        assert v.negativity == 0.0
        assert v.min_pt_eigenvalue == pytest.approx(0.0, abs=1e-12)
        assert v.w3 == pytest.approx(0.0, abs=1e-12)
        assert v.w4 == pytest.approx(0.0, abs=1e-12)

    def test_bell_state(self):
        v = ppt_verdict(_bell_dm())
        assert v.classification == ENTANGLED
        assert v.min_pt_eigenvalue == pytest.approx(-0.5, abs=1e-12)
        assert v.negativity == pytest.approx(0.5, abs=1e-12)
        # PT spectrum is {-1/2, 1/2, 1/2, 1/2}: W4 = -1/16, W3 = 1/8 * 1/2... =
        # product of the three eigenvalues of the leading minor; just check W4.
        assert v.w4 == pytest.approx(-1 / 16, abs=1e-12)
        assert v.w4 < 0

    def test_maximally_mixed(self):
        v = ppt_verdict(_dm(np.eye(4) / 4))
        assert v.classification == SEPARABLE
        assert v.min_pt_eigenvalue == pytest.approx(0.25, abs=1e-12)
        assert v.w3 == pytest.approx((1 / 4) ** 3, abs=1e-15)
        assert v.w4 == pytest.approx((1 / 4) ** 4, abs=1e-15)

    def test_werner_family(self):
        # w * |Phi+><Phi+| + (1-w)/4 * I: entangled exactly for w > 1/3, with
        # negativity max(0, (3w-1)/4).
        bell = _bell_dm().rho
        for w in np.linspace(0.0, 1.0, 21):
            rho = _dm(w * bell + (1 - w) * np.eye(4) / 4)
            v = ppt_verdict(rho)
            want_neg = max(0.0, (3 * w - 1) / 4)
            assert v.negativity == pytest.approx(want_neg, abs=1e-10)
            if w > 1 / 3 + 1e-6:
                assert v.classification == ENTANGLED
            elif w < 1 / 3 - 1e-6:
                assert v.classification == SEPARABLE


class TestAgainstBruteforce:
    def test_min_eigenvalue_matches_oracle(self):
        rng = np.random.default_rng(101)
        for _ in range(300):
            rho = random_two_qubit_dm(rng)
            v = ppt_verdict(_dm(rho))
            assert v.min_pt_eigenvalue == pytest.approx(
                min_pt_eigenvalue(rho), abs=1e-10
            )

    def test_w4_sign_equivalence(self):
        # For two qubits the PT has at most one negative eigenvalue, so
        # det(PT) < 0  <=>  min eigenvalue < 0  <=>  negativity > 0.
        rng = np.random.default_rng(102)
        samples = [random_two_qubit_dm(rng) for _ in range(200)]
        samples += [random_product_mixture(rng) for _ in range(100)]
        seen_entangled = seen_separable = 0
        for rho in samples:
            v = ppt_verdict(_dm(rho))
            if v.min_pt_eigenvalue < -1e-8:
                assert v.w4 < 0
                assert v.negativity > 0
                assert v.classification == ENTANGLED
                seen_entangled += 1
            elif v.min_pt_eigenvalue > 1e-8:
                assert v.w4 > 0
                assert v.negativity == 0.0
                assert v.classification == SEPARABLE
                seen_separable += 1
        # the sample must actually exercise both sides
        assert seen_entangled > 20
        assert seen_separable > 20

    def test_w_determinants_match_numpy_on_oracle_pt(self):
        rng = np.random.default_rng(103)
        for _ in range(50):
            rho = random_two_qubit_dm(rng)
            pt = partial_transpose_second(rho)
            w3, w4 = w_determinants(_dm(rho))
            assert w3 == pytest.approx(np.linalg.det(pt[:3, :3]).real, abs=1e-12)
            assert w4 == pytest.approx(np.linalg.det(pt).real, abs=1e-12)

    def test_product_mixtures_have_zero_negativity(self):
        rng = np.random.default_rng(104)
        for _ in range(100):
            rho = random_product_mixture(rng)
            v = ppt_verdict(_dm(rho))
            assert v.classification == SEPARABLE
            assert v.negativity == 0.0

    def test_invariant_under_local_unitaries(self):
        rng = np.random.default_rng(105)
        for _ in range(40):
            rho = random_two_qubit_dm(rng)
            u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
            rotated = u @ rho @ u.conj().T
            a = ppt_verdict(_dm(rho))
            b = ppt_verdict(_dm(rotated))
            assert b.min_pt_eigenvalue == pytest.approx(a.min_pt_eigenvalue, abs=1e-10)
            assert b.negativity == pytest.approx(a.negativity, abs=1e-10)
            assert b.classification == a.classification


class TestVerdictFields:
    def test_pair_defaults_to_state_labels(self):
        v = ppt_verdict(_bell_dm())
        assert v.pair == LABELS
        assert v.pair_key == "12"
        assert v.paper_claim is None
        assert v.agrees_with_paper is None

    def test_claim_agreement(self):
        v = ppt_verdict(_bell_dm(), paper_claim=ENTANGLED)
        assert v.agrees_with_paper is True
        v = ppt_verdict(_bell_dm(), paper_claim=SEPARABLE)
        assert v.agrees_with_paper is False

    def test_pair_in_report_order_not_storage_order(self):
        # e.g. published row "8,6": the verdict carries the report order while
        # the state itself stays in canonical storage order.
        rho = partial_trace(
            StateVector.basis((D(6), D(8)), "00"), {D(6), D(8)}
        )
        v = ppt_verdict(rho, pair=(D(8), D(6)), paper_claim=SEPARABLE)
        assert v.pair_key == "86"
        assert v.agrees_with_paper is True

    def test_is_frozen(self):
        v = ppt_verdict(_bell_dm())
        assert isinstance(v, PairVerdict)
        with pytest.raises(AttributeError):
            v.classification = SEPARABLE

    def test_errors(self):
        with pytest.raises(ValueError, match="two-qubit"):
            ppt_verdict(DensityMatrix((D(1),), np.eye(2) / 2))
        with pytest.raises(ValueError, match="claim"):
            ppt_verdict(_bell_dm(), paper_claim="MAYBE")
        with pytest.raises(ValueError, match="labels"):
            ppt_verdict(_bell_dm(), pair=(D(1), D(3)))
        with pytest.raises(ValueError, match="two-qubit"):
            negativity(DensityMatrix((D(1),), np.eye(2) / 2))
