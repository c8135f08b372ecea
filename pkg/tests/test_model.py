"""Model construction, validation, band structure, and the file format."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import mlz
from mlz.model import Violation

from conftest import random_canonical_spec


def two_state(g01=0.5, g10=None):
    coupling = np.zeros((2, 2), dtype=complex)
    coupling[0, 1] = g01
    coupling[1, 0] = np.conj(g01) if g10 is None else g10
    return mlz.ModelSpec(beta=[1.0, -1.0], alpha=[0.0, 0.0], coupling=coupling)


class TestValidate:
    def test_symmetric_real_coupling_is_clean(self):
        assert mlz.validate(two_state(0.5)) == []

    def test_broken_hermiticity_is_flagged(self):
        violations = mlz.validate(two_state(0.5, g10=0.4))
        assert len(violations) == 1
        v = violations[0]
        assert v.level == "error"
        assert "Hermitian" in v.message
        assert v.where == (0, 1)

    def test_intra_band_coupling_is_warning_level(self):
        spec = mlz.five_state_band()
        coupling = np.array(spec.coupling)
        coupling[0, 1] = 0.3
        coupling[1, 0] = 0.3
        violations = mlz.validate(spec.replace(coupling=coupling))
        assert [v.level for v in violations] == ["warning"]
        assert "non-canonical band coupling at (1,2)" in violations[0].message
        assert mlz.is_valid(spec.replace(coupling=coupling))
        assert not mlz.is_canonical(spec.replace(coupling=coupling))

    def test_nonzero_coupling_diagonal_rejected(self):
        coupling = np.zeros((2, 2), dtype=complex)
        coupling[0, 0] = 1.0
        spec = mlz.ModelSpec(beta=[1.0, -1.0], alpha=[0.0, 0.0],
                             coupling=coupling)
        assert any("diagonal" in v.message for v in mlz.validate(spec))

    def test_shape_mismatch_rejected(self):
        spec = mlz.ModelSpec(beta=[1.0, -1.0], alpha=[0.0],
                             coupling=np.zeros((2, 2)))
        assert not mlz.is_valid(spec)

    def test_near_parallel_slopes_warn(self):
        spec = mlz.ModelSpec.from_pairs([1.0, 1.0 + 1e-12], [0.0, 0.5],
                                        {(0, 1): 0.1})
        messages = [v.message for v in mlz.validate(spec)]
        assert any("exactly equal slopes" in m for m in messages)

    def test_presets_are_canonical(self):
        for name in mlz.PRESET_NAMES:
            assert mlz.is_canonical(mlz.preset_model(name)), name


class TestBands:
    def test_five_state_layout(self):
        got = mlz.bands(mlz.five_state_band())
        assert [(b.slope, b.members, b.kind) for b in got] == [
            (1.0, (0, 1, 2), mlz.BandKind.MAX_SLOPE),
            (0.0, (3,), mlz.BandKind.INTERIOR),
            (-0.8, (4,), mlz.BandKind.MIN_SLOPE),
        ]

    def test_four_state_layout(self):
        got = mlz.bands(mlz.four_state_band_gap(0.5))
        assert [(b.slope, b.members, b.kind) for b in got] == [
            (-1.0, (1, 0), mlz.BandKind.MIN_SLOPE),
            (1.0, (2,), mlz.BandKind.MAX_SLOPE),
            (0.5, (3,), mlz.BandKind.INTERIOR),
        ]

    def test_single_band(self):
        spec = mlz.ModelSpec.from_pairs([2.0, 2.0, 2.0], [0.0, 1.0, 2.0], {})
        got = mlz.bands(spec)
        assert len(got) == 1
        assert got[0].kind is mlz.BandKind.UNIQUE_SLOPE_ALL
        assert got[0].members == (0, 1, 2)

    def test_members_sorted_by_offset(self):
        spec = mlz.ModelSpec.from_pairs(
            [1.0, 1.0, -1.0], [0.7, -0.2, 0.0], {})
        band = mlz.bands(spec)[0]
        assert band.members == (1, 0)

    @given(st.data())
    @settings(max_examples=25, deadline=None)
    def test_bands_partition_every_state(self, data):
        seed = data.draw(st.integers(0, 10_000))
        spec = random_canonical_spec(np.random.default_rng(seed))
        got = mlz.bands(spec)
        seen = sorted(i for band in got for i in band.members)
        assert seen == list(range(spec.n))
        for band in got:
            offs = [spec.alpha[i] for i in band.members]
            assert offs == sorted(offs)

    def test_band_structure_survives_canonicalization(self):
        spec = mlz.five_state_band()
        coupling = np.array(spec.coupling)
        coupling[0, 1] = 0.2 + 0.1j
        coupling[1, 0] = 0.2 - 0.1j
        messy = spec.replace(coupling=coupling)
        canon, _ = mlz.canonicalize_bands(messy)
        assert [(b.slope, b.kind) for b in mlz.bands(canon)] \
            == [(b.slope, b.kind) for b in mlz.bands(messy)]


class TestClassifyTransition:
    def test_within_max_band_upward_is_counterintuitive(self):
        spec = mlz.five_state_band()
        assert mlz.classify_transition(spec, 0, 1) \
            is mlz.TransitionClass.COUNTERINTUITIVE
        assert mlz.classify_transition(spec, 0, 2) \
            is mlz.TransitionClass.COUNTERINTUITIVE
        assert mlz.classify_transition(spec, 1, 2) \
            is mlz.TransitionClass.COUNTERINTUITIVE

    def test_within_max_band_downward_is_intuitive(self):
        spec = mlz.five_state_band()
        assert mlz.classify_transition(spec, 2, 0) \
            is mlz.TransitionClass.WITHIN_BAND_INTUITIVE

    def test_min_band_gap_sign_flips_the_class(self):
        # Band slope -1 with offsets (0, -eps): downward moves are forbidden.
        assert mlz.classify_transition(mlz.four_state_band_gap(0.5), 0, 1) \
            is mlz.TransitionClass.COUNTERINTUITIVE
        assert mlz.classify_transition(mlz.four_state_band_gap(-0.5), 0, 1) \
            is mlz.TransitionClass.WITHIN_BAND_INTUITIVE

    def test_cross_band_is_regular(self):
        spec = mlz.five_state_band()
        assert mlz.classify_transition(spec, 0, 3) \
            is mlz.TransitionClass.REGULAR_CROSSING

    def test_equal_offsets_are_degenerate(self):
        spec = mlz.ModelSpec.from_pairs(
            [1.0, 1.0, -1.0], [0.2, 0.2, 0.0], {(0, 2): 0.1, (1, 2): 0.1})
        assert mlz.classify_transition(spec, 0, 1) \
            is mlz.TransitionClass.DEGENERATE

    def test_interior_band_is_unclassified(self):
        spec = mlz.ModelSpec.from_pairs(
            [1.0, 0.0, 0.0, -1.0], [0.0, 0.1, 0.3, 0.0],
            {(0, 3): 0.1})
        assert mlz.classify_transition(spec, 1, 2) \
            is mlz.TransitionClass.INTERIOR_BAND

    def test_same_state_rejected(self):
        with pytest.raises(ValueError):
            mlz.classify_transition(mlz.five_state_band(), 1, 1)

    def test_single_band_rejected(self):
        spec = mlz.ModelSpec.from_pairs([1.0, 1.0], [0.0, 1.0], {})
        with pytest.raises(ValueError, match="one slope"):
            mlz.classify_transition(spec, 0, 1)

    @given(st.data())
    @settings(max_examples=25, deadline=None)
    def test_antisymmetry_within_extreme_bands(self, data):
        seed = data.draw(st.integers(0, 10_000))
        spec = random_canonical_spec(np.random.default_rng(seed))
        for band in mlz.bands(spec):
            if band.kind not in (mlz.BandKind.MAX_SLOPE,
                                 mlz.BandKind.MIN_SLOPE):
                continue
            for m in band.members:
                for n in band.members:
                    if m == n or spec.alpha[m] == spec.alpha[n]:
                        continue
                    forward = mlz.classify_transition(spec, m, n)
                    backward = mlz.classify_transition(spec, n, m)
                    if forward is mlz.TransitionClass.COUNTERINTUITIVE:
                        assert backward \
                            is mlz.TransitionClass.WITHIN_BAND_INTUITIVE

    def test_hamiltonian_is_hermitian_at_sampled_times(self):
        spec = mlz.five_state_band()
        for t in (-500.0, -1.3, 0.0, 2.7, 500.0):
            h = spec.hamiltonian(t)
            np.testing.assert_array_equal(h, h.conj().T)


class TestCanonicalizeBands:
    def test_canonical_input_is_unchanged(self):
        spec = mlz.five_state_band()
        canon, transforms = mlz.canonicalize_bands(spec)
        assert canon == spec
        for tr in transforms:
            np.testing.assert_allclose(tr.matrix, np.eye(len(tr.members)),
                                       atol=1e-14)

    def test_two_state_band_splits_symmetrically(self):
        g = 0.35
        spec = mlz.ModelSpec.from_pairs(
            [1.0, 1.0, -1.0], [0.0, 0.0, 0.0],
            {(0, 1): g, (0, 2): 0.2, (1, 2): 0.1})
        canon, transforms = mlz.canonicalize_bands(spec)
        np.testing.assert_allclose(sorted(canon.alpha[:2]), [-g, g],
                                   atol=1e-14)
        assert canon.coupling[0, 1] == 0
        assert mlz.is_canonical(canon)
        assert len(transforms) == 1

    def test_unitarity_of_transforms(self):
        rng = np.random.default_rng(7)
        spec = random_canonical_spec(rng, band_layout=[3, 1, 2])
        coupling = np.array(spec.coupling)
        # Mess up the bands with random Hermitian intra-band terms.
        for band in mlz.bands(spec):
            for a in band.members:
                for b in band.members:
                    if a < b:
                        g = rng.normal() * 0.2 + 1j * rng.normal() * 0.2
                        coupling[a, b] = g
                        coupling[b, a] = np.conj(g)
        messy = spec.replace(coupling=coupling)
        canon, transforms = mlz.canonicalize_bands(messy)
        assert mlz.is_canonical(canon)
        v = mlz.full_unitary(messy.n, transforms)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(messy.n), atol=1e-12)
        # The rotation reproduces the full A matrix relation.
        a_old = np.diag(messy.alpha.astype(complex)) + messy.coupling
        a_new = np.diag(canon.alpha.astype(complex)) + canon.coupling
        np.testing.assert_allclose(v.conj().T @ a_old @ v, a_new, atol=1e-12)

    def test_idempotent_up_to_band_phases(self):
        rng = np.random.default_rng(11)
        spec = random_canonical_spec(rng, band_layout=[2, 1])
        coupling = np.array(spec.coupling)
        coupling[0, 1] = 0.3 - 0.4j
        coupling[1, 0] = 0.3 + 0.4j
        canon, _ = mlz.canonicalize_bands(spec.replace(coupling=coupling))
        again, transforms = mlz.canonicalize_bands(canon)
        np.testing.assert_allclose(again.alpha, canon.alpha, atol=1e-13)
        np.testing.assert_allclose(np.abs(again.coupling),
                                   np.abs(canon.coupling), atol=1e-13)
        for tr in transforms:
            # Diagonal phases only.
            off_diag = tr.matrix - np.diag(np.diag(tr.matrix))
            np.testing.assert_allclose(off_diag, 0, atol=1e-13)
            np.testing.assert_allclose(np.abs(np.diag(tr.matrix)), 1,
                                       atol=1e-13)

    def test_propagation_agrees_after_conjugation(self):
        # Band pair plus a third level crossing both; full-window lab-frame
        # propagators of the original and canonical specs must be related by
        # the returned unitary.
        g = 0.25
        spec = mlz.ModelSpec.from_pairs(
            [1.0, 1.0, -1.0], [0.1, -0.1, 0.0],
            {(0, 1): g, (0, 2): 0.3 + 0.1j, (1, 2): 0.2 - 0.2j})
        canon, transforms = mlz.canonicalize_bands(spec)
        v = mlz.full_unitary(spec.n, transforms)
        window = 8.0  # the identity holds for any window
        config = mlz.IntegratorConfig()

        s_canon = mlz.scattering_matrix(canon, window, config, workers=1)
        u_canon = mlz.lab_frame_amplitudes(canon, s_canon)
        # Independent route: the non-canonical original integrated with a
        # dense fixed-step lab-frame scheme.
        u_orig = _lab_frame_reference(spec, window)
        np.testing.assert_allclose(v.conj().T @ u_orig @ v, u_canon,
                                   atol=1e-8)
        np.testing.assert_allclose(np.abs(v.conj().T @ u_orig @ v) ** 2,
                                   np.abs(u_canon) ** 2, atol=1e-8)


def _lab_frame_reference(spec, window, steps_per_unit=6000):
    """Fixed-step RK4 on i dpsi/dt = H(t) psi, columns of the propagator."""
    n = spec.n
    steps = int(2 * window * steps_per_unit)
    h = 2.0 * window / steps
    u = np.eye(n, dtype=complex)

    def deriv(t, m):
        return -1j * (spec.hamiltonian(t) @ m)

    t = -window
    for _ in range(steps):
        k1 = deriv(t, u)
        k2 = deriv(t + 0.5 * h, u + 0.5 * h * k1)
        k3 = deriv(t + 0.5 * h, u + 0.5 * h * k2)
        k4 = deriv(t + h, u + h * k3)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return u


class TestModelFile:
    def test_round_trip_all_presets(self):
        for name in mlz.PRESET_NAMES:
            spec = mlz.preset_model(name)
            again = mlz.parse_model(mlz.format_model(spec))
            assert again == spec, name

    def test_parse_comments_and_blanks(self):
        text = """
        # demo model
        n 2

        beta 1 -1   # slopes
        alpha 0 0
        c 1 2 0.5 0  # coupling
        """
        spec = mlz.parse_model(text)
        assert spec == mlz.two_state()

    def test_conjugate_entry_is_implied(self):
        spec = mlz.parse_model("n 2\nbeta 1 -1\nalpha 0 0\nc 1 2 0.1 0.7\n")
        assert spec.coupling[0, 1] == 0.1 + 0.7j
        assert spec.coupling[1, 0] == 0.1 - 0.7j

    @pytest.mark.parametrize("text,fragment", [
        ("beta 1 -1\nalpha 0 0", "before 'n'"),
        ("n 2\nbeta 1\nalpha 0 0", "needs 2 values"),
        ("n 2\nbeta 1 -1\nalpha 0 0\nc 2 1 0.5 0", "i < j"),
        ("n 2\nbeta 1 -1\nalpha 0 0\nc 1 1 0.5 0", "i < j"),
        ("n 2\nbeta 1 -1\nalpha 0 0\nc 1 3 0.5 0", "out of range"),
        ("n 2\nbeta 1 -1\nalpha 0 0\nc 1 2 0.5 0\nc 1 2 0.5 0", "duplicate"),
        ("n 2\nn 2\nbeta 1 -1\nalpha 0 0", "duplicate 'n'"),
        ("n 2\nbeta 1 -1\nalpha 0 0\nq 1", "unknown directive"),
        ("n 2\nbeta 1 -1", "missing 'alpha'"),
        ("n 0\nbeta\nalpha", ">= 1"),
    ])
    def test_grammar_errors(self, text, fragment):
        with pytest.raises(mlz.ModelFormatError, match=fragment):
            mlz.parse_model(text)

    def test_full_precision_round_trip(self):
        spec = mlz.ModelSpec.from_pairs(
            [1 / 3, -2 / 7], [0.1, -0.37], {(0, 1): 0.123456789012345e-3 + 1e-17j})
        again = mlz.parse_model(mlz.format_model(spec))
        assert again == spec

    def test_load_model(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text(mlz.format_model(mlz.five_state_band()))
        assert mlz.load_model(path) == mlz.five_state_band()
