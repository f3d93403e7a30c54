"""
Tests for geometric augmentation and frame windows
"""
import numpy as np
import pytest

import numcore as nc
from datakit import (
    SignerStyle,
    TransformSpec,
    augment,
    augment_sequence,
    make_augmented_set,
    standard_transforms,
    synth_generate,
    window_frames,
)
from numcore import Tensor


def _square(size=64, lo=16, hi=48):
    frame = np.zeros((size, size))
    frame[lo:hi, lo:hi] = 1.0
    return frame


def _bbox_width(frame, threshold=0.5):
    cols = np.where((frame > threshold).any(axis=0))[0]
    return cols[-1] - cols[0] + 1


@pytest.mark.unit
class TestAugment:

    def test_identity_spec(self):
        frame = np.random.default_rng(0).uniform(size=(64, 64))
        np.testing.assert_allclose(augment(frame, TransformSpec()), frame, atol=1e-12)

    def test_zero_rotation_with_seed_is_identity(self):
        frame = _square()
        assert TransformSpec(max_rotation_deg=0.0, seed=5).sample() is None
        np.testing.assert_allclose(augment(frame, TransformSpec(max_rotation_deg=0.0, seed=5)), frame, atol=1e-12)

    def test_scale_shrinks_the_bounding_box(self):
        frame = _square()
        out = augment(frame, TransformSpec(scale=0.8))
        assert out.shape == (64, 64)
        ratio = _bbox_width(out) / _bbox_width(frame)
        assert abs(ratio - 0.8) < 0.07

    def test_shift_moves_mass_by_ten_pixels(self):
        frame = _square(lo=24, hi=40)
        out = augment(frame, TransformSpec(translate_px=10.0, seed=3))
        ys, xs = np.indices(frame.shape)
        before = np.array([(ys * frame).sum(), (xs * frame).sum()]) / frame.sum()
        after = np.array([(ys * out).sum(), (xs * out).sum()]) / out.sum()
        assert np.linalg.norm(after - before) == pytest.approx(10.0, abs=0.5)

    @pytest.mark.parametrize("spec", standard_transforms(seed=2))
    def test_output_stays_in_range(self, spec):
        frame = np.random.default_rng(1).uniform(size=(64, 64))
        out = augment(frame, spec, label="x")
        assert out.shape == (64, 64)
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_deterministic_per_label(self):
        spec = TransformSpec(max_rotation_deg=30.0, seed=4)
        frame = _square()
        np.testing.assert_array_equal(augment(frame, spec, "a"), augment(frame, spec, "a"))
        assert not np.array_equal(augment(frame, spec, "a"), augment(frame, spec, "b"))

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            TransformSpec(scale=0.0)
        with pytest.raises(ValueError):
            TransformSpec(translate_px=-1.0)


@pytest.mark.unit
class TestAugmentedSet:

    @pytest.fixture
    def sequences(self):
        style = SignerStyle.for_signer(1)
        return [synth_generate(w, style, 1, 0, seed=0, size=16) for w in ("AB", "CDE")]

    def test_sequence_keeps_label(self, sequences):
        out = augment_sequence(sequences[0], TransformSpec(scale=0.8))
        assert out.word == "AB" and len(out) == 2

    def test_reaches_the_requested_frame_count(self, sequences):
        out = make_augmented_set(sequences, n_frames=12, seed=0)
        assert sum(len(s) for s in out) >= 12
        assert [s.word for s in out] == ["AB", "CDE", "AB", "CDE", "AB"]

    def test_requires_sequences(self):
        with pytest.raises(ValueError):
            make_augmented_set([], n_frames=4, seed=0)


@pytest.mark.unit
class TestWindowFrames:

    @pytest.fixture
    def frames(self):
        # frame t is filled with the value t
        return np.repeat(np.arange(5.0)[:, None], 4, axis=1)

    def test_width_one_is_identity(self, frames):
        np.testing.assert_array_equal(window_frames(frames, 1), frames)

    def test_edge_replication(self, frames):
        out = window_frames(frames, 21)
        assert out.shape == (5, 84)
        first = out[0].reshape(21, 4)[:, 0]
        assert first.tolist() == [0.0] * 11 + [1.0, 2.0, 3.0, 4.0] + [4.0] * 6

    def test_center_is_the_frame(self, frames):
        out = window_frames(frames, 7).reshape(5, 7, 4)
        np.testing.assert_array_equal(out[:, 3, :], frames)

    def test_accepts_frame_sequences(self):
        seq = synth_generate("AB", SignerStyle.for_signer(1), 1, 0, seed=0, size=8)
        assert window_frames(seq, 3).shape == (2, 3 * 64)

    @pytest.mark.parametrize("w", [0, 2, 20])
    def test_even_or_empty_window(self, frames, w):
        with pytest.raises(ValueError):
            window_frames(frames, w)

    def test_tensor_windows_match_and_carry_gradients(self, frames):
        feats = Tensor(frames, name="feats", requires_grad=True)
        with nc.Tape() as tape:
            out = window_frames(feats, 5)
            loss = nc.sum(out)
        np.testing.assert_array_equal(out.data, window_frames(frames, 5))
        grad = nc.backprop(loss, tape, {"feats": feats})["feats"]
        # gradient counts how often each frame occurs across all windows
        np.testing.assert_array_equal(grad[:, 0], [6.0, 4.0, 5.0, 4.0, 6.0])
