"""
Tests for glyphs, synthetic sequences and the unlabeled pool
"""
import itertools

import numpy as np
import pytest
from skimage.transform import AffineTransform

from common.errors import DataError
from datakit import (
    FrameSequence,
    SignerStyle,
    finger_pattern,
    letter_glyph,
    make_unlabeled_pool,
    sequence_length,
    synth_generate,
    unlabeled_styles,
)
from datakit.synth import warp_frame


@pytest.fixture
def style():
    return SignerStyle.for_signer(1, seed=0)


@pytest.mark.unit
class TestGlyphs:

    def test_finger_patterns_are_distinct(self):
        patterns = [finger_pattern(i) for i in range(26)]
        assert len(set(patterns)) == 26

    def test_shape_and_range(self):
        glyph = letter_glyph(0)
        assert glyph.shape == (64, 64)
        assert glyph.min() >= 0.0 and glyph.max() <= 1.0

    def test_read_only(self):
        with pytest.raises(ValueError):
            letter_glyph(3)[0, 0] = 1.0

    def test_letters_are_far_apart(self):
        glyphs = [letter_glyph(i) for i in range(26)]
        closest = min(float(np.sum((a - b) ** 2)) for a, b in itertools.combinations(glyphs, 2))
        assert closest > 5.0

    @pytest.mark.parametrize("index,size", [(-1, 64), (31, 64), (0, 4)])
    def test_invalid_arguments(self, index, size):
        with pytest.raises(ValueError):
            letter_glyph(index, size)


@pytest.mark.unit
class TestSynthGenerate:

    def test_single_letter_length(self, style):
        assert len(synth_generate("A", style, 3, 0, seed=1)) == 3

    def test_length_formula(self, style):
        assert sequence_length(5, 4, 2) == 28
        seq = synth_generate("LIBYA", style, 4, 2, seed=1)
        assert len(seq) == 28
        assert seq.frames.shape == (28, 64, 64)
        assert seq.word == "LIBYA" and seq.signer == 1

    def test_values_in_unit_interval(self, style):
        seq = synth_generate("HELLO", style, 2, 1, seed=3)
        assert seq.frames.min() >= 0.0 and seq.frames.max() <= 1.0

    def test_deterministic(self, style):
        a = synth_generate("CAT", style, 2, 1, seed=9)
        b = synth_generate("CAT", style, 2, 1, seed=9)
        np.testing.assert_array_equal(a.frames, b.frames)

    def test_full_word_from_read_only_templates(self, style):
        assert not letter_glyph(11).flags.writeable
        seq = synth_generate("LIBYA", style, 4, 2, seed=0)
        assert len(seq) == 28
        assert not seq.frames.flags.writeable

    def test_warp_accepts_read_only_frames(self, style):
        frame = synth_generate("A", style, 1, 0, seed=0).frames[0]
        shifted = warp_frame(frame, AffineTransform(translation=(1.0, 0.0)))
        assert shifted.shape == frame.shape
        np.testing.assert_allclose(shifted[:, 1:], frame[:, :-1], atol=1e-12)

    def test_seed_changes_the_jitter(self, style):
        a = synth_generate("CAT", style, 2, 1, seed=9)
        b = synth_generate("CAT", style, 2, 1, seed=10)
        assert not np.array_equal(a.frames, b.frames)

    def test_flat_layout(self, style):
        seq = synth_generate("AB", style, 1, 0, seed=0, size=16)
        assert seq.flat().shape == (2, 256)

    @pytest.mark.parametrize("word", ["", "A1", "hello"])
    def test_invalid_words(self, style, word):
        with pytest.raises(DataError):
            synth_generate(word, style, 2, 1, seed=0)

    def test_frames_per_letter_validated(self, style):
        with pytest.raises(ValueError):
            synth_generate("A", style, 0, 1, seed=0)

    def test_signer_styles_differ(self):
        assert SignerStyle.for_signer(1) != SignerStyle.for_signer(2)
        assert SignerStyle.for_signer(1) == SignerStyle.for_signer(1)


@pytest.mark.unit
class TestFrameSequence:

    def test_rejects_out_of_range_values(self):
        with pytest.raises(DataError):
            FrameSequence(np.full((2, 8, 8), 1.5), signer=1, word="A")

    def test_rejects_too_few_frames(self):
        with pytest.raises(DataError):
            FrameSequence(np.zeros((1, 8, 8)), signer=1, word="AB")

    def test_frames_are_read_only(self):
        seq = FrameSequence(np.zeros((2, 8, 8)), signer=1, word="A")
        with pytest.raises(ValueError):
            seq.frames[0, 0, 0] = 1.0


@pytest.mark.unit
class TestUnlabeledPool:

    def test_exact_size(self):
        pool = make_unlabeled_pool(10, unlabeled_styles(2, first_signer=5), seed=1, size=16)
        assert pool.shape == (10, 16, 16)
        assert pool.min() >= 0.0 and pool.max() <= 1.0

    def test_deterministic(self):
        styles = unlabeled_styles(3, first_signer=5)
        np.testing.assert_array_equal(make_unlabeled_pool(6, styles, 2, size=16),
                                      make_unlabeled_pool(6, styles, 2, size=16))

    def test_styles_disjoint_from_labeled_signers(self):
        labeled = [SignerStyle.for_signer(s) for s in (1, 2, 3, 4)]
        styles = unlabeled_styles(3, first_signer=5)
        assert not {s.signer for s in styles} & {s.signer for s in labeled}
        with pytest.raises(DataError):
            make_unlabeled_pool(4, [SignerStyle.for_signer(2)], seed=0, labeled=labeled)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            make_unlabeled_pool(0, unlabeled_styles(1, 5), seed=0)
        with pytest.raises(ValueError):
            make_unlabeled_pool(3, [], seed=0)
