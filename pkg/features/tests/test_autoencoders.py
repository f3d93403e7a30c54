"""
Tests for the AE / DAE / VAE feature extractors
"""
import math

import numpy as np
import pytest

import numcore as nc
from common.errors import DataError, NumericError, ShapeError
from features import (
    CorruptionSpec,
    ae_loss,
    dae_corrupt,
    encode,
    extract_features,
    feature_param_shapes,
    init_feature_params,
    kl_gaussian,
    reconstruct,
    vae_loss,
)
from numcore import Tensor, finite_difference_check

from .conftest import tiny_config


@pytest.mark.unit
class TestParameters:

    def test_all_names_carry_the_feature_prefix(self):
        for mode in ("ae", "dae", "vae", "none"):
            assert all(name.startswith("ae.") for name in feature_param_shapes(tiny_config(mode)))

    def test_no_decoder_without_an_ae_loss(self):
        names = feature_param_shapes(tiny_config("none"))
        assert not any(name.startswith("ae.dec.") for name in names)

    def test_vae_has_two_latent_heads(self):
        shapes = feature_param_shapes(tiny_config("vae"))
        assert shapes["ae.enc.w_mu"] == (8, 4)
        assert shapes["ae.enc.w_logvar"] == (8, 4)
        assert "ae.enc.w_z" not in shapes

    def test_decoder_output_matches_image_size(self):
        assert feature_param_shapes(tiny_config("ae"))["ae.dec.w_x"] == (8, 64)

    def test_learned_output_variance_adds_a_head(self):
        shapes = feature_param_shapes(tiny_config("vae", learn_output_variance=True))
        assert shapes["ae.dec.w_xlogvar"] == (8, 64)

    def test_biases_start_at_zero(self):
        params = init_feature_params(tiny_config("ae"), seed=1)
        assert not np.any(params["ae.enc.b1"].data)
        assert np.any(params["ae.enc.w1"].data)


@pytest.mark.unit
class TestEncode:

    def test_zero_weights_give_zero_code(self, frames, zero_params):
        config = tiny_config("ae")
        code, sample = encode(frames[0], zero_params(config), config)
        assert sample is None
        np.testing.assert_array_equal(code.data, np.zeros(4))

    def test_vae_with_zero_noise_samples_the_mean(self, frames):
        config = tiny_config("vae")
        params = init_feature_params(config, seed=2)
        code, sample = encode(frames, params, config, noise=np.zeros(4))
        np.testing.assert_array_equal(sample.z.data, sample.mu.data)
        np.testing.assert_array_equal(code.data, sample.mu.data)
        assert np.all(sample.sigma > 0)

    def test_vae_inference_is_deterministic(self, frames):
        config = tiny_config("vae")
        params = init_feature_params(config, seed=2)
        first, _ = encode(frames, params, config, seed=1)
        second, _ = encode(frames, params, config, seed=99)
        np.testing.assert_array_equal(first.data, second.data)

    def test_batch_shape(self, frames):
        config = tiny_config("dae")
        code, _ = encode(frames, init_feature_params(config, 0), config)
        assert code.shape == (3, 4)

    def test_wrong_length_rejected(self):
        config = tiny_config("ae")
        with pytest.raises(ShapeError):
            encode(np.zeros(63), init_feature_params(config, 0), config)

    def test_values_outside_unit_interval_rejected(self):
        config = tiny_config("ae")
        with pytest.raises(DataError):
            encode(np.full(64, 1.5), init_feature_params(config, 0), config)

    def test_gradient_reaches_encoder_through_the_sample(self, frames):
        config = tiny_config("vae")
        params = init_feature_params(config, seed=4)
        noise = nc.rng_for(0, "noise").standard_normal((3, 4))

        def loss(p):
            _, sample = encode(frames, p, config, noise=noise)
            return nc.sum(nc.mul(sample.z, sample.z))

        with nc.Tape() as tape:
            value = loss(params)
        grads = nc.backprop(value, tape, params)
        assert np.any(grads["ae.enc.w_logvar"])
        result = finite_difference_check(loss, params, names=["ae.enc.w_mu", "ae.enc.w_logvar"])
        assert result.max_rel_error < 1e-4


@pytest.mark.unit
class TestAeLoss:

    def test_identity_is_zero(self):
        assert ae_loss([0.3, 0.7], [0.3, 0.7]).item() == 0.0

    def test_hand_evaluated(self):
        assert ae_loss([1.0, 0.0], [0.0, 0.0]).item() == 1.0

    def test_symmetric(self):
        a, b = np.array([0.1, 0.9, 0.4]), np.array([0.5, 0.2, 0.0])
        assert ae_loss(a, b).item() == pytest.approx(ae_loss(b, a).item())

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            ae_loss([1.0, 0.0], [1.0])

    def test_batched_rows(self):
        out = ae_loss(np.zeros((2, 3)), np.ones((2, 3)))
        np.testing.assert_array_equal(out.data, [3.0, 3.0])


@pytest.mark.unit
class TestCorruption:

    def test_zero_mask_is_identity(self, frames):
        np.testing.assert_array_equal(dae_corrupt(frames, CorruptionSpec("mask", 0.0)), frames)

    def test_mask_fraction(self):
        x = np.ones(10 ** 6)
        out = dae_corrupt(x, CorruptionSpec("mask", 0.25, seed=3))
        assert abs((out == 0).mean() - 0.25) < 0.002

    def test_gaussian_stays_in_range(self, frames):
        out = dae_corrupt(frames, CorruptionSpec("gaussian", 0.5, seed=1))
        assert out.min() >= 0.0 and out.max() <= 1.0
        assert not np.array_equal(out, frames)

    def test_deterministic_per_seed(self, frames):
        spec = CorruptionSpec("mask", 0.3, seed=8)
        np.testing.assert_array_equal(dae_corrupt(frames, spec), dae_corrupt(frames, spec))

    @pytest.mark.parametrize("kind,strength", [("mask", 1.0), ("mask", -0.1), ("gaussian", -1.0), ("salt", 0.1)])
    def test_invalid_spec(self, kind, strength):
        with pytest.raises(ValueError):
            CorruptionSpec(kind, strength)

    def test_out_of_range_input(self):
        with pytest.raises(DataError):
            dae_corrupt(np.array([2.0]), CorruptionSpec())


@pytest.mark.unit
class TestKlGaussian:

    def test_prior_matches_posterior(self):
        assert kl_gaussian([0.0], [0.0]).item() == 0.0

    def test_unit_mean(self):
        assert kl_gaussian([1.0], [0.0]).item() == pytest.approx(0.5)

    def test_unit_logvar(self):
        assert kl_gaussian([0.0], [1.0]).item() == pytest.approx(0.5 * (math.e - 2.0))
        assert kl_gaussian([0.0], [1.0]).item() == pytest.approx(0.35914, abs=1e-5)

    def test_nonnegative_for_random_draws(self):
        rng = nc.rng_for(0, "kl-draws")
        mu = rng.uniform(-3, 3, size=(1000, 5))
        logvar = rng.uniform(-3, 3, size=(1000, 5))
        assert np.all(kl_gaussian(mu, logvar).data >= 0)

    def test_non_finite_rejected(self):
        with pytest.raises(NumericError):
            kl_gaussian([np.nan], [0.0])


@pytest.mark.unit
class TestVaeLoss:

    def test_perfect_reconstruction_at_the_prior_is_zero(self, zero_params):
        config = tiny_config("vae")
        x = np.linspace(0.0, 1.0, 64)
        params = zero_params(config)
        params["ae.dec.b_x"] = Tensor(x, name="ae.dec.b_x", requires_grad=True)
        assert vae_loss(x, params, config, noise=np.zeros(4)).item() == pytest.approx(0.0, abs=1e-15)

    def test_at_least_the_kl_term(self, frames):
        config = tiny_config("vae")
        params = init_feature_params(config, seed=5)
        noise = nc.rng_for(1, "eps").standard_normal((3, 4))
        _, sample = encode(frames, params, config, noise=noise)
        kl = nc.mean(kl_gaussian(sample.mu, sample.logvar)).item()
        assert vae_loss(frames, params, config, noise=noise).item() >= kl

    @pytest.mark.parametrize("bias", [-1e4, 1e4])
    def test_extreme_output_log_variance_is_clamped(self, frames, bias):
        config = tiny_config("vae", learn_output_variance=True)
        params = init_feature_params(config, seed=8)
        params["ae.dec.b_xlogvar"] = Tensor(np.full(64, bias), name="ae.dec.b_xlogvar", requires_grad=True)
        noise = np.zeros((3, 4))

        _, sample = encode(frames, params, config, noise=noise)
        _, x_logvar = reconstruct(sample.z, params, logvar_clamp=config.logvar_clamp)
        np.testing.assert_array_equal(x_logvar.data, np.sign(bias) * config.logvar_clamp)

        with nc.Tape() as tape:
            value = vae_loss(frames, params, config, noise=noise)
        assert np.isfinite(value.item())
        grads = nc.backprop(value, tape, params)
        assert all(np.all(np.isfinite(g)) for g in grads.values())
        assert not np.any(grads["ae.dec.b_xlogvar"])

    def test_rejects_non_vae_model(self, frames):
        config = tiny_config("ae")
        with pytest.raises(ShapeError):
            vae_loss(frames, init_feature_params(config, 0), config)

    @pytest.mark.gradcheck
    @pytest.mark.parametrize("learn_variance", [False, True])
    def test_gradients_match_finite_differences(self, frames, learn_variance):
        config = tiny_config("vae", learn_output_variance=learn_variance)
        params = init_feature_params(config, seed=6)
        noise = nc.rng_for(2, "eps").standard_normal((3, 4))
        result = finite_difference_check(lambda p: vae_loss(frames, p, config, noise=noise), params)
        assert result.max_rel_error < 1e-4


@pytest.mark.unit
class TestExtractFeatures:

    def test_none_mode_returns_features_only(self, frames):
        config = tiny_config("none")
        out = extract_features(frames, init_feature_params(config, 0), config)
        assert out.ae_loss is None
        assert out.ae_evaluations == 0
        assert out.features.shape == (3, 4)

    def test_ae_loss_is_nonnegative(self, frames):
        for mode in ("ae", "dae", "vae"):
            config = tiny_config(mode)
            out = extract_features(frames, init_feature_params(config, 1), config)
            assert out.ae_loss.item() >= 0
            assert out.ae_evaluations == 1

    def test_dae_without_corruption_equals_ae(self, frames):
        ae, dae = tiny_config("ae"), tiny_config("dae")
        params = init_feature_params(ae, seed=7)
        plain = extract_features(frames, params, ae, seed=3)
        denoise = extract_features(frames, params, dae, seed=3, corruption=CorruptionSpec("mask", 0.0))
        assert denoise.ae_loss.item() == plain.ae_loss.item()

    def test_dae_reconstructs_the_clean_input(self, frames):
        config = tiny_config("dae")
        params = init_feature_params(config, seed=7)
        spec = CorruptionSpec("mask", 0.5, seed=2)
        out = extract_features(frames, params, config, corruption=spec)

        corrupted = dae_corrupt(frames, spec, label="features")
        latent, _ = encode(corrupted, params, config)
        x_tilde, _ = reconstruct(latent, params)
        expected = nc.mean(ae_loss(frames, x_tilde)).item()
        assert out.ae_loss.item() == pytest.approx(expected, rel=1e-12)

    def test_dae_features_come_from_the_clean_input(self, frames):
        config = tiny_config("dae")
        params = init_feature_params(config, seed=7)
        clean, _ = encode(frames, params, config)
        out = extract_features(frames, params, config, corruption=CorruptionSpec("mask", 0.5, seed=2))
        np.testing.assert_array_equal(out.features.data, clean.data)

    def test_vae_features_are_the_posterior_mean(self, frames):
        config = tiny_config("vae")
        out = extract_features(frames, init_feature_params(config, 0), config)
        np.testing.assert_array_equal(out.features.data, out.sample.mu.data)
