"""
AE / DAE / VAE feature extractors.

Encoder: two ReLU layers of hidden_units, then an affine map to the latent code (AE, DAE
and the end-to-end "none" mode) or to the two VAE heads mu_z and log sigma_z^2.
Decoder: two ReLU layers, then an affine map back to the image (x_tilde, or mu_x for the VAE).
All parameters live under the "ae." prefix. Frames are rows of an (S, image_dim) matrix.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

import numcore as nc
from common.config import ModelConfig
from common.errors import DataError, NumericError, ShapeError
from numcore import Tensor

logger = logging.getLogger(__name__)

Params = Mapping[str, Tensor]


@dataclass(frozen=True)
class CorruptionSpec:
    """DAE input corruption: masking (zero entries with probability strength) or additive gaussian noise."""
    kind: str = "mask"
    strength: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.kind == "mask":
            if not 0.0 <= self.strength < 1.0:
                raise ValueError(f"mask probability must be in [0, 1), got {self.strength}")
        elif self.kind == "gaussian":
            if self.strength < 0.0:
                raise ValueError(f"noise standard deviation must be >= 0, got {self.strength}")
        else:
            raise ValueError(f"unknown corruption kind {self.kind!r}")


@dataclass
class VaeSample:
    mu: Tensor
    logvar: Tensor
    z: Tensor

    @property
    def sigma(self) -> np.ndarray:
        return np.exp(0.5 * self.logvar.data)


@dataclass
class FeatureOutput:
    features: Tensor                 # latent codes fed to the sequence encoder
    ae_loss: Optional[Tensor]        # mean over frames of the auto-encoder loss; None in mode "none"
    sample: Optional[VaeSample] = None
    ae_evaluations: int = 0


def feature_param_shapes(config: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    """Encoder parameter shapes, plus the decoder when the mode has an AE loss."""
    d_x, h, d_z = config.image_dim, config.hidden_units, config.latent_dim
    shapes: Dict[str, Tuple[int, ...]] = {
        "ae.enc.w1": (d_x, h), "ae.enc.b1": (h,),
        "ae.enc.w2": (h, h), "ae.enc.b2": (h,),
    }
    if config.mode == "vae":
        shapes.update({
            "ae.enc.w_mu": (h, d_z), "ae.enc.b_mu": (d_z,),
            "ae.enc.w_logvar": (h, d_z), "ae.enc.b_logvar": (d_z,),
        })
    else:
        shapes.update({"ae.enc.w_z": (h, d_z), "ae.enc.b_z": (d_z,)})
    if config.has_ae_loss:
        shapes.update({
            "ae.dec.w1": (d_z, h), "ae.dec.b1": (h,),
            "ae.dec.w2": (h, h), "ae.dec.b2": (h,),
            "ae.dec.w_x": (h, d_x), "ae.dec.b_x": (d_x,),
        })
        if config.mode == "vae" and config.learn_output_variance:
            shapes.update({"ae.dec.w_xlogvar": (h, d_x), "ae.dec.b_xlogvar": (d_x,)})
    return shapes


def init_feature_params(config: ModelConfig, seed: int) -> Dict[str, Tensor]:
    """Xavier weights and zero biases."""
    return {
        name: nc.zeros(shape, name=name) if ".b" in name else nc.xavier_init(shape, seed, name=name)
        for name, shape in feature_param_shapes(config).items()
    }


def _as_frames(frames, config: ModelConfig) -> np.ndarray:
    x = np.asarray(frames.data if isinstance(frames, Tensor) else frames, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if x.ndim != 2 or x.shape[1] != config.image_dim:
        raise ShapeError(f"expected frames with {config.image_dim} entries, got shape {np.shape(frames)}")
    if not np.all(np.isfinite(x)) or x.min() < 0.0 or x.max() > 1.0:
        raise DataError("frame values must lie in [0, 1]")
    return x


def _mlp(x, params: Params, prefix: str, seed: int, training: bool, retain_p: float, label: str) -> Tensor:
    h = nc.relu(nc.add(nc.matmul(x, params[f"{prefix}.w1"]), params[f"{prefix}.b1"]))
    h = nc.dropout(h, retain_p, seed, training, label=f"{label}/{prefix}.h1")
    h = nc.relu(nc.add(nc.matmul(h, params[f"{prefix}.w2"]), params[f"{prefix}.b2"]))
    return nc.dropout(h, retain_p, seed, training, label=f"{label}/{prefix}.h2")


def _affine(h: Tensor, params: Params, w: str, b: str) -> Tensor:
    return nc.add(nc.matmul(h, params[w]), params[b])


def _encode_batch(x, params: Params, config: ModelConfig, seed: int, training: bool, retain_p: float,
                  label: str, noise: Optional[np.ndarray] = None) -> Tuple[Tensor, Optional[VaeSample]]:
    h = _mlp(x, params, "ae.enc", seed, training, retain_p, label)
    if config.mode != "vae":
        return _affine(h, params, "ae.enc.w_z", "ae.enc.b_z"), None
    mu = _affine(h, params, "ae.enc.w_mu", "ae.enc.b_mu")
    logvar = nc.clamp(_affine(h, params, "ae.enc.w_logvar", "ae.enc.b_logvar"),
                      -config.logvar_clamp, config.logvar_clamp)
    if noise is None:
        noise = nc.rng_for(seed, "vae.eps", label).standard_normal(mu.shape)
    noise = np.broadcast_to(np.asarray(noise, dtype=np.float64), mu.shape)
    z = nc.add(mu, nc.mul(nc.exp(nc.mul(logvar, 0.5)), noise))
    return mu, VaeSample(mu=mu, logvar=logvar, z=z)


def encode(frame, params: Params, config: ModelConfig, seed: int = 0, training: bool = False,
           retain_p: float = 1.0, noise: Optional[np.ndarray] = None,
           label: str = "encode") -> Tuple[Tensor, Optional[VaeSample]]:
    """
    Map frames to latent codes.

    Returns (latent code, VaeSample or None). For the VAE the latent code is mu_z; the
    sample z = mu_z + sigma_z * eps feeds the training loss. noise overrides eps.

    Raises:
        ShapeError: frame length differs from the configured image size.
        DataError: frame values outside [0, 1].
    """
    single = np.ndim(frame.data if isinstance(frame, Tensor) else frame) == 1
    x = _as_frames(frame, config)
    code, sample = _encode_batch(x, params, config, seed, training, retain_p, label, noise)
    if single:
        code = nc.lookup(code, 0)
        if sample is not None:
            sample = VaeSample(nc.lookup(sample.mu, 0), nc.lookup(sample.logvar, 0), nc.lookup(sample.z, 0))
    return code, sample


def reconstruct(z: Tensor, params: Params, seed: int = 0, training: bool = False, retain_p: float = 1.0,
                label: str = "decode", logvar_clamp: float = 8.0) -> Tuple[Tensor, Optional[Tensor]]:
    """
    Decoder: returns (x_tilde or mu_x, log sigma_x^2 when the output variance is learned).

    The learned log-variance is clamped to [-logvar_clamp, logvar_clamp] like the latent one.
    """
    h = _mlp(z, params, "ae.dec", seed, training, retain_p, label)
    x_tilde = _affine(h, params, "ae.dec.w_x", "ae.dec.b_x")
    x_logvar = None
    if "ae.dec.w_xlogvar" in params:
        x_logvar = nc.clamp(_affine(h, params, "ae.dec.w_xlogvar", "ae.dec.b_xlogvar"), -logvar_clamp, logvar_clamp)
    return x_tilde, x_logvar


def ae_loss(x, x_tilde) -> Tensor:
    """Squared Euclidean reconstruction error ||x - x_tilde||^2 (per row for batches)."""
    x, x_tilde = nc.constant(x), nc.constant(x_tilde)
    if x.shape != x_tilde.shape:
        raise ShapeError(f"ae_loss: length mismatch {x.shape} vs {x_tilde.shape}")
    diff = nc.sub(x, x_tilde)
    return nc.sum(nc.mul(diff, diff), axis=-1)


def dae_corrupt(x, spec: CorruptionSpec, label: str = "corrupt") -> np.ndarray:
    """
    Corrupt frames for the denoising auto-encoder.

    mask: each entry zeroed independently with probability spec.strength.
    gaussian: entries perturbed by N(0, strength^2) then clamped to [0, 1].
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise DataError("dae_corrupt expects values in [0, 1]")
    rng = nc.rng_for(spec.seed, "dae", spec.kind, label)
    if spec.kind == "mask":
        if spec.strength == 0.0:
            return x.copy()
        return np.where(rng.random(x.shape) < spec.strength, 0.0, x)
    if spec.strength == 0.0:
        return x.copy()
    return np.clip(x + rng.normal(0.0, spec.strength, size=x.shape), 0.0, 1.0)


def kl_gaussian(mu, logvar) -> Tensor:
    """
    KL(N(mu, sigma^2) || N(0, I)) = -1/2 * sum(1 + log sigma^2 - mu^2 - sigma^2), >= 0.

    Reduces over the last axis (one value per row for batches).
    """
    mu, logvar = nc.constant(mu), nc.constant(logvar)
    if mu.shape != logvar.shape:
        raise ShapeError(f"kl_gaussian: mu {mu.shape} and logvar {logvar.shape} differ")
    if not (np.all(np.isfinite(mu.data)) and np.all(np.isfinite(logvar.data))):
        raise NumericError("kl_gaussian inputs must be finite")
    inner = nc.sub(nc.sub(nc.add(logvar, 1.0), nc.mul(mu, mu)), nc.exp(logvar))
    return nc.mul(nc.sum(inner, axis=-1), -0.5)


def _gaussian_nll(x: Tensor, mu_x: Tensor, x_logvar: Optional[Tensor]) -> Tensor:
    """Reconstruction negative log-likelihood with the 1/2 log(2 pi) constant omitted."""
    diff = nc.sub(x, mu_x)
    sq = nc.mul(diff, diff)
    if x_logvar is None:
        return nc.mul(nc.sum(sq, axis=-1), 0.5)
    weighted = nc.add(x_logvar, nc.mul(sq, nc.exp(nc.neg(x_logvar))))
    return nc.mul(nc.sum(weighted, axis=-1), 0.5)


def vae_loss(x, params: Params, config: ModelConfig, seed: int = 0, training: bool = False,
             retain_p: float = 1.0, noise: Optional[np.ndarray] = None, label: str = "vae") -> Tensor:
    """
    KL term plus the reconstruction NLL from one reparameterized sample (L = 1).

    With unit output variance the reconstruction term is 1/2 ||x - mu_x||^2. Batches are
    averaged over frames.
    """
    frames = _as_frames(x, config)
    _, sample = _encode_batch(frames, params, config, seed, training, retain_p, label, noise)
    if sample is None:
        raise ShapeError("vae_loss needs a model configured with mode 'vae'")
    mu_x, x_logvar = reconstruct(sample.z, params, seed, training, retain_p, label, config.logvar_clamp)
    per_frame = nc.add(kl_gaussian(sample.mu, sample.logvar), _gaussian_nll(nc.constant(frames), mu_x, x_logvar))
    return nc.mean(per_frame)


def extract_features(frames, params: Params, config: ModelConfig, *, seed: int = 0, training: bool = False,
                     retain_p: float = 1.0, corruption: Optional[CorruptionSpec] = None,
                     compute_loss: bool = True, label: str = "features") -> FeatureOutput:
    """
    Latent codes for a frame sequence plus the mean per-frame auto-encoder loss.

    AE: ||x - dec(enc(x))||^2. DAE: ||x - dec(enc(corrupt(x)))||^2 against the clean x,
    with sequence features taken from the clean input. VAE: KL + reconstruction NLL, with
    mu_z as the sequence feature. Mode "none" returns features only.
    """
    x = _as_frames(frames, config)
    clean = nc.constant(x)
    codes, sample = _encode_batch(x, params, config, seed, training, retain_p, label)
    if not compute_loss or not config.has_ae_loss:
        return FeatureOutput(features=codes, ae_loss=None, sample=sample)

    if config.mode == "vae":
        mu_x, x_logvar = reconstruct(sample.z, params, seed, training, retain_p, label, config.logvar_clamp)
        per_frame = nc.add(kl_gaussian(sample.mu, sample.logvar), _gaussian_nll(clean, mu_x, x_logvar))
        return FeatureOutput(features=codes, ae_loss=nc.mean(per_frame), sample=sample, ae_evaluations=1)

    latent = codes
    if config.mode == "dae":
        spec = corruption or CorruptionSpec()
        corrupted = dae_corrupt(x, CorruptionSpec(spec.kind, spec.strength, spec.seed), label=label)
        if not np.array_equal(corrupted, x):
            latent, _ = _encode_batch(corrupted, params, config, seed, training, retain_p, label)
    x_tilde, _ = reconstruct(latent, params, seed, training, retain_p, label)
    return FeatureOutput(features=codes, ae_loss=nc.mean(ae_loss(clean, x_tilde)), ae_evaluations=1)
