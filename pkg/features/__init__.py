"""
Auto-encoder feature extractors (AE, DAE, VAE) mapping image frames to latent codes.
"""

from .autoencoders import (
    CorruptionSpec,
    VaeSample,
    FeatureOutput,
    feature_param_shapes,
    init_feature_params,
    encode,
    reconstruct,
    ae_loss,
    dae_corrupt,
    kl_gaussian,
    vae_loss,
    extract_features,
)

__all__ = [
    "CorruptionSpec", "VaeSample", "FeatureOutput", "feature_param_shapes", "init_feature_params", "encode",
    "reconstruct", "ae_loss", "dae_corrupt", "kl_gaussian", "vae_loss", "extract_features",
]
