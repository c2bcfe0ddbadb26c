"""Zero-shot image denoising with a learned variance-stabilizing transform.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from noise2vst._core import (  # noqa: F401
    Denoiser,
    FormatError,
    IoError,
    Vst,
    __version__,
    convnet_denoiser,
    dct_denoiser,
    denoise,
    gat_forward,
    gat_inverse,
    gat_pipeline,
    gaussian_blur_denoiser,
    identity_denoiser,
    infer,
    load_image,
    psnr,
    save_image,
    save_npf,
    ssim,
    synthesize,
    train,
)

__all__ = [
    "Denoiser",
    "FormatError",
    "IoError",
    "Vst",
    "__version__",
    "convnet_denoiser",
    "dct_denoiser",
    "denoise",
    "gat_forward",
    "gat_inverse",
    "gat_pipeline",
    "gaussian_blur_denoiser",
    "identity_denoiser",
    "infer",
    "load_image",
    "psnr",
    "save_image",
    "save_npf",
    "ssim",
    "synthesize",
    "train",
]
