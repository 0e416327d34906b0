"""Poisson image restoration with the l2-lp variational model."""

from ._pdeblur import (
    InputError,
    NumericError,
    SolverConfig,
    blur_psf,
    convolve,
    degrade,
    gaussian_psf,
    load_image,
    make_synthetic,
    motion_psf,
    psnr,
    run,
    save_image,
    snr,
    ssim,
)

_MODELS = {"our": SolverConfig.l2lp, "l2l1": SolverConfig.l2l1, "tv": SolverConfig.tv}


def denoise(observed, blur="none", model="our", lam=6.0, **overrides):
    """Restore `observed` with one of the three model presets.

    Keyword overrides are SolverConfig attributes (mu, p, gamma1, gamma3,
    eps_tol, max_iter, ...). gamma1 also sets gamma2.
    """
    if model not in _MODELS:
        raise ValueError(f"unknown model {model!r} (expected our, l2l1 or tv)")
    cfg = _MODELS[model](lam)
    for key, value in overrides.items():
        if not hasattr(cfg, key):
            raise ValueError(f"unknown solver parameter {key!r}")
        setattr(cfg, key, value)
        if key == "gamma1":
            cfg.gamma2 = value
    cfg.validate()
    return run(observed, blur_psf(blur), cfg)


__all__ = [
    "InputError",
    "NumericError",
    "SolverConfig",
    "blur_psf",
    "convolve",
    "degrade",
    "denoise",
    "gaussian_psf",
    "load_image",
    "make_synthetic",
    "motion_psf",
    "psnr",
    "run",
    "save_image",
    "snr",
    "ssim",
]
