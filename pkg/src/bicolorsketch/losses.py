"""Training-loss formulas as pure numeric functions.

These are the least-squares adversarial terms, reconstruction distances,
the layer-normalized perceptual distance, the closed-form Gaussian KL color
term, and the shading losses, combined by the two weighted totals. No
autograd: the functions double as evaluation metrics and as a reference
kernel for any future trainer. Expectations are realized as arithmetic
means over the supplied arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .palette import ColorClusterStats
from .raster import InvalidArgumentError


@dataclass(frozen=True)
class LossWeights:
    adv: float = 1.0
    l1: float = 10.0
    perceptual: float = 10.0
    kl: float = 0.01
    rec: float = 100.0
    dense: float = 1.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value < 0:
                raise InvalidArgumentError(f"loss weight {name} must be >= 0")


def _as_array(x) -> np.ndarray:
    return np.asarray(getattr(x, "data", x), dtype=np.float64)


def lsgan_d_loss(real, fake) -> float:
    """Least-squares discriminator loss summed over scales.

    Per scale s: 1/2 mean[(real_s - 1)^2] + 1/2 mean[fake_s^2]; real patches
    are pushed toward 1 and synthesized ones toward 0.
    """
    if len(real) != len(fake) or len(real) < 1:
        raise InvalidArgumentError("need matching per-scale real/fake responses")
    total = 0.0
    for r, f in zip(real, fake):
        r = _as_array(r)
        f = _as_array(f)
        total += 0.5 * float(np.mean((r - 1.0) ** 2)) + 0.5 * float(np.mean(f ** 2))
    return total


def lsgan_g_loss(fake, scale: int = None) -> float:
    """Least-squares generator loss: mean[(fake_s - 1)^2] summed over scales.

    Pass ``scale`` to evaluate a single discriminator instead of the sum.
    """
    if len(fake) < 1:
        raise InvalidArgumentError("need at least one scale of responses")
    if scale is not None:
        if not 0 <= scale < len(fake):
            raise InvalidArgumentError(f"scale {scale} out of range")
        fake = [fake[scale]]
    return float(sum(np.mean((_as_array(f) - 1.0) ** 2) for f in fake))


def l1_loss(y, y_hat) -> float:
    a = _as_array(y)
    b = _as_array(y_hat)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a - b)))


def perceptual_loss(ref_stack, cand_stack) -> float:
    """Sum over layers of the element-count-normalized L1 feature distance.

    Each layer contributes (1/M_i) * sum|ref_i - cand_i| with M_i the number
    of elements, so deep narrow layers and wide shallow ones weigh equally.
    Feature extraction is the caller's job; the stacks are plain arrays.
    """
    if len(ref_stack) != len(cand_stack) or len(ref_stack) < 1:
        raise InvalidArgumentError("feature stacks must have matching layer counts")
    total = 0.0
    for ref, cand in zip(ref_stack, cand_stack):
        ref = _as_array(ref)
        cand = _as_array(cand)
        if ref.shape != cand.shape:
            raise InvalidArgumentError(
                f"feature layer shape mismatch: {ref.shape} vs {cand.shape}"
            )
        total += float(np.abs(ref - cand).sum()) / ref.size
    return total


def kl_color_loss(y_stats: ColorClusterStats, cand_stats: ColorClusterStats) -> float:
    """Closed-form KL divergence between matched per-cluster color Gaussians.

    Sum over clusters i of
      1/2 ( log |S_c| / |S_y| - n + tr(S_c^-1 S_y) + d^T S_c^-1 d ),
    with n = 3, d = mu_c - mu_y, S the covariances. Clusters are matched by
    index; compute candidate stats under the reference labeling (see
    ``palette.stats_from_labels``) so the pairing is inherent.
    """
    if y_stats.k != cand_stats.k:
        raise InvalidArgumentError(
            f"cluster count mismatch: {y_stats.k} vs {cand_stats.k}"
        )
    n = 3
    total = 0.0
    for i in range(y_stats.k):
        cov_y = y_stats.covs[i]
        cov_c = cand_stats.covs[i]
        try:
            chol_y = linalg.cholesky(cov_y, lower=True)
            chol_c = linalg.cholesky(cov_c, lower=True)
        except linalg.LinAlgError as exc:
            raise InvalidArgumentError(
                f"cluster {i} covariance not positive definite"
            ) from exc
        logdet_y = 2.0 * float(np.log(np.diag(chol_y)).sum())
        logdet_c = 2.0 * float(np.log(np.diag(chol_c)).sum())
        inv_c = linalg.cho_solve((chol_c, True), np.eye(n))
        d = cand_stats.means[i] - y_stats.means[i]
        total += 0.5 * (
            logdet_c - logdet_y - n + float(np.trace(inv_c @ cov_y)) + float(d @ inv_c @ d)
        )
    return total


def total_generator_loss(
    adv: float, l1: float, perceptual: float, kl: float, w: LossWeights = LossWeights()
) -> float:
    for name, v in (("adv", adv), ("l1", l1), ("perceptual", perceptual), ("kl", kl)):
        if not np.isfinite(v):
            raise InvalidArgumentError(f"{name} loss part is not finite")
    return w.adv * adv + w.l1 * l1 + w.perceptual * perceptual + w.kl * kl


def shading_rec_loss(image, reflectance, shading) -> float:
    """Mean |I - S*R|: distance between the photo and the re-shaded reflectance."""
    i = _as_array(image)
    r = _as_array(reflectance)
    s = _as_array(shading)
    if i.shape != r.shape or i.shape[:2] != s.shape:
        raise InvalidArgumentError("image, reflectance and shading sizes must match")
    return float(np.mean(np.abs(i - s[:, :, None] * r)))


def shading_dense_loss(shading) -> float:
    """Mean |S - 1|: the sparsity prior pulling shading toward identity."""
    return float(np.mean(np.abs(_as_array(shading) - 1.0)))


def total_shading_loss(rec: float, dense: float, w: LossWeights = LossWeights()) -> float:
    if not (np.isfinite(rec) and np.isfinite(dense)):
        raise InvalidArgumentError("loss parts must be finite")
    return w.rec * rec + w.dense * dense
