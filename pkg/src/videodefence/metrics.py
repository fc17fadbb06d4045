"""Mask precision/recall/F-measure and region-restricted PSNR."""
from __future__ import annotations

import math

import numpy as np

from .core import FenceMask, Frame, check_same_shape
from .errors import EmptyGroundTruth, EmptyRegion

PSNR_INFINITE = math.inf


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall, 0 when both vanish."""
    total = precision + recall
    return 0.0 if total == 0 else 2.0 * precision * recall / total


def mask_prf(predicted: FenceMask, ground_truth: FenceMask) -> tuple[float, float, float]:
    """Pixel-level ``(precision, recall, f_measure)`` of a fence prediction.

    Precision is 1.0 when nothing is predicted.
    """
    check_same_shape(predicted, ground_truth)
    pred, truth = predicted.bits, ground_truth.bits
    positives = int(truth.sum())
    if positives == 0:
        raise EmptyGroundTruth("ground truth mask has no fence pixels")
    tp = int(np.count_nonzero(pred & truth))
    predicted_count = int(pred.sum())
    precision = 1.0 if predicted_count == 0 else tp / predicted_count
    recall = tp / positives
    return precision, recall, f_measure(precision, recall)


def psnr(result: Frame, reference: Frame, region: FenceMask | None = None) -> float:
    """PSNR in dB with peak 1.0 over ``region`` (whole frame if None).

    Identical inputs give ``PSNR_INFINITE``.
    """
    check_same_shape(result, reference)
    diff = result.data - reference.data
    if region is not None:
        check_same_shape(result, region)
        if not region.bits.any():
            raise EmptyRegion("PSNR region is empty")
        diff = diff[region.bits]
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_INFINITE
    return 10.0 * math.log10(1.0 / mse)


def format_records(records) -> str:
    """One ``name value`` line per metric; infinity prints as ``inf``."""
    lines = []
    for name, value in records:
        text = "inf" if value == math.inf else f"{value:.6f}"
        lines.append(f"{name} {text}")
    return "\n".join(lines)
