"""Quality metrics comparing an estimated vector against a reference: absolute
and relative errors, ranking inversions, and top-k overlap."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass
class ErrorReport:
    max_abs: float
    l1_rel: float
    l2_rel: float
    e_rel: float
    inverted_pairs_pct: float
    topk_jaccard: dict

    def to_json_dict(self):
        return {
            "max_abs": self.max_abs,
            "l1_rel": self.l1_rel,
            "l2_rel": self.l2_rel,
            "e_rel": self.e_rel,
            "inverted_pairs_pct": self.inverted_pairs_pct,
            "topk_jaccard": {str(k): v for k, v in self.topk_jaccard.items()},
        }


def _merge_count(values):
    """Strict inversions (i < j with values[i] > values[j]) by merge sort."""
    n = len(values)
    if n <= 1:
        return values, 0
    mid = n // 2
    left, cl = _merge_count(values[:mid])
    right, cr = _merge_count(values[mid:])
    merged = []
    inv = cl + cr
    i = j = 0
    while i < len(left) and j < len(right):
        if right[j] < left[i]:
            inv += len(left) - i
            merged.append(right[j])
            j += 1
        else:
            merged.append(left[i])
            i += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, inv


def count_inverted_pairs(est, ref):
    """Pairs ranked strictly opposite by est and ref; ties count as agreement.

    Sorting by (ref, est) and counting strict est-inversions leaves ref-tied
    pairs in nondecreasing est order, so only strict-both-sides pairs remain.
    """
    order = np.lexsort((est, ref))
    _, inv = _merge_count(list(est[order]))
    return inv


def compare(est, ref, ks=(10, 100)):
    """Error report between an estimate and a reference of equal length.

    Top-k sets take the k smallest entries (the smallest diagonal values carry
    the highest electrical closeness).
    """
    est = np.asarray(est, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if est.shape != ref.shape or est.ndim != 1:
        raise ValueError(f"length mismatch: {est.shape} vs {ref.shape}")
    n = len(est)
    for k in ks:
        if k > n:
            raise ValueError(f"k={k} exceeds vector length {n}")

    diff = est - ref
    max_abs = float(np.abs(diff).max()) if n else 0.0
    l1_rel = float(np.abs(diff).sum() / np.abs(ref).sum())
    l2_rel = float(np.linalg.norm(diff) / np.linalg.norm(ref))

    nonzero = ref != 0
    if not nonzero.all():
        warnings.warn(f"e_rel skips {int((~nonzero).sum())} zero-reference entries",
                      stacklevel=2)
    ratios = np.abs(diff[nonzero]) / np.abs(ref[nonzero])
    if len(ratios) == 0 or np.any(ratios == 0.0):
        e_rel = 0.0
    else:
        e_rel = float(np.exp(np.mean(np.log(ratios))))

    pairs = n * (n - 1) // 2
    inverted_pct = 100.0 * count_inverted_pairs(est, ref) / pairs if pairs else 0.0

    topk = {}
    est_order = np.argsort(est, kind="stable")
    ref_order = np.argsort(ref, kind="stable")
    for k in ks:
        a = set(est_order[:k].tolist())
        b = set(ref_order[:k].tolist())
        topk[int(k)] = len(a & b) / len(a | b)

    return ErrorReport(max_abs=max_abs, l1_rel=l1_rel, l2_rel=l2_rel, e_rel=e_rel,
                       inverted_pairs_pct=inverted_pct, topk_jaccard=topk)
