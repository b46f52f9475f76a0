"""Pure-numpy implementations of the hot kernels.

Same contracts as the compiled extension in ``_kernels.pyx``; this module is
the import-time fallback and the reference the benchmark compares against.
"""

import numpy as np

BACKEND = "python"


def hermite_function_table(kmax: int, x: np.ndarray) -> np.ndarray:
    """Table of normalized Hermite functions h_k(x), rows k = 0..kmax.

    Uses the three-term recurrence
        h_{k+1}(x) = sqrt(2/(k+1)) x h_k(x) - sqrt(k/(k+1)) h_{k-1}(x)
    run in the function domain, so every intermediate stays bounded and large
    |x| underflows gracefully to 0.

    Parameters
    ----------
    kmax : highest degree (>= 0).
    x : 1-D float64 array of evaluation points.

    Returns
    -------
    (kmax+1, len(x)) float64 array.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty((kmax + 1, x.size), dtype=np.float64)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if kmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(1, kmax):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * x * out[k] - np.sqrt(k / (k + 1.0)) * out[k - 1]
    return out


def greedy_ball_select(cand: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Greedy center selection with the symmetric third-radius separation rule.

    Scans candidates in order and keeps ``cand[i]`` iff for every already kept
    center ``c`` with radius ``r``:  ||cand[i] - c|| >= (radii[i] + r) / 3.
    That predicate makes the balls B(center, radius/3) pairwise disjoint by
    construction.

    Parameters
    ----------
    cand : (m, n) float64 array of candidate points (n = space dimension).
    radii : (m,) float64 array, radii[i] = density at cand[i].

    Returns
    -------
    int64 indices of the kept candidates, in selection order.
    """
    cand = np.ascontiguousarray(cand, dtype=np.float64)
    radii = np.ascontiguousarray(radii, dtype=np.float64)
    kept: list[int] = []
    kept_pts = np.empty((0, cand.shape[1]))
    kept_rad = np.empty(0)
    for i in range(cand.shape[0]):
        if kept:
            d = np.sqrt(((kept_pts - cand[i]) ** 2).sum(axis=1))
            if np.any(d < (kept_rad + radii[i]) / 3.0):
                continue
        kept.append(i)
        kept_pts = np.vstack([kept_pts, cand[i]])
        kept_rad = np.append(kept_rad, radii[i])
    return np.asarray(kept, dtype=np.int64)
