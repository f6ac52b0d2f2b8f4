"""Independent brute-force reference implementations used only by tests.

Everything here is written as plain loops with formulas re-derived inline,
deliberately sharing no code with the package, so agreement is evidence of
correctness rather than of common ancestry.
"""

import math

import numpy as np


def conv2d_naive(img, kernel, bias=None, padding="same"):
    """Quadruple-nested-loop cross-correlation with replicate or no padding."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 2:
        a = a[:, :, None]
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim == 2:
        k = k[None, None]
    out_ch, in_ch, kh, kw = k.shape
    h, w, _ = a.shape
    ph, pw = kh // 2, kw // 2
    if padding == "same":
        oh, ow = h, w
        off_r, off_c = -ph, -pw
    else:
        oh, ow = h - kh + 1, w - kw + 1
        off_r, off_c = 0, 0
    b = np.zeros(out_ch) if bias is None else np.broadcast_to(
        np.asarray(bias, dtype=np.float64), (out_ch,)
    )
    out = np.zeros((oh, ow, out_ch))
    for i in range(oh):
        for j in range(ow):
            for o in range(out_ch):
                acc = 0.0
                for c in range(in_ch):
                    for u in range(kh):
                        for v in range(kw):
                            r = min(max(i + off_r + u, 0), h - 1)
                            s = min(max(j + off_c + v, 0), w - 1)
                            acc += a[r, s, c] * k[o, c, u, v]
                out[i, j, o] = acc + b[o]
    if np.asarray(img).ndim == 2 and out_ch == 1:
        return out[:, :, 0]
    return out


def _keys_cubic(x):
    ax = abs(x)
    if ax <= 1.0:
        return 1.5 * ax**3 - 2.5 * ax**2 + 1.0
    if ax <= 2.0:
        return -0.5 * ax**3 + 2.5 * ax**2 - 4.0 * ax + 2.0
    return 0.0


def _axis_taps(in_len, out_idx, scale, antialias):
    """All (source index, weight) taps for one output coordinate."""
    u = (out_idx + 0.5) / scale - 0.5
    if antialias and scale < 1.0:
        support = 2.0 / scale
        kern = lambda t: scale * _keys_cubic(scale * t)
    else:
        support = 2.0
        kern = _keys_cubic
    lo = math.floor(u - support) - 1
    hi = math.ceil(u + support) + 1
    taps = []
    for m in range(lo, hi + 1):
        wgt = kern(u - m)
        if wgt != 0.0:
            taps.append((min(max(m, 0), in_len - 1), wgt))
    total = sum(w for _, w in taps)
    return [(m, w / total) for m, w in taps]


def bicubic_naive(img, scale_num, scale_den, antialias):
    """Per-output-pixel tap enumeration of the anti-aliased bicubic resize."""
    a = np.asarray(img, dtype=np.float64)
    two_d = a.ndim == 2
    if two_d:
        a = a[:, :, None]
    h, w, c = a.shape
    oh = (h * scale_num) // scale_den
    ow = (w * scale_num) // scale_den
    s = scale_num / scale_den
    out = np.zeros((oh, ow, c))
    for i in range(oh):
        row_taps = _axis_taps(h, i, s, antialias)
        for j in range(ow):
            col_taps = _axis_taps(w, j, s, antialias)
            for ch in range(c):
                acc = 0.0
                for m, wr in row_taps:
                    for n, wc in col_taps:
                        acc += wr * wc * a[m, n, ch]
                out[i, j, ch] = min(max(acc, 0.0), 1.0)
    return out[:, :, 0] if two_d else out


def sobel_naive(img):
    """Hand-applied 3x3 Sobel pair with replication, mean magnitude."""
    a = np.asarray(img, dtype=np.float64)
    h, w = a.shape
    gx_k = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
    gy_k = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]
    total = 0.0
    for i in range(h):
        for j in range(w):
            gx = gy = 0.0
            for u in range(3):
                for v in range(3):
                    r = min(max(i + u - 1, 0), h - 1)
                    s = min(max(j + v - 1, 0), w - 1)
                    gx += gx_k[u][v] * a[r, s]
                    gy += gy_k[u][v] * a[r, s]
            total += math.sqrt(gx * gx + gy * gy)
    return total / (h * w)


def mse_naive(a, b):
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    total = 0.0
    for p, q in zip(x, y):
        total += (p - q) ** 2
    return total / x.size


def psnr_naive(ref, test, border):
    r = np.asarray(ref, dtype=np.float64)
    t = np.asarray(test, dtype=np.float64)
    if border:
        r = r[border:-border, border:-border]
        t = t[border:-border, border:-border]
    err = mse_naive(r, t)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)


def ssim_naive(ref, test, border):
    """Direct SSIM formula with explicitly looped Gaussian-windowed moments."""
    r = np.asarray(ref, dtype=np.float64)
    t = np.asarray(test, dtype=np.float64)
    if border:
        r = r[border:-border, border:-border]
        t = t[border:-border, border:-border]
    size, sigma = 11, 1.5
    g = [math.exp(-((i - 5.0) ** 2) / (2 * sigma * sigma)) for i in range(size)]
    win = [[g[i] * g[j] for j in range(size)] for i in range(size)]
    norm = sum(sum(row) for row in win)
    win = [[v / norm for v in row] for row in win]
    c1, c2 = 0.01**2, 0.03**2
    h, w = r.shape
    vals = []
    for i in range(h - size + 1):
        for j in range(w - size + 1):
            mu1 = mu2 = e11 = e22 = e12 = 0.0
            for u in range(size):
                for v in range(size):
                    wt = win[u][v]
                    p = r[i + u, j + v]
                    q = t[i + u, j + v]
                    mu1 += wt * p
                    mu2 += wt * q
                    e11 += wt * p * p
                    e22 += wt * q * q
                    e12 += wt * p * q
            s11 = e11 - mu1 * mu1
            s22 = e22 - mu2 * mu2
            s12 = e12 - mu1 * mu2
            vals.append(
                ((2 * mu1 * mu2 + c1) * (2 * s12 + c2))
                / ((mu1 * mu1 + mu2 * mu2 + c1) * (s11 + s22 + c2))
            )
    return sum(vals) / len(vals)


def spearman(a, b):
    """Spearman rank correlation (no ties expected in practice)."""
    a = np.asarray(a)
    b = np.asarray(b)
    ra = np.empty(len(a))
    ra[np.argsort(a)] = np.arange(len(a))
    rb = np.empty(len(b))
    rb[np.argsort(b)] = np.arange(len(b))
    return float(np.corrcoef(ra, rb)[0, 1])
