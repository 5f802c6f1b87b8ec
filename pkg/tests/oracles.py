"""Brute-force reference computations, independent of the package code paths."""

import itertools

import numpy as np


def direct_convolution_magnitude(image, taps):
    """|sum_{s,t} img(y - t, x - s) k(t, s)| by explicit loops over every output pixel."""
    img = np.asarray(image, dtype=np.float64)
    H, W = img.shape
    h = taps.shape[0] // 2
    out = np.zeros((H, W), dtype=np.complex128)
    for y in range(H):
        for x in range(W):
            acc = 0j
            for t in range(-h, h + 1):
                yy = y - t
                if not 0 <= yy < H:
                    continue
                for s in range(-h, h + 1):
                    xx = x - s
                    if 0 <= xx < W:
                        acc += img[yy, xx] * taps[t + h, s + h]
            out[y, x] = acc
    return np.abs(out)


def direct_convolution_magnitude_fast(image, taps):
    """Same sum as above, vectorized over output pixels (shift-and-add)."""
    img = np.asarray(image, dtype=np.float64)
    H, W = img.shape
    h = taps.shape[0] // 2
    padded = np.zeros((H + 2 * h, W + 2 * h))
    padded[h:h + H, h:h + W] = img
    out = np.zeros((H, W), dtype=np.complex128)
    for t in range(-h, h + 1):
        for s in range(-h, h + 1):
            out += taps[t + h, s + h] * padded[h - t:h - t + H, h - s:h - s + W]
    return np.abs(out)


def sums_of_three_squares(r_max):
    found = set()
    for i, j, k in itertools.product(range(r_max + 1), repeat=3):
        q = i * i + j * j + k * k
        if 0 < q <= r_max * r_max:
            found.add(q)
    return sorted(found)


def nearest_seed_squared(pixels, levels, r_max):
    """Squared distance from every voxel of the (H, W, levels + 2 r_max) grid to the nearest seed."""
    H, W = pixels.shape
    D = levels + 2 * r_max
    seeds = np.array([(y, x, pixels[y, x] + r_max) for y in range(H) for x in range(W)])
    vox = np.stack(np.meshgrid(np.arange(H), np.arange(W), np.arange(D), indexing="ij"), -1).reshape(-1, 3)
    best = np.full(len(vox), np.iinfo(np.int64).max)
    for s in seeds:
        best = np.minimum(best, ((vox - s) ** 2).sum(axis=1))
    return best.reshape(H, W, D)


def union_of_spheres_counts(pixels, levels, r_max, squared_radii):
    """Voxels within each radius of some surface point, by marking sphere stencils."""
    H, W = pixels.shape
    D = levels + 2 * r_max
    counts = []
    for sq in squared_radii:
        mark = np.zeros((H, W, D), dtype=bool)
        rr = int(np.floor(np.sqrt(sq)))
        offs = [(dy, dx, dz) for dy in range(-rr, rr + 1) for dx in range(-rr, rr + 1)
                for dz in range(-rr, rr + 1) if dy * dy + dx * dx + dz * dz <= sq]
        ys, xs = np.mgrid[0:H, 0:W]
        ys, xs = ys.ravel(), xs.ravel()
        zs = pixels.ravel() + r_max
        for dy, dx, dz in offs:
            yy, xx, zz = ys + dy, xs + dx, zs + dz
            ok = (yy >= 0) & (yy < H) & (xx >= 0) & (xx < W)
            mark[yy[ok], xx[ok], zz[ok]] = True
        counts.append(int(mark.sum()))
    return np.array(counts)


def two_pass_covariance(channels):
    """Unbiased covariance of (K, H, W) channels: mean first, then centered products."""
    F = np.asarray(channels, dtype=np.float64).reshape(len(channels), -1)
    n = F.shape[1]
    mu = F.sum(axis=1) / n
    C = np.zeros((len(F), len(F)))
    for i in range(len(F)):
        for j in range(len(F)):
            C[i, j] = np.sum((F[i] - mu[i]) * (F[j] - mu[j])) / (n - 1)
    return C


def dense_cda(X, y, ridge_scale, k):
    """Explicit scatter loops, explicit inverse, dense non-symmetric eigensolver.

    Eigenvectors of inv(Sw) Sb, i.e. the left eigenvectors of Sb inv(Sw).
    """
    X = np.asarray(X, dtype=np.float64)
    p = X.shape[1]
    mean = X.mean(axis=0)
    Sw = np.zeros((p, p))
    Sb = np.zeros((p, p))
    for c in np.unique(y):
        Xc = X[y == c]
        mc = Xc.mean(axis=0)
        for row in Xc:
            Sw += np.outer(row - mc, row - mc)
        Sb += len(Xc) * np.outer(mc - mean, mc - mean)
    eps = ridge_scale * np.trace(Sw) / p
    M = np.linalg.inv(Sw + eps * np.eye(p)) @ Sb
    w, V = np.linalg.eig(M)
    order = np.argsort(-w.real)[:k]
    V = V[:, order].real.T
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    return w.real[order], V
