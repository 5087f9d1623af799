"""Independent reference values for the unit and acceptance tests (numpy only)."""

import math

import numpy as np


def adam(grad_fn, w, lr, steps, b1=0.9, b2=0.999, eps=1e-8):
    m = v = 0.0
    for t in range(1, steps + 1):
        g = grad_fn(w)
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        w = w - lr * (m / (1 - b1**t)) / (math.sqrt(v / (1 - b2**t)) + eps)
    return w


def upsample_align_corners(src, h, w):
    sh, sw = src.shape
    out = np.zeros((h, w))
    for y in range(h):
        fy = y * (sh - 1) / (h - 1)
        y0 = int(math.floor(fy)); y1 = min(y0 + 1, sh - 1); ay = fy - y0
        for x in range(w):
            fx = x * (sw - 1) / (w - 1)
            x0 = int(math.floor(fx)); x1 = min(x0 + 1, sw - 1); ax = fx - x0
            out[y, x] = ((1 - ay) * ((1 - ax) * src[y0, x0] + ax * src[y0, x1])
                         + ay * ((1 - ax) * src[y1, x0] + ax * src[y1, x1]))
    return out


def jet(v):
    return tuple(int(math.floor(255 * min(max(1.5 - abs(4 * v - a), 0), 1) + 0.5)) for a in (3, 2, 1))


def densenet_channels(c0=16, blocks=3, layers=16, k=12, theta=0.5):
    seq = [c0]
    c = c0
    for b in range(blocks):
        c += layers * k
        seq.append(c)
        if b + 1 < blocks:
            c = int(math.floor(theta * c))
            seq.append(c)
    return seq


def densenet_trainable(c0=16, blocks=3, layers=16, k=12, theta=0.5, classes=7):
    total, c = c0 * 9, c0
    for b in range(blocks):
        for _ in range(layers):
            total += 2 * c + 4 * k * c + 2 * 4 * k + k * 4 * k * 9
            c += k
        if b + 1 < blocks:
            out = int(math.floor(theta * c))
            total += 2 * c + out * c
            c = out
    return total + 2 * c + c * classes


def main():
    print("adam one step g=0.3:", adam(lambda w: 0.3, 0.0, 0.05, 1))
    print("adam quadratic 200 steps from 1:", adam(lambda w: 2 * w, 1.0, 0.05, 200))
    print("upsample [[0,1],[2,3]] -> 3x3:\n", upsample_align_corners(np.array([[0.0, 1.0], [2.0, 3.0]]), 3, 3))
    print("jet(0), jet(0.5), jet(1):", jet(0.0), jet(0.5), jet(1.0))
    print("blend(255,255):", 0.4 * 255 + 0.5 * 255, "->", math.floor(0.4 * 255 + 0.5 * 255 + 0.5))
    print("blend(0,200):", 0.5 * 200)
    print("densenet channels:", densenet_channels())
    print("densenet trainable scalars (7 classes):", densenet_trainable())
    expw_train = [8309, 10576, 2471, 2494, 1272, 1250, 329]
    expw_test = [2077, 2644, 617, 623, 318, 312, 82]
    kept = [a + b for a, b in zip(expw_train, expw_test)]
    print("expw kept per class:", kept, "sum", sum(kept))
    print("floor(n/5):", [n // 5 for n in kept], "matches table:", [n // 5 for n in kept] == expw_test)
    print("round(n/5):", [round(n / 5) for n in kept], "matches table:", [round(n / 5) for n in kept] == expw_test)
    print("expw totals:", sum(expw_train), sum(expw_test))
    ferplus_train = [11000, 8326, 3807, 3660, 2535, 151, 636, 153]
    ferplus_test = [1219, 920, 429, 421, 287, 19, 88, 21]
    print("ferplus totals:", sum(ferplus_train), sum(ferplus_test))
    raf_train = [2524, 4772, 1290, 1982, 705, 717, 281]
    raf_test = [680, 1185, 329, 478, 162, 160, 74]
    print("rafdb totals:", sum(raf_train), sum(raf_test))
    # Classifier parameter count for the reduced plan [16,16]/[32,32], 3 classes, 64x64 input:
    # conv kernels + BN (gamma, beta) per conv, FC weights + bias.
    plan = [[16, 16], [32, 32]]
    cin, trainable = 1, 0
    for stage in plan:
        for c in stage:
            trainable += c * cin * 9 + 2 * c
            cin = c
    spatial = 64 // 2 ** len(plan)
    trainable += cin * spatial * spatial * 3 + 3
    print("reduced classifier trainable scalars:", trainable)


if __name__ == "__main__":
    main()
