#!/usr/bin/env python3
"""Independent reference implementation of the HoG and LBP descriptors.

Generates frozen expected values for the Rust test suite. Written as plain
loops from the pinned algorithm description, deliberately not mirroring the
Rust code structure, so the two implementations only agree if both implement
the same algorithm.
"""
import math


def make_image(h, w):
    phi = 0.6180339887498949
    data = [((i * phi) % 1.0) for i in range(h * w)]
    return h, w, data


def get(img, y, x):
    h, w, d = img
    y = max(0, min(h - 1, y))
    x = max(0, min(w - 1, x))
    return d[y * w + x]


def hog(img, orientations, cell, block):
    h, w, _ = img
    ch, cw = cell
    bh, bw = block
    ncy, ncx = h // ch, w // cw
    nby, nbx = ncy - bh + 1, ncx - bw + 1
    binw = 180.0 / orientations
    cells = [[0.0] * orientations for _ in range(ncy * ncx)]
    for y in range(ncy * ch):
        for x in range(ncx * cw):
            gx = get(img, y, x + 1) - get(img, y, x - 1)
            gy = get(img, y + 1, x) - get(img, y - 1, x)
            mag = math.sqrt(gx * gx + gy * gy)
            if mag == 0.0:
                continue
            theta = math.degrees(math.atan2(gy, gx))
            if theta < 0.0:
                theta += 180.0
            if theta >= 180.0:
                theta -= 180.0
            b = min(int(theta / binw), orientations - 1)
            cells[(y // ch) * ncx + (x // cw)][b] += mag
    out = []
    for by in range(nby):
        for bx in range(nbx):
            v = []
            for dy in range(bh):
                for dx in range(bw):
                    v.extend(cells[(by + dy) * ncx + (bx + dx)])
            norm = math.sqrt(sum(t * t for t in v) + 1e-6 * 1e-6)
            out.extend(t / norm for t in v)
    return out


def bilinear(img, y, x):
    y0, x0 = math.floor(y), math.floor(x)
    fy, fx = y - y0, x - x0
    v00 = get(img, y0, x0)
    v01 = get(img, y0, x0 + 1)
    v10 = get(img, y0 + 1, x0)
    v11 = get(img, y0 + 1, x0 + 1)
    return (v00 * (1 - fy) * (1 - fx) + v01 * (1 - fy) * fx
            + v10 * fy * (1 - fx) + v11 * fy * fx)


def lbp(img, method, points, radius):
    h, w, _ = img
    margin = math.ceil(radius)
    nbins = points + 2 if method == "uniform" else 16
    hist = [0.0] * nbins
    nvalid = 0
    for y in range(margin, h - margin):
        for x in range(margin, w - margin):
            c = get(img, y, x)
            nb = []
            for p in range(points):
                a = 2.0 * math.pi * p / points
                nb.append(bilinear(img, y - radius * math.sin(a), x + radius * math.cos(a)))
            if method == "uniform":
                bits = [1 if v >= c else 0 for v in nb]
                trans = sum(bits[i] != bits[(i + 1) % points] for i in range(points))
                b = sum(bits) if trans <= 2 else points + 1
            else:
                mean = sum(nb) / points
                var = sum((v - mean) ** 2 for v in nb) / points
                b = min(int(var / 0.25 * 16), 15)
            hist[b] += 1.0
            nvalid += 1
    return [v / nvalid for v in hist]


def emit(name, values):
    print(f"pub const {name}: &[f64] = &[")
    for i in range(0, len(values), 4):
        print("    " + ", ".join(repr(v) for v in values[i:i + 4]) + ",")
    print("];\n")


if __name__ == "__main__":
    im8 = make_image(8, 8)
    im12 = make_image(12, 12)
    im28 = make_image(28, 28)

    print("// Frozen oracle values generated by tools/feature_oracle.py.")
    print("// Test images use pixel(i) = (i * 0.6180339887498949) mod 1.\n")
    emit("IM8", im8[2])
    emit("HOG_IM8_O4_C2_B1", hog(im8, 4, (2, 2), (1, 1)))
    emit("HOG_IM8_O9_C4_B2", hog(im8, 9, (4, 4), (2, 2)))
    emit("HOG_IM28_DEFAULT", hog(im28, 9, (14, 14), (1, 1)))
    emit("LBP_IM8_UNIFORM_P4_R1", lbp(im8, "uniform", 4, 1.0))
    emit("LBP_IM8_UNIFORM_P8_R2", lbp(im8, "uniform", 8, 2.0))
    emit("LBP_IM8_VAR_P8_R2", lbp(im8, "var", 8, 2.0))
    emit("LBP_IM12_UNIFORM_P4_R3", lbp(im12, "uniform", 4, 3.0))
    emit("HOG_IM12_O6_C3_B2", hog(im12, 6, (3, 3), (2, 2)))
