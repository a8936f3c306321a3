#!/usr/bin/env python3
"""Regenerate the bundled test fixtures.

Host images are 512x512 8-bit grayscale photographs from scikit-image's
bundled sample data (all CC0 / public domain), written as binary PGM.
Payload logos are deterministic binary patterns written as PBM (P4).
"""
import numpy as np


def write_pgm(path, img):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.astype(np.uint8).tobytes())


def write_pbm(path, bits):
    h, w = bits.shape
    packed = np.packbits(bits.astype(np.uint8), axis=1)
    with open(path, "wb") as f:
        f.write(b"P4\n%d %d\n" % (w, h))
        f.write(packed.tobytes())


def hosts(outdir):
    import skimage.data as data
    for name in ["camera", "moon", "brick", "grass", "gravel"]:
        img = getattr(data, name)()
        assert img.shape == (512, 512) and img.dtype == np.uint8
        write_pgm(f"{outdir}/{name}.pgm", img)
        print(f"{outdir}/{name}.pgm")


def banner_logo():
    # 19x52 banner: block letters "WMK" with a 1px frame
    bits = np.zeros((19, 52), dtype=np.uint8)
    bits[0, :] = 1
    bits[-1, :] = 1
    bits[:, 0] = 1
    bits[:, -1] = 1
    glyphs = {
        "W": ["10001", "10001", "10001", "10101", "10101", "10101", "01010"],
        "M": ["10001", "11011", "10101", "10001", "10001", "10001", "10001"],
        "K": ["10010", "10100", "11000", "10100", "10010", "10001", "10001"],
    }
    x = 6
    for ch in "WMK":
        g = glyphs[ch]
        for r, row in enumerate(g):
            for c, v in enumerate(row):
                if v == "1":
                    bits[6 + r, x + c * 2] = 1
                    bits[6 + r, x + c * 2 + 1] = 1
        x += 14
    return bits


def ring_logo():
    # 64x64: concentric rings, ~40% ones
    y, x = np.mgrid[0:64, 0:64]
    r = np.hypot(x - 31.5, y - 31.5)
    return ((r % 12) < 5).astype(np.uint8)


if __name__ == "__main__":
    hosts("tests/fixtures/hosts")
    write_pbm("assets/logo_19x52.pbm", banner_logo())
    write_pbm("assets/logo_64x64.pbm", ring_logo())
    print("assets/logo_19x52.pbm")
    print("assets/logo_64x64.pbm")
