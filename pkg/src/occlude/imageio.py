"""Binary PGM (P5) and PPM (P6) writers and readers, maxval 255."""

import numpy as np


def quantize(values):
    """Map [0, 1] floats to uint8 with ``floor(255 * v + 0.5)`` (half rounds up)."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    return np.floor(255.0 * v + 0.5).astype(np.uint8)


def encode_pgm(values):
    data = quantize(values)
    if data.ndim != 2:
        raise ValueError(f"PGM needs a 2-D map, got shape {data.shape}")
    h, w = data.shape
    return b"P5\n%d %d\n255\n" % (w, h) + data.tobytes()


def encode_ppm(image):
    data = quantize(image)
    if data.ndim != 3 or data.shape[2] != 3:
        raise ValueError(f"PPM needs an H x W x 3 image, got shape {data.shape}")
    h, w, _ = data.shape
    return b"P6\n%d %d\n255\n" % (w, h) + data.tobytes()


def write_pgm(path, values):
    with open(path, "wb") as f:
        f.write(encode_pgm(values))


def write_ppm(path, image):
    with open(path, "wb") as f:
        f.write(encode_ppm(image))


def _tokens(buf, count):
    # Header tokens are whitespace separated; '#' starts a comment line.
    out, pos = [], 0
    while len(out) < count:
        while buf[pos:pos + 1].isspace():
            pos += 1
        if buf[pos:pos + 1] == b"#":
            pos = buf.index(b"\n", pos) + 1
            continue
        start = pos
        while not buf[pos:pos + 1].isspace():
            pos += 1
        out.append(buf[start:pos])
    return out, pos + 1


def decode_pnm(buf):
    """Decode P5/P6 bytes into a uint8 array of shape (H, W) or (H, W, 3)."""
    (magic, w, h, maxval), offset = _tokens(buf, 4)
    if magic not in (b"P5", b"P6") or int(maxval) != 255:
        raise ValueError(f"unsupported PNM header {magic!r} maxval {maxval!r}")
    w, h = int(w), int(h)
    shape = (h, w) if magic == b"P5" else (h, w, 3)
    data = np.frombuffer(buf, dtype=np.uint8, count=int(np.prod(shape)), offset=offset)
    return data.reshape(shape)


def read_pnm(path):
    with open(path, "rb") as f:
        return decode_pnm(f.read())
