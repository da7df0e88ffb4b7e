"""Image file I/O and color conversion for the CLI demos.

Grayscale images are float arrays in [0, 1]; color images are
RgbImage triples of such planes.  Loading scales integer samples by
the format's maximum value, saving clamps to [0, 1] and quantizes.

Formats: binary PGM (P5) and PPM (P6) are parsed directly at 8 or 16
bits per sample; PNG (8/16-bit grayscale, 8-bit RGB) goes through
Pillow.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PilImage

from .errors import CorruptFile, UnsupportedFormat
from .kernels import as_image

# BT.601 luma weights; the conventional choice where a spec of
# "luminance" does not pin one down.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass
class RgbImage:
    """Three same-shaped float planes with values in [0, 1]."""

    r: np.ndarray
    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.r = as_image(self.r)
        self.g = as_image(self.g)
        self.b = as_image(self.b)
        if not (self.r.shape == self.g.shape == self.b.shape):
            raise ValueError("RGB planes must share one shape")

    @property
    def shape(self):
        return self.r.shape


@dataclass
class FileInfo:
    """What kind of file an image came from, for format-preserving writes."""

    format: str  # "pgm", "ppm" or "png"
    bits: int  # 8 or 16
    color: bool


def luminance(rgb):
    """BT.601 luminance: 0.299 R + 0.587 G + 0.114 B per pixel."""
    wr, wg, wb = LUMA_WEIGHTS
    return wr * rgb.r + wg * rgb.g + wb * rgb.b


def _read_pnm_header(data, path):
    # Netpbm: tokens separated by whitespace, '#' comments run to EOL,
    # a single whitespace byte separates maxval from the raster.
    pos = 2
    tokens = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            if eol == -1:
                raise CorruptFile(f"{path}: unterminated comment in header")
            pos = eol + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise CorruptFile(f"{path}: truncated header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace byte before the raster
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptFile(f"{path}: non-numeric header field")
    if width < 1 or height < 1 or not (0 < maxval < 65536):
        raise CorruptFile(f"{path}: bad dimensions or maxval")
    return width, height, maxval, pos


def _load_pnm(path):
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormat(f"{path}: only binary PGM (P5) and PPM (P6) are supported")
    width, height, maxval, offset = _read_pnm_header(data, path)
    channels = 3 if magic == b"P6" else 1
    dtype = ">u2" if maxval > 255 else np.uint8
    count = width * height * channels
    raster = np.frombuffer(data, dtype=dtype, count=-1, offset=offset)
    if raster.size < count:
        raise CorruptFile(f"{path}: raster shorter than header promises")
    raster = raster[:count].astype(float) / maxval
    bits = 16 if maxval > 255 else 8
    if channels == 1:
        img = raster.reshape(height, width)
        return img, FileInfo("pgm", bits, False)
    planes = raster.reshape(height, width, 3)
    rgb = RgbImage(planes[:, :, 0], planes[:, :, 1], planes[:, :, 2])
    return rgb, FileInfo("ppm", bits, True)


def _load_png(path):
    try:
        with PilImage.open(path) as pil:
            pil.load()
            mode = pil.mode
            if mode in ("P", "RGBA", "LA", "CMYK"):
                pil = pil.convert("RGB")
                mode = "RGB"
            arr = np.asarray(pil)
    except (OSError, SyntaxError) as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    if mode == "L":
        return arr.astype(float) / 255.0, FileInfo("png", 8, False)
    if mode in ("I", "I;16"):
        return arr.astype(float) / 65535.0, FileInfo("png", 16, False)
    if mode == "RGB":
        planes = arr.astype(float) / 255.0
        rgb = RgbImage(planes[:, :, 0], planes[:, :, 1], planes[:, :, 2])
        return rgb, FileInfo("png", 8, True)
    raise UnsupportedFormat(f"{path}: PNG mode {mode} not supported")


def load_info(path):
    """Load an image plus a FileInfo describing how it was stored."""
    path = Path(path)
    if not path.exists():
        raise OSError(f"{path}: no such file")
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".ppm", ".pnm"):
        return _load_pnm(path)
    if suffix == ".png":
        return _load_png(path)
    raise UnsupportedFormat(f"{path}: unrecognized extension {suffix!r}")


def load(path):
    """Load an image file as a float array (gray) or RgbImage (color)."""
    return load_info(path)[0]


def _quantize(plane, maxval):
    return np.rint(np.clip(plane, 0.0, 1.0) * maxval)


def save(path, img, bits=8):
    """Write ``img`` to ``path``, inferring the format from the extension.

    Values are clamped to [0, 1] and quantized to ``bits`` (8 or 16)
    per sample.  Gray arrays go to .pgm or .png; RgbImage goes to .ppm
    or .png (RGB PNG is 8-bit only).
    """
    if bits not in (8, 16):
        raise ValueError(f"bits must be 8 or 16, got {bits}")
    path = Path(path)
    suffix = path.suffix.lower()
    maxval = 255 if bits == 8 else 65535
    color = isinstance(img, RgbImage)
    if not color:
        img = as_image(img)

    if suffix == ".pgm":
        if color:
            raise UnsupportedFormat("cannot write a color image to .pgm")
        _save_pnm(path, b"P5", [_quantize(img, maxval)], maxval)
    elif suffix == ".ppm":
        if not color:
            raise UnsupportedFormat("cannot write a grayscale image to .ppm")
        planes = [_quantize(c, maxval) for c in (img.r, img.g, img.b)]
        _save_pnm(path, b"P6", planes, maxval)
    elif suffix == ".png":
        _save_png(path, img, bits, maxval)
    else:
        raise UnsupportedFormat(f"{path}: unrecognized extension {suffix!r}")


def _save_pnm(path, magic, planes, maxval):
    height, width = planes[0].shape
    stacked = np.stack(planes, axis=-1) if len(planes) > 1 else planes[0]
    dtype = ">u2" if maxval > 255 else np.uint8
    raster = stacked.astype(dtype).tobytes()
    header = b"%s\n%d %d\n%d\n" % (magic, width, height, maxval)
    Path(path).write_bytes(header + raster)


def _save_png(path, img, bits, maxval):
    if isinstance(img, RgbImage):
        if bits != 8:
            raise UnsupportedFormat("RGB PNG output is 8-bit only")
        data = np.stack(
            [_quantize(c, 255).astype(np.uint8) for c in (img.r, img.g, img.b)],
            axis=-1,
        )
        PilImage.fromarray(data, mode="RGB").save(path)
    elif bits == 8:
        PilImage.fromarray(_quantize(img, 255).astype(np.uint8), mode="L").save(path)
    else:
        data = _quantize(img, 65535).astype(np.uint16)
        PilImage.fromarray(data, mode="I;16").save(path)
