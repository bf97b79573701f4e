#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Grayscale image model, pattern parsing, PGM I/O and pixel transformations.

Images are square, with a power-of-two side, and hold gray levels 0-255 in row-major
order: pixel index ``i = row * side + col``, index 0 at the top-left corner.

A typical usage example would be:
>>> img = parse_pattern("pattern:1000")
>>> img.pixels
(255, 0, 0, 0)
>>> translate_cyclic(img, 1).pixels
(0, 255, 0, 0)
"""

import logging
import operator
import re
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, StrictInt, ValidationError, root_validator, validator

logger = logging.getLogger(__name__)

MAX_GRAY = 255

_WHITESPACE = b" \t\r\n\v\f"
_BITSTRING = re.compile(r"[01]+")


class ImageError(ValueError):
    """Base class for custom errors raised by this module."""


class PatternError(ImageError):
    """Raised when a pattern spec cannot be turned into an image."""


class PgmFormatError(ImageError):
    """Raised when PGM content is malformed or unsupported."""


def _is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def side_for_length(length: int) -> int:
    """Return the side of a square image holding ``length`` pixels.

    Raises:
        ImageError: if ``length`` is not the square of a power of two (side >= 2).
    """
    side = int(round(length**0.5))
    if side * side != length or side < 2 or not _is_power_of_two(side):
        raise ImageError(f"{length} pixels do not form a 2^n x 2^n image (n >= 1)")
    return side


class Image(BaseModel):
    """Square grayscale image.

    Attributes:
        side: number of pixels per row/column, a power of two >= 2.
        pixels: row-major gray levels, each in [0, 255].
    """

    side: int
    pixels: Tuple[StrictInt, ...]

    class Config:
        """Pydantic config."""

        frozen = True

    @validator("side")
    def validate_side(cls, side):  # noqa: N805  # pydantic wants 'cls' as first arg
        """Validate side."""
        if side < 2 or not _is_power_of_two(side):
            raise ValueError(f"side must be a power of two >= 2, got {side}")
        return side

    @validator("pixels")
    def validate_pixels(cls, pixels, values):  # noqa: N805
        """Validate pixel count and gray range."""
        side = values.get("side")
        if side is not None and len(pixels) != side * side:
            raise ValueError(f"expected {side * side} pixels, got {len(pixels)}")
        bad = [v for v in pixels if not 0 <= v <= MAX_GRAY]
        if bad:
            raise ValueError(f"gray values out of [0, {MAX_GRAY}]: {bad[:5]}")
        return tuple(pixels)

    @property
    def qubits_per_axis(self) -> int:
        """Return n, where side == 2**n."""
        return self.side.bit_length() - 1

    @property
    def size(self) -> int:
        """Return the number of pixels."""
        return self.side * self.side

    @property
    def is_binary(self) -> bool:
        """Whether every pixel is either black (0) or white (255)."""
        return all(v in (0, MAX_GRAY) for v in self.pixels)

    def as_array(self) -> np.ndarray:
        """Return the pixels as a flat int64 array."""
        return np.asarray(self.pixels, dtype=np.int64)


def make_image(pixels: Sequence[int]) -> Image:
    """Build an image from a flat pixel sequence, inferring the side.

    Raises:
        ImageError: on any image invariant violation.
    """
    try:
        values = [operator.index(v) for v in pixels]
    except TypeError as e:
        raise ImageError(f"gray levels must be integers: {e}") from e
    side = side_for_length(len(values))
    try:
        return Image(side=side, pixels=tuple(values))
    except ValidationError as e:
        raise ImageError(str(e)) from e


class PatternSpec(BaseModel):
    """Textual image description: exactly one of ``bitstring`` or ``graylist``.

    A bitstring maps '0' to black (0) and '1' to white (255); a graylist is a
    comma-separated list of gray levels.
    """

    bitstring: Optional[str] = None
    graylist: Optional[str] = None

    @root_validator
    def validate_one_of(cls, values):  # noqa: N805
        """Exactly one representation must be given."""
        if (values.get("bitstring") is None) == (values.get("graylist") is None):
            raise ValueError("exactly one of 'bitstring' or 'graylist' must be set")
        return values

    @validator("bitstring")
    def validate_bitstring(cls, bitstring):  # noqa: N805
        """Validate bitstring characters."""
        if bitstring is not None and not _BITSTRING.fullmatch(bitstring):
            raise ValueError(f"bitstring may only contain '0' and '1': {bitstring!r}")
        return bitstring

    @classmethod
    def from_text(cls, text: str) -> "PatternSpec":
        """Parse ``pattern:<bits>`` / ``graylist:<v,v,...>``; a bare bitstring is also accepted."""
        kind, sep, body = text.partition(":")
        try:
            if not sep:
                return cls(bitstring=text.strip())
            if kind == "pattern":
                return cls(bitstring=body.strip())
            if kind == "graylist":
                return cls(graylist=body.strip())
        except ValidationError as e:
            raise PatternError(f"invalid pattern {text!r}") from e
        raise PatternError(f"unknown pattern kind {kind!r} in {text!r}")


def parse_pattern(spec: Union[PatternSpec, str]) -> Image:
    """Turn a pattern spec into an image.

    Raises:
        PatternError: on a malformed token, an out-of-range gray value, or a length that is not
            the square of a power of two.
    """
    if isinstance(spec, str):
        spec = PatternSpec.from_text(spec)

    if spec.bitstring is not None:
        values = [MAX_GRAY if ch == "1" else 0 for ch in spec.bitstring]
    else:
        tokens = [t.strip() for t in (spec.graylist or "").split(",")]
        try:
            values = [int(t) for t in tokens]
        except ValueError as e:
            raise PatternError(f"malformed gray list {spec.graylist!r}") from e
        if any(not 0 <= v <= MAX_GRAY for v in values):
            raise PatternError(f"gray values must lie in [0, {MAX_GRAY}]: {spec.graylist!r}")

    try:
        return make_image(values)
    except ImageError as e:
        raise PatternError(str(e)) from e


class _PgmTokenizer:
    """Header tokenizer honouring '#' comments, as netpbm does."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.data):
            ch = self.data[self.pos : self.pos + 1]
            if ch == b"#":
                end = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if end < 0 else end + 1
            elif ch in _WHITESPACE:
                self.pos += 1
            else:
                break

    def next(self) -> bytes:
        self._skip()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in _WHITESPACE:
            self.pos += 1
        if start == self.pos:
            raise PgmFormatError("truncated PGM header")
        return self.data[start : self.pos]

    def next_int(self, what: str) -> int:
        token = self.next()
        try:
            return int(token)
        except ValueError as e:
            raise PgmFormatError(f"malformed {what}: {token!r}") from e


def read_pgm(data: bytes) -> Image:
    """Decode a P2 (ASCII) or P5 (binary) PGM with maxval 255.

    Raises:
        PgmFormatError: unsupported magic, maxval other than 255, non-square or
            non-power-of-two image, or truncated payload.
    """
    tokens = _PgmTokenizer(data)
    magic = tokens.next()
    if magic not in (b"P2", b"P5"):
        raise PgmFormatError(f"unsupported PGM magic {magic!r}")
    width = tokens.next_int("width")
    height = tokens.next_int("height")
    maxval = tokens.next_int("maxval")

    if maxval != MAX_GRAY:
        raise PgmFormatError(f"maxval must be {MAX_GRAY}, got {maxval}")
    if width != height:
        raise PgmFormatError(f"image must be square, got {width}x{height}")
    if width < 2 or not _is_power_of_two(width):
        raise PgmFormatError(f"side must be a power of two >= 2, got {width}")

    count = width * height
    if magic == b"P5":
        # A single whitespace byte separates the header from the raster.
        start = tokens.pos + 1
        payload = data[start : start + count]
        if len(payload) < count:
            raise PgmFormatError(f"truncated payload: expected {count} bytes, got {len(payload)}")
        values = np.frombuffer(payload, dtype=np.uint8).tolist()
    else:
        values = []
        for _ in range(count):
            try:
                values.append(tokens.next_int("pixel"))
            except PgmFormatError as e:
                raise PgmFormatError(
                    f"truncated payload: expected {count} values, got {len(values)}"
                ) from e
        if any(not 0 <= v <= MAX_GRAY for v in values):
            raise PgmFormatError("pixel value exceeds maxval")

    logger.debug("decoded %s PGM of side %d", magic.decode(), width)
    return Image(side=width, pixels=tuple(values))


def write_pgm(image: Image) -> bytes:
    """Encode an image as binary P5 PGM with maxval 255."""
    header = f"P5\n{image.side} {image.side}\n{MAX_GRAY}\n".encode("ascii")
    return header + bytes(image.pixels)


def load_pgm(path: Union[str, Path]) -> Image:
    """Read a PGM file from disk."""
    return read_pgm(Path(path).read_bytes())


def save_pgm(image: Image, path: Union[str, Path]) -> None:
    """Write an image to disk as binary PGM."""
    Path(path).write_bytes(write_pgm(image))


def load_image(arg: str) -> Image:
    """Resolve an image argument.

    Accepted forms are ``pattern:<bits>``, ``graylist:<v,...>``, a bare bitstring and a PGM
    path. Arguments made only of 0 and 1 are bitstrings, never file names.

    Raises:
        ImageError: if the pattern is invalid, or the file is missing or malformed.
    """
    if arg.startswith(("pattern:", "graylist:")) or _BITSTRING.fullmatch(arg):
        return parse_pattern(arg)
    path = Path(arg)
    if not path.is_file():
        raise ImageError(f"no such image file: {arg}")
    return load_pgm(path)


def _check_index(image: Image, index: int, what: str) -> None:
    if not 0 <= index < image.size:
        raise ImageError(f"{what} {index} out of range [0, {image.size})")


def set_pixel(image: Image, index: int, value: int) -> Image:
    """Return a copy of ``image`` with only ``pixels[index]`` replaced by ``value``."""
    _check_index(image, index, "pixel index")
    if not 0 <= value <= MAX_GRAY:
        raise ImageError(f"gray value {value} out of range [0, {MAX_GRAY}]")
    pixels = list(image.pixels)
    pixels[index] = value
    return Image(side=image.side, pixels=tuple(pixels))


def translate_cyclic(image: Image, shift: int) -> Image:
    """Shift pixels along the row-major order, wrapping around.

    Output pixel ``j`` is input pixel ``(j - shift) mod side**2``.
    """
    _check_index(image, shift, "shift")
    shifted = np.roll(image.as_array(), shift)
    return Image(side=image.side, pixels=tuple(int(v) for v in shifted))


def complement(image: Image) -> Image:
    """Exchange black and white: every gray level v becomes 255 - v."""
    return Image(side=image.side, pixels=tuple(MAX_GRAY - v for v in image.pixels))


def remap(image: Image, mapping: Mapping[int, int]) -> Image:
    """Replace gray levels according to ``mapping``; unmapped levels are kept."""
    for target in mapping.values():
        if not 0 <= target <= MAX_GRAY:
            raise ImageError(f"gray value {target} out of range [0, {MAX_GRAY}]")
    return Image(side=image.side, pixels=tuple(mapping.get(v, v) for v in image.pixels))


def binary_patterns(size: int = 4) -> Dict[str, Image]:
    """Return every binary image of ``size`` pixels keyed by its bitstring, in ascending order."""
    return {
        format(k, f"0{size}b"): parse_pattern(PatternSpec(bitstring=format(k, f"0{size}b")))
        for k in range(2**size)
    }
