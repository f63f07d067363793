"""Frame sources: numbered image directories and the raw-video pipe format.

A source spec is one of:
  * a directory of numbered images (``000.png`` ... ``NNN.png``/``.jpg``),
  * a path to a raw video file (sniffed by its ``HRZN`` magic),
  * ``-`` for a raw video on standard input.

Raw video layout: 16-byte header (magic ``HRZN``, then width, height and
frame count as little-endian u32), followed by width*height*3 RGB bytes per
frame, row-major.
"""

from __future__ import annotations

import re
import struct
import sys
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

import numpy as np

from .errors import FrameSourceError
from .preprocess import Frame

RAW_MAGIC = b"HRZN"
_NUMBERED = re.compile(r"^(\d+)\.(png|jpg|jpeg)$", re.IGNORECASE)


def _load_image(path: Path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as img:
        if img.mode == "L":
            return np.asarray(img, dtype=np.uint8)
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def iter_image_dir(directory: Path) -> Iterator[Frame]:
    """Frames from a directory of numbered images, in index order.

    Indices must be contiguous from the smallest one present; a gap raises
    FrameSourceError naming the missing index. An empty directory yields
    nothing.
    """
    entries: dict[int, Path] = {}
    for child in directory.iterdir():
        m = _NUMBERED.match(child.name)
        if not m:
            continue
        index = int(m.group(1))
        if index in entries:
            raise FrameSourceError(
                f"duplicate frame index {index}: {entries[index].name} and {child.name}"
            )
        entries[index] = child
    if not entries:
        return
    first = min(entries)
    for offset in range(len(entries)):
        index = first + offset
        if index not in entries:
            raise FrameSourceError(f"missing frame index {index} in {directory}")
    for index in sorted(entries):
        path = entries[index]
        try:
            pixels = _load_image(path)
        except OSError as exc:
            raise FrameSourceError(f"frame {index} ({path}): {exc}") from exc
        yield Frame(pixels=pixels, frame_index=index)


def read_raw_video(stream: BinaryIO) -> Iterator[Frame]:
    """Frames from an open raw-video stream (header already unread)."""
    header = stream.read(16)
    if len(header) < 16 or header[:4] != RAW_MAGIC:
        raise FrameSourceError("not a raw video stream (bad header)")
    width, height, count = struct.unpack("<III", header[4:16])
    if width == 0 or height == 0:
        raise FrameSourceError(f"invalid raw video dimensions {width}x{height}")
    frame_bytes = width * height * 3
    for index in range(count):
        buf = stream.read(frame_bytes)
        if len(buf) < frame_bytes:
            raise FrameSourceError(f"frame {index}: truncated (got {len(buf)}/{frame_bytes} bytes)")
        pixels = np.frombuffer(buf, dtype=np.uint8).reshape(height, width, 3)
        yield Frame(pixels=pixels.copy(), frame_index=index)


def write_raw_video(stream: BinaryIO, frames: Iterable[np.ndarray], width: int, height: int, count: int) -> None:
    """Write a raw video; each array must be (height, width, 3) uint8."""
    stream.write(RAW_MAGIC + struct.pack("<III", width, height, count))
    written = 0
    for pixels in frames:
        if pixels.shape != (height, width, 3) or pixels.dtype != np.uint8:
            raise FrameSourceError(
                f"frame {written}: expected {height}x{width}x3 uint8, got {pixels.shape} {pixels.dtype}"
            )
        stream.write(pixels.tobytes())
        written += 1
    if written != count:
        raise FrameSourceError(f"wrote {written} frames but header promised {count}")


def load_frames(source_spec: str) -> Iterator[Frame]:
    """Open a source spec (directory, raw file, or ``-``) as a frame stream."""
    if source_spec == "-":
        yield from read_raw_video(sys.stdin.buffer)
        return
    path = Path(source_spec)
    if path.is_dir():
        yield from iter_image_dir(path)
        return
    if path.is_file():
        with open(path, "rb") as fh:
            yield from read_raw_video(fh)
        return
    raise FrameSourceError(f"no such frame source: {source_spec}")
