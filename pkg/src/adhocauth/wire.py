"""Big-endian primitives shared by every frame codec.

Integers travel as a 4-byte length followed by the minimal big-endian
magnitude (zero is the empty magnitude). Byte strings use the same
4-byte length prefix.
"""

import struct

from .errors import MalformedFrame, TruncatedFrame

_U32 = struct.Struct(">I")
MAX_FIELD = 1 << 24


def int_to_bytes(value: int) -> bytes:
    if value < 0:
        raise ValueError("negative integers have no wire form")
    return value.to_bytes((value.bit_length() + 7) // 8, "big")


def encode_int(value: int) -> bytes:
    mag = int_to_bytes(value)
    return _U32.pack(len(mag)) + mag


def encode_bytes(data: bytes) -> bytes:
    return _U32.pack(len(data)) + data


def u32(value: int) -> bytes:
    return _U32.pack(value)


class Reader:
    """Cursor over a frame; every read is bounds-checked."""

    def __init__(self, data: bytes):
        self.data = bytes(data)
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise TruncatedFrame(f"need {n} bytes at offset {self.pos}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def byte(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]

    def bytes(self) -> bytes:
        n = self.u32()
        if n > MAX_FIELD:
            raise MalformedFrame(f"field length {n} exceeds limit")
        return self.take(n)

    def int(self) -> int:
        mag = self.bytes()
        if mag and mag[0] == 0:
            raise MalformedFrame("integer has a leading zero byte")
        return int.from_bytes(mag, "big")

    def remaining(self) -> int:
        return len(self.data) - self.pos

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise MalformedFrame(f"{self.remaining()} trailing bytes")
