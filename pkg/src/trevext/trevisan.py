"""Trevisan's composition: one code-extractor bit per weak-design set.

Output bit i (0-based) applies the one-bit extractor to the seed bits at the
positions of design set S_{i+1} (1-based in the usual presentation), taken
in ascending index order; if the design's set size exceeds the code's seed
length t, only the first t of those bits are consumed.

For a fixed seed the whole map x -> Ext(x, y) is GF(2)-linear, so a seed can
be compiled once into m parity masks over the input bits
(:func:`seed_masks`); streaming with a reused seed runs entirely on those
masks and is verified bit-exact against :func:`extract` in the tests.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import BinaryIO, Optional

import numpy as np

from .bitfield import BitString
from .code_extractor import CodeSpec, extract_bit
from .errors import ParameterError
from .weak_design import WeakDesign


@dataclass(frozen=True)
class TrevisanInstance:
    design: WeakDesign
    code: CodeSpec
    params: object = None  # ExtractorParams from the calculator, if any

    def __post_init__(self):
        if self.design.t < self.code.t:
            raise ParameterError(
                f"design set size {self.design.t} < code seed length {self.code.t}"
            )

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def d(self) -> int:
        return self.design.d

    @property
    def m(self) -> int:
        return self.design.m


def _bit_seed(inst: TrevisanInstance, y: BitString, i: int) -> BitString:
    return y.substring(inst.design.sets[i]).prefix(inst.code.t)


def extract(inst: TrevisanInstance, x: BitString, y: BitString) -> BitString:
    """m output bits, bit i from the one-bit extractor on y_{S_{i+1}}."""
    if x.length != inst.n:
        raise ParameterError(f"input length {x.length} != n={inst.n}")
    if y.length != inst.d:
        raise ParameterError(f"seed length {y.length} != d={inst.d}")
    return BitString.from_bits(
        extract_bit(inst.code, x, _bit_seed(inst, y, i)) for i in range(inst.m)
    )


def seed_masks(inst: TrevisanInstance, y: BitString) -> list:
    """Compile a seed into m integer masks: output bit i = parity(x & mask_i).

    Uses the GF(2)-linearity of the code: <p_x(a), z> decomposes over the
    message symbols as sum_j <c_j, (M_a^T)^j z>, with M_a the multiply-by-a
    matrix on symbol bits.
    """
    if y.length != inst.d:
        raise ParameterError(f"seed length {y.length} != d={inst.d}")
    spec = inst.code
    f = spec.field()
    s, ell, n = spec.s, spec.ell, spec.n
    masks = []
    for i in range(inst.m):
        v = _bit_seed(inst, y, i)
        a = v.chunk(0, s)
        z = v.chunk(s, s)
        # transpose of multiply-by-a: row b holds the bits of a*x^b
        at = np.zeros((s, s), dtype=np.uint8)
        for b in range(s):
            col = f.mul(1 << b, a)
            for r in range(s):
                at[b, r] = (col >> r) & 1
        u = np.array([(z >> r) & 1 for r in range(s)], dtype=np.uint8)
        bits = np.zeros(n, dtype=np.uint8)  # indexed by integer bit position
        for j in range(ell):
            shift = n - (j + 1) * s
            if shift >= 0:
                bits[shift : shift + s] = u
            else:
                bits[: s + shift] = u[-shift:]
            if j + 1 < ell:
                u = (at @ u) & 1
        mask = int.from_bytes(np.packbits(bits[::-1]).tobytes(), "big") >> ((-n) % 8)
        masks.append(mask)
    return masks


def extract_with_masks(masks: list, x_value: int) -> int:
    """Output as an integer (bit 0 of the output = highest integer bit)."""
    out = 0
    for mask in masks:
        out = (out << 1) | ((x_value & mask).bit_count() & 1)
    return out


class CompiledMasks:
    """Masks packed into a (m, n/64) uint64 matrix for batch AND-parity."""

    def __init__(self, masks: list, n: int):
        self.m = len(masks)
        self.n = n
        self._words = (n + 63) // 64
        rows = [
            np.frombuffer(mask.to_bytes(self._words * 8, "little"), dtype=np.uint64)
            for mask in masks
        ]
        self._matrix = np.vstack(rows)

    def apply(self, x_value: int) -> int:
        xw = np.frombuffer(x_value.to_bytes(self._words * 8, "little"), dtype=np.uint64)
        par = (np.bitwise_count(self._matrix & xw).sum(axis=1) & 1).astype(np.uint8)
        packed = int.from_bytes(np.packbits(par).tobytes(), "big")
        return packed >> (8 * ((self.m + 7) // 8) - self.m)


@dataclass
class StreamReport:
    blocks: int = 0
    seed_reused: bool = False
    # with a reused public seed the per-block errors only compose by the
    # union bound; callers must budget blocks * epsilon
    joint_error_factor: int = 0


class _BitReader:
    """MSB-first bit reader over a binary stream."""

    def __init__(self, stream: BinaryIO):
        self._stream = stream
        self._buf = 0
        self._nbits = 0

    def read_bits(self, n: int) -> Optional[BitString]:
        """Next n bits; None at clean EOF.

        A zero sub-byte tail counts as byte padding; any other short tail is
        a short final block and raises.
        """
        while self._nbits < n:
            chunk = self._stream.read(65536)
            if not chunk:
                if self._nbits == 0 or (self._buf == 0 and self._nbits < 8):
                    return None
                raise ParameterError("short final block in input stream")
            self._buf = (self._buf << (8 * len(chunk))) | int.from_bytes(chunk, "big")
            self._nbits += 8 * len(chunk)
        self._nbits -= n
        v = self._buf >> self._nbits
        self._buf &= (1 << self._nbits) - 1
        return BitString(n, v)


class _BitWriter:
    """MSB-first bit packer; final partial byte is zero-padded on flush."""

    def __init__(self, stream: BinaryIO):
        self._stream = stream
        self._buf = 0
        self._nbits = 0

    def write(self, bits: BitString):
        self._buf = (self._buf << bits.length) | bits.value
        self._nbits += bits.length
        flushable = self._nbits - self._nbits % 8
        if flushable:
            keep = self._nbits - flushable
            self._stream.write((self._buf >> keep).to_bytes(flushable // 8, "big"))
            self._buf &= (1 << keep) - 1
            self._nbits = keep

    def flush(self):
        if self._nbits:
            pad = 8 - self._nbits
            self._stream.write((self._buf << pad).to_bytes(1, "big"))
            self._buf = 0
            self._nbits = 0


def extract_stream(
    inst: TrevisanInstance,
    source: BinaryIO,
    seed_source: BinaryIO,
    sink: BinaryIO,
    reuse_seed: bool = False,
) -> StreamReport:
    """Extract every n-bit block of `source`, writing m-bit outputs.

    With ``reuse_seed`` a single d-bit seed is read once, compiled to parity
    masks, and applied to every block; the report carries the union-bound
    error factor.  Otherwise d fresh seed bits are consumed per block.  A
    short final source block is an error; nothing is implicitly padded.
    """
    reader = _BitReader(source)
    seeds = _BitReader(seed_source)
    writer = _BitWriter(sink)
    report = StreamReport(seed_reused=reuse_seed)
    masks = None
    if reuse_seed:
        y = seeds.read_bits(inst.d)
        if y is None:
            raise ParameterError("seed source exhausted")
        masks = CompiledMasks(seed_masks(inst, y), inst.n)
    while True:
        x = reader.read_bits(inst.n)
        if x is None:
            break
        if reuse_seed:
            out = BitString(inst.m, masks.apply(x.value))
        else:
            y = seeds.read_bits(inst.d)
            if y is None:
                raise ParameterError("seed source exhausted")
            out = extract(inst, x, y)
        writer.write(out)
        report.blocks += 1
    writer.flush()
    report.joint_error_factor = report.blocks if reuse_seed else 1
    return report


def extract_bytes(
    inst: TrevisanInstance, data: bytes, seed: bytes, reuse_seed: bool = False
) -> tuple:
    """Convenience wrapper over extract_stream for in-memory buffers."""
    out = io.BytesIO()
    report = extract_stream(
        inst, io.BytesIO(data), io.BytesIO(seed), out, reuse_seed=reuse_seed
    )
    return out.getvalue(), report
