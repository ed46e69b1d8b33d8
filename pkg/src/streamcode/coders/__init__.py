"""Entropy coder families measured by the simulator.

Coder names accepted throughout the package and the CLI:

    shannon           fractional-bit ideal accounting, no concrete bitstream
    huffman-formula   integer accounting max(1, ceil(-log2 q)), no bitstream
    huffman-exact     per-position canonical Huffman code, concrete bits
    ac                streaming binary arithmetic coder (64-bit by default)
    rans-kN           block rANS with N tokens per block, e.g. rans-k16
    deflate           zlib stream with one sync flush per token
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CoderSpec:
    kind: str
    block_tokens: int = 1  # rANS only
    code_bits: int = 64  # arithmetic coder register width

    @property
    def name(self) -> str:
        if self.kind == "rans":
            return f"rans-k{self.block_tokens}"
        return self.kind


def parse_coder(name: str, code_bits: int = 64) -> CoderSpec:
    name = name.strip().lower()
    if name in ("shannon", "huffman-formula", "huffman-exact", "deflate"):
        return CoderSpec(name)
    if name == "ac":
        return CoderSpec("ac", code_bits=code_bits)
    if name.startswith("rans-k"):
        k = int(name[len("rans-k"):])
        if k < 1:
            raise ValueError(f"rANS block size must be >= 1, got {k}")
        return CoderSpec("rans", block_tokens=k)
    raise ValueError(f"unknown coder {name!r}")


DEFAULT_CODERS = (
    "shannon",
    "huffman-exact",
    "huffman-formula",
    "ac",
    "rans-k1",
    "rans-k4",
    "rans-k8",
    "rans-k16",
    "deflate",
)
