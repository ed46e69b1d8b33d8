"""Per-token coders: ideal fractional accounting and Huffman codes.

Shannon accounting charges -log2 q(token) fractional bits and stands in for an
ideal coder with no algorithmic delay. The Huffman formula charges
max(1, ceil(-log2 q)) without building a code; the exact variant builds a
canonical Huffman code for every position's PMF and measures (and emits) real
codewords, which is where favorable integer rounding can beat the formula.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from ..errors import BitstreamError, ZeroFrequencyError
from ..predictor import QuantizedPmf
from ..util import ceil_neg_log2_ratio, neg_log2_ratio


@dataclass(frozen=True)
class CodedUnit:
    """One queueable unit: bit_count bits entering the channel at enqueue_time.

    bit_count is fractional only for Shannon accounting. `bits` carries the
    concrete codeword when the coder produces one.
    """

    token_index: int
    bit_count: Fraction | int
    enqueue_time: Fraction
    bits: str | None = None


def shannon_bits(pmf: QuantizedPmf, token: int) -> Fraction:
    f = pmf.freqs[token]
    if f == 0:
        raise ZeroFrequencyError(token, -1)
    return neg_log2_ratio(f, pmf.precision)


def huffman_formula_bits(pmf: QuantizedPmf, token: int) -> int:
    f = pmf.freqs[token]
    if f == 0:
        raise ZeroFrequencyError(token, -1)
    return max(1, ceil_neg_log2_ratio(f, pmf.precision))


class HuffmanCode:
    """Canonical Huffman code over the nonzero-frequency symbols of one PMF.

    Tree merges order by (weight, lowest contained token id) so construction is
    deterministic; codewords are then reassigned canonically (sorted by length,
    then id). A single coded symbol still costs one bit.
    """

    def __init__(self, pmf: QuantizedPmf):
        self.pmf = pmf
        self.lengths: dict[int, int] = {}
        alive = [(f, i, i) for i, f in enumerate(pmf.freqs) if f > 0]
        if not alive:
            raise ValueError("PMF has no coded symbols")
        if len(alive) == 1:
            self.lengths[alive[0][1]] = 1
        else:
            # heap items: (weight, min_id, tree); tree = token id or (l, r)
            heap = [(w, mid, tok) for (w, mid, tok) in alive]
            heapq.heapify(heap)
            while len(heap) > 1:
                w1, m1, t1 = heapq.heappop(heap)
                w2, m2, t2 = heapq.heappop(heap)
                heapq.heappush(heap, (w1 + w2, min(m1, m2), (t1, t2)))
            _, _, root = heap[0]
            stack = [(root, 0)]
            while stack:
                node, depth = stack.pop()
                if isinstance(node, tuple):
                    stack.append((node[0], depth + 1))
                    stack.append((node[1], depth + 1))
                else:
                    self.lengths[node] = depth

        symbols = sorted(self.lengths, key=lambda s: (self.lengths[s], s))
        self.codes: dict[int, str] = {}
        code = 0
        prev_len = self.lengths[symbols[0]]
        for s in symbols:
            code <<= self.lengths[s] - prev_len
            prev_len = self.lengths[s]
            self.codes[s] = format(code, f"0{prev_len}b")
            code += 1
        self._by_word = {(len(w), int(w, 2)): s for s, w in self.codes.items()}
        self._max_len = max(self.lengths.values())

    def encode(self, token: int) -> str:
        word = self.codes.get(token)
        if word is None:
            raise ZeroFrequencyError(token, -1)
        return word

    def decode_one(self, bits: str, start: int = 0) -> tuple[int, int]:
        """Read one codeword from bits[start:]; returns (token, next offset)."""
        acc = 0
        for n in range(1, self._max_len + 1):
            if start + n > len(bits):
                break
            acc = (acc << 1) | (bits[start + n - 1] == "1")
            sym = self._by_word.get((n, acc))
            if sym is not None:
                return sym, start + n
        raise BitstreamError("no codeword matches the bit prefix", start)

    def expected_length(self) -> Fraction:
        total = self.pmf.total
        return Fraction(
            sum(self.pmf.freqs[s] * l for s, l in self.lengths.items()), total
        )

    def kraft_sum(self) -> Fraction:
        return sum(Fraction(1, 1 << l) for l in self.lengths.values())


def encode_token_scalar(
    coder: str,
    pmf: QuantizedPmf,
    token: int,
    index: int,
    enqueue_time: Fraction,
    code: HuffmanCode | None = None,
) -> CodedUnit:
    """One token through a scalar coder; `code` lets callers reuse a table."""
    if coder == "shannon":
        return CodedUnit(index, shannon_bits(pmf, token), enqueue_time)
    if coder == "huffman-formula":
        return CodedUnit(index, huffman_formula_bits(pmf, token), enqueue_time)
    if coder == "huffman-exact":
        if code is None:
            code = HuffmanCode(pmf)
        word = code.encode(token)
        return CodedUnit(index, len(word), enqueue_time, bits=word)
    raise ValueError(f"not a scalar coder: {coder!r}")
