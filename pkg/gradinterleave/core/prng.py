"""
Portable pseudo-random stream.

The generator is xorshift64* seeded through one splitmix64 step, so any
language with 64-bit unsigned arithmetic reproduces the same stream:

    seeding:   z = (seed + 0x9E3779B97F4A7C15) mod 2^64
               z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
               z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2^64
               state = z ^ (z >> 31), replaced by 1 if it is 0
    next():    s ^= s >> 12;  s ^= (s << 25) mod 2^64;  s ^= s >> 27
               return s * 0x2545F4914F6CDD1D mod 2^64
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
OUTPUT_MULTIPLIER = 0x2545F4914F6CDD1D


def splitmix64(seed: int) -> int:
    z = (seed + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    """
    xorshift64* generator over Python integers (no platform-dependent widths).
    """

    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK64) or 1

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s ^= (s << 25) & MASK64
        s ^= s >> 27
        self.state = s
        return (s * OUTPUT_MULTIPLIER) & MASK64

    def small_int(self) -> int:
        """
        Integer in [-8, 8].
        """
        return self.next_u64() % 17 - 8

    def unit_float(self) -> float:
        """
        Double in [-1, 1) built from the top 53 bits.
        """
        return (self.next_u64() >> 11) * 2.0 ** -52 - 1.0
