"""Slow, obviously-correct reimplementations used as test oracles."""
import math
from fractions import Fraction

M64 = (1 << 64) - 1


class RefXoshiro:
    def __init__(self, seed):
        x = seed & M64
        self.s = []
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & M64
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
            self.s.append(z ^ (z >> 31))

    @staticmethod
    def rotl(x, k):
        return ((x << k) | (x >> (64 - k))) & M64

    def next(self):
        s = self.s
        result = (self.rotl((s[1] * 5) & M64, 7) * 9) & M64
        t = (s[1] << 17) & M64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = self.rotl(s[3], 45)
        return result

    def below(self, n):
        """Lemire's method with exact big-int products."""
        if n <= 1 << 32:
            bits, x = 32, self.next() >> 32
        else:
            bits, x = 64, self.next()
        mod = 1 << bits
        thresh = (mod - n) % n
        m = x * n
        while m % mod < thresh:
            x = self.next() >> 32 if bits == 32 else self.next()
            m = x * n
        return m >> bits


def trial_division_primes(count):
    out = []
    n = 2
    while len(out) < count:
        if all(n % p for p in out if p * p <= n):
            out.append(n)
        n += 1
    return out


def digit_list(n, base):
    digits = []
    while n:
        digits.append(n % base)
        n //= base
    return digits


def exact_binomial_cdf(k, n, p):
    p = Fraction(p)
    return sum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(0, k + 1))


def normal_equations(design, y):
    """Solve (A^T A) c = A^T y by Gaussian elimination in exact fractions."""
    cols = len(design[0])
    ata = [[Fraction(0)] * cols for _ in range(cols)]
    aty = [Fraction(0)] * cols
    for row, yi in zip(design, y):
        row = [Fraction(v) for v in row]
        for i in range(cols):
            aty[i] += row[i] * Fraction(yi)
            for j in range(cols):
                ata[i][j] += row[i] * row[j]
    for i in range(cols):
        piv = max(range(i, cols), key=lambda r: abs(ata[r][i]))
        ata[i], ata[piv] = ata[piv], ata[i]
        aty[i], aty[piv] = aty[piv], aty[i]
        for r in range(cols):
            if r != i and ata[r][i]:
                f = ata[r][i] / ata[i][i]
                ata[r] = [a - f * b for a, b in zip(ata[r], ata[i])]
                aty[r] -= f * aty[i]
    return [float(aty[i] / ata[i][i]) for i in range(cols)]
