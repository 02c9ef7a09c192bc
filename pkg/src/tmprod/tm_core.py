"""The +/-1 Thue-Morse sequence and a small algebra of substitutions over it.

A q-substitution maps the letter +1 to one length-q block of reals and the
letter -1 to another.  Applying it to the Thue-Morse sequence a_0, a_1, ...
(a_n = (-1)^popcount(n), a_0 = 1) produces a new sequence blockwise: term n of
the image is entry (n mod q) of the block chosen by a_{n div q}.

The operators here (entrywise sum, scalar multiple, stuttering, and the
shuffle interleave) are the constructions needed to drive the infinite
products in product_engine and the finite forms in closed_forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def thue_morse(n: int) -> int:
    """Thue-Morse sign a_n = (-1)^(number of 1 bits of n), so a_0 = +1."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    return -1 if int(n).bit_count() & 1 else 1


def thue_morse_prefix(length: int) -> list[int]:
    """First `length` Thue-Morse signs, generated by iterating the defining
    2-substitution 1 -> (1, -1), -1 -> (-1, 1) from the seed word (1).

    Quadratic-ish and only suitable for modest lengths; the point of this
    function is to be an independent oracle for thue_morse / tm_signs.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    word = [1]
    while len(word) < length:
        word = [x for s in word for x in (s, -s)]
    return word[:length]


def tm_signs(start: int, stop: int) -> np.ndarray:
    """Thue-Morse signs a_n for n in [start, stop) as an int8 array.

    Vectorized popcount parity via an XOR fold; works on any numpy version.
    """
    if start < 0 or stop < start:
        raise ValueError("need 0 <= start <= stop")
    x = np.arange(start, stop, dtype=np.uint64)
    x ^= x >> np.uint64(32)
    x ^= x >> np.uint64(16)
    x ^= x >> np.uint64(8)
    x ^= x >> np.uint64(4)
    x ^= x >> np.uint64(2)
    x ^= x >> np.uint64(1)
    parity = (x & np.uint64(1)).astype(np.int8)
    return 1 - 2 * parity


def frac(numer: int, denom: int) -> float:
    """Correctly rounded double for the rational numer/denom.

    Convenience for image entries like 1/4 or 3/(2q); the stored value is the
    nearest double, which is exact whenever denom is a power of two.
    """
    return float(Fraction(numer, denom))


@dataclass(frozen=True)
class SubstitutionClass:
    is_alternative: bool
    is_periodic: bool
    is_mirror_symmetric: bool
    is_mirror_antisymmetric: bool


@dataclass(frozen=True)
class Substitution:
    """A q-substitution: images of +1 and -1 as length-q tuples of reals.

    Entries are plain doubles.  Classification predicates compare entries
    exactly (no tolerance), so callers should construct entries from exact
    literals or frac().
    """

    q: int
    plus_image: tuple[float, ...]
    minus_image: tuple[float, ...]

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be a positive integer")
        object.__setattr__(self, "plus_image", tuple(float(v) for v in self.plus_image))
        object.__setattr__(self, "minus_image", tuple(float(v) for v in self.minus_image))
        if len(self.plus_image) != self.q or len(self.minus_image) != self.q:
            raise ValueError("images must both have exactly q entries")
        for v in self.plus_image + self.minus_image:
            if not math.isfinite(v):
                raise ValueError("image entries must be finite")

    def term(self, n: int) -> float:
        return substituted_term(self, n)

    def classify(self) -> SubstitutionClass:
        return classify(self)

    def max_abs_entry(self) -> float:
        return max(abs(v) for v in self.plus_image + self.minus_image)

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "plus": [repr(v) for v in self.plus_image],
            "minus": [repr(v) for v in self.minus_image],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json_dict(obj: dict) -> "Substitution":
        if set(obj.keys()) != {"q", "plus", "minus"}:
            raise ValueError("substitution JSON must have exactly the keys q, plus, minus")
        return Substitution(
            q=int(obj["q"]),
            plus_image=tuple(float(v) for v in obj["plus"]),
            minus_image=tuple(float(v) for v in obj["minus"]),
        )

    @staticmethod
    def from_json(text: str) -> "Substitution":
        return Substitution.from_json_dict(json.loads(text))


def classify(sub: Substitution) -> SubstitutionClass:
    """Structural predicates, all decided by exact comparison of the entries.

    alternative: minus image is the negation of the plus image.
    periodic: both images coincide (the output ignores the input sign).
    mirror symmetric: plus image reads the same reversed (l_k = l_{q-1-k}).
    mirror antisymmetric: plus entries cancel against their mirror
    (s_k + s_{q-1-k} = 0).
    """
    q = sub.q
    alternative = all(sub.minus_image[k] == -sub.plus_image[k] for k in range(q))
    periodic = all(sub.minus_image[k] == sub.plus_image[k] for k in range(q))
    symmetric = all(sub.plus_image[k] == sub.plus_image[q - 1 - k] for k in range(q))
    antisymmetric = all(sub.plus_image[k] + sub.plus_image[q - 1 - k] == 0.0 for k in range(q))
    return SubstitutionClass(
        is_alternative=alternative,
        is_periodic=periodic,
        is_mirror_symmetric=symmetric,
        is_mirror_antisymmetric=antisymmetric,
    )


def substituted_term(sub: Substitution, n: int) -> float:
    """Term n of the substituted sequence: entry (n mod q) of the block that
    the Thue-Morse letter a_{n div q} selects."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    j, k = divmod(n, sub.q)
    image = sub.plus_image if thue_morse(j) == 1 else sub.minus_image
    return image[k]


def substituted_values(sub: Substitution, start: int, stop: int) -> np.ndarray:
    """Substituted sequence values for indices [start, stop) as float64.

    Vectorized companion of substituted_term for the product engine.
    """
    if start < 0 or stop < start:
        raise ValueError("need 0 <= start <= stop")
    idx = np.arange(start, stop, dtype=np.int64)
    letters = tm_signs(start // sub.q, stop // sub.q + 1)
    letter_per_index = letters[(idx // sub.q) - (start // sub.q)]
    slot = (idx % sub.q).astype(np.int64)
    plus = np.asarray(sub.plus_image, dtype=np.float64)
    minus = np.asarray(sub.minus_image, dtype=np.float64)
    return np.where(letter_per_index == 1, plus[slot], minus[slot])


def stuttered(q: int) -> Substitution:
    """The q-stuttered sequence T_q: every Thue-Morse sign repeated q times."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    return Substitution(q=q, plus_image=(1.0,) * q, minus_image=(-1.0,) * q)


def shuffle(phi: Substitution, psi: Substitution) -> Substitution:
    """Interleave two q-substitutions into a 2q-substitution.

    On the +1 image the entries alternate phi, psi, phi, psi, ...  On the -1
    image the order within each pair is swapped: psi, phi, psi, phi, ...
    The swap looks asymmetric but is what makes the interleaved sequence of
    an alternative/periodic pair mirror-antisymmetric, which every identity
    downstream relies on.
    """
    if phi.q != psi.q:
        raise ValueError("shuffle requires equal block lengths")
    plus = []
    minus = []
    for k in range(phi.q):
        plus.extend((phi.plus_image[k], psi.plus_image[k]))
        minus.extend((psi.minus_image[k], phi.minus_image[k]))
    return Substitution(q=2 * phi.q, plus_image=tuple(plus), minus_image=tuple(minus))


def add(phi: Substitution, psi: Substitution) -> Substitution:
    """Entrywise sum of two substitutions with the same block length."""
    if phi.q != psi.q:
        raise ValueError("add requires equal block lengths")
    return Substitution(
        q=phi.q,
        plus_image=tuple(a + b for a, b in zip(phi.plus_image, psi.plus_image)),
        minus_image=tuple(a + b for a, b in zip(phi.minus_image, psi.minus_image)),
    )


def scale(lam: float, phi: Substitution) -> Substitution:
    """Entrywise scalar multiple."""
    return Substitution(
        q=phi.q,
        plus_image=tuple(lam * v for v in phi.plus_image),
        minus_image=tuple(lam * v for v in phi.minus_image),
    )


def zero_substitution(q: int) -> Substitution:
    """The all-zero q-substitution (additive identity)."""
    return Substitution(q=q, plus_image=(0.0,) * q, minus_image=(0.0,) * q)
