"""Eventually constant sequences: a desk-scale model of c0, l1 and linf.

An :class:`EvConstSeq` is a rational sequence with finitely many
exceptional values and a constant tail. One type carries three roles:

* tail 0            -> an element of c0,
* tail 0, read as a functional -> a finitely supported element of l1 = c0*,
* any tail          -> an element of linf = c0**.

This is the smallest exactly representable sublattice of linf containing
the embedded copy of the c0 model and the constants; it already separates
embedded biduals from non-embedded ones (the all-ones sequence has no
preimage in c0). General bounded sequences are not representable, so every
bidual statement below is instantiated on this sublattice rather than
proved for all of linf.

The diagonal bilinear map (x, y) |-> (w_n x_n y_n) and weighted
composition operators x |-> (w_k x_{sigma(k)}) live here. Their bidual
extensions have closed forms; the functions below compute the closed form
and then re-derive it through the definitional pipeline (adjoint pairings,
or the flip-and-contract chain shared with :mod:`rieszkit.arens`) at
finitely many probe indices, so the identifications stay checked rather
than assumed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .arens import Permutation, _contract_entries
from .operators import ShapeError
from .rational import as_fraction

_ZERO = Fraction(0)


class EvConstSeq:
    """Rational sequence, 1-indexed, constant after finitely many exceptions.

    Canonical form: no stored exception equals the tail, so structural
    equality is pointwise equality. All operations return canonical
    sequences.
    """

    __slots__ = ("_exc", "_tail")

    def __init__(self, exceptions: Mapping[int, object] | None = None, tail: object = 0) -> None:
        t = as_fraction(tail)
        clean: dict[int, Fraction] = {}
        for key, raw in (exceptions or {}).items():
            k = int(key)
            if k < 1:
                raise ValueError(f"sequence indices are 1-based, got {key}")
            value = as_fraction(raw)
            if value != t:
                clean[k] = value
        self._exc = clean
        self._tail = t

    @classmethod
    def zero(cls) -> "EvConstSeq":
        return cls({}, 0)

    @classmethod
    def constant(cls, value: object) -> "EvConstSeq":
        return cls({}, value)

    @classmethod
    def atom(cls, n: int) -> "EvConstSeq":
        """e_n; read against the pairing it is the coordinate functional e_n*."""
        return cls({n: 1}, 0)

    @classmethod
    def from_values(cls, values: Iterable[object], tail: object = 0) -> "EvConstSeq":
        return cls({i + 1: v for i, v in enumerate(values)}, tail)

    @property
    def tail(self) -> Fraction:
        return self._tail

    @property
    def exceptions(self) -> dict[int, Fraction]:
        return dict(self._exc)

    def exception_indices(self) -> list[int]:
        return sorted(self._exc)

    def max_exception_index(self) -> int:
        return max(self._exc, default=0)

    def value_at(self, k: int) -> Fraction:
        if k < 1:
            raise ValueError(f"sequence indices are 1-based, got {k}")
        return self._exc.get(k, self._tail)

    def is_finitely_supported(self) -> bool:
        return self._tail == 0

    def support(self) -> list[int]:
        if self._tail != 0:
            raise ValueError("cofinite support; only tail-0 sequences have one")
        return sorted(self._exc)

    def is_zero(self) -> bool:
        return self._tail == 0 and not self._exc

    def is_positive(self) -> bool:
        return self._tail >= 0 and all(v >= 0 for v in self._exc.values())

    def _combine(self, other: "EvConstSeq", fn: Callable[[Fraction, Fraction], Fraction]) -> "EvConstSeq":
        keys = set(self._exc) | set(other._exc)
        exc = {k: fn(self.value_at(k), other.value_at(k)) for k in keys}
        return EvConstSeq(exc, fn(self._tail, other._tail))

    def __add__(self, other: "EvConstSeq") -> "EvConstSeq":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "EvConstSeq") -> "EvConstSeq":
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> "EvConstSeq":
        return EvConstSeq({k: -v for k, v in self._exc.items()}, -self._tail)

    def scale(self, s: object) -> "EvConstSeq":
        c = as_fraction(s)
        return EvConstSeq({k: c * v for k, v in self._exc.items()}, c * self._tail)

    def __mul__(self, s: object) -> "EvConstSeq":
        return self.scale(s)

    __rmul__ = __mul__

    def pointwise_mul(self, other: "EvConstSeq") -> "EvConstSeq":
        """Coordinatewise product; tails multiply. The model is closed under it."""
        return self._combine(other, lambda a, b: a * b)

    def sup(self, other: "EvConstSeq") -> "EvConstSeq":
        return self._combine(other, max)

    def inf(self, other: "EvConstSeq") -> "EvConstSeq":
        return self._combine(other, min)

    def __abs__(self) -> "EvConstSeq":
        return EvConstSeq({k: abs(v) for k, v in self._exc.items()}, abs(self._tail))

    def abs(self) -> "EvConstSeq":
        return self.__abs__()

    def pos(self) -> "EvConstSeq":
        return self.sup(EvConstSeq.zero())

    def neg(self) -> "EvConstSeq":
        return (-self).sup(EvConstSeq.zero())

    def leq(self, other: "EvConstSeq") -> bool:
        if self._tail > other._tail:
            return False
        keys = set(self._exc) | set(other._exc)
        return all(self.value_at(k) <= other.value_at(k) for k in keys)

    def __le__(self, other: "EvConstSeq") -> bool:
        return self.leq(other)

    def __ge__(self, other: "EvConstSeq") -> bool:
        return other.leq(self)

    def is_disjoint(self, other: "EvConstSeq") -> bool:
        return abs(self).inf(abs(other)).is_zero()

    def _key(self) -> tuple:
        return (tuple(sorted(self._exc.items())), self._tail)

    def __eq__(self, other) -> bool:
        return isinstance(other, EvConstSeq) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        pairs = ", ".join(f"{k}: {v}" for k, v in sorted(self._exc.items()))
        return f"EvConstSeq({{{pairs}}}, tail={self._tail})"


def pair(u: EvConstSeq, f: EvConstSeq) -> Fraction:
    """The duality sum_n u_n f_n for a finitely supported functional f.

    Doubles as the canonical embedding: pair(x, f) = f(x) exhibits x as a
    bidual element acting on the dual.
    """
    if f.tail != 0:
        raise ValueError("functional has a nonzero tail; not summable here")
    return sum((u.value_at(k) * c for k, c in f.exceptions.items()), _ZERO)


class DiagBilinear:
    """The diagonal bilinear map A(x, y) = (w_n x_n y_n) for a weight w.

    Disjointness preserving for every w, positive iff w is, and its range
    contains w_n e_n for every n, so no finite-rank sublattice can hold the
    range once infinitely many weights are nonzero.
    """

    __slots__ = ("_weight",)

    def __init__(self, weight: EvConstSeq) -> None:
        self._weight = weight

    @property
    def weight(self) -> EvConstSeq:
        return self._weight

    def __eq__(self, other) -> bool:
        return isinstance(other, DiagBilinear) and self._weight == other._weight

    def __repr__(self) -> str:
        return f"DiagBilinear({self._weight!r})"


def diag_apply(op: DiagBilinear, x: EvConstSeq, y: EvConstSeq) -> EvConstSeq:
    return op.weight.pointwise_mul(x).pointwise_mul(y)


def diag_arens_pair(
    op: DiagBilinear,
    rho: Permutation,
    u: EvConstSeq,
    v: EvConstSeq,
    y_prime: EvConstSeq,
) -> Fraction:
    """Definitional bidual extension value <extension(u, v), y_prime>.

    Builds the scalar form y_prime o A (finitely supported since y_prime
    is), permutes its two slots into rho-order, then contracts against the
    biduals in that order. Every intermediate form stays finite.
    """
    if rho.m != 2:
        raise ShapeError("the diagonal map is bilinear; need a permutation of 2 slots")
    if y_prime.tail != 0:
        raise ValueError("y_prime must be finitely supported")
    entries: dict[tuple[int, ...], Fraction] = {}
    for n, c in y_prime.exceptions.items():
        value = c * op.weight.value_at(n)
        if value != 0:
            entries[(n, n)] = value
    entries = {(idx[rho(0)], idx[rho(1)]): val for idx, val in entries.items()}
    args = (u, v)
    after_first = _contract_entries(entries, args[rho(0)].value_at)
    after_second = _contract_entries(after_first, args[rho(1)].value_at)
    return after_second.get((), _ZERO)


def diag_arens(
    op: DiagBilinear,
    u: EvConstSeq,
    v: EvConstSeq,
    rho: Permutation | None = None,
) -> EvConstSeq:
    """Bidual extension of the diagonal map at (u, v), as an EvConstSeq.

    The closed form is (w_n u_n v_n). Before returning it, the definitional
    pipeline is evaluated at the coordinate functionals of every exceptional
    index plus one tail index, for both slot orders; the two extensions
    agree here (the diagonal map is symmetric in its slots), and the probe
    comparison keeps the closed form tied to the definition. ``rho`` is
    accepted for interface symmetry; both orders are checked regardless.
    """
    if rho is not None and rho.m != 2:
        raise ShapeError("the diagonal map is bilinear; need a permutation of 2 slots")
    closed = op.weight.pointwise_mul(u).pointwise_mul(v)
    probes = sorted(
        set(op.weight.exceptions) | set(u.exceptions) | set(v.exceptions)
    )
    probes.append(max(probes, default=0) + 1)
    orders = [Permutation.identity(2), Permutation((1, 0))]
    for k in probes:
        functional = EvConstSeq.atom(k)
        expected = closed.value_at(k)
        for order in orders:
            got = diag_arens_pair(op, order, u, v, functional)
            if got != expected:
                raise RuntimeError(
                    f"extension pipeline disagrees with closed form at index {k}: "
                    f"{got} != {expected}"
                )
    return closed


class WeightedCompOp:
    """x |-> (w_k x_{sigma(k)}) where sigma is a finite table plus a shift.

    sigma(k) = table[k] when k is listed, k + shift otherwise. Beyond the
    table sigma is an injective shift, so adjoint and biadjoint stay inside
    the eventually constant class. Always disjointness preserving: the
    supports {k : sigma(k) = i} of the atom images are pairwise disjoint.
    """

    __slots__ = ("_weight", "_table", "_shift")

    def __init__(
        self,
        weight: EvConstSeq,
        table: Mapping[int, int] | None = None,
        shift: int = 0,
    ) -> None:
        if shift < 0:
            raise ValueError(f"shift must be >= 0, got {shift}")
        clean: dict[int, int] = {}
        for key, target in (table or {}).items():
            k, j = int(key), int(target)
            if k < 1 or j < 1:
                raise ValueError(f"table entries are 1-based, got {key} -> {target}")
            clean[k] = j
        self._weight = weight
        self._table = clean
        self._shift = int(shift)

    @property
    def weight(self) -> EvConstSeq:
        return self._weight

    @property
    def table(self) -> dict[int, int]:
        return dict(self._table)

    @property
    def shift(self) -> int:
        return self._shift

    def sigma(self, k: int) -> int:
        if k < 1:
            raise ValueError(f"sequence indices are 1-based, got {k}")
        return self._table.get(k, k + self._shift)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WeightedCompOp)
            and self._weight == other._weight
            and self._table == other._table
            and self._shift == other._shift
        )

    def __repr__(self) -> str:
        return f"WeightedCompOp(weight={self._weight!r}, table={self._table}, shift={self._shift})"


def comp_apply(op: WeightedCompOp, x: EvConstSeq) -> EvConstSeq:
    """(Tx)_k = w_k x_{sigma(k)}; the tail is w_tail * x_tail."""
    candidates = set(op.weight.exceptions) | set(op.table)
    for e in x.exception_indices():
        k = e - op.shift
        if k >= 1 and k not in op.table:
            candidates.add(k)
    exc = {k: op.weight.value_at(k) * x.value_at(op.sigma(k)) for k in candidates}
    return EvConstSeq(exc, op.weight.tail * x.tail)


def comp_adjoint(op: WeightedCompOp, f: EvConstSeq) -> EvConstSeq:
    """T'f = sum_k w_k f_k e*_{sigma(k)}: push each support point through sigma.

    Coordinatewise this is (T'f)_j = sum over the sigma-preimage of j of
    w_k f_k; the sum collapses to the support of f, which is finite.
    """
    if f.tail != 0:
        raise ValueError("adjoint input must be finitely supported")
    out: dict[int, Fraction] = {}
    for k, c in f.exceptions.items():
        j = op.sigma(k)
        out[j] = out.get(j, _ZERO) + op.weight.value_at(k) * c
    return EvConstSeq(out, 0)


def comp_biadjoint(op: WeightedCompOp, u: EvConstSeq) -> EvConstSeq:
    """(T''u)_k = w_k u_{sigma(k)}: the same formula as comp_apply, on any tail.

    The formula is re-derived through the adjoint pairing <T''u, f> =
    <u, T'f> at the coordinate functionals of every exceptional index of
    the result plus one tail index before the result is returned.
    """
    result = comp_apply(op, u)
    probes = sorted(result.exceptions)
    high = max(
        [result.max_exception_index(), u.max_exception_index(),
         op.weight.max_exception_index()]
        + list(op.table)
        + [op.shift]
    )
    probes.append(high + 1)
    for j in probes:
        direct = pair(result, EvConstSeq.atom(j))
        through_adjoint = pair(u, comp_adjoint(op, EvConstSeq.atom(j)))
        if direct != through_adjoint:
            raise RuntimeError(
                f"biadjoint formula disagrees with the adjoint pairing at index {j}: "
                f"{direct} != {through_adjoint}"
            )
    return result


def random_rational(rng: random.Random, *, span: int = 4, max_den: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def random_seq(
    rng: random.Random,
    *,
    max_index: int = 8,
    tail_zero: bool = False,
) -> EvConstSeq:
    tail = _ZERO if tail_zero else rng.choice([_ZERO, Fraction(1), Fraction(-1, 2), Fraction(2)])
    exc = {
        k: random_rational(rng)
        for k in range(1, max_index + 1)
        if rng.random() < 0.4
    }
    return EvConstSeq(exc, tail)


def random_functional(rng: random.Random, *, max_index: int = 8) -> EvConstSeq:
    return random_seq(rng, max_index=max_index, tail_zero=True)


def sample_disjoint_pair(rng: random.Random) -> tuple[EvConstSeq, EvConstSeq]:
    """A structured disjoint pair: tail-split, finite-finite, or a zero edge."""
    kind = rng.choice(["tail_split", "finite", "zero"])
    if kind == "zero":
        return EvConstSeq.zero(), random_seq(rng)
    indices = list(range(1, 11))
    rng.shuffle(indices)
    cut = rng.randint(1, 6)
    left, right = indices[:cut], indices[cut : cut + rng.randint(1, 4)]
    u = EvConstSeq({k: _nonzero(rng) for k in left}, 0)
    if kind == "finite":
        v = EvConstSeq({k: _nonzero(rng) for k in right}, 0)
    else:
        # cofinite tail, forced to vanish on the support of u
        exc = {k: 0 for k in left}
        for k in right:
            exc[k] = _nonzero(rng)
        v = EvConstSeq(exc, _nonzero(rng))
    return u, v


def _nonzero(rng: random.Random) -> Fraction:
    value = random_rational(rng)
    return value if value != 0 else Fraction(1)


def random_weighted_comp(rng: random.Random) -> WeightedCompOp:
    weight = random_seq(rng, max_index=6)
    table = {
        k: rng.randint(1, 8)
        for k in range(1, 6)
        if rng.random() < 0.3
    }
    return WeightedCompOp(weight, table, shift=rng.randint(0, 3))


def biadjoint_dp_check(
    op: WeightedCompOp, *, samples: int = 50, seed: int = 0
) -> bool:
    """Biadjoint images of sampled disjoint pairs stay disjoint. Always true here."""
    rng = random.Random(seed)
    for _ in range(samples):
        u, v = sample_disjoint_pair(rng)
        if not comp_biadjoint(op, u).is_disjoint(comp_biadjoint(op, v)):
            return False
    return True


def dual_basis_dp(*, limit: int = 32, samples: int = 50, seed: int = 0) -> bool:
    """Each coordinate functional e_n* (n <= limit) preserves disjointness.

    For disjoint u, v the pair of values (u_n, v_n) must be disjoint in Q,
    that is, min(|u_n|, |v_n|) = 0.
    """
    rng = random.Random(seed)
    pairs = [sample_disjoint_pair(rng) for _ in range(samples)]
    pairs.append((EvConstSeq.atom(1), EvConstSeq.atom(2)))
    for u, v in pairs:
        for n in range(1, limit + 1):
            if min(abs(u.value_at(n)), abs(v.value_at(n))) != 0:
                return False
    return True


def rank_lower_bound(op: DiagBilinear, n_atoms: int) -> int:
    """Certify lattice rank >= n_atoms by exhibiting disjoint range elements.

    The elements A(e_n, e_n) = w_n e_n for n = 1..n_atoms are pairwise
    disjoint and nonzero provided the weight does not vanish there; any
    sublattice containing the range then contains n_atoms independent
    vectors. Raises when the weight vanishes on the requested range.
    """
    if n_atoms < 1:
        raise ValueError(f"need at least one atom, got {n_atoms}")
    images = []
    for n in range(1, n_atoms + 1):
        if op.weight.value_at(n) == 0:
            raise ValueError(f"weight vanishes at index {n}; no certificate there")
        images.append(diag_apply(op, EvConstSeq.atom(n), EvConstSeq.atom(n)))
    for i, a in enumerate(images):
        if a.is_zero():
            raise ValueError(f"range element at index {i + 1} vanished")
        for b in images[i + 1 :]:
            if not a.is_disjoint(b):
                return 0  # unreachable for a diagonal map; defensive
    return n_atoms


def slotwise_dp_check(
    op: DiagBilinear, u_fixed: EvConstSeq, *, samples: int = 50, seed: int = 0
) -> bool:
    """With one slot frozen, the extension maps disjoint pairs to disjoint images."""
    rng = random.Random(seed)
    for _ in range(samples):
        v, v_hat = sample_disjoint_pair(rng)
        left = diag_arens(op, u_fixed, v)
        right = diag_arens(op, u_fixed, v_hat)
        if not left.is_disjoint(right):
            return False
    return True
