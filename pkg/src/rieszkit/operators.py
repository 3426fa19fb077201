"""Regular linear and multilinear operators between coordinatewise spaces.

An m-linear operator A: Q^{d_1} x ... x Q^{d_m} -> Q^c is stored as a
sparse rational tensor: a map from (output coordinate, index tuple) to a
nonzero Fraction. Because the atoms generate the positive cone, the
operator order is the entrywise order, and modulus / positive part /
negative part are entrywise as well.

The central decision procedure is :meth:`MultiTensor.is_dp`: does the
operator map tuples that are disjoint in one slot (the other slots held
fixed) to disjoint outputs? The answer is structural, and every negative
answer comes with a concrete witness that is re-verified by evaluation
before it is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .rational import as_fraction, ceil_fraction
from .vectors import FinVector

MAX_ARITY = 4
MAX_DIM = 16

_ZERO = Fraction(0)


class ShapeError(ValueError):
    """Arity or dimension mismatch between operators or arguments."""


class NotDisjointnessPreserving(ValueError):
    """Raised when an operation requires a DP operator but got a witness
    against it. The offending :class:`DPVerdict` rides along."""

    def __init__(self, verdict: "DPVerdict") -> None:
        super().__init__("operator does not preserve disjointness")
        self.verdict = verdict


@dataclass(frozen=True)
class DPWitness:
    """Constructive evidence that an operator is not disjointness preserving.

    ``x`` and ``y`` are disjoint vectors for slot ``slot``; with the other
    slots pinned to ``fixed``, the two images fail to be disjoint (they
    share support at output coordinate ``out_coord``).
    """

    out_coord: int
    slot: int
    x: FinVector
    y: FinVector
    fixed: tuple[tuple[int, FinVector], ...]
    image_x: FinVector
    image_y: FinVector

    def args_for(self, vec: FinVector) -> list[FinVector]:
        slots = dict(self.fixed)
        slots[self.slot] = vec
        return [slots[i] for i in sorted(slots)]

    def verify(self, tensor: "MultiTensor") -> bool:
        """Re-check the witness against the tensor by evaluation."""
        if not self.x.is_disjoint(self.y):
            return False
        ix = tensor.apply(self.args_for(self.x))
        iy = tensor.apply(self.args_for(self.y))
        if ix != self.image_x or iy != self.image_y:
            return False
        k = self.out_coord
        return ix[k] != 0 and iy[k] != 0


@dataclass(frozen=True)
class DPVerdict:
    """Outcome of the disjointness-preservation decision.

    Exactly one of ``certificate`` (positive answer: per output coordinate
    the at-most-one support tuple) and ``witness`` (negative answer) is set.
    """

    is_dp: bool
    certificate: tuple[tuple[int, ...] | None, ...] | None
    witness: DPWitness | None


@dataclass(frozen=True)
class MultimorphismFactorization:
    """Scalar DP form written as scale * x_1[c_1] * ... * x_m[c_m].

    By convention the whole scale is carried by the first coordinate
    functional; the remaining factors are plain coordinate evaluations.
    A zero operator is flagged by ``coords is None`` and scale 0.
    """

    scale: Fraction
    coords: tuple[int, ...] | None

    @property
    def is_zero(self) -> bool:
        return self.coords is None

    def evaluate(self, args: Sequence[FinVector]) -> Fraction:
        if self.coords is None:
            return _ZERO
        value = self.scale
        for i, c in enumerate(self.coords):
            value *= args[i][c]
        return value


class MultiTensor:
    """Sparse exact tensor of an m-linear operator Q^{d_1} x ... -> Q^c."""

    __slots__ = ("_dims", "_cod", "_entries")

    def __init__(
        self,
        domain_dims: Sequence[int],
        codomain_dim: int,
        entries: Mapping[tuple[int, tuple[int, ...]], object],
    ) -> None:
        dims = tuple(int(d) for d in domain_dims)
        if not 1 <= len(dims) <= MAX_ARITY:
            raise ShapeError(f"arity must be between 1 and {MAX_ARITY}, got {len(dims)}")
        if any(d < 1 or d > MAX_DIM for d in dims):
            raise ShapeError(f"domain dims must lie in 1..{MAX_DIM}: {dims}")
        if not 1 <= codomain_dim <= MAX_DIM:
            raise ShapeError(f"codomain dim must lie in 1..{MAX_DIM}: {codomain_dim}")
        self._dims = dims
        self._cod = int(codomain_dim)
        clean: dict[tuple[int, tuple[int, ...]], Fraction] = {}
        for (k, idx), raw in entries.items():
            idx = tuple(int(i) for i in idx)
            if not 0 <= k < self._cod:
                raise ShapeError(f"output coordinate {k} out of range 0..{self._cod - 1}")
            if len(idx) != len(dims) or any(
                not 0 <= i < d for i, d in zip(idx, dims)
            ):
                raise ShapeError(f"index tuple {idx} out of range for dims {dims}")
            value = as_fraction(raw)
            if value != 0:
                clean[(int(k), idx)] = value
        self._entries = clean

    @classmethod
    def from_rows(
        cls,
        domain_dims: Sequence[int],
        codomain_dim: int,
        rows: Iterable[tuple[int, Sequence[int], object]],
    ) -> "MultiTensor":
        entries: dict[tuple[int, tuple[int, ...]], Fraction] = {}
        for k, idx, value in rows:
            key = (k, tuple(idx))
            if key in entries:
                raise ShapeError(f"duplicate entry for out={k}, idx={tuple(idx)}")
            entries[key] = as_fraction(value)
        return cls(domain_dims, codomain_dim, entries)

    @classmethod
    def zero(cls, domain_dims: Sequence[int], codomain_dim: int) -> "MultiTensor":
        return cls(domain_dims, codomain_dim, {})

    # -- basic shape -------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self._dims)

    @property
    def domain_dims(self) -> tuple[int, ...]:
        return self._dims

    @property
    def codomain_dim(self) -> int:
        return self._cod

    def entry(self, out_coord: int, idx: tuple[int, ...]) -> Fraction:
        return self._entries.get((out_coord, idx), _ZERO)

    def rows(self) -> list[tuple[int, tuple[int, ...], Fraction]]:
        """Entries as a deterministically sorted list."""
        return [(k, idx, v) for (k, idx), v in sorted(self._entries.items())]

    def nnz(self) -> int:
        return len(self._entries)

    def items(self) -> Iterator[tuple[tuple[int, tuple[int, ...]], Fraction]]:
        return iter(self._entries.items())

    def same_shape(self, other: "MultiTensor") -> bool:
        return self._dims == other._dims and self._cod == other._cod

    def _require_shape(self, other: "MultiTensor") -> None:
        if not self.same_shape(other):
            raise ShapeError(
                f"shape mismatch: {self._dims}->{self._cod} vs {other._dims}->{other._cod}"
            )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiTensor)
            and self._dims == other._dims
            and self._cod == other._cod
            and self._entries == other._entries
        )

    def __hash__(self) -> int:
        return hash((self._dims, self._cod, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        shape = "x".join(str(d) for d in self._dims)
        return f"MultiTensor({shape}->{self._cod}, {self.nnz()} entries)"

    # -- evaluation ----------------------------------------------------------

    def apply(self, args: Sequence[FinVector]) -> FinVector:
        """Evaluate the operator at one vector per slot."""
        if len(args) != self.m:
            raise ShapeError(f"expected {self.m} arguments, got {len(args)}")
        for i, (x, d) in enumerate(zip(args, self._dims)):
            if x.dim != d:
                raise ShapeError(f"slot {i}: argument dim {x.dim}, expected {d}")
        acc = [_ZERO] * self._cod
        for (k, idx), value in self._entries.items():
            term = value
            for i, pos in enumerate(idx):
                c = args[i][pos]
                if c == 0:
                    term = _ZERO
                    break
                term *= c
            if term != 0:
                acc[k] += term
        return FinVector(acc)

    # -- entrywise lattice structure ------------------------------------------

    def _map_entries(self, fn) -> "MultiTensor":
        return MultiTensor(
            self._dims,
            self._cod,
            {key: fn(v) for key, v in self._entries.items()},
        )

    def modulus(self) -> "MultiTensor":
        """|A|: entrywise absolute value; the least positive majorant of A and -A."""
        return self._map_entries(abs)

    def positive_part(self) -> "MultiTensor":
        return self._map_entries(lambda v: v if v > 0 else _ZERO)

    def negative_part(self) -> "MultiTensor":
        return self._map_entries(lambda v: -v if v < 0 else _ZERO)

    def __add__(self, other: "MultiTensor") -> "MultiTensor":
        self._require_shape(other)
        merged = dict(self._entries)
        for key, v in other._entries.items():
            merged[key] = merged.get(key, _ZERO) + v
        return MultiTensor(self._dims, self._cod, merged)

    def __sub__(self, other: "MultiTensor") -> "MultiTensor":
        return self + other._map_entries(lambda v: -v)

    def __neg__(self) -> "MultiTensor":
        return self._map_entries(lambda v: -v)

    def scale(self, scalar) -> "MultiTensor":
        s = as_fraction(scalar)
        if s == 0:
            return MultiTensor.zero(self._dims, self._cod)
        return self._map_entries(lambda v: s * v)

    def is_positive(self) -> bool:
        """A >= 0 in the operator order, i.e. every entry is nonnegative."""
        return not any(v < 0 for v in self._entries.values())

    def leq(self, other: "MultiTensor") -> bool:
        """Entrywise operator order A <= B.

        Equivalent to (B - A)(x_1, ..., x_m) >= 0 for all positive inputs,
        since atom tuples recover the entries and generate the cone.
        """
        self._require_shape(other)
        keys = set(self._entries) | set(other._entries)
        return all(
            self._entries.get(key, _ZERO) <= other._entries.get(key, _ZERO)
            for key in keys
        )

    # -- slices -----------------------------------------------------------------

    def slices(self) -> dict[int, dict[tuple[int, ...], Fraction]]:
        """Per output coordinate, the nonzero index tuples and their values."""
        out: dict[int, dict[tuple[int, ...], Fraction]] = {
            k: {} for k in range(self._cod)
        }
        for (k, idx), v in self._entries.items():
            out[k][idx] = v
        return out

    def slice_tensor(self, out_coord: int) -> "MultiTensor":
        """The scalar-valued component at one output coordinate."""
        if not 0 <= out_coord < self._cod:
            raise ShapeError(f"output coordinate {out_coord} out of range")
        return MultiTensor(
            self._dims,
            1,
            {
                (0, idx): v
                for (k, idx), v in self._entries.items()
                if k == out_coord
            },
        )

    # -- disjointness preservation ------------------------------------------------

    def is_dp(self) -> DPVerdict:
        """Decide disjointness preservation.

        The operator preserves disjointness exactly when every output
        coordinate reads at most one index tuple. A second tuple in some
        slice yields a witness: put the two differing atoms in the slot
        where the tuples disagree and a generic strictly positive vector
        everywhere else. The generic coefficients are powers of a single
        integer t with exponents that encode the index tuple positionally,
        so distinct tuples can never cancel, and t is taken beyond the
        largest root any such slice polynomial can have. The witness is
        re-verified by evaluation before being returned.
        """
        slices = self.slices()
        offending = None
        for k in range(self._cod):
            if len(slices[k]) > 1:
                offending = k
                break
        if offending is None:
            certificate = tuple(
                next(iter(sorted(slices[k]))) if slices[k] else None
                for k in range(self._cod)
            )
            return DPVerdict(True, certificate, None)

        k = offending
        tuples = sorted(slices[k])
        s, s2 = tuples[0], tuples[1]
        slot = next(i for i in range(self.m) if s[i] != s2[i])
        witness = self._build_witness(k, slot, s, s2, slices[k])
        if not witness.verify(self):
            raise AssertionError("internal error: constructed witness failed to verify")
        return DPVerdict(False, None, witness)

    def _generic_ratio(self, slice_values: Iterable[Fraction]) -> int:
        total = _ZERO
        smallest: Fraction | None = None
        for v in slice_values:
            a = abs(v)
            total += a
            if smallest is None or a < smallest:
                smallest = a
        if smallest is None or smallest == 0:
            return 2
        return 1 + ceil_fraction(total / smallest)

    def _build_witness(
        self,
        out_coord: int,
        slot: int,
        s: tuple[int, ...],
        s2: tuple[int, ...],
        slice_entries: Mapping[tuple[int, ...], Fraction],
    ) -> DPWitness:
        t = self._generic_ratio(slice_entries.values())
        base = max(self._dims) + 1
        others = [i for i in range(self.m) if i != slot]
        fixed = []
        for pos, i in enumerate(others):
            d = self._dims[i]
            coeffs = [Fraction(t ** ((r + 1) * base**pos)) for r in range(d)]
            fixed.append((i, FinVector(coeffs)))
        x = FinVector.atom(self._dims[slot], s[slot])
        y = FinVector.atom(self._dims[slot], s2[slot])

        def args_with(vec: FinVector) -> list[FinVector]:
            slots = dict(fixed)
            slots[slot] = vec
            return [slots[i] for i in range(self.m)]

        return DPWitness(
            out_coord=out_coord,
            slot=slot,
            x=x,
            y=y,
            fixed=tuple(fixed),
            image_x=self.apply(args_with(x)),
            image_y=self.apply(args_with(y)),
        )

    def is_riesz_multimorphism(self) -> bool:
        """Positive and disjointness preserving.

        For positive operators this is equivalent to the modulus identity
        |A(x_1, ..., x_m)| = A(|x_1|, ..., |x_m|) holding everywhere.
        """
        if any(v < 0 for v in self._entries.values()):
            return False
        return self.is_dp().is_dp

    # -- lattice rank of the range ------------------------------------------------

    def atom_images(self) -> list[FinVector]:
        """Images of all atom tuples with nonzero image (the tensor columns)."""
        columns: dict[tuple[int, ...], list[Fraction]] = {}
        for (k, idx), v in self._entries.items():
            columns.setdefault(idx, [_ZERO] * self._cod)[k] = v
        return [FinVector(col) for idx, col in sorted(columns.items())]

    def range_sublattice_basis(self) -> list[FinVector]:
        """Basis of the smallest linear sublattice containing the range.

        Starting from the linear span of the atom-tuple images, repeatedly
        adjoin w v 0, (-w) v 0 and pairwise suprema of the reduced basis and
        re-extract an echelon basis until the dimension stabilizes. With an
        echelon basis, stability of exactly these suprema forces the basis
        vectors to be nonnegative with pairwise disjoint supports, which
        makes the span genuinely closed under all lattice operations. The
        dimension is bounded by the codomain, so this terminates.
        """
        basis = _rref_basis(self.atom_images())
        if not basis:
            return []
        zero = FinVector.zero(self._cod)
        while True:
            candidates: list[FinVector] = []
            for i, w in enumerate(basis):
                candidates.append(w.sup(zero))
                candidates.append((-w).sup(zero))
                for w2 in basis[i + 1 :]:
                    candidates.append(w.sup(w2))
            enlarged = _rref_basis(basis + candidates)
            if len(enlarged) == len(basis):
                return basis
            basis = enlarged

    def lattice_rank(self) -> int:
        """Dimension of the sublattice generated by the range."""
        return len(self.range_sublattice_basis())


def _rref_basis(vectors: Sequence[FinVector]) -> list[FinVector]:
    """Reduced echelon basis of the span of the given vectors."""
    basis: list[tuple[int, list[Fraction]]] = []
    for vec in vectors:
        row = list(vec.coords())
        for pivot, b in basis:
            if row[pivot] != 0:
                f = row[pivot]
                row = [a - f * c for a, c in zip(row, b)]
        pivot = next((i for i, a in enumerate(row) if a != 0), None)
        if pivot is None:
            continue
        inv = row[pivot]
        row = [a / inv for a in row]
        for n, (p, b) in enumerate(basis):
            if b[pivot] != 0:
                f = b[pivot]
                basis[n] = (p, [a - f * c for a, c in zip(b, row)])
        basis.append((pivot, row))
    basis.sort(key=lambda item: item[0])
    return [FinVector(row) for _, row in basis]


# -- linear operators ---------------------------------------------------------


class LinOp:
    """Sparse rational matrix T: Q^dom -> Q^cod.

    The order dual of Q^n is Q^n itself, so the order adjoint is the plain
    transpose and the second adjoint, composed with the identity embedding
    of each space into its bidual, returns the original matrix.
    """

    __slots__ = ("_dom", "_cod", "_entries")

    def __init__(
        self,
        domain_dim: int,
        codomain_dim: int,
        entries: Mapping[tuple[int, int], object],
    ) -> None:
        if not 1 <= domain_dim <= MAX_DIM or not 1 <= codomain_dim <= MAX_DIM:
            raise ShapeError(f"dims must lie in 1..{MAX_DIM}")
        self._dom = int(domain_dim)
        self._cod = int(codomain_dim)
        clean: dict[tuple[int, int], Fraction] = {}
        for (r, c), raw in entries.items():
            if not (0 <= r < self._cod and 0 <= c < self._dom):
                raise ShapeError(f"matrix position {(r, c)} out of range")
            v = as_fraction(raw)
            if v != 0:
                clean[(int(r), int(c))] = v
        self._entries = clean

    @property
    def domain_dim(self) -> int:
        return self._dom

    @property
    def codomain_dim(self) -> int:
        return self._cod

    def entry(self, row: int, col: int) -> Fraction:
        return self._entries.get((row, col), _ZERO)

    def items(self) -> Iterator[tuple[tuple[int, int], Fraction]]:
        return iter(self._entries.items())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinOp)
            and self._dom == other._dom
            and self._cod == other._cod
            and self._entries == other._entries
        )

    def __hash__(self) -> int:
        return hash((self._dom, self._cod, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        return f"LinOp({self._dom}->{self._cod}, {len(self._entries)} entries)"

    def apply(self, x: FinVector) -> FinVector:
        if x.dim != self._dom:
            raise ShapeError(f"argument dim {x.dim}, expected {self._dom}")
        acc = [_ZERO] * self._cod
        for (r, c), v in self._entries.items():
            xc = x[c]
            if xc != 0:
                acc[r] += v * xc
        return FinVector(acc)

    def order_adjoint(self) -> "LinOp":
        """T': Q^cod -> Q^dom with T'(f) = f o T, i.e. the transpose."""
        return LinOp(
            self._cod,
            self._dom,
            {(c, r): v for (r, c), v in self._entries.items()},
        )

    def second_adjoint(self) -> "LinOp":
        """T'' computed genuinely as the adjoint of the adjoint."""
        return self.order_adjoint().order_adjoint()

    def as_tensor(self) -> MultiTensor:
        return MultiTensor(
            (self._dom,),
            self._cod,
            {(r, (c,)): v for (r, c), v in self._entries.items()},
        )

    @classmethod
    def from_tensor(cls, tensor: MultiTensor) -> "LinOp":
        if tensor.m != 1:
            raise ShapeError("only arity-1 tensors describe linear operators")
        return cls(
            tensor.domain_dims[0],
            tensor.codomain_dim,
            {(k, idx[0]): v for (k, idx), v in tensor.items()},
        )

    def is_dp(self) -> DPVerdict:
        return self.as_tensor().is_dp()


def canonical_embed(x: FinVector) -> FinVector:
    """Embedding of Q^n into its order bidual.

    Both duals are identified with Q^n via coordinates, and under that
    identification the embedding is the identity. It is kept explicit so
    code that moves between the vector, functional and bidual roles says
    which crossing it intends.
    """
    return x


# -- positive-cone extension -----------------------------------------------------


def extend_from_positive_cone(
    atom_values: Mapping[tuple[int, ...], FinVector],
    domain_dims: Sequence[int],
    codomain_dim: int,
) -> MultiTensor:
    """Multilinear extension of a map given on positive atom tuples.

    ``atom_values`` assigns an output vector to index tuples of atoms;
    missing tuples mean zero. Additivity in each slot over the positive
    cone determines the operator there, and the unique multilinear
    extension to the whole space has exactly these atom values as its
    tensor entries. :func:`sign_expansion_value` evaluates the same
    extension without building the tensor, by splitting every argument
    into positive and negative parts.
    """
    dims = tuple(int(d) for d in domain_dims)
    entries: dict[tuple[int, tuple[int, ...]], Fraction] = {}
    for idx, vec in atom_values.items():
        idx = tuple(int(i) for i in idx)
        if len(idx) != len(dims) or any(not 0 <= i < d for i, d in zip(idx, dims)):
            raise ShapeError(f"atom tuple {idx} out of range for dims {dims}")
        if vec.dim != codomain_dim:
            raise ShapeError(f"value at {idx} has dim {vec.dim}, expected {codomain_dim}")
        for k in range(codomain_dim):
            if vec[k] != 0:
                entries[(k, idx)] = vec[k]
    return MultiTensor(dims, codomain_dim, entries)


def _cone_value(
    atom_values: Mapping[tuple[int, ...], FinVector],
    codomain_dim: int,
    args: Sequence[FinVector],
) -> FinVector:
    acc = [_ZERO] * codomain_dim
    for idx, vec in atom_values.items():
        weight = Fraction(1)
        for i, pos in enumerate(idx):
            c = args[i][pos]
            if c == 0:
                weight = _ZERO
                break
            weight *= c
        if weight != 0:
            for k in range(codomain_dim):
                if vec[k] != 0:
                    acc[k] += weight * vec[k]
    return FinVector(acc)


def sign_expansion_value(
    atom_values: Mapping[tuple[int, ...], FinVector],
    domain_dims: Sequence[int],
    codomain_dim: int,
    args: Sequence[FinVector],
) -> FinVector:
    """Evaluate the positive-cone extension at arbitrary arguments.

    Each argument splits as x = x+ - x-; expanding multilinearly gives a
    signed sum over the 2^m choices of part per slot, every term of which
    only ever sees positive vectors. For arity 2 this is the familiar
    four-term expression B(x+,y+) - B(x+,y-) - B(x-,y+) + B(x-,y-).
    """
    m = len(domain_dims)
    if len(args) != m:
        raise ShapeError(f"expected {m} arguments, got {len(args)}")
    total = FinVector.zero(codomain_dim)
    for signs in itertools.product((0, 1), repeat=m):
        parts = [
            args[i].pos() if s == 0 else args[i].neg() for i, s in enumerate(signs)
        ]
        term = _cone_value(atom_values, codomain_dim, parts)
        if sum(signs) % 2 == 0:
            total = total + term
        else:
            total = total - term
    return total


# -- scalar factorization ----------------------------------------------------------


def factorize_multimorphism(tensor: MultiTensor) -> MultimorphismFactorization:
    """Factor a scalar-valued DP operator through coordinate functionals.

    For a DP form A the modulus has at most one entry, so |A| acts as
    scale * x_1[c_1] * ... * x_m[c_m]. Raises
    :class:`NotDisjointnessPreserving` (with the witness attached) when the
    input is not DP, and :class:`ShapeError` when the codomain is not Q.
    """
    if tensor.codomain_dim != 1:
        raise ShapeError("factorization needs a scalar-valued operator")
    verdict = tensor.is_dp()
    if not verdict.is_dp:
        raise NotDisjointnessPreserving(verdict)
    mod_rows = tensor.modulus().rows()
    if not mod_rows:
        return MultimorphismFactorization(scale=_ZERO, coords=None)
    (_, idx, value), = mod_rows
    return MultimorphismFactorization(scale=value, coords=idx)
