"""Bidual extensions of multilinear operators, one per permutation.

For an m-linear operator A and a permutation rho of the slots, the
extension is computed against each dual atom y' of the codomain by a
chain of explicit steps:

1. form the scalar m-form y' o A,
2. permute its slots into the order rho(1), ..., rho(m),
3. repeatedly flip the first remaining slot into a dual-vector-valued map
   and collapse it with the bidual argument for that slot, rho(1) first.

After m contractions a scalar remains; running the chain over atom
biduals assembles the extension's tensor, which on these coordinatewise
spaces always equals the original tensor (every space is reflexive, so
restricting the extension along the canonical embeddings recovers A).
The pipeline is kept honest anyway: each permutation goes through its own
contraction order, and the recorded intermediate forms genuinely differ
between permutations whenever the tensor has no accidental slot symmetry.

The contraction core is shared with the sequence model
(:mod:`rieszkit.seqmodel`), which runs the same chain over finitely
supported forms indexed by sequence positions instead of finite slots.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .operators import (
    DPVerdict,
    MultiTensor,
    NotDisjointnessPreserving,
    ShapeError,
)
from .vectors import FinVector

_ZERO = Fraction(0)


class Permutation:
    """Permutation of m slots, stored 0-based with an eagerly built inverse."""

    __slots__ = ("_images", "_inv")

    def __init__(self, images: Sequence[int]) -> None:
        imgs = tuple(int(i) for i in images)
        m = len(imgs)
        if sorted(imgs) != list(range(m)) or m == 0:
            raise ValueError(f"not a permutation of 0..{m - 1}: {imgs}")
        inv = [0] * m
        for i, img in enumerate(imgs):
            inv[img] = i
        self._images = imgs
        self._inv = tuple(inv)

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(range(m))

    @classmethod
    def theta(cls, m: int) -> "Permutation":
        """The reversing permutation: slot m first, slot 1 last (1-based).

        The extension it induces is the classical iterated-adjoint one.
        """
        return cls(range(m - 1, -1, -1))

    @classmethod
    def from_cycles(cls, text: str, m: int) -> "Permutation":
        """Parse 1-based cycle notation such as "(1 2)(3)"."""
        if not re.fullmatch(r"\s*(\([^()]*\)\s*)+", text):
            raise ValueError(f"not cycle notation: {text!r}")
        images = list(range(m))
        seen: set[int] = set()
        for body in re.findall(r"\(([^()]*)\)", text):
            points = [int(p) for p in body.split()]
            if any(not 1 <= p <= m for p in points):
                raise ValueError(f"cycle point out of range 1..{m}: {body!r}")
            if len(set(points)) != len(points) or seen & set(points):
                raise ValueError(f"repeated point in cycles: {text!r}")
            seen.update(points)
            for a, b in zip(points, points[1:] + points[:1]):
                images[a - 1] = b - 1
        return cls(images)

    @property
    def m(self) -> int:
        return len(self._images)

    def __call__(self, i: int) -> int:
        return self._images[i]

    def apply_inverse(self, i: int) -> int:
        return self._inv[i]

    def inverse(self) -> "Permutation":
        return Permutation(self._inv)

    def one_line(self) -> tuple[int, ...]:
        """Images as 1-based one-line notation, for display."""
        return tuple(i + 1 for i in self._images)

    def is_identity(self) -> bool:
        return self._images == tuple(range(len(self._images)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._images == other._images

    def __hash__(self) -> int:
        return hash(self._images)

    def __lt__(self, other: "Permutation") -> bool:
        return self._images < other._images

    def __repr__(self) -> str:
        return f"Permutation{self.one_line()}"


def all_permutations(m: int) -> Iterator[Permutation]:
    """All m! slot permutations in lexicographic order."""
    for images in itertools.permutations(range(m)):
        yield Permutation(images)


class IntermediateForm:
    """Scalar-valued multilinear form on the slots still awaiting contraction.

    ``dims`` are the remaining slot dimensions in contraction order and
    ``labels`` remember which original slot each one is. Equality compares
    dims and entries only: two forms are the same data regardless of how
    their slots were labelled, which is what trace comparisons need.
    """

    __slots__ = ("_dims", "_labels", "_entries")

    def __init__(
        self,
        dims: Sequence[int],
        labels: Sequence[int],
        entries: Mapping[tuple[int, ...], object],
    ) -> None:
        self._dims = tuple(int(d) for d in dims)
        self._labels = tuple(int(l) for l in labels)
        if len(self._dims) != len(self._labels):
            raise ShapeError("dims and labels must align")
        clean: dict[tuple[int, ...], Fraction] = {}
        for idx, raw in entries.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != len(self._dims) or any(
                not 0 <= i < d for i, d in zip(idx, self._dims)
            ):
                raise ShapeError(f"index {idx} out of range for dims {self._dims}")
            value = raw if isinstance(raw, Fraction) else Fraction(raw)
            if value != 0:
                clean[idx] = value
        self._entries = clean

    @property
    def dims(self) -> tuple[int, ...]:
        return self._dims

    @property
    def labels(self) -> tuple[int, ...]:
        return self._labels

    @property
    def entries(self) -> dict[tuple[int, ...], Fraction]:
        return self._entries

    def is_scalar(self) -> bool:
        return not self._dims

    def scalar(self) -> Fraction:
        if self._dims:
            raise ShapeError(f"{len(self._dims)} slots still to contract")
        return self._entries.get((), _ZERO)

    def content(self) -> tuple:
        """Hashable content key: dims plus sorted entries, labels excluded."""
        return (self._dims, tuple(sorted(self._entries.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, IntermediateForm) and (
            self._dims == other._dims and self._entries == other._entries
        )

    def __hash__(self) -> int:
        return hash(self.content())

    def __repr__(self) -> str:
        return f"IntermediateForm(dims={self._dims}, labels={self._labels}, {len(self._entries)} entries)"


class FlippedForm:
    """A form read as a dual-vector-valued map in its first remaining slot.

    For B on slots (s_1, ..., s_r), the flip sends the tail arguments
    (x_2, ..., x_r) to the functional x_1 |-> B(x_1, x_2, ..., x_r); here
    that functional is materialized as its coefficient vector.
    """

    __slots__ = ("_form",)

    def __init__(self, form: IntermediateForm) -> None:
        if form.is_scalar():
            raise ShapeError("nothing left to flip on a scalar form")
        self._form = form

    @property
    def first_dim(self) -> int:
        return self._form.dims[0]

    @property
    def first_label(self) -> int:
        return self._form.labels[0]

    def rest_support(self) -> list[tuple[int, ...]]:
        return sorted({idx[1:] for idx in self._form.entries})

    def dual_vector(self, rest: tuple[int, ...]) -> FinVector:
        coords = [_ZERO] * self.first_dim
        for idx, v in self._form.entries.items():
            if idx[1:] == rest:
                coords[idx[0]] += v
        return FinVector(coords)


def flip(form: IntermediateForm) -> FlippedForm:
    return FlippedForm(form)


def _contract_entries(
    entries: Mapping[tuple, Fraction],
    coefficient: Callable[[object], Fraction],
) -> dict[tuple, Fraction]:
    """Collapse the first index of a sparse form against a coefficient lookup.

    This is the pairing of a bidual element with the flipped form, written
    sparsely: out[rest] = sum_j coefficient(j) * entries[(j,) + rest]. The
    sequence model reuses it with sequence positions as indices.
    """
    out: dict[tuple, Fraction] = {}
    for idx, value in entries.items():
        c = coefficient(idx[0])
        if c == 0:
            continue
        rest = idx[1:]
        acc = out.get(rest, _ZERO) + c * value
        if acc == 0:
            out.pop(rest, None)
        else:
            out[rest] = acc
    return out


def permute_form(form: IntermediateForm, rho: Permutation) -> IntermediateForm:
    """Rearrange a full-arity scalar form to read its slots in rho-order.

    The result C_rho satisfies C_rho(x_1, ..., x_m) = C(x_{rho^-1(1)}, ...,
    x_{rho^-1(m)}): its l-th slot is the original slot rho(l).
    """
    if rho.m != len(form.dims):
        raise ShapeError(f"permutation of {rho.m} slots against {len(form.dims)}")
    dims = tuple(form.dims[rho(l)] for l in range(rho.m))
    labels = tuple(form.labels[rho(l)] for l in range(rho.m))
    entries = {
        tuple(idx[rho(l)] for l in range(rho.m)): v for idx, v in form.entries.items()
    }
    return IntermediateForm(dims, labels, entries)


def contract(x_bidual: FinVector, form: IntermediateForm) -> IntermediateForm:
    """Collapse the first remaining slot against a bidual element.

    Equivalent to composing the flip of the form with x_bidual; computed
    sparsely over the entries instead of materializing each dual vector.
    """
    if form.is_scalar():
        raise ShapeError("no slot left to contract")
    if x_bidual.dim != form.dims[0]:
        raise ShapeError(
            f"bidual dim {x_bidual.dim} against slot dim {form.dims[0]}"
        )
    entries = _contract_entries(form.entries, lambda j: x_bidual[j])
    return IntermediateForm(form.dims[1:], form.labels[1:], entries)


def _slice_form(tensor: MultiTensor, out_coord: int) -> IntermediateForm:
    """The scalar form y' o A for the dual atom y' at one output coordinate."""
    entries = {idx: v for (k, idx), v in tensor.items() if k == out_coord}
    return IntermediateForm(tensor.domain_dims, range(tensor.m), entries)


@dataclass(frozen=True)
class ArensResult:
    """Extension tensor for one permutation, with optional chain trace.

    ``trace`` maps each output coordinate to the permuted form followed by
    the forms after each all-ones contraction; it is only recorded on
    request and is bounded by (m + 1) forms per dual atom.
    """

    permutation: Permutation
    tensor: MultiTensor
    trace: dict[int, tuple[IntermediateForm, ...]] | None = None


def arens_extension(
    tensor: MultiTensor, rho: Permutation, with_trace: bool = False
) -> ArensResult:
    """Assemble the rho-extension tensor by running the chain on atom biduals.

    Multilinearity means values on atom tuples describe the extension
    completely. The atom walk contracts the permuted form against every
    atom of the first remaining slot simultaneously (grouping entries by
    leading index, which is what contracting with each atom computes) and
    descends, so each output coordinate costs one pass per level.
    """
    if rho.m != tensor.m:
        raise ShapeError(f"permutation arity {rho.m} against tensor arity {tensor.m}")
    entries: dict[tuple[int, tuple[int, ...]], Fraction] = {}
    trace: dict[int, tuple[IntermediateForm, ...]] = {}
    for k in range(tensor.codomain_dim):
        permuted = permute_form(_slice_form(tensor, k), rho)
        if with_trace:
            chain = [permuted]
            form = permuted
            while not form.is_scalar():
                form = contract(FinVector.ones(form.dims[0]), form)
                chain.append(form)
            trace[k] = tuple(chain)
        _assemble(permuted, rho, k, [], entries)
    result = MultiTensor(tensor.domain_dims, tensor.codomain_dim, entries)
    return ArensResult(rho, result, trace if with_trace else None)


def _assemble(
    form: IntermediateForm,
    rho: Permutation,
    out_coord: int,
    chosen: list[int],
    entries: dict[tuple[int, tuple[int, ...]], Fraction],
) -> None:
    if form.is_scalar():
        value = form.scalar()
        if value != 0:
            idx = [0] * rho.m
            for level, atom in enumerate(chosen):
                idx[rho(level)] = atom
            entries[(out_coord, tuple(idx))] = value
        return
    groups: dict[int, dict[tuple[int, ...], Fraction]] = {}
    for idx, v in form.entries.items():
        groups.setdefault(idx[0], {})[idx[1:]] = v
    for atom in sorted(groups):
        child = IntermediateForm(form.dims[1:], form.labels[1:], groups[atom])
        _assemble(child, rho, out_coord, chosen + [atom], entries)


def arens_evaluate(
    tensor: MultiTensor, rho: Permutation, biduals: Sequence[FinVector]
) -> FinVector:
    """Evaluate the rho-extension at one bidual element per original slot.

    ``biduals[i]`` is the argument for slot i of A; the chain consumes them
    in the order rho(1), ..., rho(m). The result lives in the codomain's
    bidual, identified with the codomain itself.
    """
    if len(biduals) != tensor.m:
        raise ShapeError(f"expected {tensor.m} bidual arguments, got {len(biduals)}")
    for i, (x, d) in enumerate(zip(biduals, tensor.domain_dims)):
        if x.dim != d:
            raise ShapeError(f"slot {i}: bidual dim {x.dim}, expected {d}")
    out = []
    for k in range(tensor.codomain_dim):
        form = permute_form(_slice_form(tensor, k), rho)
        while not form.is_scalar():
            form = contract(biduals[form.labels[0]], form)
        out.append(form.scalar())
    return FinVector(out)


@dataclass(frozen=True)
class DpPreservationReport:
    """Per-permutation DP verdicts for every extension of a DP operator."""

    input_certificate: DPVerdict
    per_permutation: tuple[tuple[Permutation, DPVerdict], ...]

    @property
    def all_dp(self) -> bool:
        return all(v.is_dp for _, v in self.per_permutation)


def check_dp_preservation(
    tensor: MultiTensor, rhos: Iterable[Permutation] | None = None
) -> DpPreservationReport:
    """Extend a DP operator along every permutation and re-decide DP.

    Raises :class:`NotDisjointnessPreserving` when the input itself is not
    DP; the witness travels with the exception.
    """
    verdict = tensor.is_dp()
    if not verdict.is_dp:
        raise NotDisjointnessPreserving(verdict)
    perms = list(rhos) if rhos is not None else list(all_permutations(tensor.m))
    results = []
    for rho in perms:
        extension = arens_extension(tensor, rho)
        results.append((rho, extension.tensor.is_dp()))
    return DpPreservationReport(verdict, tuple(results))


def is_dp_functional(y_dual: FinVector) -> bool:
    """A functional preserves disjointness iff at most one coordinate is nonzero."""
    return len(y_dual.support()) <= 1


def _random_vector(rng: random.Random, dim: int) -> FinVector:
    return FinVector(
        [
            Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            for _ in range(dim)
        ]
    )


def pairing_identities(
    tensor: MultiTensor,
    y_dual: FinVector,
    *,
    samples: int = 20,
    seed: int = 0,
    rhos: Iterable[Permutation] | None = None,
) -> bool:
    """Check the modulus pairing laws of the extensions of a DP operator.

    For every permutation and sampled bidual tuple u = (u_1, ..., u_m),
    with E = extension value, the three quantities |E(u)| applied to |y'|,
    |E(|u_1|, ..., |u_m|) applied to y'| and |E(u) applied to y'| must
    agree, and y' o E must itself be a DP scalar form. ``y_dual`` must be a
    DP functional (at most one nonzero coordinate).
    """
    if y_dual.dim != tensor.codomain_dim:
        raise ShapeError(f"functional dim {y_dual.dim} against codomain {tensor.codomain_dim}")
    if not is_dp_functional(y_dual):
        raise ValueError("y_dual is not disjointness preserving (support > 1)")
    verdict = tensor.is_dp()
    if not verdict.is_dp:
        raise NotDisjointnessPreserving(verdict)
    rng = random.Random(seed)
    perms = list(rhos) if rhos is not None else list(all_permutations(tensor.m))
    abs_y = abs(y_dual)
    for rho in perms:
        composed = MultiTensor(
            tensor.domain_dims,
            1,
            _composed_entries(arens_extension(tensor, rho).tensor, y_dual),
        )
        if not composed.is_dp().is_dp:
            return False
        for _ in range(samples):
            biduals = [_random_vector(rng, d) for d in tensor.domain_dims]
            value = arens_evaluate(tensor, rho, biduals)
            value_abs_args = arens_evaluate(tensor, rho, [abs(b) for b in biduals])
            lhs = abs(value).dot(abs_y)
            mid = abs(value_abs_args.dot(y_dual))
            rhs = abs(value.dot(y_dual))
            if not (lhs == mid == rhs):
                return False
    return True


def _composed_entries(
    tensor: MultiTensor, y_dual: FinVector
) -> dict[tuple[int, tuple[int, ...]], Fraction]:
    entries: dict[tuple[int, tuple[int, ...]], Fraction] = {}
    for (k, idx), v in tensor.items():
        c = y_dual[k]
        if c == 0:
            continue
        key = (0, idx)
        acc = entries.get(key, _ZERO) + c * v
        if acc == 0:
            entries.pop(key, None)
        else:
            entries[key] = acc
    return entries


def span_disjointness(
    tensor: MultiTensor,
    slot: int,
    w: FinVector,
    z: FinVector,
    fixed: Mapping[int, FinVector],
    y_star: FinVector,
    *,
    rhos: Iterable[Permutation] | None = None,
) -> bool:
    """Disjointness of extension images, observed through one functional.

    For disjoint w, z placed in ``slot`` (other slots pinned by ``fixed``)
    and any functional y*, the extension images u, v of a DP operator must
    satisfy (|u| inf |v|) applied to |y*| = 0. Note the modulus is taken
    before pairing: the scalars u(y*) and v(y*) themselves need not be
    disjoint in Q (already u = e_1, v = e_2 against y* = (1, 1) gives two
    nonzero scalars), which is why the check is stated this way.
    """
    if not w.is_disjoint(z):
        raise ValueError("w and z are not disjoint")
    if y_star.dim != tensor.codomain_dim:
        raise ShapeError("functional dimension does not match the codomain")
    perms = list(rhos) if rhos is not None else list(all_permutations(tensor.m))
    args_w = []
    args_z = []
    for i in range(tensor.m):
        if i == slot:
            args_w.append(w)
            args_z.append(z)
        else:
            args_w.append(fixed[i])
            args_z.append(fixed[i])
    abs_y = abs(y_star)
    for rho in perms:
        u = arens_evaluate(tensor, rho, args_w)
        v = arens_evaluate(tensor, rho, args_z)
        if abs(u).inf(abs(v)).dot(abs_y) != 0:
            return False
    return True
