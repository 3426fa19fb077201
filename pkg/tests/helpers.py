"""Independent oracles and enumerators used across the test suite.

The oracles here decide the same questions as the library through a
different route, so a bug would have to hit both sides identically to
slip past. dp_oracle searches actual disjoint argument pairs and checks
image disjointness by evaluation; rank_oracle counts rays of the
atom-image matrix; modulus_oracle recomputes the least majorant pointwise.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from rieszkit import MultiTensor


def disjoint_subset_pairs(dim: int):
    """Unordered pairs of disjoint nonempty subsets of range(dim)."""
    for tags in itertools.product((0, 1, 2), repeat=dim):
        left = [a for a, t in enumerate(tags) if t == 1]
        right = [a for a, t in enumerate(tags) if t == 2]
        if left and right and left[0] < right[0]:
            yield left, right


def dp_oracle(tensor: MultiTensor) -> bool:
    """Brute-force disjointness-preservation check by evaluation.

    For every slot j and every unordered pair of disjoint nonempty subsets
    (S, T) of that slot's coordinates, instantiate x supported on S and y
    on T with coefficients t^(a * stride_j), fill the other slots with the
    full-support vector (t^(r * stride_i))_r, and test whether the two
    images are disjoint. Each image coordinate is then a sum of entry
    values times pairwise-distinct powers of t (the exponent of a
    contributing entry is its mixed-radix linear index, which is
    injective), and t is chosen beyond the Cauchy root bound of any signed
    subset sum of the entries, so a coordinate vanishes exactly when no
    entry contributes. A non-disjoint image pair found this way is a
    genuine counterexample; if no pair fires, every output slice meets at
    most one coordinate of each slot, and arbitrary disjoint arguments
    only shrink image supports below these generic ones.
    """
    rows = tensor.rows()
    if not rows:
        return True
    m, dims = tensor.m, tensor.domain_dims
    scale = math.lcm(*(v.denominator for _, _, v in rows))
    values = [v.numerator * (scale // v.denominator) for _, _, v in rows]
    total = sum(abs(v) for v in values)
    smallest = min(abs(v) for v in values)
    t = 2 + (total + smallest - 1) // smallest
    strides = []
    acc = 1
    for d in dims:
        strides.append(acc)
        acc *= d
    powers = [[t ** (r * strides[i]) for r in range(dims[i])] for i in range(m)]
    for j in range(m):
        # weight of each entry with every slot already contracted generically
        bucket: dict[tuple[int, int], int] = {}
        for (k, idx, _), value in zip(rows, values):
            term = value
            for i in range(m):
                term *= powers[i][idx[i]]
            key = (k, idx[j])
            bucket[key] = bucket.get(key, 0) + term
        for left, right in disjoint_subset_pairs(dims[j]):
            for k in range(tensor.codomain_dim):
                image_x = sum(bucket.get((k, a), 0) for a in left)
                image_y = sum(bucket.get((k, a), 0) for a in right)
                if image_x != 0 and image_y != 0:
                    return False
    return True


def rank_oracle(tensor: MultiTensor) -> int:
    """Dimension of the sublattice generated by the range, counted by rays.

    Every vector of that sublattice arises by applying a positively
    homogeneous piecewise-linear function coordinatewise to the atom
    images, so output coordinates whose rows of the atom-image matrix lie
    on a common ray (positive multiples of each other) can never be
    separated, while rows on distinct rays are independent. The dimension
    is therefore the number of distinct rays among the nonzero rows.
    """
    columns = tensor.atom_images()
    rays = set()
    for i in range(tensor.codomain_dim):
        row = tuple(col[i] for col in columns)
        pivot = next((c for c in row if c != 0), None)
        if pivot is None:
            continue
        rays.add(tuple(c / abs(pivot) for c in row))
    return len(rays)


def modulus_oracle(tensor: MultiTensor) -> MultiTensor:
    """Pointwise least positive majorant of A and -A, built independently."""
    rows = [(k, idx, max(v, -v)) for k, idx, v in tensor.rows()]
    return MultiTensor.from_rows(tensor.domain_dims, tensor.codomain_dim, rows)


def sign_tensors(
    domain_dims: tuple[int, ...],
    codomain_dim: int,
    *,
    max_support: int | None = None,
    dedup_swap: tuple[int, int] | None = None,
):
    """All tensors with entries in {-1, 0, 1} on the given shape.

    With max_support set, only tensors with at most that many nonzero
    cells are produced (each nonzero cell independently +-1). dedup_swap
    names two slots of equal dimension; the enumeration then keeps only
    the lexicographically smaller of each tensor/swapped-tensor pair,
    a sound reduction because disjointness preservation is invariant
    under permuting slots.
    """
    cells = [
        (k, idx)
        for k in range(codomain_dim)
        for idx in itertools.product(*(range(d) for d in domain_dims))
    ]
    one = Fraction(1)
    if dedup_swap is not None:
        a, b = dedup_swap
        if domain_dims[a] != domain_dims[b]:
            raise ValueError("can only dedup across slots of equal dimension")

    def swap_key(rows):
        def swap(idx):
            out = list(idx)
            out[a], out[b] = out[b], out[a]
            return tuple(out)

        return sorted((k, swap(idx), v) for k, idx, v in rows)

    if max_support is None:
        for signs in itertools.product((-one, 0, one), repeat=len(cells)):
            rows = [
                (k, idx, s) for (k, idx), s in zip(cells, signs) if s != 0
            ]
            if dedup_swap is not None and swap_key(rows) < rows:
                continue
            yield MultiTensor.from_rows(domain_dims, codomain_dim, rows)
    else:
        for size in range(max_support + 1):
            for chosen in itertools.combinations(cells, size):
                for signs in itertools.product((-one, one), repeat=size):
                    rows = [(k, idx, s) for (k, idx), s in zip(chosen, signs)]
                    if dedup_swap is not None and swap_key(rows) < rows:
                        continue
                    yield MultiTensor.from_rows(domain_dims, codomain_dim, rows)


def count_sign_tensors(domain_dims, codomain_dim, max_support=None) -> int:
    cells = codomain_dim * math.prod(domain_dims)
    if max_support is None:
        return 3 ** cells
    return sum(math.comb(cells, s) * 2 ** s for s in range(max_support + 1))
