"""Seeded random generators for vectors and tensors.

Everything draws from an explicit :class:`random.Random` so any run can be
replayed from its seed. Used by the property suites and by the CLI demo
commands; nothing here is needed for the core algebra.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .arens import all_permutations, permute_form, _slice_form
from .operators import MultiTensor
from .vectors import FinVector


def random_rational(rng: random.Random, *, span: int = 6, max_den: int = 4) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def nonzero_rational(rng: random.Random, *, span: int = 6, max_den: int = 4) -> Fraction:
    while True:
        value = random_rational(rng, span=span, max_den=max_den)
        if value != 0:
            return value


def random_vector(rng: random.Random, dim: int) -> FinVector:
    return FinVector([random_rational(rng) for _ in range(dim)])


def random_positive_vector(rng: random.Random, dim: int) -> FinVector:
    return FinVector([abs(random_rational(rng)) for _ in range(dim)])


def disjoint_vector_pair(rng: random.Random, dim: int) -> tuple[FinVector, FinVector]:
    """Two vectors with disjoint supports; either side may end up zero."""
    owners = [rng.choice([0, 1, None]) for _ in range(dim)]
    x = [nonzero_rational(rng) if o == 0 else Fraction(0) for o in owners]
    y = [nonzero_rational(rng) if o == 1 else Fraction(0) for o in owners]
    return FinVector(x), FinVector(y)


def random_tensor(
    rng: random.Random,
    domain_dims: tuple[int, ...],
    codomain_dim: int,
    *,
    density: float = 0.5,
) -> MultiTensor:
    entries = {}
    for k in range(codomain_dim):
        for idx in itertools.product(*(range(d) for d in domain_dims)):
            if rng.random() < density:
                entries[(k, idx)] = random_rational(rng)
    return MultiTensor(domain_dims, codomain_dim, entries)


def random_dp_tensor(
    rng: random.Random,
    domain_dims: tuple[int, ...],
    codomain_dim: int,
) -> MultiTensor:
    """At most one nonzero tuple per output coordinate, hence always DP."""
    entries = {}
    cells = list(itertools.product(*(range(d) for d in domain_dims)))
    for k in range(codomain_dim):
        if rng.random() < 0.15:
            continue
        entries[(k, rng.choice(cells))] = nonzero_rational(rng)
    return MultiTensor(domain_dims, codomain_dim, entries)


def slot_asymmetric_tensor(
    rng: random.Random,
    m: int,
    codomain_dim: int = 1,
) -> MultiTensor:
    """A random tensor whose m! permuted slice forms are pairwise distinct.

    Permutations that preserve both the dim profile and the entry pattern
    would make extension traces coincide, so resample until every pair of
    permutations is separated by some output coordinate. For m = 1 there is
    only one permutation and any nonzero tensor will do.
    """
    while True:
        dims = tuple(rng.choice([2, 3]) for _ in range(m))
        tensor = random_tensor(rng, dims, codomain_dim, density=0.6)
        if tensor.nnz() == 0:
            continue
        signatures = []
        for rho in all_permutations(m):
            signatures.append(
                tuple(
                    permute_form(_slice_form(tensor, k), rho).content()
                    for k in range(codomain_dim)
                )
            )
        if len(set(signatures)) == len(signatures):
            return tensor
