"""Random exact laws shared by the test modules."""

import itertools
import math
import random
from fractions import Fraction

from definetti.binary import BinaryLawX
from definetti.laws import ExchangeableLaw, PartitionSpec, StateSpace, compositions_of


def random_simplex_point(rng, s, den=12):
    """Rational probability vector with entries on a grid of ``1/den``."""
    cuts = sorted(rng.randint(0, den) for _ in range(s - 1))
    edges = [0] + cuts + [den]
    return tuple(Fraction(b - a, den) for a, b in zip(edges, edges[1:]))


def random_weights(rng, k):
    raw = [rng.randint(1, 9) for _ in range(k)]
    tot = sum(raw)
    return [Fraction(r, tot) for r in raw]


def binary_mixture_law(atoms, n):
    """x-vector of ``sum_r w_r Bern(p_r)^n``."""
    return BinaryLawX(
        tuple(sum(w * p ** (n - i) * (1 - p) ** i for p, w in atoms) for i in range(n + 1))
    )


def random_binary_mixture(rng, n, max_atoms=4, den=20):
    k = rng.randint(1, max_atoms)
    ps = [Fraction(rng.randint(0, den), den) for _ in range(k)]
    return binary_mixture_law(list(zip(ps, random_weights(rng, k))), n)


def random_binary_uniform(rng, n, top=30):
    """x with independent uniform integer entries, then normalized."""
    raw = [rng.randint(0, top) for _ in range(n + 1)]
    if not any(raw):
        raw[rng.randrange(n + 1)] = 1
    tot = sum(math.comb(n, i) * v for i, v in enumerate(raw))
    return BinaryLawX(tuple(Fraction(v, tot) for v in raw))


def random_binary_law(rng, n):
    """Mix of the two generators so that both verdicts are well represented."""
    if rng.random() < 0.5:
        return random_binary_mixture(rng, n)
    return random_binary_uniform(rng, n)


def random_partition(rng, n, k):
    """Random split of ``1..n`` into ``k`` nonempty classes."""
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    cuts = sorted(rng.sample(range(1, n), k - 1)) if k > 1 else []
    edges = [0] + cuts + [n]
    return PartitionSpec(tuple(tuple(perm[a:b]) for a, b in zip(edges, edges[1:])))


def labels(s):
    return StateSpace(tuple(str(i) for i in range(s)))


def random_exchangeable_law(rng, space, partition, zero_prob=0.3):
    """Random orbit probabilities, some orbits left empty."""
    per_class = [list(compositions_of(nj, space.size)) for nj in partition.class_sizes]
    comps = list(itertools.product(*per_class))
    raw = {c: rng.randint(1, 20) for c in comps if rng.random() >= zero_prob}
    if not raw:
        raw[rng.choice(comps)] = 1
    tot = sum(raw.values())
    return ExchangeableLaw.from_orbits(space, partition, {c: Fraction(v, tot) for c, v in raw.items()})


def product_mixture_law(space, partition, atoms):
    """``sum_r w_r prod_j nu_{r,j}^{n_j}`` with rational per-class vectors."""
    table = {}
    for point in itertools.product(space.labels, repeat=partition.n):
        parts = partition.split(point)
        total = Fraction(0)
        for comps, w in atoms:
            term = w
            for comp, sub in zip(comps, parts):
                for v in sub:
                    term *= comp[space.index(v)]
            total += term
        table[point] = total
    return ExchangeableLaw(space, partition, table)


def random_product_mixture(rng, space, partition, max_atoms=3):
    k = rng.randint(1, max_atoms)
    atoms = [
        (tuple(random_simplex_point(rng, space.size) for _ in partition.classes), w)
        for w in random_weights(rng, k)
    ]
    return product_mixture_law(space, partition, atoms), atoms


def rng_for(seed):
    return random.Random(seed)
