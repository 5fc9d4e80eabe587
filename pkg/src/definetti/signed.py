"""Signed mixtures of class-i.i.d. product laws on a finite state space.

Every class-exchangeable law on S^n is a finite signed combination of the
product laws ``(lambda_1/n_1)^{n_1} x ... x (lambda_k/n_k)^{n_k}`` where
each ``lambda_j`` runs over the compositions of ``n_j`` into ``|S|`` parts.
The weights come from one exact linear solve against the coefficient
matrix ``M[lam, nu] = orbit_size(nu) * lam^nu``, the mass the unnormalized
product measure ``lam`` puts on the orbit ``nu``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._rational import fmt, to_fraction
from .errors import GuardExceeded
from .laws import (
    Composition,
    ExchangeableLaw,
    PartitionSpec,
    StateSpace,
    compositions_of,
    orbit_size,
)
from .semidefinite import bareiss_solve

MAX_COMPOSITIONS = 10**6


def count_compositions(partition: PartitionSpec, space: StateSpace) -> int:
    s = space.size
    return math.prod(math.comb(nj + s - 1, s - 1) for nj in partition.class_sizes)


def enumerate_compositions(partition: PartitionSpec, space: StateSpace) -> list:
    """All per-class compositions, lexicographic with larger first counts first."""
    total = count_compositions(partition, space)
    if total > MAX_COMPOSITIONS:
        raise GuardExceeded(f"{total} compositions exceed the {MAX_COMPOSITIONS} guard")
    per_class = [list(compositions_of(nj, space.size)) for nj in partition.class_sizes]
    return [tuple(c) for c in itertools.product(*per_class)]


def composition_power(alpha: Composition, beta: Composition) -> int:
    """``prod_j prod_s alpha_j[s] ** beta_j[s]`` with ``0 ** 0 = 1``."""
    out = 1
    for a, b in zip(alpha, beta):
        for u, v in zip(a, b):
            if v:
                if u == 0:
                    return 0
                out *= u**v
    return out


def coefficient_matrix(L: Sequence[Composition]) -> list:
    """``M[i][j] = orbit_size(L[j]) * L[i] ** L[j]`` (integers)."""
    if not L:
        raise ValueError("need at least one composition")
    sizes = [orbit_size(c) for c in L]
    return [[sizes[j] * composition_power(lam, nu) for j, nu in enumerate(L)] for lam in L]


def _transpose(M):
    return [list(r) for r in zip(*M)]


def _identity(d):
    return [[int(i == j) for j in range(d)] for i in range(d)]


def orbit_coefficients(L: Sequence[Composition]) -> list:
    """``C[nu][lam]``: uniform law on orbit ``nu`` in the unnormalized product basis.

    Row ``nu`` solves ``M^T c = e_nu``, so that
    ``U_nu = sum_lam C[nu][lam] * (product measure of lam)``.
    """
    M = coefficient_matrix(L)
    inv_t = bareiss_solve(_transpose(M), _identity(len(L)))
    return _transpose(inv_t)


@dataclass(frozen=True)
class SignedMixtureAtom:
    """Per-class probability vectors over S and a (possibly negative) weight."""

    components: tuple
    weight: Fraction

    @property
    def key(self) -> tuple:
        return self.components


@dataclass(frozen=True)
class SignedMixture:
    atoms: tuple
    partition: PartitionSpec
    space: StateSpace

    @property
    def total_weight(self) -> Fraction:
        return sum((a.weight for a in self.atoms), Fraction(0))

    def support(self) -> tuple:
        return tuple(a for a in self.atoms if a.weight != 0)

    def to_json(self) -> dict:
        return {
            "states": list(self.space.labels),
            "partition": [list(c) for c in self.partition.classes],
            "atoms": [
                {"weight": fmt(a.weight), "components": [[fmt(v) for v in comp] for comp in a.components]}
                for a in self.atoms
            ],
        }

    @classmethod
    def from_json(cls, doc) -> SignedMixture:
        space = StateSpace(tuple(doc["states"]))
        partition = PartitionSpec(tuple(tuple(c) for c in doc["partition"]))
        atoms = []
        for a in doc["atoms"]:
            comps = tuple(tuple(to_fraction(v) for v in comp) for comp in a["components"])
            atoms.append(SignedMixtureAtom(comps, to_fraction(a["weight"])))
        return cls(tuple(atoms), partition, space)


def _merge_atoms(atoms: list) -> tuple:
    merged = {}
    for a in atoms:
        merged[a.key] = merged.get(a.key, Fraction(0)) + a.weight
    return tuple(SignedMixtureAtom(k, w) for k, w in merged.items())


def _apply_kronecker(mats: list, vec: list, dims: list) -> list:
    """``(mats[0] (x) mats[1] (x) ...) @ vec`` with row-major composite indices."""
    out = list(vec)
    stride = 1
    for mat, d in zip(reversed(mats), reversed(dims)):
        block = d * stride
        new = [Fraction(0)] * len(out)
        for base in range(0, len(out), block):
            for inner in range(stride):
                col = [out[base + b * stride + inner] for b in range(d)]
                for a in range(d):
                    row = mat[a]
                    new[base + a * stride + inner] = sum(
                        (row[b] * col[b] for b in range(d) if col[b]), Fraction(0)
                    )
        out = new
        stride = block
    return out


def signed_mixture(law: ExchangeableLaw, method: str = "kronecker") -> SignedMixture:
    """Signed directing measure of a class-exchangeable law.

    Atom weights are ``prod_j n_j^{n_j} * sum_nu P(orbit nu) * C[nu][lam]``;
    equivalently they solve ``M^T w' = p`` for the vector ``p`` of orbit
    probabilities.  ``method="kronecker"`` uses ``M = M_1 (x) ... (x) M_k``
    and solves per class; ``method="full"`` solves the whole system.
    """
    space, partition = law.space, law.partition
    L = enumerate_compositions(partition, space)
    orbit_p = law.orbit_probabilities()
    p = [orbit_p.get(c, Fraction(0)) for c in L]
    if method == "full":
        M = coefficient_matrix(L)
        c = [row[0] for row in bareiss_solve(_transpose(M), [[v] for v in p])]
    elif method == "kronecker":
        per_class = [list(compositions_of(nj, space.size)) for nj in partition.class_sizes]
        inverses = []
        for Lj in per_class:
            Mj = coefficient_matrix([(c,) for c in Lj])
            inverses.append(bareiss_solve(_transpose(Mj), _identity(len(Lj))))
        c = _apply_kronecker(inverses, p, [len(Lj) for Lj in per_class])
    else:
        raise ValueError(f"unknown method {method!r}")
    scale = math.prod(nj**nj for nj in partition.class_sizes)
    atoms = []
    for lam, coef in zip(L, c):
        comps = tuple(
            tuple(Fraction(v, nj) for v in counts) for counts, nj in zip(lam, partition.class_sizes)
        )
        atoms.append(SignedMixtureAtom(comps, coef * scale))
    mix = SignedMixture(_merge_atoms(atoms), partition, space)
    if mix.total_weight != 1:  # pragma: no cover - weights of a law sum to its mass
        raise AssertionError(f"signed weights sum to {mix.total_weight}")
    return mix


def dirac_representation(law: ExchangeableLaw) -> SignedMixture:
    """Nonnegative representation over singleton classes: one atom per point."""
    n = law.n
    if law.partition != PartitionSpec.singletons(n):
        raise ValueError("the Dirac representation needs the all-singletons partition")
    labels = law.space.labels
    atoms = []
    for point, value in sorted(law.table.items()):
        comps = tuple(tuple(Fraction(int(s == v)) for s in labels) for v in point)
        atoms.append(SignedMixtureAtom(comps, value))
    return SignedMixture(_merge_atoms(atoms), law.partition, law.space)


def _check_shapes(mix: SignedMixture, n: int):
    if mix.partition.n != n:
        raise ValueError(f"mixture acts on {mix.partition.n} coordinates, point has {n}")


def evaluate_mixture(mix: SignedMixture, point: Sequence) -> Fraction:
    """``sum_atoms w * prod_j prod_{i in I_j} component_j(x_i)``."""
    point = tuple(point)
    _check_shapes(mix, len(point))
    idx = [[mix.space.index(point[i - 1]) for i in cls] for cls in mix.partition.classes]
    total = Fraction(0)
    for atom in mix.atoms:
        if atom.weight == 0:
            continue
        term = atom.weight
        for comp, positions in zip(atom.components, idx):
            for s in positions:
                term *= comp[s]
                if not term:
                    break
            if not term:
                break
        total += term
    return total


def verify_representation(law: ExchangeableLaw, mix: SignedMixture) -> bool:
    """Exact pointwise equality of the mixture and the law over all of S^n."""
    if mix.partition != law.partition or mix.space != law.space:
        return False
    return all(evaluate_mixture(mix, x) == law.prob(x) for x in law.points())


def negative_mass(mix: SignedMixture) -> Fraction:
    """Total mass of the negative part of the weights."""
    return -sum((a.weight for a in mix.atoms if a.weight < 0), Fraction(0))
