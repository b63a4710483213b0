"""Ground-truth generation and profile-injection attacks.

Attackers are extra columns appended to the honest ratings, ``[Y | E]``.
Their ground truth is the projection of each attacker onto the honest column
space; the remainder is treated as additive error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .subgeo import Subspace

__all__ = [
    "AttackSpec",
    "AttackedDataset",
    "gen_ground_truth_gaussian",
    "targeted_attack",
    "mass_attack",
    "decompose_against_subspace",
    "assemble",
    "split_rmse",
]


@dataclass(frozen=True)
class AttackSpec:
    model: str = "targeted"
    n_e: int = 0
    n_push: int = 2
    n_nuke: int = 2
    k: float = 1.0

    def __post_init__(self):
        if self.model not in ("targeted", "mass"):
            raise InvalidArgument(f"unknown attack model {self.model!r}")
        if self.n_e < 0 or self.n_push < 0 or self.n_nuke < 0:
            raise InvalidArgument("attack counts must be non-negative")
        if not self.k > 0:
            raise InvalidArgument("k must be positive")

    @property
    def s_max(self) -> int:
        return self.n_push + self.n_nuke if self.model == "targeted" else 0


@dataclass(frozen=True, eq=False)
class AttackedDataset:
    combined: np.ndarray = field(repr=False)
    ground_truth: np.ndarray = field(repr=False)
    orthogonal_part: np.ndarray = field(repr=False)
    honest_cols: int
    attacker_cols: int

    @property
    def Y(self):
        return self.ground_truth[:, :self.honest_cols]

    @property
    def E(self):
        return self.combined[:, self.honest_cols:]

    @property
    def E_gnd(self):
        return self.ground_truth[:, self.honest_cols:]

    @property
    def E_perp(self):
        return self.orthogonal_part[:, self.honest_cols:]


def gen_ground_truth_gaussian(m, n, r, scale=1.0, seed=None) -> np.ndarray:
    """Rank-``r`` product of two Gaussian factors with entry std ``scale``."""
    if r < 0 or r > min(m, n):
        raise InvalidArgument(f"rank {r} exceeds min(m, n) = {min(m, n)}")
    rng = np.random.default_rng(seed)
    G1 = rng.normal(0.0, scale, size=(m, r))
    G2 = rng.normal(0.0, scale, size=(n, r))
    return G1 @ G2.T


def targeted_attack(Y, spec: AttackSpec, seed=None) -> np.ndarray:
    """Copies of random honest columns with a few items pushed to +k or nuked to -k."""
    if spec.model != "targeted":
        raise InvalidArgument("spec.model must be 'targeted'")
    Y = np.asarray(Y, dtype=float)
    m, n = Y.shape
    s = spec.n_push + spec.n_nuke
    if s > m:
        raise InvalidArgument(f"{s} targets exceed {m} items")
    if spec.n_e and n == 0:
        raise InvalidArgument("no honest columns to imitate")
    rng = np.random.default_rng(seed)
    E = np.empty((m, spec.n_e))
    for a in range(spec.n_e):
        E[:, a] = Y[:, rng.integers(n)]
        items = rng.choice(m, size=s, replace=False)
        E[items[:spec.n_push], a] = spec.k
        E[items[spec.n_push:], a] = -spec.k
    return E


def mass_attack(m, spec: AttackSpec, seed=None) -> np.ndarray:
    """Random-attack profiles: i.i.d. uniform ratings on ``[-k, k]``."""
    if spec.model != "mass":
        raise InvalidArgument("spec.model must be 'mass'")
    rng = np.random.default_rng(seed)
    return rng.uniform(-spec.k, spec.k, size=(m, spec.n_e))


def decompose_against_subspace(E, N: Subspace):
    E = np.asarray(E, dtype=float)
    if E.ndim == 1:
        E = E[:, None]
    if E.shape[0] != N.ambient:
        raise InvalidArgument(f"{E.shape[0]} rows vs subspace in R^{N.ambient}")
    E_gnd = N.project(E)
    return E_gnd, E - E_gnd


def assemble(Y, E, N_gnd: Subspace) -> AttackedDataset:
    Y = np.asarray(Y, dtype=float)
    E = np.asarray(E, dtype=float).reshape(Y.shape[0], -1)
    if E.shape[0] != Y.shape[0]:
        raise InvalidArgument("honest and attacker blocks differ in row count")
    E_gnd, E_perp = decompose_against_subspace(E, N_gnd)
    combined = np.hstack([Y, E])
    ortho = np.hstack([np.zeros_like(Y), E_perp])
    # ground truth as combined - ortho so that the sum reproduces combined exactly
    return AttackedDataset(combined, combined - ortho, ortho, Y.shape[1], E.shape[1])


def split_rmse(recovered, dataset: AttackedDataset):
    """``(RMSE_Y, RMSE_E)`` over the honest and attacker blocks."""
    recovered = np.asarray(recovered, dtype=float)
    if recovered.shape != dataset.ground_truth.shape:
        raise InvalidArgument("recovered matrix shape does not match the dataset")
    n = dataset.honest_cols
    m = recovered.shape[0]
    diff = recovered - dataset.ground_truth
    rmse_y = float(np.linalg.norm(diff[:, :n]) / math.sqrt(m * n)) if n else 0.0
    ne = dataset.attacker_cols
    rmse_e = float(np.linalg.norm(diff[:, n:]) / math.sqrt(m * ne)) if ne else 0.0
    return rmse_y, rmse_e
