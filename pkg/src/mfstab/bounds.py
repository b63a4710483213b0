"""Closed-form stability bounds and the measured quantities they bound.

Every evaluator is pure. Unknown absolute constants are explicit inputs
collected in :class:`BoundConstants` (default 1); logarithms are natural.
Where a formula is stated for ``m <= n`` the larger dimension plays ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, RankDeficiencyError
from .matcore import ObservedMatrix, ProblemShape, SampleSet, project_omega, rmse
from .subgeo import (
    ZERO_SIGMA,
    Subspace,
    canonical_angles,
    column_space,
    complete_columns,
    row_space,
    sin_theta_norm,
)

__all__ = [
    "BoundConstants",
    "BoundReport",
    "REPORT_TOL",
    "tau_omega",
    "empirical_loss",
    "actual_loss",
    "thm1_terms",
    "thm1_rhs",
    "thm2_rhs",
    "stablemc_rhs",
    "optspace_rhs",
    "oracle_complete",
    "thm3_report",
    "thm4_bound",
    "prop1_rhs",
    "prop2_rhs",
    "prop3_rhs",
    "prop4_rhs",
    "weyl_check",
    "reports_to_csv",
]

REPORT_TOL = 1e-9


@dataclass(frozen=True)
class BoundConstants:
    C_thm2: float = 1.0
    C1_prop4: float = 1.0
    C2_prop4: float = 1.0
    C_prop2: float = 1.0
    C_optspace: float = 1.0
    log_base: str = "e"

    def __post_init__(self):
        for name in ("C_thm2", "C1_prop4", "C2_prop4", "C_prop2", "C_optspace"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive")
        if self.log_base != "e":
            raise InvalidArgument("only natural logarithms are supported")


@dataclass(frozen=True)
class BoundReport:
    """One inequality ``lhs <= rhs``; ``satisfied`` is derived, never stored."""

    name: str
    lhs: float
    rhs: float
    inputs: dict = field(default_factory=dict)
    tol: float = REPORT_TOL

    @property
    def satisfied(self) -> bool:
        return bool(self.lhs <= self.rhs + self.tol)

    def params(self) -> str:
        return ";".join(f"{k}={_fmt(v)}" for k, v in sorted(self.inputs.items()))

    def row(self):
        return [self.name, _fmt(self.lhs), _fmt(self.rhs), str(self.satisfied).lower(), self.params()]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def reports_to_csv(path, reports):
    with open(path, "w", newline="") as fh:
        fh.write("name,lhs,rhs,satisfied,params\n")
        for rep in reports:
            fh.write(",".join(rep.row()) + "\n")


def _omega_size(omega: SampleSet) -> int:
    size = len(omega)
    if size == 0:
        raise InvalidArgument("empty sample set")
    return size


def _fourth_root_term(n, r, omega_size):
    if n <= 1:
        raise InvalidArgument("n must exceed 1 so that log(n) > 0")
    if omega_size <= 0:
        raise InvalidArgument("omega_size must be positive")
    return (n * r * math.log(n) / omega_size) ** 0.25


def empirical_loss(X, Y_hat, omega: SampleSet) -> float:
    """RMS residual on the sampled entries only."""
    size = _omega_size(omega)
    return float(np.linalg.norm(project_omega(np.asarray(X) - np.asarray(Y_hat), omega)) / math.sqrt(size))


def actual_loss(X, Y_hat) -> float:
    return rmse(X, Y_hat)


def tau_omega(Y_hat, Y_star, omega: SampleSet) -> float:
    """Gap between the sampled and the full RMS residual of ``Y_star``."""
    _omega_size(omega)
    return abs(empirical_loss(Y_star, Y_hat, omega) - actual_loss(Y_star, Y_hat))


def thm1_terms(E, omega: SampleSet, shape: ProblemShape, k):
    """The three pieces of the RMSE bound, the last without its constant:
    ``(sampled noise RMS, full noise RMS, k * (n r log n / |Omega|)^(1/4))``."""
    size = _omega_size(omega)
    E = np.asarray(E, dtype=float)
    sampled = float(np.linalg.norm(project_omega(E, omega)) / math.sqrt(size))
    full = float(np.linalg.norm(E) / math.sqrt(E.size))
    return sampled, full, k * _fourth_root_term(shape.big, shape.r, size)


def thm1_rhs(E, omega: SampleSet, shape: ProblemShape, k, consts=BoundConstants()) -> float:
    """RMSE bound for the global optimum of the box-constrained program."""
    sampled, full, term = thm1_terms(E, omega, shape, k)
    return sampled + full + consts.C_thm2 * term


def thm2_rhs(shape: ProblemShape, k, omega_size, consts=BoundConstants()) -> float:
    """Uniform gap between empirical and actual loss over rank-r matrices."""
    return consts.C_thm2 * k * _fourth_root_term(shape.big, shape.r, omega_size)


def stablemc_rhs(E, omega: SampleSet, shape: ProblemShape) -> float:
    size = _omega_size(omega)
    pe = np.linalg.norm(project_omega(E, omega))
    return float(math.sqrt(32 * shape.small / size) * pe + pe / math.sqrt(shape.m * shape.n))


def optspace_rhs(E, omega: SampleSet, shape: ProblemShape, kappa, consts=BoundConstants()) -> float:
    size = _omega_size(omega)
    if kappa < 1:
        raise InvalidArgument("condition number must be >= 1")
    pe = project_omega(E, omega)
    spec = np.linalg.svd(pe, compute_uv=False)[0] if pe.size else 0.0
    return float(consts.C_optspace * kappa ** 2 * shape.big * math.sqrt(shape.r) / size * spec)


def oracle_complete(N_gnd: Subspace, obs: ObservedMatrix, Y):
    """Complete ``obs`` column by column with the true subspace.

    ``obs.values`` must hold the full noisy matrix ``Y + E`` (as in simulation);
    ``Y`` is the clean ground truth, used only to form ``E``. The report's
    ``lhs`` is the RMSE of the completion against the noisy matrix and ``rhs``
    the predicted ``||P_Omega(E)||_F / sqrt(|Omega|)``; the two are compared as
    a ratio (``inputs["ratio"]``), not as an inequality. Columns whose
    restricted basis is degenerate are listed in ``inputs["degenerate_columns"]``
    and left as zeros.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.shape != obs.shape:
        raise InvalidArgument("ground truth shape does not match the observations")
    size = _omega_size(obs.omega)
    completion, degenerate = complete_columns(N_gnd, obs.values, obs.omega)
    E = obs.values - Y
    predicted = float(np.linalg.norm(project_omega(E, obs.omega)) / math.sqrt(size))
    measured = rmse(completion, obs.values)
    ratio = measured / predicted if predicted > 0 else (0.0 if measured == 0 else math.inf)
    report = BoundReport(
        "oracle_eq9",
        measured,
        predicted,
        {
            "ratio": ratio,
            "rmse_vs_truth": rmse(completion, Y),
            "degenerate_columns": "|".join(map(str, degenerate)) or "none",
            "omega": size,
        },
    )
    return completion, report


def _sv(X):
    return np.linalg.svd(X, compute_uv=False)


def thm3_report(Y, Y_star, r) -> list:
    """Subspace perturbation bounds for ``Y_star = Y + Delta``.

    Returns sin-Theta (column space) and sin-Phi (row space) bounds in both
    norms plus the three brackets on ``delta = sigma_r(Y_star)``.
    """
    Y = np.asarray(Y, dtype=float)
    Ys = np.asarray(Y_star, dtype=float)
    if Y.shape != Ys.shape:
        raise InvalidArgument("shape mismatch")
    s_star = _sv(Ys)
    if r < 1 or r > s_star.size:
        raise InvalidArgument(f"rank {r} out of range")
    delta = s_star[r - 1]
    if delta <= ZERO_SIGMA * s_star[0]:
        raise RankDeficiencyError("sigma_r of the recovered matrix is numerically zero (degenerate delta)")
    D = Ys - Y
    N, M = column_space(Y, r), row_space(Y, r)
    Ns, Ms = column_space(Ys, r), row_space(Ys, r)
    theta = canonical_angles(N, Ns)
    phi = canonical_angles(M, Ms)
    D_col = D - N.project(D)            # P_{N perp} Delta
    D_row = D.T - M.project(D.T)        # P_{M perp} Delta'
    Y_N = Y + N.project(D)
    Y_M = Y + M.project(D.T).T
    sigma_r = _sv(Y)[r - 1]
    two = _sv(D)[0]
    col2 = _sv(D_col)[0]
    row2 = _sv(D_row)[0]
    base = {"r": r, "delta": float(delta)}
    c = math.sqrt(2) / delta
    return [
        BoundReport("thm3_sin_theta_fro", sin_theta_norm(theta, "frobenius"), c * np.linalg.norm(D_col), base),
        BoundReport("thm3_sin_theta_spec", sin_theta_norm(theta, "spectral"), c * col2, base),
        BoundReport("thm3_sin_phi_fro", sin_theta_norm(phi, "frobenius"), c * np.linalg.norm(D_row), base),
        BoundReport("thm3_sin_phi_spec", sin_theta_norm(phi, "spectral"), c * row2, base),
        BoundReport("thm3_delta_weyl", abs(delta - sigma_r), two, {**base, "sigma_r": float(sigma_r)}),
        BoundReport("thm3_delta_col", abs(delta - _sv(Y_N)[r - 1]), col2, base),
        BoundReport("thm3_delta_row", abs(delta - _sv(Y_M)[r - 1]), row2, base),
    ]


def thm4_bound(rho, sigma_min, y_norm, y_perp_norm=0.0) -> float:
    """Worst-case prediction error for one user from a perturbed subspace.

    ``y_perp_norm`` is the norm of the part of the user outside the true
    subspace; pass 0 for an in-subspace user.
    """
    if not sigma_min > 0:
        raise InvalidArgument("sigma_min must be positive")
    if min(rho, y_norm, y_perp_norm) < 0:
        raise InvalidArgument("inputs must be non-negative")
    return (1 + 1 / sigma_min) * rho * y_norm + y_perp_norm / sigma_min


def prop1_rhs(r, m, p, mu) -> float:
    """Lower bound on sigma_min(N_1) under strong incoherence ``mu``."""
    if m <= 0 or not 0 <= p <= 1 or mu < 0:
        raise InvalidArgument("need m > 0, 0 <= p <= 1, mu >= 0")
    inner = r / m + (1 - p) * mu * math.sqrt(r)
    if inner < 0:
        raise InvalidArgument("negative radicand")
    return 1 - math.sqrt(inner)


def prop2_rhs(observed_rows, m, r, consts=BoundConstants()) -> float:
    """Lower bound on sigma_min(N_1) for a Gaussian-generated basis.

    ``observed_rows`` is the number of rows kept in ``N_1``.
    """
    if not 0 < observed_rows <= m:
        raise InvalidArgument("need 0 < observed_rows <= m")
    return (math.sqrt(observed_rows / m) - 2 * math.sqrt(r / m)
            - consts.C_prop2 * math.sqrt(math.log(m) / m))


def prop3_rhs(s_max, n_e, omega_size, n, r, k, consts=BoundConstants()) -> float:
    """RMSE bound under targeted attacks with ``n_e`` injected profiles."""
    if omega_size <= 0:
        raise InvalidArgument("omega_size must be positive")
    return (4 * k * math.sqrt(s_max * n_e / omega_size)
            + consts.C_thm2 * k * _fourth_root_term(n + n_e, r, omega_size))


def prop4_rhs(kappa, k, r, p, n, consts=BoundConstants()):
    """``(RMSE_Y bound, RMSE_E bound)`` under a mass attack."""
    if not p > 0 or n <= 1 or kappa < 1:
        raise InvalidArgument("need p > 0, n > 1, kappa >= 1")
    honest = consts.C1_prop4 * kappa * k * (r ** 3 * math.log(n) / (p ** 3 * n)) ** 0.25
    attackers = consts.C2_prop4 * k / math.sqrt(p)
    return honest, attackers


def weyl_check(A, Delta) -> BoundReport:
    A = np.asarray(A, dtype=float)
    Delta = np.asarray(Delta, dtype=float)
    if A.shape != Delta.shape:
        raise InvalidArgument("shape mismatch")
    shift = float(np.max(np.abs(_sv(A + Delta) - _sv(A)), initial=0.0))
    return BoundReport("weyl", shift, float(_sv(Delta)[0]) if Delta.size else 0.0,
                       {"shape": f"{A.shape[0]}x{A.shape[1]}"})
