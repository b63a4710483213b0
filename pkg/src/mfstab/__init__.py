"""Stability toolkit for low-rank matrix factorization.

Submodules
----------
matcore
    Sample sets, the sampling operator, norms, RMSE and CSV i/o.
factor
    Alternating least squares for the masked rank-r program.
subgeo
    Orthonormal bases, canonical angles and column completion.
bounds
    Closed-form stability bounds and their measured counterparts.
attacks
    Ground-truth generation and profile-injection attacks.
harness
    Experiment runner and command-line interface.
"""
from ._backend import BACKEND
from .errors import DegenerateMaskError, InvalidArgument, ParseError, RankDeficiencyError
from .factor import FactorPair, SolveResult, SolverConfig, als_solve, objective
from .matcore import ObservedMatrix, ProblemShape, SampleSet, project_omega, rmse, sample_uniform
from .subgeo import CanonicalAngles, Subspace, canonical_angles, orthonormalize

__version__ = "0.1.0"
