"""Scikit-learn style estimator around :func:`addinfo.decompose.decompose`.

Kept apart from :mod:`addinfo.decompose` so the command line does not pay
for importing scikit-learn.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .decompose import decompose, reconstruct
from .linalg import State

__all__ = ["InformationDecomposer"]


class InformationDecomposer(BaseEstimator):
    """Estimator wrapper around :func:`decompose`.

    ``fit(oracle, rho)`` learns ``mu_`` (a :class:`SignedOperator`) and
    ``sym_table_`` (``I_s`` on sampled profiles); ``predict(partitions)``
    evaluates the reconstructed information.

    >>> from addinfo.families import grouped_state
    >>> from addinfo.functionals import GeneralInformation, Shannon
    >>> rho = grouped_state(8, seed=0)
    >>> est = InformationDecomposer(verify_trials=5).fit(GeneralInformation(rho, None, Shannon()), rho)
    >>> float(abs(est.mu_.matrix).max()) < 1e-8
    True
    """

    def __init__(self, level: int = 2, n_structures: int | None = None, seed: int = 0,
                 additivity_checks: int = 16, additivity_tol: float = 1e-4,
                 verify_trials: int = 100):
        self.level = level
        self.n_structures = n_structures
        self.seed = seed
        self.additivity_checks = additivity_checks
        self.additivity_tol = additivity_tol
        self.verify_trials = verify_trials

    def fit(self, oracle, rho: State):
        report = decompose(
            oracle, rho, level=self.level, n_structures=self.n_structures, seed=self.seed,
            additivity_checks=self.additivity_checks, additivity_tol=self.additivity_tol,
            verify_trials=self.verify_trials,
        )
        self.rho_ = rho
        self.mu_ = report.fitted_mu
        self.sym_table_ = report.sym_samples
        self.cell_measures_ = report.cell_measures
        self.report_ = report
        return self

    def predict(self, partitions) -> np.ndarray:
        check_is_fitted(self, "mu_")
        return np.array([reconstruct(P, self.rho_, self.mu_, self.sym_table_, self.level)
                         for P in partitions])
