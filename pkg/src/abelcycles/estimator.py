"""scikit-learn style front end.

``fit`` samples the four detection curves and builds the lambda band
table; ``transform`` maps energies to detection values and ``predict``
maps lambda0 values to predicted cycle totals.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .cycles import DistributionReport, distribution, lambda_bands
from .detection import DEFAULT_TOL, detection_curve, default_grid
from .exceptions import DomainError
from .hamiltonian import OrbitFamily, SystemParams


class LimitCycleDetector(BaseEstimator):
    """Detect limit cycles of the perturbed quartic system.

    Parameters mirror :class:`SystemParams`; ``grids`` optionally maps a
    family number to an increasing array of energies.
    """

    def __init__(self, a: float = 1.0 / 3.0, b: float = 0.5, n: int = 12, mu: int = 6,
                 beta: int = 6, u: float = 0.007, v: float = -0.028,
                 tol: float = DEFAULT_TOL, grids: dict | None = None):
        self.a = a
        self.b = b
        self.n = n
        self.mu = mu
        self.beta = beta
        self.u = u
        self.v = v
        self.tol = tol
        self.grids = grids

    def _params(self) -> SystemParams:
        return SystemParams(a=self.a, b=self.b, n=self.n, mu=self.mu, beta=self.beta,
                            u=self.u, v=self.v)

    def fit(self, X=None, y=None):
        """Sample every detection curve and build the band table. X is ignored."""
        if self.tol <= 0:
            raise DomainError("tol must be positive")
        params = self._params()
        grids = dict(self.grids or {})
        self.params_ = params
        self.curves_ = {}
        for fam in OrbitFamily:
            grid = grids.get(fam.value, grids.get(fam))
            grid = default_grid(fam, params) if grid is None else np.asarray(grid, dtype=float)
            self.curves_[fam] = detection_curve(fam, grid, params, self.tol)
        self.bands_ = lambda_bands(params, self.curves_)
        return self

    def transform(self, X) -> np.ndarray:
        """Detection values lambda_j(h) for each energy, one column per family.

        Entries are NaN where the family does not exist at that energy.
        """
        check_is_fitted(self, "curves_")
        h = np.asarray(X, dtype=float).ravel()
        if not np.all(np.isfinite(h)):
            raise ValueError("energies must be finite")
        out = np.full((h.size, 4), np.nan)
        for j, fam in enumerate(OrbitFamily):
            curve = self.curves_[fam]
            lo, hi = fam.h_range(self.params_)
            for i, e in enumerate(h):
                if lo < e < hi or e in curve.boundary:
                    try:
                        out[i, j] = curve.evaluate(float(e)).value(self.u, self.v)
                    except DomainError:
                        pass
        return out

    def predict(self, X) -> np.ndarray:
        """Predicted number of limit cycles for each lambda0 in X."""
        check_is_fitted(self, "bands_")
        lam = np.asarray(X, dtype=float).ravel()
        return np.array([self.distribution(float(l)).total for l in lam], dtype=int)

    def distribution(self, lambda0: float) -> DistributionReport:
        check_is_fitted(self, "curves_")
        return distribution(lambda0, self.params_, self.curves_, bands=self.bands_)
