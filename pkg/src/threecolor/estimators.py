"""scikit-learn style front ends.

The coloring is transductive, like a clustering: ``fit`` colors the given
points and stores them in ``labels_``; there is no ``predict`` for new data.
"""

from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points
from .body import equilateral_cones, make_disk_approx
from .essw import practical_params
from .pipeline import PipelineConfig, color_points, cone_color_points


class _ColoringBase(ClusterMixin, BaseEstimator):
    def _config(self):
        essw = None
        if self.mode == "practical":
            essw = practical_params(delta=self.delta, g=self.g, max_retries=self.max_retries)
        return PipelineConfig(m=self.m, mode=self.mode, essw=essw, r=self.r, seed=self.seed, verify=self.verify)

    def _store(self, result):
        self.result_ = result
        self.labels_ = result.coloring.colors.copy()
        self.m_effective_ = result.max_m_effective
        self.cells_ = [c.to_json() for c in result.cells]
        self.n_violations_ = sum(len(c.violations) for c in result.cells)
        return self

    @property
    def report_(self):
        check_is_fitted(self, "result_")
        return self.result_.to_json()


class TranslateThreeColoring(_ColoringBase):
    """Three-color points against monochromatic heavy translates of ``body``.

    Parameters
    ----------
    body : ConvexBody, default None
        The body; None means a 180-gon approximating the unit disk.
    m : int
        Requested per-cell threshold (the run reports what it achieved).
    mode : {"practical", "paper"}
    delta, g, max_retries :
        Domination parameters for practical mode.
    r : float or "auto"
        Grid cell side.
    seed : int
    verify : bool
        Check every cell against the range oracle.

    Attributes
    ----------
    labels_ : ndarray of int in {1, 2, 3}
    achieved_m_prime_ : int
    r_ : float
    """

    def __init__(self, body=None, m=13, mode="practical", delta=0.1, g=None, r="auto", max_retries=50, seed=0, verify=True):
        self.body = body
        self.m = m
        self.mode = mode
        self.delta = delta
        self.g = g
        self.r = r
        self.max_retries = max_retries
        self.seed = seed
        self.verify = verify

    def fit(self, X, y=None):
        P = check_points(X)
        body = make_disk_approx(1.0, 180) if self.body is None else self.body
        result = color_points(P, body, self._config())
        self.achieved_m_prime_ = result.achieved_m_prime
        self.r_ = result.r
        return self._store(result)


class ConeThreeColoring(_ColoringBase):
    """Three-color points against monochromatic heavy translates of three tri-partition cones.

    ``cones`` defaults to the equilateral set.
    """

    def __init__(self, cones=None, m=13, mode="practical", delta=0.1, g=None, max_retries=50, seed=0, verify=True):
        self.cones = cones
        self.m = m
        self.mode = mode
        self.delta = delta
        self.g = g
        self.max_retries = max_retries
        self.seed = seed
        self.verify = verify

    @property
    def r(self):
        return "auto"

    def fit(self, X, y=None):
        P = check_points(X)
        cones = equilateral_cones() if self.cones is None else tuple(self.cones)
        return self._store(cone_color_points(P, cones, self._config()))
