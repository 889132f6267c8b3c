"""scikit-learn compatible wrappers.

``FamilyStateTransformer`` maps rows of angles ``(alpha, beta)`` to state
amplitudes and ``EntropicInequalityTransformer`` maps rows of amplitudes to
the inequality value (and optionally its entropy terms), so the two compose
in a :class:`sklearn.pipeline.Pipeline`::

    pipe = make_pipeline(FamilyStateTransformer("entangled"), EntropicInequalityTransformer())
    pipe.fit_transform([[3.4899, 2.9012]])  # -> [[0.07715...]]

scikit-learn's ``check_array`` rejects complex input, hence the local
validation helpers.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .entropy import binary_entropy_array, xlog2x
from .inequality import batch_probabilities, m_from_probabilities
from .model import (
    DIM,
    UNIT_NORM_TOL,
    CyclicObservableSet,
    FamilyKind,
    build_observables,
    default_observables,
    family_amplitudes,
    product_is_degenerate,
)


def check_states(X, normalize: bool = False) -> np.ndarray:
    """Validate a 2-D array of state amplitudes, one state per row.

    Rows that are entirely NaN (holes produced upstream) pass through.
    Other rows must be finite and, unless ``normalize`` is set, unit norm.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        raise ValueError("expected a 2-D array of states; reshape a single state with X.reshape(1, -1)")
    if X.ndim != 2 or X.shape[1] != DIM:
        raise ValueError(f"expected shape (n_samples, {DIM}), got {X.shape}")
    if not (np.issubdtype(X.dtype, np.number) or X.dtype == bool):
        raise ValueError(f"states must be numeric, got dtype {X.dtype}")
    X = X.astype(np.complex128)
    holes = np.all(np.isnan(X), axis=1)
    live = X[~holes]
    if not np.all(np.isfinite(live)):
        raise ValueError("states contain NaN or infinite amplitudes")
    norms = np.linalg.norm(live, axis=1)
    if normalize:
        if np.any(norms <= 1e-14):
            raise ValueError("cannot normalize a zero state")
        X[~holes] = live / norms[:, None]
    elif np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
        raise ValueError("states must be normalized; pass normalize=True to rescale them")
    return X


class FamilyStateTransformer(TransformerMixin, BaseEstimator):
    """Angles ``(alpha, beta)`` to normalized family states.

    Parameters
    ----------
    family : {"entangled", "product"}
    degrees : bool, default=False
        Interpret the input angles as degrees.

    Degenerate product points come out as all-NaN rows.
    """

    def __init__(self, family="entangled", degrees=False):
        self.family = family
        self.degrees = degrees

    def fit(self, X, y=None):
        kind = FamilyKind(self.family)
        if kind is FamilyKind.CUSTOM:
            raise ValueError("family must be 'entangled' or 'product'")
        check_array(X)
        self.n_features_in_ = 2
        self.kind_ = kind
        return self

    def transform(self, X):
        check_is_fitted(self, "kind_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (alpha, beta), got {X.shape[1]}")
        if self.degrees:
            X = np.deg2rad(X)
        a, b = X[:, 0], X[:, 1]
        vecs = family_amplitudes(self.kind_, a, b).astype(np.complex128)
        bad = product_is_degenerate(a, b) if self.kind_ is FamilyKind.PRODUCT else np.zeros(len(X), bool)
        norms = np.linalg.norm(vecs, axis=1)
        vecs[~bad] /= norms[~bad, None]
        vecs[bad] = np.nan
        return vecs

    def get_feature_names_out(self, input_features=None):
        return np.array([f"amp{k}" for k in range(DIM)], dtype=object)


class EntropicInequalityTransformer(TransformerMixin, BaseEstimator):
    """Rows of state amplitudes to the entropic inequality value in bits.

    Parameters
    ----------
    observables : CyclicObservableSet, array-like of shape (5, 4) or None
        Projector directions; ``None`` selects the built-in default vectors.
    output : {"m", "full"}, default="m"
        ``"m"`` returns one column. ``"full"`` adds the pair entropies
        H(X_i X_{i+1}) and the single entropies that enter the functional.
    normalize : bool, default=False
        Rescale input rows to unit norm instead of rejecting them.

    Attributes
    ----------
    observables_ : CyclicObservableSet
    n_features_in_ : int
    """

    def __init__(self, observables=None, output="m", normalize=False):
        self.observables = observables
        self.output = output
        self.normalize = normalize

    def fit(self, X=None, y=None):
        if self.output not in ("m", "full"):
            raise ValueError(f"output must be 'm' or 'full', got {self.output!r}")
        obs = self.observables
        if obs is None:
            obs = default_observables()
        elif not isinstance(obs, CyclicObservableSet):
            obs = build_observables(np.asarray(obs))
        self.observables_ = obs
        self.n_features_in_ = DIM
        if X is not None:
            check_states(X, self.normalize)
        return self

    def _probabilities(self, X):
        check_is_fitted(self, "observables_")
        return batch_probabilities(self.observables_, check_states(X, self.normalize))

    def score_samples(self, X):
        """M for each row; NaN for hole rows."""
        return m_from_probabilities(self._probabilities(X))

    def predict(self, X):
        """True where the state violates the non-contextual bound (M > 0)."""
        return self.score_samples(X) > 0

    def transform(self, X):
        p = self._probabilities(X)
        m = m_from_probabilities(p)
        if self.output == "m":
            return m[:, None]
        q = np.roll(p, -1, axis=1)
        pair_h = xlog2x(p) + xlog2x(q) + xlog2x(np.clip(1.0 - p - q, 0.0, 1.0))
        single_h = binary_entropy_array(p[:, 1:-1])
        out = np.column_stack([m, pair_h, single_h])
        out[np.isnan(m)] = np.nan
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "observables_")
        if self.output == "m":
            return np.array(["m_bits"], dtype=object)
        n = self.observables_.n
        names = ["m_bits"]
        names += [f"H(X{i}X{i % n + 1})" for i in range(1, n + 1)]
        names += [f"H(X{i})" for i in range(2, n)]
        return np.array(names, dtype=object)
