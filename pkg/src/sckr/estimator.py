"""scikit-learn style front door: fit on a knowledge repository, predict queries."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import engine, oracle
from .frontend import parse, parse_query
from .model import SCKR, QueryAtom, validate
from .translator import output_atom, translate


class CKRReasoner(BaseEstimator):
    """Compute the models of an sCKR once and answer entailment queries.

    Parameters
    ----------
    backend : {"translation", "oracle"}
        Answer-set pipeline or the brute-force model-theoretic oracle.
    mode : {"global", "induced"}
        Preference; "induced" is only available with the oracle backend.
    max_models, max_ground_atoms : int or None
        Resource caps; ``None`` falls back to the defaults or ``CKR_CAPS``.
    """

    def __init__(self, backend="translation", mode="global", max_models=None,
                 max_ground_atoms=None):
        self.backend = backend
        self.mode = mode
        self.max_models = max_models
        self.max_ground_atoms = max_ground_atoms

    def fit(self, X, y=None):
        k = parse(X) if isinstance(X, str) else X
        if not isinstance(k, SCKR):
            raise TypeError("X must be an SCKR or .ckr source text")
        diags = validate(k)
        if diags:
            raise ValueError("; ".join(diags))
        if self.backend not in ("translation", "oracle"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.mode not in ("global", "induced"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "induced" and self.backend != "oracle":
            raise ValueError("induced preference needs the oracle backend")

        self.sckr_ = k
        if self.backend == "translation":
            self.program_ = translate(k)
            self.ground_ = engine.ground(self.program_, self.max_ground_atoms)
            self.models_ = engine.answer_sets(self.ground_, self.max_models)
            self.optimal_models_ = engine.filter_optimal(self.models_)
        else:
            self.models_ = [m for _, m in oracle.enumerate_justified(k)]
            self.optimal_models_ = oracle.preferred(k, self.mode, self.models_)
        self.consistent_ = bool(self.models_)
        return self

    def _holds(self, m, q: QueryAtom) -> bool:
        if self.backend == "translation":
            return output_atom(q) in m
        return m.holds(q)

    def _queries(self, queries):
        if isinstance(queries, (str, QueryAtom)):
            queries = [queries]
        out = []
        for q in queries:
            q = parse_query(q) if isinstance(q, str) else q
            diags = oracle.validate_query(self.sckr_, q)
            if diags:
                raise ValueError("; ".join(diags))
            out.append(q)
        return out

    def predict(self, queries):
        """Boolean array: is each query true in every preferred model?"""
        check_is_fitted(self, "models_")
        if not self.consistent_:
            raise oracle.InconsistentKnowledgeError("the knowledge repository has no model")
        qs = self._queries(queries)
        return np.array([all(self._holds(m, q) for m in self.optimal_models_) for q in qs],
                        dtype=bool)

    def predict_verdicts(self, queries) -> list[str]:
        check_is_fitted(self, "models_")
        qs = self._queries(queries)
        if not self.consistent_:
            return ["inconsistent"] * len(qs)
        return ["entailed" if v else "not-entailed" for v in self.predict(qs)]
