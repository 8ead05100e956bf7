"""Gradient-boosted trees for sparse count features, one-vs-rest logistic.

Trees are complete binary trees of fixed depth stored in heap order
(children of node ``i`` are ``2i+1`` and ``2i+2``).  An internal node sends a
row right when ``count[feature] > threshold``; a node that found no useful
split has ``feature == -1`` and sends every row left.  Counts are capped at
``bins - 1`` before splitting, so thresholds live in ``0 .. bins-2``.

Split finding works on histograms built from the non-zero entries only:
the zero bin of every (node, feature) pair is the node total minus the
other bins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class SparseCounts:
    """Row-major (COO) count matrix; entries sorted by row then column."""

    rows: np.ndarray  # int32
    cols: np.ndarray  # int32
    vals: np.ndarray  # int32, all > 0
    shape: tuple[int, int]

    def dense(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        stop = self.shape[0] if stop is None else stop
        lo, hi = np.searchsorted(self.rows, [start, stop])
        out = np.zeros((stop - start, self.shape[1]), dtype=np.int32)
        out[self.rows[lo:hi] - start, self.cols[lo:hi]] = self.vals[lo:hi]
        return out

    def take(self, index: np.ndarray) -> "SparseCounts":
        """Rows in the given order (renumbered 0..len(index)-1)."""
        index = np.asarray(index, dtype=np.int64)
        starts = np.searchsorted(self.rows, index)
        stops = np.searchsorted(self.rows, index, side="right")
        lengths = stops - starts
        sel = np.concatenate([np.arange(a, b) for a, b in zip(starts, stops)]) if len(index) else np.zeros(0, int)
        new_rows = np.repeat(np.arange(len(index), dtype=np.int32), lengths)
        return SparseCounts(new_rows, self.cols[sel], self.vals[sel], (len(index), self.shape[1]))


@dataclass
class Tree:
    depth: int
    feature: np.ndarray  # int32, 2**depth - 1 internal nodes
    threshold: np.ndarray  # int32
    leaf: np.ndarray  # float64, 2**depth leaves

    def apply_dense(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        for _ in range(self.depth):
            f = self.feature[node]
            go_right = (f >= 0) & (X[rows, np.maximum(f, 0)] > self.threshold[node])
            node = 2 * node + 1 + go_right
        return node - (2**self.depth - 1)

    def predict_dense(self, X: np.ndarray) -> np.ndarray:
        return self.leaf[self.apply_dense(X)]

    def to_json(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "leaf": [float(v) for v in self.leaf],
        }

    @classmethod
    def from_json(cls, obj: dict, depth: int) -> "Tree":
        return cls(
            depth,
            np.asarray(obj["feature"], dtype=np.int32),
            np.asarray(obj["threshold"], dtype=np.int32),
            np.asarray(obj["leaf"], dtype=np.float64),
        )


@dataclass(frozen=True)
class BoostParams:
    rounds: int = 200
    depth: int = 4
    learning_rate: float = 0.1
    min_leaf: int = 5
    reg_lambda: float = 1.0
    bins: int = 16

    def __post_init__(self):
        if self.rounds < 1 or self.depth < 1 or self.min_leaf < 1 or self.bins < 2:
            raise ValueError(f"invalid boosting parameters {self}")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must be in (0, 1]")


def logistic_loss(y: np.ndarray, margin: np.ndarray) -> float:
    """Mean log-loss for labels in {0,1}."""
    s = 2.0 * y - 1.0
    return float(np.mean(np.logaddexp(0.0, -s * margin)))


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class _Histogrammer:
    """Level histograms for all classes.

    ``MT`` is a 0/1 sparse matrix rows x (feature*bins + bin) over the
    non-zero entries, so ``MT.T @ w`` sums ``w`` per (feature, bin).  Below
    the root only the smaller child of each split is summed (over its own
    rows); its sibling is the parent minus that child.  Bins above the
    largest count present are dropped: no threshold there can split.
    """

    def __init__(self, X: SparseCounts, bins: int):
        self.n, self.F = X.shape
        top = int(X.vals.max()) if len(X.vals) else 0
        self.B = max(2, min(bins, top + 1))
        binned = np.minimum(X.vals, self.B - 1).astype(np.int64)
        colbin = X.cols.astype(np.int64) * self.B + binned
        ones = np.ones(len(colbin))
        self.MT = sp.csr_matrix((ones, (X.rows, colbin)), shape=(self.n, self.F * self.B))
        self.M = self.MT.T.tocsr()
        # column access for routing rows after a split
        Xc = sp.csc_matrix((binned, (X.rows, X.cols)), shape=X.shape)
        self.col_ptr, self.col_rows, self.col_vals = Xc.indptr, Xc.indices, Xc.data

    def _finish(self, raw: np.ndarray, tot: np.ndarray) -> np.ndarray:
        """raw (3, F*B) sums over non-zero entries -> (3, F, B) with the zero bin filled."""
        hist = raw.reshape(3, self.F, self.B)
        hist[:, :, 0] = tot[:, None] - hist[:, :, 1:].sum(axis=2)
        return hist

    def level(self, node, g, h, parent=None):
        """Histograms of shape (3, K, m, F, B) and node totals (3, K, m).

        ``node`` is (K, n): each row's node within the level, per class.
        ``parent`` is the previous level's histograms.
        """
        K, n = node.shape
        m = 1 if parent is None else 2 * parent.shape[2]
        tot = np.empty((3, K, m))
        for k in range(K):
            tot[0, k] = np.bincount(node[k], weights=g[k], minlength=m)
            tot[1, k] = np.bincount(node[k], weights=h[k], minlength=m)
            tot[2, k] = np.bincount(node[k], minlength=m)
        hist = np.empty((3, K, m, self.F, self.B))
        if parent is None:
            W = np.empty((n, K, 3))
            W[:, :, 0] = g.T
            W[:, :, 1] = h.T
            W[:, :, 2] = 1.0
            raw = (self.M @ W.reshape(n, -1)).T.reshape(K, 3, -1)
            for k in range(K):
                hist[:, k, 0] = self._finish(np.ascontiguousarray(raw[k]), tot[:, k, 0])
            return hist, tot
        for k in range(K):
            order = np.argsort(node[k], kind="stable")
            bounds = np.searchsorted(node[k][order], np.arange(m + 1))
            for j in range(0, m, 2):
                small = j if tot[2, k, j] <= tot[2, k, j + 1] else j + 1
                rows = order[bounds[small] : bounds[small + 1]]
                w = np.empty((len(rows), 3))
                w[:, 0] = g[k, rows]
                w[:, 1] = h[k, rows]
                w[:, 2] = 1.0
                raw = np.ascontiguousarray((self.MT[rows].T @ w).T)
                hist[:, k, small] = self._finish(raw, tot[:, k, small])
                other = j + 1 if small == j else j
                hist[:, k, other] = parent[:, k, j // 2] - hist[:, k, small]
        return hist, tot

    def route(self, node_k: np.ndarray, feature: np.ndarray, threshold: np.ndarray) -> np.ndarray:
        """Boolean 'goes right' per row for one class's level."""
        right = np.zeros(self.n, dtype=bool)
        for j, f in enumerate(feature):
            if f < 0:
                continue
            lo, hi = self.col_ptr[f], self.col_ptr[f + 1]
            r = self.col_rows[lo:hi][self.col_vals[lo:hi] > threshold[j]]
            right[r[node_k[r] == j]] = True
        return right


def _best_splits(hist, tot, p: BoostParams):
    """hist (3, nodes, F, B), tot (3, nodes) -> (feature, threshold) per node."""
    G, H, C = hist
    Gt, Ht, Ct = tot
    lam = p.reg_lambda
    GL = np.cumsum(G, axis=2)[:, :, :-1]
    HL = np.cumsum(H, axis=2)[:, :, :-1]
    CL = np.cumsum(C, axis=2)[:, :, :-1]
    GR = Gt[:, None, None] - GL
    HR = Ht[:, None, None] - HL
    CR = Ct[:, None, None] - CL
    parent = (Gt**2 / (Ht + lam))[:, None, None]
    gain = GL**2 / (HL + lam) + GR**2 / (HR + lam) - parent
    valid = (CL >= p.min_leaf - 0.5) & (CR >= p.min_leaf - 0.5)
    gain = np.where(valid, gain, -np.inf)
    flat = gain.reshape(gain.shape[0], -1)
    best = np.argmax(flat, axis=1)  # first maximum: lowest feature, then lowest threshold
    best_gain = flat[np.arange(len(best)), best]
    nb = G.shape[2] - 1
    feature = (best // nb).astype(np.int32)
    threshold = (best % nb).astype(np.int32)
    ok = np.isfinite(best_gain) & (best_gain > 1e-12)
    feature[~ok] = -1
    threshold[~ok] = 0
    return feature, threshold


def _grow(hg: _Histogrammer, g: np.ndarray, h: np.ndarray, p: BoostParams) -> list[tuple[Tree, np.ndarray]]:
    """One tree per class (rows of ``g``/``h``); returns (tree, leaf of each row)."""
    K, n = g.shape
    node = np.zeros((K, n), dtype=np.int64)
    features = [[] for _ in range(K)]
    thresholds = [[] for _ in range(K)]
    parent = None
    for d in range(p.depth):
        hist, tot = hg.level(node, g, h, parent)
        for k in range(K):
            feat, thr = _best_splits(hist[:, k], tot[:, k], p)
            features[k].append(feat)
            thresholds[k].append(thr)
            node[k] = 2 * node[k] + hg.route(node[k], feat, thr)
        parent = hist if d + 1 < p.depth else None
    out = []
    n_leaves = 2**p.depth
    for k in range(K):
        Gl = np.bincount(node[k], weights=g[k], minlength=n_leaves)
        Hl = np.bincount(node[k], weights=h[k], minlength=n_leaves)
        leaf = -Gl / (Hl + p.reg_lambda) * p.learning_rate
        out.append((Tree(p.depth, np.concatenate(features[k]), np.concatenate(thresholds[k]), leaf), node[k]))
    return out


@dataclass
class Booster:
    """One-vs-rest ensembles: ``trees[k]`` scores class ``k``."""

    params: BoostParams
    n_features: int
    base: np.ndarray  # per-class prior log-odds
    trees: list[list[Tree]]
    history: list[list[float]] = field(default_factory=list)  # per class, loss before/after each round

    @classmethod
    def fit(cls, X: SparseCounts, y: np.ndarray, n_classes: int, params: BoostParams = BoostParams()) -> "Booster":
        """Fit on labels ``y`` in ``0..n_classes-1``.

        Each round's leaf values are halved until the class's training loss
        does not increase, so the recorded loss is non-increasing.
        """
        hg = _Histogrammer(X, params.bins)
        y = np.asarray(y)
        Y = (y[None, :] == np.arange(n_classes)[:, None]).astype(np.float64)
        prior = np.clip(Y.mean(axis=1), 1e-6, 1 - 1e-6)
        base = np.log(prior / (1 - prior))
        margin = np.repeat(base[:, None], len(y), axis=1)
        loss = [logistic_loss(Y[k], margin[k]) for k in range(n_classes)]
        history = [[v] for v in loss]
        all_trees: list[list[Tree]] = [[] for _ in range(n_classes)]
        for _ in range(params.rounds):
            prob = _sigmoid(margin)
            g = prob - Y
            h = np.maximum(prob * (1 - prob), 1e-16)
            for k, (tree, leaf_of_row) in enumerate(_grow(hg, g, h, params)):
                for _halving in range(40):
                    step = tree.leaf[leaf_of_row]
                    new_loss = logistic_loss(Y[k], margin[k] + step)
                    if new_loss <= loss[k]:
                        break
                    tree.leaf = tree.leaf * 0.5
                else:
                    tree.leaf = np.zeros_like(tree.leaf)
                    step = tree.leaf[leaf_of_row]
                    new_loss = loss[k]
                margin[k] += step
                loss[k] = new_loss
                history[k].append(new_loss)
                all_trees[k].append(tree)
        return cls(params, X.shape[1], base, all_trees, history)

    def decision_function(self, X: SparseCounts, chunk: int = 2048) -> np.ndarray:
        n = X.shape[0]
        out = np.empty((n, len(self.trees)))
        for start in range(0, n, chunk):
            stop = min(n, start + chunk)
            dense = np.minimum(X.dense(start, stop), self.params.bins - 1)
            for k, trees in enumerate(self.trees):
                s = np.full(stop - start, self.base[k])
                for t in trees:
                    s += t.predict_dense(dense)
                out[start:stop, k] = s
        return out
