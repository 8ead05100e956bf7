"""Ladin variant classifier over character n-gram counts."""

from .features import FeatureVocabulary, char_ngrams, featurize, featurize_many, normalize_text
from .gbdt import Booster, BoostParams, SparseCounts, Tree, logistic_loss
from .model import VARIANTS, VariantModel, partition, predict, split_indices, train
from .synthetic import marker_trigrams, synthetic_corpus

__all__ = [
    "FeatureVocabulary",
    "char_ngrams",
    "featurize",
    "featurize_many",
    "normalize_text",
    "Booster",
    "BoostParams",
    "SparseCounts",
    "Tree",
    "logistic_loss",
    "VARIANTS",
    "VariantModel",
    "partition",
    "predict",
    "split_indices",
    "train",
    "marker_trigrams",
    "synthetic_corpus",
]
