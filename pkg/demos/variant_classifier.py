"""
Telling Ladin variants apart with character trigrams
====================================================

The synthetic corpus plants five marker trigrams per variant in otherwise
random text, so a good classifier has to find them.
"""

import numpy as np

from ladinmt.classifier import BoostParams, predict, synthetic_corpus, train

corpus, markers = synthetic_corpus(per_label=300, seed=1)
print(len(corpus), "sentences")
for variant, grams in markers.items():
    print(variant, grams)

model, accuracy = train(corpus, 0.75, BoostParams(rounds=60), seed=1)
print(f"held-out accuracy {accuracy:.3f}")

probe = [s for s, _ in corpus[:5]]
for sentence, (label, scores) in zip(probe, predict(model, probe)):
    print(label, f"{scores[label]:.2f}", sentence[:40])

# training loss per variant, first and last round
for variant, hist in zip(model.labels, model.booster.history):
    print(variant, np.round([hist[0], hist[-1]], 4))
