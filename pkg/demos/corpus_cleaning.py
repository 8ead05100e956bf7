"""
Segmenting and normalizing raw Ladin text
=========================================
"""

from ladinmt.morphodict import default_dictionary_dir, load_dictionary
from ladinmt.normalizer import filter_corpus, load_respell_rules, segment

raw = """Bun dé. Co vara pa? Dr. Rossi é chiló.

Chesc liber é to. Xyzzy qwrt."""

sentences = segment(raw)
for s in sentences:
    print("|", s)

# respelling brings older spellings to the current orthography;
# sentences that still contain unknown words are dropped
dictionary = load_dictionary(default_dictionary_dir())
kept, report = filter_corpus(dictionary, load_respell_rules(), sentences)
for s in kept:
    print("kept:", s)
print("\n".join(report.lines()))
