"""
Assembling a back-translated training set
=========================================

The rule-based system stands in for every model in the recipe chain, so the
whole N1 -> N5 progression can run on the bundled fixtures.
"""

from ladinmt import metrics
from ladinmt.btx.backends import RBMTBackend
from ladinmt.btx.recipes import STANDARD_RECIPES, Dataset, Registry, assemble, standard_recipe, training_lines
from ladinmt.btx.corpus import read_monolingual, read_tsv
from ladinmt.config import fixture_config
from ladinmt.morphodict import default_dictionary_dir, load_dictionary
from ladinmt.rules import default_rules_path, load_rules

corpus = fixture_config().resolve("corpus")
authentic = read_tsv(corpus / "authentic.tsv")
mono_lvb = read_monolingual(corpus / "mono_lvb.txt")
mono_ita = read_monolingual(corpus / "mono_ita.txt")

dictionary = load_dictionary(default_dictionary_dir())
rules = {d: load_rules(default_rules_path(d)) for d in ("lvb-ita", "ita-lvb")}
rbmt = RBMTBackend("R1", dictionary, rules)

registry = Registry(
    {
        "authentic": Dataset.parallel("authentic", authentic),
        "mono_lvb": Dataset.monolingual("mono_lvb", "lvb", mono_lvb),
        "mono_ita": Dataset.monolingual("mono_ita", "ita", mono_ita),
    },
    {f"{f}{k}": rbmt for f in "NRL" for k in range(1, 5)},
)

print(STANDARD_RECIPES)
# with one backend behind every id, N3 and N4 contain the very same records
for name in ("N1", "N2", "N3", "N4", "N5"):
    records, manifest = assemble(standard_recipe(name), registry, seed=0)
    print(name, manifest.total, manifest.by_origin(), manifest.sha256[:12])

records, _ = assemble(standard_recipe("N2"), registry, seed=0)
for line, _ in list(training_lines(records))[:4]:
    print(line)

# round trip through the rule-based system in both directions
row = metrics.rtt_table({"R4": rbmt}, [("R4", "R4")], mono_lvb, mono_ita)[0]
print(metrics.format_rtt_table([row]))
