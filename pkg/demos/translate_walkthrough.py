"""
Rule-based translation, one step at a time
==========================================

Compile the bundled Ladin-Italian dictionary, translate a few sentences and
look at what each token went through.
"""

from ladinmt.morphodict import coverage, default_dictionary_dir, load_dictionary
from ladinmt.rules import default_rules_path, load_rules
from ladinmt.transfer import translate

dictionary = load_dictionary(default_dictionary_dir())
print(dictionary.report)

rules = load_rules(default_rules_path("lvb-ita"))

# "pa" is a discourse particle with no Italian counterpart; a rule deletes it
for sentence in ["chësc liber é to", "olá vaste pa?", "Al laura te Bulsan."]:
    result = translate(dictionary, rules, sentence, "lvb-ita")
    print(f"{sentence!r:28} -> {result.target_text!r}")

# every token keeps a trace: analysis, bilingual entry, rules that touched it
for step in translate(dictionary, rules, "olá vaste pa?", "lvb-ita").trace:
    print(step["source"], step["analysis"], step["rules"], step["target"] or "-")

# unknown words come out starred
print(translate(dictionary, rules, "chësc xyzzy é to", "lvb-ita").target_text)

rep = coverage(dictionary, ["chësc liber é to", "chësc xyzzy é to"])
print(f"coverage {rep.fraction:.2f}, unknown {rep.unknown_types}")
