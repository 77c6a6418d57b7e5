"""Singularization rule tables shared by the pure-Python and Cython kernels.

The singularizer is deliberately rule-based and closed: irregular forms
first, then the ``-ies``/``-ves``/``-es``/``-s`` suffix rules.  The
irregulars table covers every COCO / Open-Images category head the suffix
rules would otherwise mangle (buses, ties, cookies, ...), so lexicon keys
and caption tokens always land on the same canonical form.
"""

from __future__ import annotations

IRREGULAR_SINGULARS: dict[str, str] = {
    "people": "person",
    "men": "man",
    "women": "woman",
    "children": "child",
    "geese": "goose",
    "teeth": "tooth",
    "feet": "foot",
    "mice": "mouse",
    # heads that the generic suffix rules would break
    "buses": "bus",
    "busses": "bus",
    "ties": "tie",
    "pies": "pie",
    "lies": "lie",
    "dies": "die",
    "cookies": "cookie",
    "brownies": "brownie",
    "movies": "movie",
    "magpies": "magpie",
    "calories": "calorie",
    "selfies": "selfie",
    "zombies": "zombie",
    "oxen": "ox",
}

# -ves plurals whose singular restores an f/fe ending.  Words ending in
# -ves but absent here (olives, hives, ...) fall through to the plain
# strip-s rule, which is what they need.
VES_SINGULARS: dict[str, str] = {
    "calves": "calf",
    "elves": "elf",
    "halves": "half",
    "hooves": "hoof",
    "knives": "knife",
    "leaves": "leaf",
    "lives": "life",
    "loaves": "loaf",
    "scarves": "scarf",
    "selves": "self",
    "sheaves": "sheaf",
    "shelves": "shelf",
    "thieves": "thief",
    "wives": "wife",
    "wolves": "wolf",
}

# -es is dropped only after sibilant stems: glasses, boxes, quizzes,
# benches, dishes.  A bare -s stem (horses) keeps its e via the strip-s
# rule instead.
ES_STEM_ENDINGS: tuple[str, ...] = ("ss", "x", "z", "ch", "sh")

# strip-s applies unless the word ends in one of these.
KEEP_S_ENDINGS: tuple[str, ...] = ("ss", "us", "is")
