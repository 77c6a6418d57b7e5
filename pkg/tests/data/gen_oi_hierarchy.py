"""Regenerates oi_hierarchy_600.json.

A deterministic class hierarchy in the Open Images V4 JSON shape
(LabelName + nested Subcategory arrays) with exactly 600 distinct
classes that coarsen to exactly 139 categories under the two retention
rules:

  rule 1: 20 top-level super classes, each with 5 mid-level subclasses,
          all of which have children            -> 120 categories
  rule 2: 19 leaf classes directly under root   ->  19 categories

The remaining 461 classes are leaves under the mid-level nodes (61 mids
carry 5 leaves, 39 carry 4). Three leaves are re-listed under a second
parent, as happens in the real Open Images hierarchy; re-listings are
occurrences of existing classes, not new ones, and must produce
first-occurrence-wins warnings.

Run from the repository root:  python3 tests/data/gen_oi_hierarchy.py
"""

import json
from pathlib import Path

N_SUPER = 20
N_MID = 5  # per super
N_ROOT_LEAVES = 19
N_CLASSES = 600

OUT = Path(__file__).parent / "oi_hierarchy_600.json"

# Re-list these leaves under a second parent (duplicate occurrences).
DUPLICATES = {
    ("super_01", "mid_01_1", 1): ("super_02", "mid_02_1"),
    ("super_03", "mid_03_2", 2): ("super_04", "mid_04_4"),
    ("super_05", "mid_05_5", 3): ("super_01", "mid_01_3"),
}


def build() -> dict:
    n_mids = N_SUPER * N_MID
    n_deep_leaves = N_CLASSES - N_SUPER - n_mids - N_ROOT_LEAVES
    # spread deep leaves evenly: the first `extra` mids get one more
    base, extra = divmod(n_deep_leaves, n_mids)

    mid_nodes: dict[str, dict] = {}
    leaf_names: dict[tuple[str, str, int], str] = {}
    supers = []
    mid_index = 0
    for s in range(1, N_SUPER + 1):
        super_name = f"super_{s:02d}"
        mids = []
        for m in range(1, N_MID + 1):
            mid_name = f"mid_{s:02d}_{m}"
            n_leaves = base + (1 if mid_index < extra else 0)
            mid_index += 1
            leaves = []
            for k in range(1, n_leaves + 1):
                leaf_name = f"leaf_{s:02d}_{m}_{k}"
                leaf_names[(super_name, mid_name, k)] = leaf_name
                leaves.append({"LabelName": leaf_name})
            node = {"LabelName": mid_name, "Subcategory": leaves}
            mid_nodes[mid_name] = node
            mids.append(node)
        supers.append({"LabelName": super_name, "Subcategory": mids})

    for (s_name, m_name, k), (_, target_mid) in DUPLICATES.items():
        dup = leaf_names[(s_name, m_name, k)]
        mid_nodes[target_mid]["Subcategory"].append({"LabelName": dup})

    root_leaves = [
        {"LabelName": f"solo_{i:02d}"} for i in range(1, N_ROOT_LEAVES + 1)
    ]
    return {"LabelName": "entity", "Subcategory": supers + root_leaves}


def main() -> None:
    tree = build()

    def count(node: dict, seen: set) -> None:
        seen.add(node["LabelName"])
        for child in node.get("Subcategory", []):
            count(child, seen)

    seen: set = set()
    count(tree, seen)
    assert len(seen) - 1 == N_CLASSES, len(seen) - 1  # minus the root
    OUT.write_text(json.dumps(tree, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(seen) - 1} classes)")


if __name__ == "__main__":
    main()
