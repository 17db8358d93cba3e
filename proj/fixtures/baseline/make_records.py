#!/usr/bin/env python3
"""Regenerates records.csv from the per-run verdict grids (C/X/E per prompt)."""

grids = {
    "proposed": [
        "X C C E C C C C C C C E C C C C C C C E",
        "C C C X C C X C C C C E C X X E C C C C",
        "E C C X C C C C C C C E C C X C C C C E",
        "C C C X C C E C C C C C C C X C C C C E",
        "C C C X C C E C C C X E C C X E C C C C",
    ],
    "no_types": [
        "X C C E C C C C C C X E X C X E C C C E",
        "X C C C C C C C C C C E C X X E C C C X",
        "E C X C C C C C C C X E E C X E C C C E",
        "C C C X C C E C C C C E C X C E C C C C",
        "E C C X C C C C C C X E X C X E C C C E",
    ],
    "extra_description": [
        "C C C X C C C C C C X E C C E E C C C X",
        "C C C C C C C C C C C E C C C E C C X E",
        "C C X C C C C C C C X E E C E C C C C E",
        "C C E C C C C C C C C E C C C E C C C C",
        "C C C X C C C C C C X E E C C E C C X E",
    ],
    "alternative": [
        "E C X E C C C E C X X E C E C E C C C E",
        "E C C E E E C E C C E E C C E C C X E E",
        "E C E E C C C E C C E E C C X E C X E C",
        "E C C E E C C C C C E E C C E E C C E E",
        "E C C E E E C C C C X E C X X E C C E E",
    ],
}

expected_counts = {
    "proposed": [16, 14, 15, 16, 14],
    "no_types": [12, 14, 12, 15, 12],
    "extra_description": [14, 16, 14, 17, 13],
    "alternative": [10, 9, 10, 11, 9],
}

verdicts = {"C": "correct", "X": "incorrect_logic", "E": "error"}

rows = ["ablation,run,prompt_id,verdict,detail"]
for ablation in ["proposed", "no_types", "extra_description", "alternative"]:
    for run, grid in enumerate(grids[ablation], start=1):
        marks = grid.split()
        assert len(marks) == 20, (ablation, run)
        correct = sum(1 for m in marks if m == "C")
        assert correct == expected_counts[ablation][run - 1], (ablation, run, correct)
        for prompt_id, mark in enumerate(marks, start=1):
            rows.append(f"{ablation},{run},{prompt_id},{verdicts[mark]},baseline")

with open("records.csv", "w") as f:
    f.write("\n".join(rows) + "\n")
print(f"wrote {len(rows) - 1} records")
