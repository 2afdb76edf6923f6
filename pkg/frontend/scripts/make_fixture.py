"""Build the contract-test fixture: corpus, preset models, probe buffer.

The three presets share one corpus and differ only in minimum confidence:
the menu pair always co-occurs (confidence 1.0), while savePreferences is
followed by loadPreferences 8/12 times and by onBackPressed 4/12 times.
high (con=0.30) therefore offers two alternatives for the prefs card,
medium (0.50) one, low (0.90) none, and the menu card survives everywhere.
"""

import json
import sys
from pathlib import Path

from nextmethod.corpus import filter_commits, mine_commits, parse_corpus
from nextmethod.model import build_model, save_model
from nextmethod.synthetic import PlantSpec, family_variant, generate


def main(out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = generate(
        [
            PlantSpec(families=("menuCreate", "menuSelect"), count=10),
            PlantSpec(families=("prefsSave", "prefsLoad"), count=8),
            PlantSpec(families=("prefsSave", "drawerBack"), count=4),
        ],
        noise_train=5,
        seed=33,
    )
    corpus.write(out / "corpus.jsonl")
    commits = filter_commits(mine_commits(parse_corpus(corpus.jsonl().splitlines())))
    for level, con in (("high", 0.30), ("medium", 0.50), ("low", 0.90)):
        model, _ = build_model(commits, lam=0.9, sup=0.02, con=con, max_lhs=3)
        save_model(model, out / f"{level}.model")

    buffer_text = (
        "public class Scratch {\n"
        + family_variant("menuCreate", 53)
        + "\n\n"
        + family_variant("prefsSave", 53)
        + "\n}\n"
    )
    (out / "fixture.json").write_text(
        json.dumps(
            {
                "buffer": buffer_text,
                "menuSignature": "onCreateOptionsMenu(Menu)",
                "prefsSignature": "savePreferences(Context)",
            },
            indent=1,
        ),
        encoding="utf-8",
    )
    print(f"fixture written to {out}")


if __name__ == "__main__":
    main(sys.argv[1])
