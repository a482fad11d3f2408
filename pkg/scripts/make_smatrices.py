"""Write S-matrix JSON files for the CLI's ``fusion semisimple`` command into scripts/data/."""

import json
from pathlib import Path

from verlinde_lab.verlinde import cyclic_ring, fibonacci_smatrix, ising_smatrix, smatrix_from_fusion_ring

OUT = Path(__file__).resolve().parent / "data"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    files = {
        "fibonacci.json": fibonacci_smatrix(),
        "ising.json": ising_smatrix(),
        "z5.json": smatrix_from_fusion_ring(cyclic_ring(5), seed=0),
    }
    for name, s in files.items():
        (OUT / name).write_text(json.dumps(s.to_json(), indent=2) + "\n")
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
