"""Grothendieck ring of the even symplectic fermions for a range of N, with timings."""

import argparse
import time

from verlinde_lab.verlinde import fusion_sf


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-pairs", type=int, default=8)
    args = parser.parse_args()

    print(f"{'N':>2}  {'[T]*[T]':<28} {'assoc':<6} {'seconds':>8}")
    for n in range(1, args.max_pairs + 1):
        start = time.perf_counter()
        table = fusion_sf(n)
        table.check_invariants()
        elapsed = time.perf_counter() - start
        print(f"{n:>2}  {table.product_str('T', 'T'):<28} {str(table.is_associative()):<6} {elapsed:>8.3f}")


if __name__ == "__main__":
    main()
