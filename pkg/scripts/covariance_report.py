"""How the pseudo-trace covariance deviation depends on the series truncation.

Also contrasts the two transports of S on the centre: only the one built
from eps reproduces the modular behaviour of the pseudo-trace functions.
"""

import argparse

from verlinde_lab import qseries, smod
from verlinde_lab.endalg import phi_irr
from verlinde_lab.qseries import Insertion, pseudo_trace_eval, pseudo_trace_expr


def truncation_scan(n: int, truncations) -> None:
    print(f"N={n}: worst relative deviation over the centre basis and r+s<=2")
    for t in truncations:
        rep = qseries.covariance_suite(n, 2, qseries.DEFAULT_TAUS, tol=1e-6, truncation=t)
        print(f"  truncation {t:>4}: {rep.max_deviation:.3e}  ({len(rep.lines)} checks)")


def transport_contrast(n: int, tau: complex) -> None:
    z = phi_irr(n)["1"]
    lhs = pseudo_trace_eval(pseudo_trace_expr(z, Insertion(), n), -1 / tau)
    for name, fn in (("eps transport", smod.s_z_tilde), ("delta transport", smod.s_z)):
        rhs = pseudo_trace_eval(pseudo_trace_expr(fn(z), Insertion(), n), tau)
        print(f"  {name:<16} rel deviation {qseries.relative_deviation(lhs, rhs):.3e}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, nargs="+", default=[1, 2])
    parser.add_argument("--truncations", type=int, nargs="+", default=[1, 2, 4, 8, 16, 50, 400])
    args = parser.parse_args()
    for n in args.pairs:
        truncation_scan(n, args.truncations)
        print(f"vacuum element, N={n}, tau=i:")
        transport_contrast(n, 1j)


if __name__ == "__main__":
    main()
