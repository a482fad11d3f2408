"""Command-line front end: ``verlinde-lab {fusion sf|fusion semisimple|centre|verify|characters}``.

Exit codes: 0 success, 1 a verification failed, 2 bad usage or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from . import endalg, qseries, smod, verlinde
from .endalg import ZElement, center_basis_labels, center_closed_form, center_dim
from .exterior import ExtElement, even_masks
from .scalars import ONE, PI, ExactScalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MAX_EXHAUSTIVE_PAIRS = 5


class UsageError(ValueError):
    pass


@dataclass
class Config:
    pairs: int = 1
    truncation: int = qseries.DEFAULT_TRUNCATION
    tol: float = 1e-8
    tau_samples: Tuple[complex, ...] = qseries.DEFAULT_TAUS
    output: str = "text"
    seed: int = 0

    def validate(self) -> "Config":
        if self.pairs < 1:
            raise UsageError("--pairs must be at least 1")
        if self.truncation < 50:
            raise UsageError("--truncation must be at least 50")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.output not in ("text", "json"):
            raise UsageError("--output must be text or json")
        for tau in self.tau_samples:
            if tau.imag < qseries.IM_GUARD or (-1 / tau).imag < qseries.IM_GUARD:
                raise UsageError(f"tau sample {tau} violates the Im guard {qseries.IM_GUARD} at tau or -1/tau")
        return self


def parse_tau(text: str) -> complex:
    try:
        re, im = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from exc
    return complex(re, im)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--pairs", type=int, default=1)
    p.add_argument("--truncation", type=int, default=qseries.DEFAULT_TRUNCATION)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--tau", type=parse_tau, action="append", dest="taus")
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="verlinde-lab", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    fusion = sub.add_parser("fusion", help="fusion rules")
    fsub = fusion.add_subparsers(dest="engine", required=True)
    fsub.add_parser("sf", parents=[common], help="symplectic-fermion Grothendieck ring", allow_abbrev=False)
    ss = fsub.add_parser("semisimple", parents=[common], help="Verlinde formula from an S-matrix file", allow_abbrev=False)
    ss.add_argument("--smatrix", required=True)

    centre = sub.add_parser("centre", parents=[common], help="basis of the centre Z(E)", allow_abbrev=False)
    centre.add_argument("--brute-force", action="store_true")

    sub.add_parser("verify", parents=[common], help="run exact and numeric verification suites", allow_abbrev=False)
    sub.add_parser("characters", parents=[common], help="S-transformation of the N=1 characters", allow_abbrev=False)
    return parser


def config_from_args(args: argparse.Namespace, default_tol: float = 1e-8) -> Config:
    return Config(
        pairs=args.pairs,
        truncation=args.truncation,
        tol=default_tol if args.tol is None else args.tol,
        tau_samples=tuple(args.taus) if args.taus else qseries.DEFAULT_TAUS,
        output=args.output,
        seed=args.seed,
    ).validate()


def _emit(cfg: Config, text: str, payload: dict) -> None:
    if cfg.output == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


# --------------------------------------------------------------------------
# commands


def cmd_fusion_sf(cfg: Config) -> int:
    try:
        table = verlinde.fusion_sf(cfg.pairs)
        table.check_invariants()
    except (verlinde.NotInPhiSpan, verlinde.NonIntegerCoefficient, verlinde.NegativeFusion, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(cfg, f"Grothendieck ring, N={cfg.pairs}\n{table.render()}", {"pairs": cfg.pairs, **table.to_json()})
    return EXIT_OK


def cmd_fusion_semisimple(cfg: Config, path: str, tol: float) -> int:
    try:
        s = verlinde.SMatrixInput.load(path)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read S-matrix: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        table = verlinde.fusion_semisimple(s, tol)
    except verlinde.InvertibilityError as exc:
        print(f"error: InvertibilityError: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (verlinde.NotIntegral, verlinde.NegativeFusion) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = f"{table.render()}\nmax deviation before rounding: {table.max_deviation:.3e}"
    _emit(cfg, text, {**table.to_json(), "max_deviation": table.max_deviation})
    return EXIT_OK


def _sparse_columns(n: int, fn) -> List[list]:
    out = []
    for col, z in enumerate(center_closed_form(n)):
        for row, v in sorted(fn(z).vector().items()):
            out.append([row, col, v.to_json()])
    return out


def cmd_centre(cfg: Config, brute_force: bool) -> int:
    n = cfg.pairs
    basis = center_closed_form(n)
    labels = center_basis_labels(n)
    lines = [f"centre of E for N={n}: dimension {len(basis)} (expected {center_dim(n)})"]
    payload = {"n": n, "dimension": len(basis), "basis": labels}
    ok = len(basis) == center_dim(n)
    if brute_force:
        brute = endalg.center_brute_force(n)
        agree = endalg.same_span([z.to_e() for z in basis], brute)
        ok &= agree and len(brute) == len(basis)
        lines.append(f"brute-force dimension {len(brute)}; same span: {agree}")
        payload["brute_force_dimension"] = len(brute)
        payload["same_span"] = agree
    if cfg.output == "text":
        lines += [f"  {lab}" for lab in labels[:64]]
        if len(labels) > 64:
            lines.append(f"  ... {len(labels) - 64} more")
    else:
        if n <= 3:
            eps = endalg.eps_form(n)
            gram = []
            for i, a in enumerate(basis):
                for j, b in enumerate(basis):
                    v = eps(endalg.e_mul(a.to_e(), b.to_e()))
                    if v:
                        gram.append([i, j, v.to_json()])
            payload["gram"] = gram
        payload["s_z"] = _sparse_columns(n, smod.s_z)
        payload["s_z_tilde"] = _sparse_columns(n, smod.s_z_tilde)
    _emit(cfg, "\n".join(lines), payload)
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# verification suites


@dataclass
class Suite:
    name: str
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)
    seconds: float = 0.0

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append((label, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def render(self) -> str:
        head = f"[{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.seconds:.2f}s)"
        body = [f"    {'ok  ' if ok else 'FAIL'} {label}{': ' + d if d else ''}" for label, ok, d in self.checks]
        return "\n".join([head] + body)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "seconds": self.seconds,
            "checks": [{"label": l, "passed": ok, "detail": d} for l, ok, d in self.checks],
        }


def _centre_basis_sample(n: int, rng: random.Random, limit: int = 256) -> List[ZElement]:
    basis = center_closed_form(n)
    if n <= MAX_EXHAUSTIVE_PAIRS or len(basis) <= limit:
        return basis
    return rng.sample(basis[:-3], limit - 3) + basis[-3:]


def suite_centre(cfg: Config) -> Suite:
    s = Suite("centre oracle")
    n = cfg.pairs
    basis = center_closed_form(n)
    s.add("closed-form dimension", len(basis) == center_dim(n), f"{len(basis)}")
    if n <= 3:
        brute = endalg.center_brute_force(n)
        s.add("brute force spans the same space", endalg.same_span([z.to_e() for z in basis], brute), f"{len(brute)}")
    else:
        s.add("brute force", True, f"skipped for N={n} > 3")
    return s


def suite_s_involutions(cfg: Config) -> Suite:
    s = Suite("S involutions")
    n = cfg.pairs
    rng = random.Random(cfg.seed)
    sp = smod.sp_block(n)
    eye = [[ONE if i == j else ExactScalar() for j in range(3)] for i in range(3)]
    s.add("S_P squared is the identity", smod.mat_mul(sp, sp) == eye)
    sample = _centre_basis_sample(n, rng)
    lam = [z for z in sample if not any(z.z_p)]
    s.add(
        f"S_Lambda squared is the identity ({len(lam)} basis elements)",
        all(smod.s_lambda(smod.s_lambda(z.z_lambda)) == z.z_lambda for z in lam),
    )
    s.add("S_Z^-1 S_Z = id", all(smod.s_z_inv(smod.s_z(z)) == z for z in sample))
    c1 = endalg.phi_irr(n)["1"]
    expected = ZElement(ExtElement.scalar(n, (PI * 2) ** (-n)), (0, Fraction(1, 2 ** (n + 1)), -Fraction(1, 2 ** (n + 1))))
    s.add("S~(c_1) = (2 pi)^-N 1 + 2^-N e_T", smod.s_z_tilde(c1) == expected)
    phis = smod.phi_basis(n)
    # S_Z on ((phi_1 + phi_Pi1)/2, phi_T, phi_PiT) carries the same 3x3 block as S~ on (z1, z2, z3)
    b = [(phis["1"] + phis["Pi1"]).scale(Fraction(1, 2)), phis["T"], phis["PiT"]]
    same = True
    for j in range(3):
        image = smod.s_z(b[j])
        combo = b[0].scale(sp[0][j]) + b[1].scale(sp[1][j]) + b[2].scale(sp[2][j])
        same &= image == combo
    s.add("S_Z in the phi basis has the same Z_P block", same)
    # randomized: linearity and inverse on random integer combinations
    for draw in range(3):
        coeffs = [rng.randint(-3, 3) for _ in sample]
        z = ZElement.zero(n)
        for c, e in zip(coeffs, sample):
            if c:
                z = z + e.scale(c)
        s.add(f"S~ round trip on random combination {draw} (seed {cfg.seed})", smod.s_z_tilde_inv(smod.s_z_tilde(z)) == z)
    return s


def suite_y_oracle(cfg: Config) -> Suite:
    s = Suite("y oracle agreement")
    n = cfg.pairs
    if n > 2:
        s.add("y oracle", True, f"skipped for N={n} > 2")
        return s
    bad = [m for m in even_masks(n) if smod.y_oracle(ExtElement(n, {m: ONE})) != smod.s_lambda(ExtElement(n, {m: ONE}))]
    s.add(f"y_oracle equals sigma^N on {len(even_masks(n))} monomials", not bad, f"mismatches {bad}" if bad else "")
    return s


def suite_phi_expansion(cfg: Config) -> Suite:
    s = Suite("phi-basis expansion")
    n = cfg.pairs
    table = verlinde.fusion_sf(n)
    try:
        table.check_invariants()
        s.add("non-negative, commutative, unital", True)
    except (ValueError, ArithmeticError) as exc:
        s.add("non-negative, commutative, unital", False, str(exc))
    big = 2 ** (2 * n - 1)
    twisted = (big, big, 0, 0)
    s.add("[Pi1]*[Pi1] = [1]", table.n_abc[("Pi1", "Pi1")] == (1, 0, 0, 0))
    s.add("[Pi1]*[T] = [PiT]", table.n_abc[("Pi1", "T")] == (0, 0, 0, 1))
    s.add("[Pi1]*[PiT] = [T]", table.n_abc[("Pi1", "PiT")] == (0, 0, 1, 0))
    for a, b in (("T", "T"), ("T", "PiT"), ("PiT", "PiT")):
        s.add(f"[{a}]*[{b}] = {big}([1]+[Pi1])", table.n_abc[(a, b)] == twisted)
    s.add("associative", table.is_associative())
    try:
        verlinde.delta_from_s(n)
        s.add("delta matches its closed form", True)
    except (AssertionError, endalg.NonDegenerateRequired) as exc:
        s.add("delta matches its closed form", False, str(exc))
    return s


def suite_characters(cfg: Config) -> Tuple[Suite, qseries.Report]:
    rep = qseries.check_character_s(cfg.tau_samples, cfg.truncation, cfg.tol)
    s = Suite("character S-transformation")
    for line in rep.lines:
        s.add(f"{line.name} tau={line.tau}", line.passed, f"rel {line.deviation:.2e}")
    return s, rep


def suite_covariance(cfg: Config) -> Tuple[Suite, qseries.Report]:
    rep = qseries.covariance_suite(cfg.pairs, 2, cfg.tau_samples, cfg.tol, cfg.truncation)
    s = Suite("pseudo-trace covariance")
    failed = [l for l in rep.lines if not l.passed]
    s.add(f"{len(rep.lines)} checks, max rel deviation {rep.max_deviation:.2e}", not failed)
    for line in failed[:20]:
        s.add(f"{line.name} tau={line.tau}", False, f"rel {line.deviation:.2e}")
    return s, rep


def _timed(fn: Callable[[], Suite]) -> Suite:
    t0 = time.perf_counter()
    out = fn()
    suite = out[0] if isinstance(out, tuple) else out
    suite.seconds = time.perf_counter() - t0
    return suite


def cmd_verify(cfg: Config) -> int:
    runners = [suite_centre, suite_s_involutions, suite_y_oracle, suite_phi_expansion, suite_characters, suite_covariance]
    suites = []
    for run in runners:
        try:
            suites.append(_timed(lambda: run(cfg)))
        except qseries.ImTooSmall as exc:
            bad = Suite(run.__name__.removeprefix("suite_"))
            bad.add("evaluation", False, str(exc))
            suites.append(bad)
    ok = all(s.passed for s in suites)
    text = "\n".join(s.render() for s in suites) + f"\n{'all suites passed' if ok else 'verification FAILED'}"
    _emit(cfg, text, {"pairs": cfg.pairs, "passed": ok, "suites": [s.to_json() for s in suites]})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_characters(cfg: Config) -> int:
    rep = qseries.check_character_s(cfg.tau_samples, cfg.truncation, cfg.tol)
    leading = {}
    for kind in qseries.CHARACTERS:
        ser = qseries.character_series(kind, cfg.truncation)
        keys = sorted(ser.coeffs)[:6]
        leading[kind] = [[f"{k}/48", ser.coeffs[k].real] for k in keys]
    _emit(cfg, rep.render(), {**rep.to_json(), "leading_terms": leading})
    return EXIT_OK if rep.passed else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "centre" and args.brute_force and args.pairs > 3:
        print("error: --brute-force is limited to --pairs <= 3", file=sys.stderr)
        return EXIT_USAGE
    default_tol = 1e-9 if getattr(args, "engine", None) == "semisimple" else 1e-8
    try:
        cfg = config_from_args(args, default_tol)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "fusion":
        if args.engine == "sf":
            return cmd_fusion_sf(cfg)
        return cmd_fusion_semisimple(cfg, args.smatrix, cfg.tol)
    if args.command == "centre":
        return cmd_centre(cfg, args.brute_force)
    if args.command == "verify":
        return cmd_verify(cfg)
    return cmd_characters(cfg)


if __name__ == "__main__":
    sys.exit(main())
