"""Command-line entry point: ``graphcodes <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
limit or search without result.  Each run writes its artifacts plus a
``manifest.json`` into ``--out`` (default ``$GRAPHCODES_OUT`` or the current
directory).  Artifacts are byte-deterministic for a fixed command and seed;
only the manifest records wall time.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import bincode, dualconstruct, factorize, gridcode, oracle, treecode
from .errors import InfeasibleError, NotFoundError, ResourceError, UsageError, VerificationError
from .graphcore import PatternGraph, n_slots

OUT_ENV = "GRAPHCODES_OUT"
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int
    artifacts: list[str] = field(default_factory=list)
    wall_time_s: float = 0.0
    verification: dict = field(default_factory=lambda: {"pass": 0, "fail": 0})


@dataclass
class RateReport:
    predicate: str
    scenario: str
    limit_value: float
    formula: str
    finite_n: Optional[int] = None
    finite_n_upper_rate: Optional[float] = None
    note: str = "limit values are asymptotic references, not finite-n claims"


SCENARIOS = ("contains", "kcopies", "kdisjoint", "ktt")


def rates(pattern: Optional[PatternGraph], scenario: str, c: Optional[float] = None) -> RateReport:
    """Closed-form limiting rates for the supported scenarios."""
    if scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    if scenario == "ktt":
        if c is None or c <= 0:
            raise UsageError("ktt scenario needs c > 0 (t = c log2 n)")
        return RateReport(f"contains K_t,t with t = {c} log2 n", scenario, 1 - 2 ** (-2 / c), "1 - 2^(-2/c)")
    if pattern is None:
        raise UsageError("a pattern graph L is required")
    if pattern.e == 0:
        raise UsageError("L must have at least one edge (chromatic number 1 gives no finite rate)")
    chi = pattern.chi
    base = 1 / (chi - 1)
    if scenario == "contains":
        return RateReport(f"contains {pattern.name}", scenario, base, "1/(chi(L)-1)")
    if c is None or c < 0:
        raise UsageError(f"scenario {scenario!r} needs c >= 0")
    if scenario == "kcopies":
        return RateReport(
            f">= c n^v(L) copies of {pattern.name}, c = {c}", scenario, base - 2 * c / pattern.e,
            "1/(chi(L)-1) - 2c/e(L)",
        )
    if c >= 1:
        raise UsageError("kdisjoint scenario needs 0 <= c < 1")
    return RateReport(
        f">= c n/v(L) disjoint copies of {pattern.name}, c = {c}", scenario, (1 - c) ** 2 / (chi - 1),
        "(1-c)^2/(chi(L)-1)",
    )


# ---------------------------------------------------------------------------


class Run:
    """Collects artifacts and verification counts for one invocation."""

    def __init__(self, args):
        self.args = args
        self.out = Path(args.out or os.environ.get(OUT_ENV) or ".")
        self.out.mkdir(parents=True, exist_ok=True)
        params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "json")}
        self.manifest = RunManifest(args.command_name, params, args.seed)
        self.result = None
        self.deadline = time.monotonic() + args.budget_ms / 1000 if args.budget_ms else None

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text)
        self.manifest.artifacts.append(name)
        return path

    def tally(self, passed: int, failed: int = 0) -> None:
        self.manifest.verification["pass"] += passed
        self.manifest.verification["fail"] += failed

    def say(self, msg: str) -> None:
        if not self.args.json:
            print(msg)


def _pattern(text: Optional[str]) -> Optional[PatternGraph]:
    return PatternGraph.parse(text) if text else None


def cmd_p1f(run: Run) -> int:
    a = run.args
    if a.p is not None:
        if not factorize.is_prime(a.p):
            raise UsageError(f"--p must be prime, got {a.p}")
        fac = factorize.kotzig_p1f(a.p)
    elif a.order is not None:
        fac = factorize.p1f_for_order(a.order)
    else:
        raise UsageError("give --p (prime) or --order (even m)")
    name = f"p1f_K{fac.order}.json"
    run.write(name, _dump(fac.to_json()))
    run.result = {"order": fac.order, "file": name}
    run.say(f"1-factorization of K_{fac.order} written to {run.out / name}")
    if a.verify:
        rep = factorize.verify_perfect(fac)
        run.result["perfect"] = rep.ok
        run.tally(int(rep.ok), int(not rep.ok))
        run.say("perfect: yes" if rep.ok else f"perfect: no ({rep.invariant}, factors {rep.pair})")
        if not rep.ok:
            return EXIT_VERIFY
    return EXIT_OK


def _build_params(a) -> treecode.TreeCodeParams:
    if a.variant == "hamming":
        if a.k is None:
            raise UsageError("the hamming variant needs --k")
        return treecode.build_hamming_treecode(a.k, a.leaves)
    if a.n is None:
        raise UsageError("--n is required")
    return treecode.build_treecode(a.n, a.leaves, coloring=a.coloring, seed=a.seed, h_order=a.h_order)


def _verify_and_write(run: Run, params: treecode.TreeCodeParams, samples: int) -> int:
    certs, failures = treecode.verify_family(params, samples, run.args.seed)
    run.write("certificates.json", treecode.dumps_certificates(certs) + "\n")
    run.tally(len(certs), len(failures))
    run.result["certificates"] = {"pass": len(certs), "fail": len(failures)}
    run.say(f"{len(certs)}/{len(certs) + len(failures)} certificates verified")
    for msg in failures[:5]:
        print(msg, file=sys.stderr)
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_treecode(run: Run) -> int:
    a = run.args
    params = _build_params(a)
    h_name = None
    if params.h_code is not None:
        h_name = "hcode.json"
        run.write(h_name, _dump(params.h_code.to_json()))
    run.write("treecode.json", _dump(params.to_json(h_name)))
    run.result = {
        "variant": params.variant,
        "n": params.n,
        "leaves": params.leaves,
        "log2_family_size": params.log2_family_size,
        "parts": params.parts_needed,
    }
    run.say(f"{params.variant} family on n={params.n}: 2^{params.log2_family_size} members, {params.parts_needed} part(s)")
    if a.samples:
        return _verify_and_write(run, params, a.samples)
    return EXIT_OK


def cmd_verify_treecode(run: Run) -> int:
    a = run.args
    gen_path = Path(a.gen)
    data = json.loads(gen_path.read_text())
    h_code = None
    if data.get("h_code_file"):
        h_code = bincode.BinaryCode.from_json(json.loads((gen_path.parent / data["h_code_file"]).read_text()))
    params = treecode.load_generator(data, h_code)
    run.result = {"n": params.n, "leaves": params.leaves, "log2_family_size": params.log2_family_size}
    return _verify_and_write(run, params, a.samples)


def cmd_blocker(run: Run) -> int:
    a = run.args
    if a.predicate == "ktt":
        if a.n is None:
            raise UsageError("--n is required")
        delta = a.delta if a.delta is not None else 0.125
        rep = dualconstruct.random_ktt_free(a.n, a.t, delta, seed=a.seed, retries=a.retries)
    else:
        pattern = _pattern(a.L)
        if pattern is None or a.n is None:
            raise UsageError("--L and --n are required")
        build = dualconstruct.build_kcopy_blocker if a.predicate == "kcopy" else dualconstruct.build_kdisjoint_blocker
        rep = build(a.n, pattern, a.k)
    run.write("blocker.json", _dump(rep.to_json()))
    run.tally(int(rep.consistent), int(not rep.consistent))
    run.result = {
        "predicate": rep.predicate,
        "edge_count": rep.edge_count,
        "dual_log_bound": rep.dual_log_bound,
        "rate_upper_bound": dualconstruct.log2_dual_limit(rep),
        "consistent": rep.consistent,
    }
    run.say(f"blocker for '{rep.predicate}': {rep.edge_count} edges, log2 M <= {rep.dual_log_bound}")
    return EXIT_OK if rep.consistent else EXIT_VERIFY


def cmd_oracle(run: Run) -> int:
    a = run.args
    kind = a.predicate
    spec = oracle.PredicateSpec(kind, _pattern(a.L), k=a.k, leaves=a.leaves or 2, t=a.t)
    res = oracle.run_oracle(a.n, spec, deadline=run.deadline)
    run.write("oracle.json", _dump(res.to_json()))
    run.tally(int(bool(res.product_bound_holds)), int(not res.product_bound_holds))
    run.result = {k: v for k, v in res.to_json().items() if k not in ("witness_family", "dual_witness")}
    run.say(f"n={a.n}, {res.predicate}: M={res.M_exact}, D={res.D_exact}, bad={res.bad_count}")
    return EXIT_OK if res.product_bound_holds else EXIT_VERIFY


def cmd_grid(run: Run) -> int:
    a = run.args
    if a.action == "verify":
        if not a.file:
            raise UsageError("grid verify needs --file")
        fam = gridcode.GridFamily.from_json(json.loads(Path(a.file).read_text()))
        ok, lines = gridcode.verify_grid_family(fam)
        bound_ok, pair = gridcode.neighborhood_bound_check(fam)
        run.write("grid_verify.txt", "\n".join(lines) + "\n")
        run.tally(sum(1 for s in lines if s.endswith("connected") and "DIS" not in s), int(not ok))
        run.result = {"members": len(fam.members), "valid": ok, "neighborhood_bound": bound_ok}
        run.say(f"{len(fam.members)} members: {'valid' if ok else 'INVALID'}")
        return EXIT_OK if ok else EXIT_VERIFY
    spec = gridcode.GridSpec(a.m, a.n)
    if a.action == "build":
        host = spec.host()
        run.write("grid_host.json", _dump({"format_version": 1, "m": a.m, "n": a.n, "host": host.to_line()}))
        run.result = {"vertices": host.n, "edges": host.edge_count}
        run.say(f"torus {a.m}x{a.n}: {host.n} vertices, {host.edge_count} edges")
        return EXIT_OK
    fam = gridcode.search_grid_family(spec, a.dim, seed=a.seed, budget=a.moves, deadline=run.deadline)
    run.write("grid_family.json", _dump(fam.to_json()))
    run.tally(len(fam.transcript))
    run.result = {"members": len(fam.members), "pairs_checked": len(fam.transcript)}
    run.say(f"found {len(fam.members)}-member family; {len(fam.transcript)} pairs verified")
    return EXIT_OK


def cmd_codes(run: Run) -> int:
    a = run.args
    if a.hamming is not None:
        code = bincode.hamming_code(a.hamming)
    elif a.even_d4 is not None:
        code = bincode.even_d4_linear(a.even_d4)
    else:
        if a.m is None or a.d is None:
            raise UsageError("give --m and --d, or --hamming K, or --even-d4 M")
        code = bincode.gv_greedy(a.m, a.d, a.order, seed=a.seed)
    dist = bincode.verify_min_distance(code) if code.size > 1 else None
    ok = dist is None or dist >= code.min_distance_claim
    run.write("code.json", _dump(code.to_json()))
    run.tally(int(ok), int(not ok))
    run.result = {"length": code.length, "size": code.size, "claimed_distance": code.min_distance_claim,
                  "verified_distance": dist}
    run.say(f"code of length {code.length}: {code.size} words, minimum distance {dist}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_rates(run: Run) -> int:
    a = run.args
    rep = rates(_pattern(a.L), a.scenario, a.c)
    if a.n is not None and a.scenario != "ktt":
        blk = dualconstruct.build_kcopy_blocker(a.n, _pattern(a.L), 1)
        rep.finite_n = a.n
        rep.finite_n_upper_rate = blk.dual_log_bound / n_slots(a.n)
    run.write("rates.json", _dump(asdict(rep)))
    run.result = asdict(rep)
    run.say(f"{rep.predicate}: limit {rep.formula} = {rep.limit_value:.6g}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
    common.add_argument("--json", action="store_true", help="print the result as JSON")
    common.add_argument("--budget-ms", type=int, default=None, help="wall-clock budget for searches")

    parser = argparse.ArgumentParser(prog="graphcodes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command_name", required=True)

    p = sub.add_parser("p1f", parents=[common], help="perfect 1-factorizations")
    p.add_argument("--p", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_p1f)

    p = sub.add_parser("treecode", parents=[common], help="build an l-leaf tree-difference family")
    p.add_argument("--variant", choices=("gv", "hamming"), default="gv")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--coloring", choices=("syndrome", "greedy"), default="syndrome")
    p.add_argument("--h-order", choices=("lexicographic", "random"), default="lexicographic")
    p.add_argument("--samples", type=int, default=0)
    p.set_defaults(func=cmd_treecode)

    p = sub.add_parser("verify-treecode", parents=[common], help="sample and certify member pairs")
    p.add_argument("--gen", required=True)
    p.add_argument("--samples", type=int, default=500)
    p.set_defaults(func=cmd_verify_treecode)

    p = sub.add_parser("blocker", parents=[common], help="dual constructions")
    p.add_argument("--predicate", choices=("kcopy", "kdisjoint", "ktt"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--L")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--delta", type=float)
    p.add_argument("--retries", type=int, default=20)
    p.set_defaults(func=cmd_blocker)

    p = sub.add_parser("oracle", parents=[common], help="exact M_F and D_F for tiny n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--predicate", choices=oracle.KINDS, required=True)
    p.add_argument("--L")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--leaves", type=int)
    p.add_argument("--t", type=int, default=2)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("grid", parents=[common], help="torus grid families")
    p.add_argument("action", choices=("build", "search", "verify"))
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--moves", type=int, default=200_000)
    p.add_argument("--file")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("codes", parents=[common], help="binary codes")
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--order", choices=("lexicographic", "random"), default="lexicographic")
    p.add_argument("--hamming", type=int, metavar="K")
    p.add_argument("--even-d4", type=int, metavar="M")
    p.set_defaults(func=cmd_codes)

    p = sub.add_parser("rates", parents=[common], help="closed-form limiting rates")
    p.add_argument("--L")
    p.add_argument("--scenario", choices=SCENARIOS, default="contains")
    p.add_argument("--c", type=float)
    p.add_argument("--n", type=int, help="also report the finite-n Turán dual rate")
    p.set_defaults(func=cmd_rates)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.monotonic()
    try:
        run = Run(args)
        code = args.func(run)
    except (UsageError, InfeasibleError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceError, NotFoundError) as exc:
        print(f"not found / resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    run.manifest.wall_time_s = round(time.monotonic() - start, 3)
    (run.out / "manifest.json").write_text(_dump(asdict(run.manifest)))
    if args.json:
        print(json.dumps(run.result, sort_keys=True))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
