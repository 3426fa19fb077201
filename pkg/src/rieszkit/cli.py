"""Command line front end.

Subcommands ingest operator spec files, run the corresponding checks and
print a report, human-readable by default or canonical JSON with --json.
Exit codes: 0 when the checked property holds, 1 when it fails (the report
then carries a witness), 2 on input errors. Reports are byte-identical
across runs for the same input and seed; wall-clock time goes to stderr
only. RIESZKIT_THREADS > 1 spreads per-permutation work over a thread
pool without changing the output.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .arens import (
    Permutation,
    all_permutations,
    arens_extension,
)
from .fileformat import (
    SpecFileError,
    canonical_json,
    loads_spec,
    parse_seq,
    parse_spec,
    seq_to_obj,
    tensor_to_obj,
)
from .operators import (
    MultiTensor,
    NotDisjointnessPreserving,
    ShapeError,
    factorize_multimorphism,
)
from .rational import format_rational
from .report import (
    build_report,
    certificate_to_obj,
    check,
    input_digest,
    render_human,
    report_json,
    vector_to_obj,
    witness_from_obj,
    witness_to_obj,
)
from .seqmodel import (
    DiagBilinear,
    EvConstSeq,
    biadjoint_dp_check,
    comp_apply,
    comp_biadjoint,
    diag_arens,
    dual_basis_dp,
    random_seq,
    random_weighted_comp,
    rank_lower_bound,
    slotwise_dp_check,
)


def _thread_count() -> int:
    raw = os.environ.get("RIESZKIT_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise SpecFileError(f"RIESZKIT_THREADS must be an integer, got {raw!r}")
    return max(1, value)


def _read_file(path: str) -> bytes:
    try:
        with open(path, "rb") as handle:
            return handle.read()
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc}") from exc


def _load_tensor(path: str) -> tuple[MultiTensor, str]:
    data = _read_file(path)
    spec = loads_spec(data.decode("utf-8"))
    if not isinstance(spec, MultiTensor):
        raise SpecFileError(f"{path} does not contain a tensor spec")
    return spec, input_digest(data)


def _perm_choices(text: str, m: int) -> list[Permutation]:
    if text == "all":
        return list(all_permutations(m))
    if text in ("id", "identity"):
        return [Permutation.identity(m)]
    if text in ("theta", "reverse"):
        return [Permutation.theta(m)]
    try:
        return [Permutation.from_cycles(text, m)]
    except ValueError as exc:
        raise SpecFileError(str(exc)) from exc


def _form_obj(form) -> dict:
    return {
        "dims": list(form.dims),
        "slots": [l + 1 for l in form.labels],
        "entries": [
            {"idx": [i + 1 for i in idx], "value": format_rational(v)}
            for idx, v in sorted(form.entries.items())
        ],
    }


def _report_check_dp(tensor: MultiTensor, digest: str, args: dict) -> tuple[int, dict]:
    verdict = tensor.is_dp()
    checks = [check("disjointness-preserving", verdict.is_dp)]
    witness = None if verdict.witness is None else witness_to_obj(verdict.witness)
    detail = {"certificate": certificate_to_obj(verdict)}
    report = build_report(
        "check-dp",
        digest,
        checks,
        witness=witness,
        cost={"entries": tensor.nnz(), "slices": tensor.codomain_dim},
        detail={**detail, "args": args},
    )
    return (0 if verdict.is_dp else 1), report


def _report_arens(tensor: MultiTensor, digest: str, args: dict) -> tuple[int, dict]:
    perms = _perm_choices(args["perm"], tensor.m)
    with_trace = args["trace"]

    def work(rho: Permutation):
        result = arens_extension(tensor, rho, with_trace=with_trace)
        return rho, result, result.tensor.is_dp()

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(work, perms))
    else:
        outcomes = [work(rho) for rho in perms]

    input_verdict = tensor.is_dp()
    checks = [check("input-dp", input_verdict.is_dp)]
    extensions = []
    for rho, result, verdict in outcomes:
        name = "perm " + " ".join(str(i) for i in rho.one_line())
        restricted = result.tensor == tensor
        checks.append(check(f"restriction [{name}]", restricted))
        if input_verdict.is_dp:
            checks.append(check(f"dp-preserved [{name}]", verdict.is_dp))
        entry = {
            "perm": list(rho.one_line()),
            "dp": verdict.is_dp,
            "tensor": tensor_to_obj(result.tensor),
        }
        if with_trace:
            entry["trace"] = {
                str(k + 1): [_form_obj(f) for f in chain]
                for k, chain in result.trace.items()
            }
        extensions.append(entry)
    witness = (
        None if input_verdict.witness is None else witness_to_obj(input_verdict.witness)
    )
    report = build_report(
        "arens",
        digest,
        checks,
        witness=witness,
        cost={
            "permutations": len(perms),
            "entries": tensor.nnz(),
            "codomain": tensor.codomain_dim,
        },
        detail={"extensions": extensions, "args": args},
    )
    return (0 if report["ok"] else 1), report


def _report_modulus(tensor: MultiTensor, digest: str, args: dict) -> tuple[int, dict]:
    report = build_report(
        "modulus",
        digest,
        [check("modulus-computed", True, entries=tensor.nnz())],
        cost={"entries": tensor.nnz()},
        detail={"modulus": tensor_to_obj(tensor.modulus()), "args": args},
    )
    return 0, report


def _report_factorize(tensor: MultiTensor, digest: str, args: dict) -> tuple[int, dict]:
    try:
        factorization = factorize_multimorphism(tensor)
    except NotDisjointnessPreserving as exc:
        verdict = exc.verdict
        report = build_report(
            "factorize",
            digest,
            [check("disjointness-preserving", False)],
            witness=witness_to_obj(verdict.witness),
            detail={"args": args},
        )
        return 1, report
    if factorization.is_zero:
        detail = {"zero": True, "args": args}
    else:
        detail = {
            "zero": False,
            "scale": format_rational(factorization.scale),
            "coords": [c + 1 for c in factorization.coords],
            "args": args,
        }
    report = build_report(
        "factorize",
        digest,
        [check("disjointness-preserving", True), check("factorized", True)],
        cost={"entries": tensor.nnz()},
        detail=detail,
    )
    return 0, report


def _report_rank(tensor: MultiTensor, digest: str, args: dict) -> tuple[int, dict]:
    basis = tensor.range_sublattice_basis()
    report = build_report(
        "rank",
        digest,
        [check("rank-computed", True, rank=len(basis))],
        cost={"entries": tensor.nnz(), "atoms": len(tensor.atom_images())},
        detail={
            "rank": len(basis),
            "basis": [vector_to_obj(v) for v in basis],
            "args": args,
        },
    )
    return 0, report


def _report_seq_demo(weight: EvConstSeq, digest: str, args: dict) -> tuple[int, dict]:
    seed = args["seed"]
    op = DiagBilinear(weight)
    checks: list[dict] = []
    witness = None

    def fail(name: str, message: str, **extra) -> None:
        nonlocal witness
        checks.append(check(name, False, error=message, **extra))
        if witness is None:
            witness = {"check": name, "error": message}

    rng = random.Random(seed)
    agree = True
    for _ in range(50):
        trial = DiagBilinear(random_seq(rng))
        try:
            diag_arens(trial, random_seq(rng), random_seq(rng))
        except RuntimeError as exc:
            fail("diag-extension-agrees", str(exc), samples=50)
            agree = False
            break
    if agree:
        checks.append(check("diag-extension-agrees", True, samples=50))

    rng = random.Random(seed + 1)
    bad = next(
        (
            i
            for i in range(5)
            if not biadjoint_dp_check(random_weighted_comp(rng), samples=50, seed=seed + i)
        ),
        None,
    )
    if bad is None:
        checks.append(check("biadjoint-dp", True, operators=5, samples=50))
    else:
        fail("biadjoint-dp", f"operator {bad} produced non-disjoint images")

    if dual_basis_dp(limit=32, samples=50, seed=seed):
        checks.append(check("dual-basis-dp", True, atoms=32))
    else:
        fail("dual-basis-dp", "some coordinate functional failed on a disjoint pair")

    try:
        value = rank_lower_bound(op, 32)
        if value == 32:
            checks.append(check("rank-lower-bound", True, atoms=32))
        else:
            fail("rank-lower-bound", f"certificate collapsed to {value}")
    except ValueError as exc:
        fail("rank-lower-bound", str(exc))

    if slotwise_dp_check(op, EvConstSeq.constant(1), samples=25, seed=seed):
        checks.append(check("slotwise-dp", True, samples=25))
    else:
        fail("slotwise-dp", "extension broke disjointness with one slot frozen")

    rng = random.Random(seed + 2)
    embed_ok = True
    for _ in range(20):
        trial_op = random_weighted_comp(rng)
        x = random_seq(rng, tail_zero=True)
        if comp_biadjoint(trial_op, x) != comp_apply(trial_op, x):
            embed_ok = False
            break
    if embed_ok:
        checks.append(check("biadjoint-extends-apply", True, samples=20))
    else:
        fail("biadjoint-extends-apply", "biadjoint disagreed with apply on an embedded element")

    report = build_report(
        "seq-demo",
        digest,
        checks,
        witness=witness,
        seed=seed,
        cost={"suites": 6},
        detail={"args": args},
    )
    return (0 if report["ok"] else 1), report


def _seq_demo_inputs(args) -> tuple[EvConstSeq, str, dict]:
    if args.weight_file:
        data = _read_file(args.weight_file)
        try:
            obj = json.loads(data.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise SpecFileError(f"invalid JSON: {exc}") from exc
        if isinstance(obj, dict) and obj.get("kind") == "diag-bilinear":
            weight = parse_spec(obj).weight
        else:
            weight = parse_seq(obj, "weight")
        digest = input_digest(data)
    else:
        weight = EvConstSeq.constant(1)
        digest = input_digest(
            canonical_json({"seed": args.seed, "weight": seq_to_obj(weight)}).encode()
        )
    return weight, digest, {"seed": args.seed, "weight": seq_to_obj(weight)}


def _run_replay(args) -> tuple[int, dict]:
    raw = _read_file(args.report)
    try:
        stored = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"invalid report JSON: {exc}") from exc
    if not isinstance(stored, dict) or "command" not in stored:
        raise SpecFileError("not a report file")
    command = stored["command"]
    stored_args = stored.get("detail", {}).get("args", {})

    if command == "seq-demo":
        weight = parse_seq(stored_args.get("weight", {"tail": "1"}), "weight")
        digest = stored["input_digest"]
        _, rebuilt = _report_seq_demo(weight, digest, stored_args)
    else:
        if not args.spec:
            raise SpecFileError(f"replaying {command!r} needs the original spec file")
        data = _read_file(args.spec)
        digest = input_digest(data)
        if digest != stored["input_digest"]:
            raise SpecFileError("spec file does not match the report's input digest")
        spec = loads_spec(data.decode("utf-8"))
        if not isinstance(spec, MultiTensor):
            raise SpecFileError("replay currently covers tensor commands and seq-demo")
        builders = {
            "check-dp": _report_check_dp,
            "arens": _report_arens,
            "modulus": _report_modulus,
            "factorize": _report_factorize,
            "rank": _report_rank,
        }
        if command not in builders:
            raise SpecFileError(f"unknown command in report: {command!r}")
        _, rebuilt = builders[command](spec, digest, stored_args)

    checks = [check("report-reproduced", rebuilt == stored)]
    if "witness" in stored and command in ("check-dp", "arens", "factorize"):
        if args.spec:
            tensor = loads_spec(_read_file(args.spec).decode("utf-8"))
            witness_ok = witness_from_obj(stored["witness"]).verify(tensor)
            checks.append(check("witness-verifies", witness_ok))
    report = build_report(
        "replay",
        stored["input_digest"],
        checks,
        detail={"args": {"command": command}},
    )
    return (0 if report["ok"] else 1), report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rieszkit",
        description="Exact lattice computations for disjointness preserving multilinear operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, needs_file: bool = True):
        p = sub.add_parser(name, help=help_text)
        if needs_file:
            p.add_argument("file", help="operator spec file (JSON)")
        p.add_argument("--json", action="store_true", help="emit the report as JSON")
        return p

    add("check-dp", "decide whether a tensor preserves disjointness")

    p_arens = add("arens", "compute bidual extensions and re-check disjointness")
    p_arens.add_argument(
        "--perm",
        default="all",
        help='"all", "id", "theta", or cycle notation such as "(1 2)"',
    )
    p_arens.add_argument("--trace", action="store_true", help="record intermediate forms")

    add("modulus", "entrywise modulus of a tensor")
    add("factorize", "factor a scalar disjointness preserving tensor")
    add("rank", "dimension of the sublattice generated by the range")

    p_seq = add("seq-demo", "run the sequence model instance suite", needs_file=False)
    p_seq.add_argument("--seed", type=int, default=0)
    p_seq.add_argument("--weight-file", help="EvConstSeq JSON overriding the default weight")

    p_replay = add("replay", "re-verify a stored report", needs_file=False)
    p_replay.add_argument("report", help="report JSON produced with --json")
    p_replay.add_argument("spec", nargs="?", help="the original spec file")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        if args.command == "check-dp":
            tensor, digest = _load_tensor(args.file)
            code, report = _report_check_dp(tensor, digest, {})
        elif args.command == "arens":
            tensor, digest = _load_tensor(args.file)
            code, report = _report_arens(
                tensor, digest, {"perm": args.perm, "trace": bool(args.trace)}
            )
        elif args.command == "modulus":
            tensor, digest = _load_tensor(args.file)
            code, report = _report_modulus(tensor, digest, {})
        elif args.command == "factorize":
            tensor, digest = _load_tensor(args.file)
            code, report = _report_factorize(tensor, digest, {})
        elif args.command == "rank":
            tensor, digest = _load_tensor(args.file)
            code, report = _report_rank(tensor, digest, {})
        elif args.command == "seq-demo":
            weight, digest, demo_args = _seq_demo_inputs(args)
            code, report = _report_seq_demo(weight, digest, demo_args)
        elif args.command == "replay":
            code, report = _run_replay(args)
        else:  # pragma: no cover - argparse enforces the choices
            raise SpecFileError(f"unknown command {args.command!r}")
    except (SpecFileError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report_json(report) if args.json else render_human(report))
    print(f"elapsed: {time.monotonic() - started:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
