"""qconf command line.

    qconf entropy  --state S --of A1[,A2] [--given B] [--quantity ...]
    qconf rates    --state S --instrument I [I ...] --theorem key-cq|key-c|ghz-cq|ghz-c [--j A1]
    qconf ghz      (--state S | --weights W) --method combing|tree
    qconf simulate --spec P --seed N
    qconf example  ghz|against-co|against-co-pure|pbit [--m --d --k --shield F] --out S
    qconf validate FILE [FILE ...]

Exit codes: 0 success, 2 bad input, 3 resource budget exceeded, 4 internal
invariant violated. ``--json`` prints a schema-checked report.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import BudgetError, InputError, InvariantError
from .families import example_against_co, example_against_co_pure, example_ghz, example_pbit, default_pbit
from .linalg import coherent_information, conditional_entropy, subsystem_entropy
from .protocol import ProtocolSpec, direct_against_co_protocol, run_protocol
from .rates import combing_ghz_rate, ghz_rate_c, ghz_rate_cq, key_rate_c, key_rate_cq
from .trees import tree_ghz_rate, tree_ghz_rate_from_state

EXIT_INPUT, EXIT_BUDGET, EXIT_INVARIANT = 2, 3, 4
THEOREMS = {"key-cq": key_rate_cq, "key-c": key_rate_c, "ghz-cq": ghz_rate_cq, "ghz-c": ghz_rate_c}


def fmt(x) -> str:
    if x is None:
        return "-"
    return f"{float(x):.6g}"


def emit(args, doc: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(lines))


def _labels(text: str | None) -> list[str]:
    return [t for t in (text or "").split(",") if t]


def _indices(state, labels: list[str]) -> list[int]:
    try:
        return [state.profile.index(l) for l in labels]
    except (KeyError, ValueError, InputError) as exc:
        raise InputError(f"unknown subsystem label in {labels}: known {list(state.profile.labels)}") from exc


# --- verbs ---------------------------------------------------------------------


def cmd_entropy(args) -> None:
    state = io.load_state(args.state)
    part = _indices(state, _labels(args.of))
    given = _indices(state, _labels(args.given))
    if not part:
        raise InputError("--of needs at least one subsystem")
    if args.quantity == "entropy":
        if given:
            value = conditional_entropy(state.matrix, state.profile, part, given)
            quantity = "conditional_entropy"
        else:
            value = subsystem_entropy(state.matrix, state.profile, part)
            quantity = "entropy"
    else:
        if not given:
            raise InputError("coherent information needs --given")
        value = coherent_information(state.matrix, state.profile, part, given)
        quantity = "coherent_information"
    doc = io.report_document(
        {"quantity": quantity, "value": value, "subsystems": _labels(args.of), "given": _labels(args.given)},
        "entropy_report",
    )
    cond = f"|{args.given}" if given and quantity != "coherent_information" else ""
    name = f"I({args.of}>{args.given})" if quantity == "coherent_information" else f"S({args.of}{cond})"
    emit(args, doc, [f"{name} = {fmt(value)} bits"])


def cmd_rates(args) -> None:
    state = io.load_state(args.state)
    instruments = io.load_instruments(args.instrument, state.party_labels)
    fn = THEOREMS[args.theorem]
    if args.j is not None:
        if args.theorem != "ghz-cq":
            raise InputError("--j applies only to --theorem ghz-cq")
        report = fn(state, instruments, args.j)
    else:
        report = fn(state, instruments)
    doc = io.report_document(report, "rate_report")
    lines = [
        f"theorem        {doc['theorem']}",
        f"rate (raw)     {fmt(doc['raw'])}",
        f"rate (clamped) {fmt(doc['clamped'])}",
        f"R_CO           {fmt(doc['R_CO'])}",
        "optimal rates  " + ", ".join(f"{l}={fmt(r)}" for l, r in zip(report.party_labels, doc["optimal_rates"])),
    ]
    for c in doc["binding_constraints"]:
        who = f" [player {c['player']}]" if c["player"] else ""
        lines.append(f"binding        sum over {{{','.join(c['subset'])}}} >= {fmt(c['bound'])}{who}")
    emit(args, doc, lines)


def cmd_ghz(args) -> None:
    if (args.state is None) == (args.weights is None):
        raise InputError("give exactly one of --state or --weights")
    if args.method == "combing":
        if args.state is None:
            raise InputError("the combing method needs --state")
        res = combing_ghz_rate(io.load_state(args.state))
        doc = io.report_document(res, "ghz_report")
        lines = [
            f"GHZ rate (combing) {fmt(res.rate)}",
            f"best root          {doc['root']}",
            f"binding subset     {{{','.join(doc['binding_subset'])}}}",
        ]
    else:
        res = tree_ghz_rate(io.load_weights(args.weights)) if args.weights else tree_ghz_rate_from_state(
            io.load_state(args.state)
        )
        doc = io.report_document(res, "ghz_report")
        lines = [f"GHZ rate (tree)    {fmt(res.rate)}"]
        if doc["connected"]:
            lines.append("best tree          " + " ".join(f"{a}-{b}" for a, b in doc["tree"]))
        else:
            lines.append("graph of positive edge weights is disconnected: no spanning tree, rate 0")
    emit(args, doc, lines)


def _resolve(ref, base: Path, loader):
    if isinstance(ref, str):
        return loader(io.read_json(base / ref), str(base / ref))
    return loader(ref, "<inline>")


def load_protocol(path: str | Path, seed: int):
    """Return a callable producing the SimulationReport for a spec file."""
    path = Path(path)
    doc = io.read_json(path)
    io.validate(doc, "protocol", str(path))
    if doc.get("protocol") == "against-co-direct":
        # no randomness here, the seed is only echoed
        return lambda: dataclasses.replace(direct_against_co_protocol(doc["d"], doc.get("k", 2)), seed=seed)
    base = path.parent
    state = _resolve(doc["state"], base, io.state_from_json)
    refs = doc["instruments"] if isinstance(doc["instruments"], list) else [doc["instruments"]]
    instruments = []
    for ref in refs:
        instruments.extend(_resolve(ref, base, lambda d, s: io.instruments_from_json(d, state.party_labels, s)))
    spec = ProtocolSpec(
        instruments=instruments,
        n=doc["n"],
        bin_counts=doc["bin_counts"],
        key_size=doc["key_size"],
        hash_seed=seed,
        decoder=doc.get("decoder", "ML"),
        binning=doc.get("binning", "random"),
        key_hash=doc.get("key_hash", "universal"),
    )
    return lambda: run_protocol(state, spec)


def cmd_simulate(args) -> None:
    report = load_protocol(args.spec, args.seed)()
    doc = io.report_document(report, "simulation_report")
    lines = [
        f"reliability       {fmt(report.reliability)}",
        f"secrecy distance  {fmt(report.secrecy)}",
        f"key bits / copy   {fmt(report.achieved_key_bits)}",
        f"transcript bits   {fmt(report.transcript_rate_bits)}",
        f"decoding success  {fmt(report.decoding_success)}",
        f"block length      {report.n}   key size {report.key_size}   decoder {report.decoder}   seed {report.seed}",
    ]
    if report.predicted_rate is not None:
        lines.append(f"predicted rate    {fmt(report.predicted_rate)}")
    emit(args, doc, lines)


def _pbit_from_file(path: str):
    doc = io.read_json(path)
    io.validate(doc, "pbit", path)
    vec = io.matrix_from_json([doc["shield_state"]], f"{path}: shield_state")[0]
    unitaries = [io.matrix_from_json(u, f"{path}: unitaries/{i}") for i, u in enumerate(doc["unitaries"])]
    return example_pbit(doc["d"], vec, doc["shield_dims"], doc["eve_dim"], unitaries)


def cmd_example(args) -> None:
    if args.name == "ghz":
        state = example_ghz(args.m, args.d)
    elif args.name == "against-co":
        state = example_against_co(args.d, args.k)
    elif args.name == "against-co-pure":
        state = example_against_co_pure(args.d, args.k)
    else:
        state = _pbit_from_file(args.shield) if args.shield else default_pbit()
    io.save_state(state, args.out)
    # the written file must load back
    io.load_state(args.out)
    trace = float(np.trace(state.matrix).real)
    doc = {
        "name": args.name,
        "out": str(args.out),
        "dims": list(state.profile.dims),
        "labels": list(state.profile.labels),
        "eve": state.eve_label,
        "trace": trace,
    }
    lines = [
        f"wrote {args.out}",
        "subsystems " + " ".join(f"{l}:{d}" for l, d in zip(state.profile.labels, state.profile.dims)),
        f"eve        {state.eve_label or '-'}",
        f"trace      {fmt(trace)}",
    ]
    emit(args, doc, lines)


def detect_kind(doc) -> str:
    if isinstance(doc, list) or (isinstance(doc, dict) and "branches" in doc):
        return "instrument"
    if not isinstance(doc, dict):
        raise InputError("unrecognised document: expected a JSON object or list")
    if "matrix" in doc:
        return "state"
    if "edges" in doc:
        return "weights"
    if "shield_state" in doc:
        return "pbit"
    if "protocol" in doc or "bin_counts" in doc:
        return "protocol"
    if "reliability" in doc:
        return "simulation_report"
    if "theorem" in doc:
        return "ghz_report" if doc["theorem"].startswith("ghz-") and "R_CO" not in doc else "rate_report"
    if "quantity" in doc:
        return "entropy_report"
    raise InputError("unrecognised document kind")


def validate_file(path: str) -> str:
    doc = io.read_json(path)
    kind = detect_kind(doc)
    if kind == "state":
        io.state_from_json(doc, path)
    elif kind == "instrument":
        io.instruments_from_json(doc, ["*"], path)
    elif kind == "weights":
        io.weights_from_json(doc, path)
    elif kind == "pbit":
        _pbit_from_file(path)
    else:
        io.validate(doc, kind, path)
    return kind


def cmd_validate(args) -> None:
    results = [(p, validate_file(p)) for p in args.files]
    doc = {"valid": [{"file": p, "kind": k} for p, k in results]}
    emit(args, doc, [f"{p}: valid {k}" for p, k in results])


# --- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qconf", description="Conference key and GHZ rate toolkit")
    parser.add_argument("--json", action="store_true", help="print a JSON report")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print a JSON report")
        p.set_defaults(func=fn)
        return p

    p = add("entropy", cmd_entropy, "entropies of a state file")
    p.add_argument("--state", required=True)
    p.add_argument("--of", required=True, help="comma-separated subsystem labels")
    p.add_argument("--given", help="conditioning (or output, for coherent) subsystems")
    p.add_argument("--quantity", choices=["entropy", "coherent"], default="entropy")

    p = add("rates", cmd_rates, "conference key and GHZ rates for given instruments")
    p.add_argument("--state", required=True)
    p.add_argument("--instrument", "--povm", nargs="+", required=True, dest="instrument")
    p.add_argument("--theorem", choices=sorted(THEOREMS), required=True)
    p.add_argument("--j", help="distinguished player for ghz-cq (default: best)")

    p = add("ghz", cmd_ghz, "GHZ distillation rates from entanglement structure")
    p.add_argument("--state")
    p.add_argument("--weights")
    p.add_argument("--method", choices=["combing", "tree"], required=True)

    p = add("simulate", cmd_simulate, "exact finite-block protocol simulation")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, required=True)

    p = add("example", cmd_example, "write a built-in example state")
    p.add_argument("name", choices=["ghz", "against-co", "against-co-pure", "pbit"])
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--shield", help="pbit shield family file")
    p.add_argument("--out", required=True)

    p = add("validate", cmd_validate, "check JSON files against their schemas")
    p.add_argument("files", nargs="+")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except BudgetError as exc:
        print(f"qconf: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InputError as exc:
        print(f"qconf: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantError as exc:
        print(f"qconf: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"qconf: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return 0


if __name__ == "__main__":
    sys.exit(main())
