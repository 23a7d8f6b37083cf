"""Command-line front end: JSON in, deterministic JSON reports out.

Exit codes: 0 verified success, 1 verification failure, 2 undecided within
budget, 3 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .boundary import ContractError, boundary_presentation, extended
from .exact_linalg import ShapeError, SingularMatrixError, as_int_matrix, block_diag, det, smith_normal_form
from .gauss import IntegrityError
from .io import InputError, form_from_json, form_to_json, matrix_from_json, matrix_to_json, tree_from_json, tree_to_json
from .linking import LinkingFormError, Undecided, are_isomorphic, direct_sum, trivial_form
from .realize import format_factors, non_treelike_certificate, parse_factors, present, present_form, stabilize_treelike
from .skew_decomp import decompose_skew_tree
from .tree_forms import (
    LabelledTree,
    PlumbingGraph,
    SkewLabelledTree,
    TreeError,
    connect_sum_graphs,
    connect_sum_witness,
    skew_tree_to_form,
    to_dot,
    tree_to_form,
)

EXIT_OK, EXIT_FAIL, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3


@dataclass
class RunReport:
    command: str
    input_digest: str
    result: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    elapsed: float | None = None

    def check(self, name: str, outcome, detail: str = "") -> None:
        if isinstance(outcome, bool):
            outcome = "pass" if outcome else "fail"
        self.checks.append({"name": name, "outcome": outcome, "detail": detail})

    @property
    def status(self) -> str:
        outcomes = {c["outcome"] for c in self.checks}
        if "fail" in outcomes:
            return "fail"
        if "undecided" in outcomes:
            return "undecided"
        return "ok"

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "input_digest": self.input_digest,
            "status": self.status,
            "result": self.result,
            "checks": self.checks,
            "summary": self.summary,
        }
        if self.elapsed is not None:
            out["elapsed_seconds"] = round(self.elapsed, 6)
        return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# input helpers


def _read_json(path: str | None, inline: str | None, what: str = "input"):
    if path is None and inline is None:
        raise InputError(f"{what} required: pass --file or --json")
    try:
        text = Path(path).read_text() if path is not None else inline
        return json.loads(text), text
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\0")
    return h.hexdigest()


def _matrix_and_alpha(data):
    """A symmetric/skew matrix and its alpha from tree or matrix JSON."""
    if isinstance(data, dict) and "labels" in data:
        tree, alpha = tree_from_json(data)
        if isinstance(tree, SkewLabelledTree):
            return skew_tree_to_form(tree), alpha, tree
        return tree_to_form(tree), alpha, tree
    if isinstance(data, dict) and "matrix" in data:
        return matrix_from_json(data["matrix"]), tuple(int(a) for a in data.get("alpha", ())), None
    return matrix_from_json(data), tuple(int(a) for a in data.get("alpha", ())) if isinstance(data, dict) else (), None


def _config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"bad config file: {exc}") from exc
    if getattr(args, "budget", None) is not None:
        cfg["budget"] = args.budget
    return cfg


def _iso_json(iso) -> dict:
    return {"images": [list(h) for h in iso.images], "verified": iso.verify()}


def _form_summary(f) -> list[str]:
    return [
        f"group: {' + '.join(f'Z/{d}' for d in f.group.divisors) or '0'}",
        "q on generators: " + (", ".join(str(x) for x in f.q) or "-"),
        f"beta: {list(f.beta)}",
    ]


def _write(path: str | None, payload) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_det(args, rep: RunReport, cfg):
    m, _, _ = _matrix_and_alpha(args.data)
    d = det(m)
    rep.result = {"det": str(d)}
    rep.summary = [f"det = {d}"]


def cmd_snf(args, rep, cfg):
    m, _, _ = _matrix_and_alpha(args.data)
    s = smith_normal_form(m)
    rep.result = {"P": matrix_to_json(s.P), "Q": matrix_to_json(s.Q), "D": matrix_to_json(s.D), "divisors": [str(x) for x in s.divisors]}
    rep.check("PAQ=D", (s.P @ m @ s.Q) == s.D)
    rep.summary = [f"divisors: {list(s.divisors)}"]


def cmd_boundary(args, rep, cfg):
    m, alpha, _ = _matrix_and_alpha(args.data)
    bp = boundary_presentation(extended(m, args.k, alpha))
    rep.result = {"form": form_to_json(bp.form), "order": bp.form.order}
    rep.check("|G|=|det|", bp.form.order == abs(det(m)))
    rep.summary = _form_summary(bp.form)
    _write(args.form_out, form_to_json(bp.form))


def _factors_or_form(args):
    if args.factors is not None:
        return parse_factors(args.factors), None
    data, _ = _read_json(args.file, args.json, "factor list or linking form")
    return None, form_from_json(data, args.k)


def cmd_present(args, rep, cfg):
    budget = cfg.get("budget")
    factors, form = _factors_or_form(args)
    beta = tuple(int(x) for x in args.beta.split(",")) if args.beta else None
    shift = tuple(int(x) for x in args.shift.split(",")) if args.shift else None
    if factors is not None:
        pres = present(factors, args.k, beta=beta, shift=shift, budget=budget)
        rep.result["factors"] = format_factors(factors)
    else:
        pres = present_form(form, budget=budget, max_order=cfg.get("decompose_order", 512))
    tree_json = tree_to_json(pres.tree, pres.alpha)
    rep.result.update(
        {"tree": tree_json, "target": form_to_json(pres.target), "witness": _iso_json(pres.witness), "dot": to_dot(pres.tree)}
    )
    rep.check("even", pres.tree.is_even)
    rep.check("witness", pres.witness.verify())
    rep.summary = [f"labels: {list(pres.tree.labels)}", f"edges: {[list(e) for e in pres.tree.edges]}", f"alpha: {list(pres.alpha)}"]
    _write(args.tree_out, tree_json)


def cmd_catalog(args, rep, cfg):
    factors = parse_factors(args.factors)
    forms = [f.form(args.k) for f in factors]
    total = direct_sum(*forms) if forms else trivial_form(args.k)
    rep.result = {"factors": [str(f) for f in factors], "forms": [form_to_json(f) for f in forms], "sum": form_to_json(total)}
    rep.summary = _form_summary(total)
    _write(args.form_out, form_to_json(total))


def cmd_verify(args, rep, cfg):
    t_data, _ = _read_json(args.tree, None, "--tree")
    m, alpha, _ = _matrix_and_alpha(t_data)
    if args.target is not None:
        f_data, _ = _read_json(args.target, None, "--target")
        target = form_from_json(f_data, args.k)
    elif args.factors is not None:
        fs = parse_factors(args.factors)
        target = direct_sum(*(f.form(args.k) for f in fs)) if fs else trivial_form(args.k)
    else:
        raise InputError("verify needs --target or --factors")
    k = target.context.k
    f = boundary_presentation(extended(m, k, alpha)).form
    try:
        iso = are_isomorphic(f, target, budget=cfg.get("budget"))
    except Undecided as exc:
        rep.check("boundary-isomorphism", "undecided", str(exc))
        return
    rep.check("boundary-isomorphism", iso is not None and iso.verify())
    rep.result = {"boundary": form_to_json(f), "witness": _iso_json(iso) if iso else None}
    rep.summary = _form_summary(f)


def cmd_stabilize(args, rep, cfg):
    m, _, _ = _matrix_and_alpha(args.data)
    res = stabilize_treelike(
        m,
        budget=cfg.get("budget"),
        max_order=cfg.get("decompose_order", 512),
        isometry_rank=cfg.get("isometry_rank", 8),
        isometry_budget=cfg.get("isometry_budget", 200_000),
    )
    rep.result = {
        "tree": tree_to_json(res.tree),
        "s": res.s,
        "t": res.t,
        "candidate_pads": res.pads,
        "factors": [str(f) for f in res.factors],
        "isometry": matrix_to_json(res.isometry) if res.isometry is not None else None,
    }
    for c in res.checks:
        if c.name == "isometry-search" and c.outcome == "undecided":
            rep.result["isometry_note"] = c.detail  # optional check; never a pass
            continue
        rep.check(c.name, c.outcome, c.detail)
    try:
        cert = non_treelike_certificate(m) if det(m) else None
        rep.result["non_treelike_certificate"] = (
            {"scale_factor": cert.scale_factor, "divisors": list(cert.divisors)} if cert else None
        )
    except Undecided as exc:
        rep.result["non_treelike_certificate"] = f"undecided: {exc}"
    rep.summary = [f"candidate rank {res.tree.n}, s = {res.s}, t = {res.t}"]


def _graph(data) -> PlumbingGraph:
    tree, _ = tree_from_json(data)
    if not isinstance(tree, LabelledTree):
        raise InputError("connect-sum needs symmetric trees")
    return PlumbingGraph(tree.labels, tree.edges)


def cmd_connect_sum(args, rep, cfg):
    d1, t1 = _read_json(args.g1, None, "--g1")
    d2, t2 = _read_json(args.g2, None, "--g2")
    rep.input_digest = _digest(t1, t2, str(args.v1), str(args.v2))
    g1, g2 = _graph(d1), _graph(d2)
    g = connect_sum_graphs(g1, args.v1, g2, args.v2)
    u = connect_sum_witness(g1, args.v1, g2, args.v2)
    hyp = as_int_matrix([[0, 1], [1, 0]])
    want = block_diag(g1.form(), g2.form(), hyp)
    rep.check("congruence", (u.transpose() @ g.form() @ u) == want and abs(det(u)) == 1)
    rep.check("forest", g.tree().n - len(g.tree().edges) == g.component_count())
    rep.result = {"tree": tree_to_json(g.tree()), "witness": matrix_to_json(u), "dot": to_dot(g.tree())}
    rep.summary = [f"{g.n} vertices"]


def cmd_skew(args, rep, cfg):
    tree, _ = tree_from_json(args.data)
    if not isinstance(tree, SkewLabelledTree):
        raise InputError("skew-decompose needs a tree with edge signs")
    d = decompose_skew_tree(tree)
    rep.check("normal-form", d.verify(skew_tree_to_form(tree)))
    rep.result = {"s": d.s, "t": d.t, "U": matrix_to_json(d.U)}
    rep.summary = [f"s = {d.s}, t = {d.t}"]


def cmd_export_dot(args, rep, cfg):
    tree, _ = tree_from_json(args.data)
    rep.result = {"dot": to_dot(tree, args.name)}


COMMANDS = {
    "det": cmd_det,
    "snf": cmd_snf,
    "boundary": cmd_boundary,
    "present": cmd_present,
    "stabilize": cmd_stabilize,
    "connect-sum": cmd_connect_sum,
    "skew-decompose": cmd_skew,
    "verify": cmd_verify,
    "export-dot": cmd_export_dot,
    "catalog": cmd_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=3, help="dimension parameter (forms in dimension 4k)")
    common.add_argument("--pretty", action="store_true", help="indented JSON plus a text summary")
    common.add_argument("--config", help="JSON config: budget, decompose_order, isometry_rank, isometry_budget")
    common.add_argument("--budget", type=int, help="isomorphism search node budget")
    common.add_argument("--timing", action="store_true", help="include elapsed time (makes output nondeterministic)")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--file", help="input JSON file")
    source.add_argument("--json", help="inline input JSON")

    p = _Parser(prog="treelike", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    for name in ("det", "snf", "stabilize", "skew-decompose"):
        sub.add_parser(name, parents=[common, source])
    b = sub.add_parser("boundary", parents=[common, source])
    b.add_argument("--form-out", help="write the boundary linking form JSON here")
    pr = sub.add_parser("present", parents=[common, source])
    pr.add_argument("factors", nargs="?", help="e.g. cyclic:5^1:2+hyperbolic:1")
    pr.add_argument("--beta", help="comma-separated defect datum")
    pr.add_argument("--shift", help="comma-separated refinement shift c (k in 2, 4)")
    pr.add_argument("--tree-out", help="write the presenting tree JSON here")
    c = sub.add_parser("catalog", parents=[common])
    c.add_argument("factors")
    c.add_argument("--form-out", help="write the summed linking form JSON here")
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("--tree", required=True)
    v.add_argument("--target")
    v.add_argument("--factors")
    cs = sub.add_parser("connect-sum", parents=[common])
    cs.add_argument("--g1", required=True)
    cs.add_argument("--v1", type=int)
    cs.add_argument("--g2", required=True)
    cs.add_argument("--v2", type=int)
    e = sub.add_parser("export-dot", parents=[common, source])
    e.add_argument("--name", default="T")
    e.add_argument("--raw", action="store_true", help="print the DOT text only")
    return p


def _emit(rep: RunReport, pretty: bool, out) -> None:
    payload = rep.to_json()
    if pretty:
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        for line in rep.summary:
            out.write(line + "\n")
        for c in rep.checks:
            out.write(f"[{c['outcome']}] {c['name']} {c['detail']}".rstrip() + "\n")
    else:
        out.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    rep = RunReport(args.command, "")
    try:
        cfg = _config(args)
        raw = ""
        if hasattr(args, "file") and (args.file is not None or args.json is not None):
            args.data, raw = _read_json(args.file, args.json)
        elif args.command in ("det", "snf", "boundary", "stabilize", "skew-decompose", "export-dot"):
            raise InputError("pass --file or --json")
        extra = [getattr(args, n) or "" for n in ("factors", "beta", "shift") if hasattr(args, n)]
        for n in ("tree", "target"):
            if getattr(args, n, None):
                extra.append(_read_json(getattr(args, n), None, f"--{n}")[1])
        rep.input_digest = _digest(args.command, str(args.k), raw, *extra)
        COMMANDS[args.command](args, rep, cfg)
    except Undecided as exc:
        rep.check("budget", "undecided", str(exc))
        code = EXIT_UNDECIDED
    except (InputError, TreeError, LinkingFormError, ContractError, ShapeError, SingularMatrixError, ValueError) as exc:
        rep.check("input", "fail", f"{type(exc).__name__}: {exc}")
        _emit(rep, args.pretty, out)
        return EXIT_INPUT
    except IntegrityError as exc:
        rep.check("integrity", "fail", str(exc))
        code = EXIT_FAIL
    else:
        code = {"ok": EXIT_OK, "fail": EXIT_FAIL, "undecided": EXIT_UNDECIDED}[rep.status]
    if args.timing:
        rep.elapsed = time.perf_counter() - start
    if args.command == "export-dot" and getattr(args, "raw", False) and code == EXIT_OK:
        out.write(rep.result["dot"] + "\n")
        return code
    _emit(rep, args.pretty, out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
