"""Command line front end: ``fbas <command> [options] FILE``.

Exit codes: 0 success, 1 a checked property does not hold, 2 usage or input
error, 3 a resource guard was hit. Diagnostics go to stderr.
"""
import argparse
import json
import sys
from contextlib import contextmanager
from typing import Any, Dict, List, Optional, Sequence, TextIO

from . import config
from .bench import ROOT_RULES, format_rows, log_slope, run_bench
from .errors import FbasError, InstanceTooLarge, NoQuorumIntersection, ResourceLimitExceeded, ValidationError
from .generators import generate_hierarchy_fbas, generate_org_fbas, generate_symmetric, org_partition
from .intactness import intact_nodes, is_dset
from .io import FbasDocument, emit_fbas, parse_dimacs, parse_fbas, read_fbas
from .model import AnyFbas
from .nodeset import NodeSet, subsets
from .oracles import (brute_dsets, brute_intact, brute_min_quorums, brute_quorum_intersection, brute_quorums,
                      reduce_3sat, to_frozen)
from .probability import (AtMostOne, Explicit, Grouped, GroupedByzantine, Independent, IntactProbability,
                          intact_probability_exact, intact_probability_grouped, intact_probability_incl_excl,
                          intact_probability_mc)
from .quorums import (enumerate_min_quorums, enumerate_quorums, min_intersection_size, quorum_intersection,
                      quorum_intersection_with_scc_preprocessing)
from .trust import build_trust_graph, scc_partition

OK, VIOLATED, USAGE, GUARD = 0, 1, 2, 3


class PropertyViolated(Exception):
    pass


class Output:
    """Collects one record per command; renders it as JSON or as text lines."""

    def __init__(self, stream: TextIO, as_json: bool):
        self.stream = stream
        self.as_json = as_json

    def emit(self, record: Dict[str, Any], lines: Sequence[str]):
        if self.as_json:
            self.stream.write(json.dumps(record, sort_keys=True) + "\n")
        else:
            for line in lines:
                self.stream.write(line + "\n")


def _names(f: AnyFbas, mask: NodeSet) -> List[str]:
    return f.names_of(mask)


def _fmt(f: AnyFbas, mask: NodeSet) -> str:
    return "{" + ", ".join(_names(f, mask)) + "}"


def _name_list(text: str) -> List[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _load(path: str) -> FbasDocument:
    if path == "-":
        return parse_fbas(sys.stdin.buffer.read())
    return read_fbas(path)


def _oracle_mismatch(what: str):
    raise PropertyViolated(f"oracle disagrees on {what}")


@contextmanager
def _guards(args):
    saved = {k: getattr(config, k) for k in ("EXPANSION_CAP", "QUORUM_CAP", "EXACT_PROBABILITY_LIMIT")}
    config.EXPANSION_CAP = args.expansion_cap
    config.QUORUM_CAP = args.quorum_cap
    config.EXACT_PROBABILITY_LIMIT = args.subset_cap
    try:
        yield
    finally:
        for k, v in saved.items():
            setattr(config, k, v)


# -- commands -------------------------------------------------------------

def cmd_quorums(args, out: Output) -> int:
    f = _load(args.file).fbas
    minimal = args.minimal or args.command == "min-quorums"
    if minimal:
        bound = "half" if getattr(args, "half", False) else None
        stream = enumerate_min_quorums(f, size_bound=bound)
    else:
        stream = enumerate_quorums(f)
    cap = args.quorum_cap
    found: List[NodeSet] = []
    count = 0
    truncated = False
    for q in stream:
        if args.limit is not None and count >= args.limit:
            truncated = True
            break
        count += 1
        if count > cap:
            raise ResourceLimitExceeded(f"more than {cap} quorums (raise --quorum-cap or pass --limit)")
        if not args.count_only:
            found.append(q)
    if args.oracle:
        if truncated:
            raise ValidationError("--oracle needs the complete list, drop --limit")
        ref = brute_min_quorums(f) if minimal else brute_quorums(f)
        if minimal and bound == "half":
            ref = {q for q in ref if len(q) <= f.n / 2}
        if len(ref) != count or (found and {to_frozen(q) for q in found} != ref):
            _oracle_mismatch("the quorum list")
    record: Dict[str, Any] = {"command": args.command, "minimal": minimal, "count": count, "truncated": truncated}
    lines = []
    if not args.count_only:
        record["quorums"] = [_names(f, q) for q in found]
        lines = [_fmt(f, q) for q in found]
    lines.append(str(count) if args.count_only else f"# {count} {'minimal ' if minimal else ''}quorums"
                 + (" (limit reached)" if truncated else ""))
    if args.oracle:
        record["oracle"] = "agrees"
    out.emit(record, lines)
    return OK


def cmd_check_intersection(args, out: Output) -> int:
    f = _load(args.file).fbas
    if args.no_scc_preprocessing:
        res = quorum_intersection(f)
    else:
        res = quorum_intersection_with_scc_preprocessing(f)
    record: Dict[str, Any] = {"command": "check-intersection", "intersects": res.intersects,
                              "scc_preprocessing": not args.no_scc_preprocessing}
    lines = [f"intersects: {str(res.intersects).lower()}"]
    if args.witness and res.witness:
        q1, q2 = res.witness
        record["witness"] = [_names(f, q1), _names(f, q2)]
        lines.append(f"disjoint quorums: {_fmt(f, q1)} {_fmt(f, q2)}")
    if args.min_intersection:
        m = min_intersection_size(f)
        record["min_intersection"] = m
        lines.append(f"min intersection: {m}")
    if args.oracle:
        if brute_quorum_intersection(f) != res.intersects:
            _oracle_mismatch("quorum intersection")
        record["oracle"] = "agrees"
    out.emit(record, lines)
    if args.expect_intersection and not res.intersects:
        print("error: the FBAS has two disjoint quorums", file=sys.stderr)
        return VIOLATED
    return OK


def cmd_sccs(args, out: Output) -> int:
    f = _load(args.file).fbas
    part = scc_partition(build_trust_graph(f))
    comps = []
    lines = []
    for i, c in enumerate(part.components):
        flags = []
        if i in part.maximal:
            flags.append("maximal")
        if i == part.greatest:
            flags.append("greatest")
        comps.append({"members": _names(f, c), "maximal": i in part.maximal, "greatest": i == part.greatest,
                      "successors": sorted(part.condensation[i])})
        lines.append(f"{i}\t{_fmt(f, c)}\t{' '.join(flags)}")
    out.emit({"command": "sccs", "components": comps, "has_greatest": part.greatest is not None}, lines)
    return OK


def cmd_intact(args, out: Output) -> int:
    f = _load(args.file).fbas
    b = f.mask(_name_list(args.ill_behaved))
    rep = intact_nodes(f, b)
    if args.oracle:
        if f.n > config.BRUTE_DSET_LIMIT:
            raise InstanceTooLarge(f"the DSet oracle is limited to {config.BRUTE_DSET_LIMIT} nodes")
        if brute_intact(f, to_frozen(b)) != to_frozen(rep.intact):
            _oracle_mismatch("the intact set")
    record = {"command": "intact", "ill_behaved": _names(f, b), "intact": _names(f, rep.intact),
              "befouled": _names(f, f.all & ~rep.intact & ~b), "smallest_dset": _names(f, rep.smallest_dset)}
    lines = [f"ill-behaved: {_fmt(f, b)}", f"intact: {_fmt(f, rep.intact)}",
             f"befouled: {_fmt(f, f.all & ~rep.intact & ~b)}", f"smallest DSet: {_fmt(f, rep.smallest_dset)}"]
    if args.oracle:
        record["oracle"] = "agrees"
    out.emit(record, lines)
    return OK


def cmd_dsets(args, out: Output) -> int:
    f = _load(args.file).fbas
    if f.n > args.subset_cap:
        raise InstanceTooLarge(f"DSet enumeration over 2^{f.n} subsets exceeds --subset-cap {args.subset_cap}")
    found = sorted((d for d in subsets(f.all) if is_dset(f, d)), key=lambda d: (d.bit_count(), d))
    if args.oracle and {to_frozen(d) for d in found} != brute_dsets(f):
        _oracle_mismatch("the DSet family")
    record: Dict[str, Any] = {"command": "dsets", "dsets": [_names(f, d) for d in found], "count": len(found)}
    if args.oracle:
        record["oracle"] = "agrees"
    out.emit(record, [_fmt(f, d) for d in found] + [f"# {len(found)} DSets"])
    return OK


def cmd_check_dset(args, out: Output) -> int:
    f = _load(args.file).fbas
    d = f.mask(_name_list(args.set))
    ok = is_dset(f, d)
    if args.oracle and (to_frozen(d) in brute_dsets(f)) != ok:
        _oracle_mismatch("the DSet test")
    record: Dict[str, Any] = {"command": "check-dset", "set": _names(f, d), "dset": ok}
    if args.oracle:
        record["oracle"] = "agrees"
    out.emit(record, [f"dset: {str(ok).lower()}"])
    if args.expect_dset and not ok:
        print(f"error: {_fmt(f, d)} is not a DSet", file=sys.stderr)
        return VIOLATED
    return OK


# -- intact-probability -----------------------------------------------------

def _prob_map(f: AnyFbas, items: Sequence[str], where: str) -> Dict[int, float]:
    """``name=value`` pairs, comma separated or repeated."""
    out: Dict[int, float] = {}
    for item in items:
        for part in _name_list(item):
            name, sep, val = part.partition("=")
            if not sep:
                raise ValidationError(f"{where}: expected name=value, got {part!r}")
            try:
                out[f.index[name]] = float(val)
            except KeyError:
                raise ValidationError(f"{where}: unknown node {name!r}") from None
            except ValueError:
                raise ValidationError(f"{where}: bad probability {val!r}") from None
    return out


def _table(f: AnyFbas, entries, where: str) -> Dict[NodeSet, float]:
    if not isinstance(entries, list):
        raise ValidationError(f"{where}: expected a list of {{\"set\": [...], \"p\": x}} entries")
    table: Dict[NodeSet, float] = {}
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or not isinstance(e.get("set"), list) or not isinstance(e.get("p"), (int, float)):
            raise ValidationError(f"{where}[{i}]: expected {{\"set\": [names], \"p\": number}}")
        b = f.mask(e["set"])
        if b in table:
            raise ValidationError(f"{where}[{i}]: set listed twice")
        table[b] = float(e["p"])
    return table


def _read_params(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        try:
            params = json.loads(fh.read().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"{path}: {exc}") from None
    if not isinstance(params, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return params


def _orgs(doc: FbasDocument, params: Dict[str, Any]) -> List[NodeSet]:
    f = doc.fbas
    if "organizations" in params:
        return [f.mask(o["members"]) for o in params["organizations"]]
    if not doc.organizations:
        raise ValidationError("the model needs organizations (document block or --params)")
    return [m for _, m in doc.organizations]


def build_distribution(doc: FbasDocument, args):
    f = doc.fbas
    params = _read_params(args.params)
    model = args.model
    if model in ("independent", "at-most-one"):
        p = {f.index[k]: float(x) for k, x in params.get("p", {}).items() if k in f.index}
        unknown = [k for k in params.get("p", {}) if k not in f.index]
        if unknown:
            raise ValidationError(f"--params: unknown node {unknown[0]!r}")
        p.update(_prob_map(f, args.p, "--p"))
        if model == "independent":
            return Independent(tuple(p.get(v, args.p_default) for v in range(f.n)))
        single = tuple(p.get(v, 0.0) for v in range(f.n))
        p_empty = args.p_empty if args.p_empty is not None else params.get("p_empty", 1.0 - sum(single))
        return AtMostOne(float(p_empty), single)
    if model == "grouped-byzantine":
        orgs = _orgs(doc, params)
        q = args.q if args.q is not None else params.get("q")
        r = args.r if args.r is not None else params.get("r")
        if q is None or r is None:
            raise ValidationError("grouped-byzantine needs --q and --r")
        qs = q if isinstance(q, list) else [q] * len(orgs)
        rs = r if isinstance(r, list) else [r] * len(orgs)
        return GroupedByzantine(tuple(orgs), tuple(map(float, qs)), tuple(map(float, rs)))
    if model == "grouped":
        if "organizations" not in params:
            raise ValidationError("grouped needs --params with organizations and their tables")
        orgs, tables = [], []
        for i, o in enumerate(params["organizations"]):
            orgs.append(f.mask(o["members"]))
            tables.append(_table(f, o.get("table"), f"organizations[{i}].table"))
        return Grouped(tuple(orgs), tuple(tables))
    if "table" not in params:
        raise ValidationError("explicit needs --params with a table")
    return Explicit(_table(f, params["table"], "table"))


def _prob_record(f: AnyFbas, r: IntactProbability) -> Dict[str, Any]:
    return {"node": f.names[r.node], "p_intact": r.p_intact,
            "p_intact_given_well_behaved": r.p_intact_given_well_behaved,
            "well_behaved_defined": r.p_intact_given_well_behaved is not None,
            "method": r.method, "samples": r.samples, "seed": r.seed, "std_error": r.std_error}


def cmd_intact_probability(args, out: Output) -> int:
    doc = _load(args.file)
    f = doc.fbas
    dist = build_distribution(doc, args)
    nodes = list(range(f.n)) if args.all else [f.mask([x]).bit_length() - 1 for x in args.node]
    method = args.method
    if args.mc_samples is not None:
        if method not in ("auto", "mc"):
            raise ValidationError("--mc-samples implies --method mc")
        method = "mc"
    if method == "mc" and args.mc_samples is None:
        raise ValidationError("--method mc needs --mc-samples")
    if method == "auto":
        method = "grouped" if isinstance(dist, (Grouped, GroupedByzantine)) else "exact"
    if method == "mc":
        res = intact_probability_mc(f, None, dist, args.mc_samples, args.seed, args.lanes)
        results = [res[v] for v in nodes]
    elif method == "exact":
        res = intact_probability_exact(f, None, dist)
        results = [res[v] for v in nodes]
    elif method == "grouped":
        results = [intact_probability_grouped(f, v, dist) for v in nodes]
    else:
        if not isinstance(dist, Independent):
            raise ValidationError("inclusion-exclusion needs the independent model")
        results = [intact_probability_incl_excl(f, v, dist) for v in nodes]
    records = [_prob_record(f, r) for r in results]
    lines = ["node\tp_intact\tp_intact_given_well_behaved\tmethod" + ("\tstd_error" if method == "mc" else "")]
    for r in results:
        cond = "undefined" if r.p_intact_given_well_behaved is None else f"{r.p_intact_given_well_behaved:.12g}"
        row = f"{f.names[r.node]}\t{r.p_intact:.12g}\t{cond}\t{r.method}"
        if method == "mc":
            row += f"\t{r.std_error:.3g}"
        lines.append(row)
    out.emit({"command": "intact-probability", "model": args.model, "results": records}, lines)
    return OK


# -- generators and tools ---------------------------------------------------

def _write_doc(data: bytes, path: Optional[str], stdout: TextIO):
    if path is None or path == "-":
        stdout.write(data.decode("utf-8"))
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _int_list(text: str, what: str) -> List[int]:
    try:
        return [int(x) for x in _name_list(text)]
    except ValueError:
        raise ValidationError(f"{what}: expected comma separated integers") from None


def cmd_generate(args, out: Output) -> int:
    if args.family == "symmetric":
        f = generate_symmetric(args.n, args.k)
        data = emit_fbas(f)
    else:
        sizes = _int_list(args.sizes, "--sizes")
        thresholds = _int_list(args.thresholds, "--thresholds")
        names = _name_list(args.org_names) if args.org_names else None
        gen = generate_hierarchy_fbas if args.pooled else generate_org_fbas
        f = gen(sizes, thresholds, args.root, names)
        data = emit_fbas(f, org_partition(sizes, names))
    _write_doc(data, args.output, out.stream)
    return OK


def cmd_reduce_3sat(args, out: Output) -> int:
    if args.file == "-":
        text = sys.stdin.read()
    else:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    f = reduce_3sat(parse_dimacs(text))
    _write_doc(emit_fbas(f), args.output, out.stream)
    return OK


def cmd_bench(args, out: Output) -> int:
    counts = range(args.min_orgs, args.max_orgs + 1)
    rows = run_bench(counts, args.rules or list(ROOT_RULES), args.repeats)
    slopes = {}
    for rule in args.rules or list(ROOT_RULES):
        sel = [r for r in rows if r.rule == rule]
        if len(sel) >= 2:
            slopes[rule] = {"log_quorums_per_org": log_slope([r.orgs for r in sel], [r.quorums for r in sel]),
                            "log_seconds_per_org": log_slope([r.orgs for r in sel],
                                                             [max(r.enumerate_seconds, 1e-9) for r in sel])}
    if out.as_json:
        from dataclasses import asdict
        out.emit({"command": "bench", "rows": [asdict(r) for r in rows], "slopes": slopes}, [])
    else:
        out.stream.write(format_rows(rows, args.delimiter))
        for rule, s in slopes.items():
            out.stream.write(f"# rule {rule}: log-quorum slope {s['log_quorums_per_org']:.4g}, "
                             f"log-time slope {s['log_seconds_per_org']:.4g}\n")
    return OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--quorum-cap", type=int, default=config.QUORUM_CAP,
                        help="most quorums enumerated or stored (default %(default)s)")
    common.add_argument("--subset-cap", type=int, default=config.EXACT_PROBABILITY_LIMIT,
                        help="largest n for 2^n subset enumeration (default %(default)s)")
    common.add_argument("--expansion-cap", type=int, default=config.EXPANSION_CAP,
                        help="most slices produced by slice generation (default %(default)s)")

    # shared flags live on the subcommands only: subparser defaults would
    # overwrite values given before the command name
    p = argparse.ArgumentParser(prog="fbas", description="Analyze federated Byzantine agreement systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, shared=True):
        return sub.add_parser(name, help=help_text, parents=[common] if shared else [])

    for name in ("quorums", "min-quorums"):
        s = add(name, "list quorums" if name == "quorums" else "list minimal quorums")
        s.add_argument("file")
        if name == "quorums":
            s.add_argument("--minimal", action="store_true", help="minimal quorums only")
        else:
            s.set_defaults(minimal=True)
            s.add_argument("--half", action="store_true", help="only those with at most half of the nodes")
        s.add_argument("--limit", type=int, help="stop after N results")
        s.add_argument("--count-only", action="store_true")
        s.add_argument("--oracle", action="store_true", help="cross-check with brute force")
        s.set_defaults(run=cmd_quorums)

    s = add("check-intersection", "decide quorum intersection")
    s.add_argument("file")
    s.add_argument("--no-scc-preprocessing", action="store_true")
    s.add_argument("--witness", action="store_true", help="print two disjoint quorums if any")
    s.add_argument("--min-intersection", action="store_true", help="also report the smallest intersection")
    s.add_argument("--expect-intersection", action="store_true", help="exit 1 if intersection fails")
    s.add_argument("--oracle", action="store_true")
    s.set_defaults(run=cmd_check_intersection)

    s = add("sccs", "strongly connected components of the trust graph")
    s.add_argument("file")
    s.set_defaults(run=cmd_sccs)

    s = add("intact", "intact nodes for a given ill-behaved set")
    s.add_argument("file")
    s.add_argument("--ill-behaved", required=True, metavar="NAMES", help="comma separated node names")
    s.add_argument("--oracle", action="store_true")
    s.set_defaults(run=cmd_intact)

    s = add("dsets", "all dispensable sets")
    s.add_argument("file")
    s.add_argument("--oracle", action="store_true")
    s.set_defaults(run=cmd_dsets)

    s = add("check-dset", "test one set for being dispensable")
    s.add_argument("file")
    s.add_argument("--set", required=True, metavar="NAMES")
    s.add_argument("--expect-dset", action="store_true", help="exit 1 if it is not a DSet")
    s.add_argument("--oracle", action="store_true")
    s.set_defaults(run=cmd_check_dset)

    s = add("intact-probability", "probability of being intact under a failure model")
    s.add_argument("file")
    s.add_argument("--model", required=True,
                   choices=["at-most-one", "independent", "grouped", "grouped-byzantine", "explicit"])
    s.add_argument("--params", metavar="JSON", help="model parameters file")
    s.add_argument("--p", action="append", default=[], metavar="NAME=X",
                   help="failure probability per node (independent, at-most-one)")
    s.add_argument("--p-default", type=float, default=0.0, help="independent: probability for unlisted nodes")
    s.add_argument("--p-empty", type=float, help="at-most-one: probability that nobody fails")
    s.add_argument("--q", type=float, help="grouped-byzantine: per-node failure probability")
    s.add_argument("--r", type=float, help="grouped-byzantine: whole-organization failure probability")
    who = s.add_mutually_exclusive_group(required=True)
    who.add_argument("--node", action="append", metavar="NAME")
    who.add_argument("--all", action="store_true")
    s.add_argument("--method", default="auto", choices=["auto", "exact", "grouped", "incl-excl", "mc"])
    s.add_argument("--mc-samples", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lanes", type=int, default=1, help="Monte Carlo worker threads")
    s.set_defaults(run=cmd_intact_probability)

    s = add("generate", "write a generated FBAS document", shared=False)
    fam = s.add_subparsers(dest="family", required=True)
    g = fam.add_parser("symmetric", parents=[common])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("-o", "--output")
    g = fam.add_parser("orgs", parents=[common])
    g.add_argument("--sizes", required=True, help="nodes per organization, e.g. 3,3,3,3")
    g.add_argument("--thresholds", required=True, help="threshold per organization, e.g. 2,2,2,2")
    g.add_argument("--root", type=int, required=True, help="organizations needed")
    g.add_argument("--org-names", help="comma separated organization names")
    g.add_argument("--pooled", action="store_true", help="pool the unpersonalized slices instead")
    g.add_argument("-o", "--output")
    s.set_defaults(run=cmd_generate)

    s = add("reduce-3sat", "FBAS with a quorum split iff the formula is satisfiable")
    s.add_argument("file", help="DIMACS CNF, three literals per clause ('-' for stdin)")
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_reduce_3sat)

    s = add("bench", "quorum counts and timings for the organization families")
    s.add_argument("--min-orgs", type=int, default=2)
    s.add_argument("--max-orgs", type=int, default=6)
    s.add_argument("--rule", dest="rules", action="append", choices=list(ROOT_RULES))
    s.add_argument("--repeats", type=int, default=1)
    s.add_argument("--delimiter", default="\t")
    s.set_defaults(run=cmd_bench)
    return p


def run_cli(argv: Sequence[str] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    old_err = sys.stderr
    sys.stderr = stderr
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return USAGE if exc.code else OK
        with _guards(args):
            return args.run(args, Output(stdout, args.json))
    except PropertyViolated as exc:
        print(f"error: {exc}", file=stderr)
        return VIOLATED
    except NoQuorumIntersection as exc:
        print(f"error: {exc}", file=stderr)
        return VIOLATED
    except ResourceLimitExceeded as exc:
        print(f"resource guard: {exc}", file=stderr)
        return GUARD
    except (ValidationError, FbasError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return USAGE
    finally:
        sys.stderr = old_err


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
