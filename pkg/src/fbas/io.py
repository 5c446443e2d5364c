"""Reading and writing FBAS documents and DIMACS formulas.

An FBAS document is UTF-8 JSON::

    {"format": "fbas", "version": 1,
     "nodes": [
       {"name": "1", "slices": [["1", "2", "3", "7"]]},
       {"name": "a", "quorum_set": ["a", "b", "c"], "threshold": 2},
       {"name": "x", "definition": {"threshold": 2, "validators": ["x", "y"], "inner": []}}
     ],
     "organizations": [{"name": "A", "members": ["a", "b", "c"]}]}

Each node uses exactly one of the three forms. A ``definition`` is the
shared, unpersonalized tree; the node runs ``(2, {node}, {tree without node})``.
"""
import json
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .definitions import QuorumSliceDefinition, generate_slices, personalize
from .errors import FbasError, MalformedFormula, MembershipViolation, ParseError, ThresholdOutOfRange
from .model import AnyFbas, general_from_masks, simple_from_masks
from .nodeset import NodeSet, members
from .oracles import CnfFormula

FORMAT = "fbas"
VERSION = 1

Orgs = List[Tuple[str, NodeSet]]


@dataclass(frozen=True)
class FbasDocument:
    fbas: AnyFbas
    organizations: Optional[Orgs] = None

    @property
    def names(self) -> Tuple[str, ...]:
        return self.fbas.names


def _fail(path: str, msg: str):
    raise ParseError(f"{path}: {msg}")


def _expect(value, kind, path: str):
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        _fail(path, f"expected {name}, got {type(value).__name__}")
    return value


def _names_mask(items, index: Dict[str, int], path: str) -> NodeSet:
    _expect(items, list, path)
    mask = 0
    for i, x in enumerate(items):
        _expect(x, str, f"{path}[{i}]")
        if x not in index:
            _fail(f"{path}[{i}]", f"unknown node {x!r}")
        bit = 1 << index[x]
        if mask & bit:
            _fail(f"{path}[{i}]", f"node {x!r} listed twice")
        mask |= bit
    return mask


def _definition(obj, index: Dict[str, int], path: str) -> QuorumSliceDefinition:
    _expect(obj, dict, path)
    extra = set(obj) - {"threshold", "validators", "inner"}
    if extra:
        _fail(path, f"unknown fields {sorted(extra)}")
    if "threshold" not in obj:
        _fail(path, "missing threshold")
    t = _expect(obj["threshold"], int, f"{path}.threshold")
    validators = _names_mask(obj.get("validators", []), index, f"{path}.validators")
    inner = [_definition(c, index, f"{path}.inner[{i}]")
             for i, c in enumerate(_expect(obj.get("inner", []), list, f"{path}.inner"))]
    try:
        return QuorumSliceDefinition(t, validators, tuple(inner))
    except FbasError as exc:
        _fail(path, str(exc))


def parse_fbas(data) -> FbasDocument:
    """Parse a document given as bytes, str or an already decoded dict."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _expect(data, dict, "document")
    if data.get("format") != FORMAT:
        _fail("format", f"expected {FORMAT!r}")
    if data.get("version") != VERSION:
        _fail("version", f"unsupported version {data.get('version')!r}")
    nodes = _expect(data.get("nodes"), list, "nodes")
    if not nodes:
        _fail("nodes", "an FBAS needs at least one node")
    names = []
    for i, rec in enumerate(nodes):
        _expect(rec, dict, f"nodes[{i}]")
        name = _expect(rec.get("name"), str, f"nodes[{i}].name")
        if name in names:
            _fail(f"nodes[{i}].name", f"duplicate node name {name!r}")
        names.append(name)
    index = {name: i for i, name in enumerate(names)}

    forms = []
    for i, rec in enumerate(nodes):
        path = f"nodes[{i}]"
        present = [k for k in ("slices", "quorum_set", "definition") if k in rec]
        if len(present) != 1:
            _fail(path, "needs exactly one of slices, quorum_set, definition")
        extra = set(rec) - {"name", "slices", "quorum_set", "threshold", "definition"}
        if extra or ("threshold" in rec and present[0] != "quorum_set"):
            _fail(path, f"unexpected fields {sorted(extra | ({'threshold'} if 'threshold' in rec else set()))}")
        kind = present[0]
        if kind == "slices":
            ss = _expect(rec["slices"], list, f"{path}.slices")
            forms.append(("slices", [_names_mask(s, index, f"{path}.slices[{j}]") for j, s in enumerate(ss)]))
        elif kind == "quorum_set":
            q = _names_mask(rec["quorum_set"], index, f"{path}.quorum_set")
            if "threshold" not in rec:
                _fail(path, "quorum_set needs a threshold")
            forms.append(("simple", (q, _expect(rec["threshold"], int, f"{path}.threshold"))))
        else:
            forms.append(("definition", _definition(rec["definition"], index, f"{path}.definition")))

    n = len(names)
    try:
        if all(kind == "simple" for kind, _ in forms):
            fbas = simple_from_masks(n, [x[0] for _, x in forms], [x[1] for _, x in forms], names)
        else:
            slices, defs = [], []
            for v, (kind, x) in enumerate(forms):
                if kind == "slices":
                    slices.append(x)
                    defs.append(None)
                elif kind == "simple":
                    q, k = x
                    slices.append(_simple_slices(v, q, k))
                    defs.append(None)
                else:
                    slices.append(sorted(generate_slices(personalize(x, v))))
                    defs.append(x)
            fbas = general_from_masks(n, slices, names, defs if any(d is not None for d in defs) else None)
    except FbasError as exc:
        raise type(exc)(f"nodes: {exc}") from None

    orgs = None
    if "organizations" in data:
        orgs = []
        seen = 0
        for i, o in enumerate(_expect(data["organizations"], list, "organizations")):
            path = f"organizations[{i}]"
            _expect(o, dict, path)
            oname = _expect(o.get("name"), str, f"{path}.name")
            mask = _names_mask(o.get("members"), index, f"{path}.members")
            if not mask:
                _fail(path, "empty organization")
            if mask & seen:
                _fail(path, "organizations overlap")
            seen |= mask
            orgs.append((oname, mask))
    return FbasDocument(fbas, orgs)


def _simple_slices(v: int, q: NodeSet, k: int) -> List[NodeSet]:
    if not (q >> v) & 1:
        raise MembershipViolation(f"node {v} is not in its own quorum set")
    if not 1 <= k <= q.bit_count():
        raise ThresholdOutOfRange(f"threshold {k} outside [1, {q.bit_count()}]")
    others = [u for u in members(q) if u != v]
    return [(1 << v) | sum(1 << u for u in c) for c in combinations(others, k - 1)]


def _sorted_names(f: AnyFbas, mask: NodeSet) -> List[str]:
    return sorted(f.names[v] for v in members(mask))


def _definition_json(f: AnyFbas, d: QuorumSliceDefinition) -> Dict[str, Any]:
    inner = [_definition_json(f, c) for c in d.inner]
    inner.sort(key=lambda c: json.dumps(c, sort_keys=True))
    return {"threshold": d.threshold, "validators": _sorted_names(f, d.validators), "inner": inner}


def fbas_to_json(f: AnyFbas, orgs: Optional[Orgs] = None) -> Dict[str, Any]:
    records = []
    for v in range(f.n):
        rec: Dict[str, Any] = {"name": f.names[v]}
        if f.is_simple:
            rec["quorum_set"] = _sorted_names(f, f.q[v])
            rec["threshold"] = f.thresholds[v]
        elif f.definitions is not None and f.definitions[v] is not None:
            rec["definition"] = _definition_json(f, f.definitions[v])
        else:
            rec["slices"] = sorted(_sorted_names(f, s) for s in f.slices[v])
        records.append(rec)
    records.sort(key=lambda r: r["name"])
    doc: Dict[str, Any] = {"format": FORMAT, "version": VERSION, "nodes": records}
    if orgs:
        doc["organizations"] = sorted(({"name": name, "members": _sorted_names(f, m)} for name, m in orgs),
                                      key=lambda o: o["name"])
    return doc


def emit_fbas(f: AnyFbas, orgs: Optional[Orgs] = None) -> bytes:
    """Canonical document: nodes sorted by name, every name list sorted."""
    return (json.dumps(fbas_to_json(f, orgs), indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def canonicalize(data) -> bytes:
    doc = parse_fbas(data)
    return emit_fbas(doc.fbas, doc.organizations)


def same_fbas(f: AnyFbas, g: AnyFbas) -> bool:
    """Whether two FBAS are equal up to the numbering of their nodes."""
    return fbas_to_json(f) == fbas_to_json(g)


def from_stellarbeat(nodes: Sequence[Dict[str, Any]]) -> FbasDocument:
    """Convert a list of ``{"publicKey", "quorumSet": {"threshold",
    "validators", "innerQuorumSets"}}`` records (optional ``"name"``).

    Public keys become node names; each quorum set becomes the node's
    definition tree. Validators that are not listed as nodes are an error.
    """
    _expect(nodes, list, "nodes")
    keys = []
    for i, rec in enumerate(nodes):
        _expect(rec, dict, f"nodes[{i}]")
        keys.append(_expect(rec.get("publicKey"), str, f"nodes[{i}].publicKey"))

    def tree(obj, path):
        _expect(obj, dict, path)
        return {
            "threshold": _expect(obj.get("threshold", 0), int, f"{path}.threshold"),
            "validators": list(_expect(obj.get("validators", []), list, f"{path}.validators")),
            "inner": [tree(c, f"{path}.innerQuorumSets[{j}]")
                      for j, c in enumerate(_expect(obj.get("innerQuorumSets", []), list,
                                                    f"{path}.innerQuorumSets"))],
        }

    doc = {"format": FORMAT, "version": VERSION,
           "nodes": [{"name": k, "definition": tree(rec.get("quorumSet", {}), f"nodes[{i}].quorumSet")}
                     for i, (k, rec) in enumerate(zip(keys, nodes))]}
    return parse_fbas(doc)


def read_fbas(path: str) -> FbasDocument:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        probe = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return parse_fbas(raw)
    if isinstance(probe, list):
        return from_stellarbeat(probe)
    if isinstance(probe, dict) and "format" not in probe and isinstance(probe.get("nodes"), list) \
            and probe["nodes"] and isinstance(probe["nodes"][0], dict) and "publicKey" in probe["nodes"][0]:
        return from_stellarbeat(probe["nodes"])
    return parse_fbas(probe)


def parse_dimacs(text: str) -> CnfFormula:
    """DIMACS CNF with exactly three literals per clause."""
    header = None
    clauses = []
    current: List[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed problem line")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: malformed problem line") from None
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before the problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if len(current) != 3:
                    raise MalformedFormula(f"line {lineno}: clause has {len(current)} literals, need 3")
                clauses.append(tuple((abs(x) - 1, x < 0) for x in current))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise MalformedFormula(f"line {lineno}: variable {abs(lit)} exceeds {header[0]}")
                current.append(lit)
    if header is None:
        raise ParseError("missing problem line")
    if current:
        raise MalformedFormula("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise MalformedFormula(f"problem line announces {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


def emit_dimacs(phi: CnfFormula) -> str:
    lines = [f"p cnf {phi.r} {phi.m}"]
    for c in phi.clauses:
        lines.append(" ".join(str(-(x + 1) if neg else x + 1) for x, neg in c) + " 0")
    return "\n".join(lines) + "\n"
