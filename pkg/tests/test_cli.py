import io
import json

import pytest

from fbas.catalog import befouled_quorum_fbas, four_org_hierarchy_fbas, four_org_partition, seven_node_fbas
from fbas.cli import run_cli
from fbas.generators import generate_symmetric, stellar_fbas
from fbas.io import emit_fbas, parse_fbas, same_fbas


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, f, orgs in (("ex4", seven_node_fbas(), None), ("ex42", befouled_quorum_fbas(), None),
                          ("sym43", generate_symmetric(4, 3, names="abcd"), None),
                          ("sym42", generate_symmetric(4, 2, names="abcd"), None),
                          ("hier", four_org_hierarchy_fbas(), four_org_partition())):
        p = tmp_path / f"{name}.json"
        p.write_bytes(emit_fbas(f, orgs))
        paths[name] = p
    return paths


def test_check_intersection(files):
    code, out, err = run("check-intersection", files["ex4"])
    assert code == 0 and out.strip() == "intersects: true" and err == ""


def test_check_intersection_expectations(files):
    code, out, err = run("check-intersection", files["sym42"], "--witness")
    assert code == 0 and "intersects: false" in out and "disjoint quorums" in out
    code, out, err = run("check-intersection", files["sym42"], "--expect-intersection", "--no-scc-preprocessing")
    assert code == 1 and "disjoint" in err


def test_stellar_count(tmp_path):
    p = tmp_path / "stellar.json"
    p.write_bytes(emit_fbas(stellar_fbas()))
    code, out, _ = run("quorums", "--count-only", p)
    assert code == 0 and out.strip() == "114688"


def test_intact_empty(files):
    code, out, _ = run("intact", "--ill-behaved", "a", files["ex42"], "--json")
    assert code == 0
    rec = json.loads(out)
    assert rec["intact"] == [] and rec["smallest_dset"] == ["a", "b", "c", "d"]


def test_intact_without_intersection(files):
    code, _, err = run("intact", "--ill-behaved", "a", files["sym42"])
    assert code == 1 and "quorum intersection" in err


def test_quorums_listing_and_oracle(files):
    code, out, _ = run("quorums", files["ex4"], "--oracle", "--json")
    rec = json.loads(out)
    assert code == 0 and rec["count"] == 4 and rec["oracle"] == "agrees"
    assert sorted(map(tuple, rec["quorums"])) == sorted([("1", "2", "3", "7"), ("4", "5", "6", "7"), ("7",),
                                                         tuple("1234567")])
    code, out, _ = run("min-quorums", files["ex4"], "--oracle")
    assert code == 0 and out.splitlines()[0] == "{7}"
    code, out, _ = run("quorums", "--minimal", files["sym43"], "--json")
    assert json.loads(out)["count"] == 4


def test_limit_is_reported(files):
    code, out, _ = run("quorums", files["sym43"], "--limit", "2", "--json")
    rec = json.loads(out)
    assert code == 0 and rec["count"] == 2 and rec["truncated"]


def test_quorum_cap_is_exit_3(files):
    code, _, err = run("quorums", files["sym43"], "--quorum-cap", "2")
    assert code == 3 and "guard" in err


def test_sccs(files):
    code, out, _ = run("sccs", files["ex4"], "--json")
    comps = json.loads(out)["components"]
    assert [c["members"] for c in comps] == [["1", "2", "3"], ["4", "5", "6"], ["7"]]
    assert [c["greatest"] for c in comps] == [False, False, True]


def test_dsets_and_check_dset(files):
    code, out, _ = run("dsets", files["ex4"], "--oracle", "--json")
    rec = json.loads(out)
    assert code == 0 and rec["count"] == 5
    code, out, _ = run("check-dset", files["ex4"], "--set", "1,2,3")
    assert code == 0 and out.strip() == "dset: true"
    code, out, err = run("check-dset", files["ex42"], "--set", "a,b", "--expect-dset")
    assert code == 1 and out.strip() == "dset: false"


def test_dsets_guard(files):
    code, _, err = run("dsets", files["hier"], "--subset-cap", "10")
    assert code == 3


def test_probability_models(files, tmp_path):
    code, out, _ = run("intact-probability", files["sym43"], "--model", "at-most-one", "--p", "a=0.2,b=0.1",
                       "--p", "c=0.1", "--p-empty", "0.6", "--all", "--json")
    res = json.loads(out)["results"]
    assert code == 0 and [r["p_intact"] for r in res] == pytest.approx([0.8, 0.9, 0.9, 1.0], abs=1e-12)
    code, out, _ = run("intact-probability", files["sym43"], "--model", "independent", "--p", "a=0.2,b=0.1,c=0.1",
                       "--node", "a", "--node", "d", "--json")
    res = json.loads(out)["results"]
    assert [r["p_intact"] for r in res] == pytest.approx([0.792, 0.954], abs=1e-9)
    code, out, _ = run("intact-probability", files["hier"], "--model", "grouped-byzantine", "--q", "0.1",
                       "--r", "0.01", "--node", "a1", "--json")
    assert round(json.loads(out)["results"][0]["p_intact"], 2) == 0.65
    params = tmp_path / "explicit.json"
    params.write_text(json.dumps({"table": [{"set": [], "p": 0.5}, {"set": ["a"], "p": 0.5}]}))
    code, out, _ = run("intact-probability", files["sym43"], "--model", "explicit", "--params", params,
                       "--node", "a", "--json")
    r = json.loads(out)["results"][0]
    assert r["p_intact"] == pytest.approx(0.5) and r["p_intact_given_well_behaved"] == pytest.approx(1.0)
    grouped = tmp_path / "grouped.json"
    grouped.write_text(json.dumps({"organizations": [
        {"members": ["a", "b"], "table": [{"set": [], "p": 0.9}, {"set": ["a", "b"], "p": 0.1}]},
        {"members": ["c", "d"], "table": [{"set": [], "p": 1.0}]}]}))
    code, out, _ = run("intact-probability", files["sym43"], "--model", "grouped", "--params", grouped,
                       "--node", "c", "--json")
    # losing a and b together leaves c befouled
    assert code == 0 and json.loads(out)["results"][0]["p_intact"] == pytest.approx(0.9)


def test_probability_sentinel_and_errors(files):
    code, out, _ = run("intact-probability", files["sym43"], "--model", "independent", "--p", "a=1",
                       "--node", "a")
    assert code == 0 and "undefined" in out
    code, _, err = run("intact-probability", files["sym43"], "--model", "independent", "--p", "a=2", "--all")
    assert code == 2
    code, _, err = run("intact-probability", files["sym43"], "--model", "grouped-byzantine", "--q", "0.1",
                       "--r", "0.1", "--all")
    assert code == 2 and "organizations" in err


def test_mc_determinism(files):
    argv = ("intact-probability", files["sym43"], "--model", "independent", "--p", "a=0.2,b=0.1,c=0.1",
            "--all", "--mc-samples", "20000", "--seed", "9", "--json")
    a = run(*argv)
    b = run(*argv, "--lanes", "3")
    assert a[0] == 0 and a[1] == b[1]
    res = json.loads(a[1])["results"]
    assert abs(res[0]["p_intact"] - 0.792) <= 3 * res[0]["std_error"]


def test_generate_and_reduce(tmp_path):
    code, out, _ = run("generate", "symmetric", "--n", "4", "--k", "3")
    assert code == 0 and same_fbas(parse_fbas(out).fbas, generate_symmetric(4, 3))
    target = tmp_path / "h.json"
    code, _, _ = run("generate", "orgs", "--sizes", "3,3,3,3", "--thresholds", "2,2,2,2", "--root", "3",
                     "--pooled", "-o", target)
    d = parse_fbas(target.read_bytes())
    assert same_fbas(d.fbas, four_org_hierarchy_fbas()) and len(d.organizations) == 4
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 1\n1 1 1 0\n")
    code, out, _ = run("reduce-3sat", cnf)
    assert code == 0 and parse_fbas(out).fbas.n == 8
    cnf.write_text("p cnf 1 1\n1 1 0\n")
    code, _, err = run("reduce-3sat", cnf)
    assert code == 2 and "3" in err


def test_usage_errors(files, tmp_path):
    assert run()[0] == 2
    assert run("nope")[0] == 2
    assert run("quorums", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "fbas", "version": 1, "nodes": [{"name": "a"}]}')
    code, _, err = run("quorums", bad)
    assert code == 2 and "nodes[0]" in err
    assert run("intact", "--ill-behaved", "zz", files["ex4"])[0] == 2


def test_bench_output():
    code, out, _ = run("bench", "--max-orgs", "4", "--rule", "n-1")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("rule\torgs")
    assert [int(l.split("\t")[4]) for l in lines[1:4]] == [48, 256, 1280]
    code, out, _ = run("bench", "--max-orgs", "3", "--json")
    assert len(json.loads(out)["rows"]) == 4


def test_json_is_byte_identical(files):
    a = run("dsets", files["ex4"], "--json")
    b = run("dsets", files["ex4"], "--json")
    assert a == b
