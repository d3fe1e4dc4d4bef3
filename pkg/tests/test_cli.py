import json
from fractions import Fraction

import pytest

from momentforge.cli import main
from momentforge.finab import FinAbGroup, Measure, enumerate_groups
from momentforge.inversion import Bracket, MomentTable
from momentforge.localize import ModuleMomentTable
from momentforge.qseries import SimpleType


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sur_example(capsys):
    code, out, _ = run(capsys, "sur", "--abelian", "2", "--e", "2", "--k", "1")
    assert code == 0 and out.strip() == "3"


def test_sur_product(capsys):
    basis = json.dumps([{"kind": "abelian", "h": 2}, {"kind": "abelian", "h": 3}])
    code, out, _ = run(capsys, "sur", "--basis", basis, "--e", "2,1", "--k", "1,1")
    assert code == 0 and out.strip() == "6"


def test_coeffs_example(capsys):
    code, out, _ = run(capsys, "coeffs", "--abelian", "2", "--k", "2")
    assert code == 0 and out.strip() == "1/3"
    code, out, _ = run(capsys, "coeffs", "--nonabelian-aut", "120", "--k", "2")
    assert code == 0 and out.strip() == "1/28800"


def test_invert_example(tmp_path, capsys):
    table = MomentTable.one_type(SimpleType.abelian(2), [1] * 5)
    path = tmp_path / "moments.json"
    path.write_text(table.dumps())
    code, out, _ = run(capsys, "invert", "--file", str(path), "--rmax", "4")
    assert code == 0
    assert json.loads(out) == {"lower": "2/7", "upper": "13/45"}


def test_invert_reorder_multi(tmp_path, capsys):
    basis = [{"kind": "abelian", "h": 2}, {"kind": "abelian", "h": 3}]
    moments = [
        {"k": [i, j], "value": "1"} for i in range(5) for j in range(5)
    ]
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"basis": basis, "bound": [4, 4], "moments": moments}))
    code, out, _ = run(capsys, "invert", "--file", str(path), "--rmax", "4,4")
    assert code == 0
    br = Bracket.from_json_obj(json.loads(out))
    code, out2, _ = run(capsys, "invert", "--file", str(path), "--rmax", "4,4", "--order", "1,0")
    assert code == 0
    br2 = Bracket.from_json_obj(json.loads(out2))
    # both orders are sound; they bracket the same mass
    assert br.lower <= br2.upper and br2.lower <= br.upper


@pytest.fixture()
def half_table_path(tmp_path):
    mu = Measure({FinAbGroup.trivial(): Fraction(1, 2), FinAbGroup.from_orders(2): Fraction(1, 2)})
    from momentforge.sampler import empirical_moments

    table = empirical_moments(mu, enumerate_groups([2], 16))
    path = tmp_path / "table.json"
    path.write_text(table.dumps())
    return path


def test_localize_roundtrip(half_table_path, capsys):
    code, out, _ = run(
        capsys, "localize", "--file", str(half_table_path), "--group", '{"2":[1]}',
        "--kbound", "1",
    )
    assert code == 0
    table = MomentTable.from_json_obj(json.loads(out))
    assert table.values[(0,)] == Fraction(1, 2)
    assert table.values[(1,)] == 0


def test_reconstruct(half_table_path, capsys):
    code, out, _ = run(
        capsys, "reconstruct", "--file", str(half_table_path), "--group", '{"2":[1]}',
        "--rmax", "3",
    )
    assert code == 0
    assert json.loads(out) == {"lower": "1/2", "upper": "1/2"}


def test_sample_roundtrip_and_determinism(capsys):
    args = ("sample", "--p", "2", "--cap", "3", "--n", "3", "--seed", "42", "--count", "200")
    code, out1, _ = run(capsys, *args)
    assert code == 0
    code, out2, _ = run(capsys, *args)
    assert out1 == out2
    mu = Measure.from_json_obj(json.loads(out1))
    assert mu.total_mass == 1


def test_sample_report_lines(capsys):
    code, out, _ = run(
        capsys, "sample", "--p", "2", "--cap", "3", "--n", "3", "--seed", "42",
        "--count", "200", "--report", "--ts", "100,200", "--target", '{"2":[1]}',
        "--rmax", "4",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    for line in lines:
        rec = json.loads(line)
        br = Bracket.from_json_obj(rec["bracket"])
        assert br.contains(Fraction(rec["frequency"]))


def test_exit_codes(tmp_path, capsys):
    # input error: unknown flag
    code, _, err = run(capsys, "sur", "--abelian", "2", "--e", "2", "--k", "1", "--frob")
    assert code == 1
    # input error: both type flags
    code, _, err = run(capsys, "coeffs", "--abelian", "2", "--nonabelian-aut", "6", "--k", "1")
    assert code == 1 and "exactly one" in err
    # input error: bad file
    code, _, err = run(capsys, "invert", "--file", str(tmp_path / "nope.json"), "--rmax", "2")
    assert code == 1
    # input error: non-prime-power h
    code, _, err = run(capsys, "coeffs", "--abelian", "6", "--k", "1")
    assert code == 1
    # budget error
    code, _, err = run(
        capsys, "sur", "--basis", "[]", "--e", "", "--k", "",
    )
    assert code == 1  # malformed lists are input errors


def test_budget_env_override(monkeypatch):
    # a tiny budget turns a legitimate brute-force count into a refusal
    monkeypatch.setenv("MOMENTFORGE_BUDGET", '{"max_candidates": 1, "max_order": 1}')
    mu = Measure({FinAbGroup.from_orders(8): Fraction(1)})
    from momentforge.sampler import empirical_moments as em
    from momentforge.errors import BudgetExceededError

    with pytest.raises(BudgetExceededError):
        em(mu, enumerate_groups([2], 8))


def test_budget_exit_code(monkeypatch, tmp_path, capsys):
    # nonzero-moment middles force a class-count search whose candidate
    # space exceeds a unit budget, so the CLI reports exit code 3
    table = ModuleMomentTable([2], 4, {g: 1 for g in enumerate_groups([2], 4)})
    path = tmp_path / "ones.json"
    path.write_text(table.dumps())
    monkeypatch.setenv("MOMENTFORGE_BUDGET", '{"max_candidates": 1}')
    code, _, err = run(
        capsys, "localize", "--file", str(path), "--group", '{"2":[1]}',
        "--kbound", "1",
    )
    assert code == 3 and "budget" in err


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--seed", "3", "--quick")
    assert code == 0
    lines = [l for l in out.strip().splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) >= 8
    assert all(l.startswith("PASS") for l in lines)


def test_verify_failure_exits_2(monkeypatch, capsys):
    # starving the budget makes oracle checks fail, which is a consistency
    # failure of the suite as a whole
    monkeypatch.setenv("MOMENTFORGE_BUDGET", "1000")
    code, out, err = run(capsys, "verify", "--seed", "3", "--quick")
    assert code == 2
    assert any(l.startswith("FAIL") for l in out.splitlines())


def test_threads_flag_validated(capsys):
    code, _, err = run(capsys, "--threads", "0", "coeffs", "--abelian", "2", "--k", "0")
    assert code == 1
    code, out, _ = run(capsys, "--threads", "4", "coeffs", "--abelian", "2", "--k", "0")
    assert code == 0 and out.strip() == "1"
