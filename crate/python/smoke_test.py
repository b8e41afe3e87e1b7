"""Smoke test for the Python bindings.

Build and install the extension first:

    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/stabrel-*.whl

then run `python python/smoke_test.py`.
"""

from pathlib import Path

import stabrel

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def read(name):
    return (FIXTURES / name).read_text()


def check_worked_example():
    for p in (2, 3, 5):
        r = stabrel.evaluate_file(str(FIXTURES / "worked_example.diag"), p=p)
        assert isinstance(r, stabrel.Relation)
        assert r.equations() == ["a1 = a2 = b1", "a1 + a3 = b2 + b3"], r.equations()
        assert len(r.points()) == p**3
        dual = stabrel.evaluate_file(str(FIXTURES / "worked_example_complement.diag"), p=p)
        assert dual == r.complement()


def check_relations():
    ident = stabrel.Relation.identity(3, 1)
    shift = stabrel.Relation.from_equations(3, 1, 1, [[1, -1, 2]])
    assert shift.equations() == ["a1 - 1 = b1"]
    assert shift.compose(shift.converse()) == ident
    assert stabrel.Relation.empty(3, 1, 1).equations() == ["EMPTY"]
    assert ident.subset(stabrel.Relation.total(3, 1, 1))
    assert shift.contains([1, 0]) and not shift.contains([1, 1])


def check_processes():
    for p in (2, 3, 5, 7):
        f = stabrel.fourier(p)
        ident = stabrel.identity(p, 1)
        assert f.compose(f).compose(f).compose(f) == ident
        assert f.compose(f.dagger()) == ident
        euler = stabrel.z_spider(p, 1, 1, 0, 1).compose(stabrel.x_spider(p, 1, 1, 0, -1)).compose(
            stabrel.z_spider(p, 1, 1, 0, 1)
        )
        assert euler == f
    p = 3
    assert (stabrel.measure_z(p).dom, stabrel.measure_z(p).cod) == ("quantum", "classical")
    assert stabrel.weyl(p, [1], [2]).dagger() == stabrel.weyl(p, [-1], [-2])
    assert stabrel.discard(p).classify() == "coisotropic"
    assert stabrel.fourier(p).classify() == "lagrangian"
    pure, k = stabrel.purify(stabrel.discard(p))
    assert k == 1 and pure.classify() == "lagrangian"


def check_teleportation():
    for p in (2, 3, 5):
        r = stabrel.evaluate_file(str(FIXTURES / "teleportation_boxed.diag"), p=p)
        assert isinstance(r, stabrel.Process)
        assert r == stabrel.identity(p, 1)


def check_repetition_code():
    code = stabrel.Code.parse(read("repetition3.code"))
    assert (code.p, code.n, code.k) == (2, 3, 1)
    rows = {
        (1, 0, 0): (1, 1),
        (0, 1, 0): (1, 0),
        (0, 0, 1): (0, 1),
    }
    for bits, d in rows.items():
        assert tuple(code.syndrome([0, 0, 0, *bits])) == d
        assert not code.undetectable([0, 0, 0, *bits])
    assert stabrel.format_tuple(code.syndrome([0, 0, 0, 1, 0, 0])) == "(1,1)"
    ok, report = code.verify(read("repetition3.table"), read("repetition3_weight1.errors"))
    assert ok, report
    ok, _ = code.verify(read("repetition3.table"), read("repetition3_weight2.errors"))
    assert not ok
    enc = code.encoder()
    assert enc.dagger().classify() == "lagrangian"
    assert stabrel.classify_subspace(read("zero.subspace")) == "isotropic"
    encoder_text = stabrel.dilate(read("repetition3.subspace"))
    assert stabrel.evaluate(encoder_text) == enc


def check_errors():
    for bad in (lambda: stabrel.fourier(4), lambda: stabrel.evaluate("p=3; layer=affine\nnode 0 bogus\n")):
        try:
            bad()
        except stabrel.StabrelError:
            pass
        else:
            raise AssertionError("expected StabrelError")


def main():
    checks = [
        check_worked_example,
        check_relations,
        check_processes,
        check_teleportation,
        check_repetition_code,
        check_errors,
    ]
    for check in checks:
        check()
        print(f"ok {check.__name__}")


if __name__ == "__main__":
    main()
