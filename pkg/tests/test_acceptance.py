"""Acceptance checks: one timed test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import tempfile
import time
from pathlib import Path

import pytest

from eqtel.chaincx import betti_numbers
from eqtel.cli import main
from eqtel.equivariant import EquivariantModel, KirwanComparison, ModuleAction, StagePolicy
from eqtel.io import load_input
from eqtel.verify import random_sequence, retraction_identity, suite_telescope

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402


def model(source, group, k, reduce=False):
    doc = load_input(source, group)
    return EquivariantModel(doc.complex, doc.action, k, StagePolicy(morse_reduce=reduce), space_name=doc.name)


def ranks_with_certificates(source, group, k, reduce=False):
    m = model(source, group, k, reduce)
    report = m.report()
    return m, report.ranks if report.stable else None


def c1_identity_suite():
    res = suite_telescope(seed=2024, count=200)
    return res.ok and res.total == 200, f"{res.passed}/{res.total} sequences"


def c2_retraction():
    rng = random.Random(99)
    bad = [n for n in range(100) if retraction_identity(random_sequence(rng)) is not None]
    return not bad, f"{100 - len(bad)}/100 sequences"


def c3_z2_point(reduce=False):
    m, ranks = ranks_with_certificates("fixture:point", "z2", 4, reduce)
    ok = ranks == [1] * 5 and m.K <= 6
    if not reduce:
        # dense elimination on the packaged top stage and on an independent construction
        ok = ok and oracles.complex_betti(m.sequence.stages[-1])[:5] == [1] * 5
        ok = ok and oracles.borel_betti([[0]], [[0], [0]], oracles.cyclic_table(2), m.K + 1, 6)[:5] == [1] * 5
    return ok, f"ranks {ranks} at K={m.K}"


def c4_z3_point(reduce=False):
    m, ranks = ranks_with_certificates("fixture:point", "z3", 3, reduce)
    return ranks == [1, 0, 0, 0], f"ranks {ranks} at K={m.K}"


def c5_klein_point(reduce=False):
    m, ranks = ranks_with_certificates("fixture:point", "z2xz2", 2, reduce)
    return ranks == [1, 2, 3], f"ranks {ranks} at K={m.K}"


def c6_circle(reduce=False):
    m, ranks = ranks_with_certificates("fixture:circle", "z2", 2, reduce)
    return ranks == [1, 2, 2], f"ranks {ranks} at K={m.K}"


def kirwan_data(reduce=False):
    m, ranks = ranks_with_certificates("fixture:octahedron", None, 2, reduce)
    comp = KirwanComparison(m)
    results = [comp.at(k) for k in range(3)]
    return ranks, [r.matrix for r in results], [r.inverse for r in results], all(r.is_iso and r.two_sided() for r in results)


def c7_octahedron(reduce=False):
    ranks, mats, _, iso = kirwan_data(reduce)
    return ranks == [1, 1, 1] and iso, f"ranks {ranks}, Kirwan iso and two-sided: {iso}"


def module_data(reduce=False):
    table = ModuleAction(model("fixture:point", "z2", 4, reduce)).table(2)
    return table


def c8_module():
    table = module_data()
    t = table.generators[1]
    ranks = [table.matrix(t, k).rank() for k in (1, 2, 3)]
    square = all(table.matrix("h2_0", k) == table.matrix(t, k - 1) @ table.matrix(t, k) for k in range(2, 5))
    ok = ranks == [1, 1, 1] and square and table.products_compatible
    return ok, f"ranks of t: {ranks}, action(t cup t) = action(t)^2: {square}"


def c9_morse_neutrality():
    notes = []
    for check in (c3_z2_point, c4_z3_point, c5_klein_point, c6_circle):
        a = check(False)[1]
        b = check(True)[1]
        if a != b:
            notes.append(f"{check.__name__}: {a} vs {b}")
    plain, red = kirwan_data(False), kirwan_data(True)
    if plain != red:
        notes.append("kirwan data differ")
    ta, tb = module_data(False), module_data(True)
    if ta.matrices != tb.matrices or not tb.products_compatible:
        notes.append("module matrices differ")
    fixtures = [
        ("fixture:point", "z2", 4),
        ("fixture:point", "z3", 3),
        ("fixture:point", "z2xz2", 2),
        ("fixture:circle", "z2", 2),
        ("fixture:octahedron", None, 2),
        ("fixture:square_circle", None, 1),
    ]
    for source, group, k in fixtures:
        big = model(source, group, k)
        small = model(source, group, k, reduce=True)
        for n, (c, r) in enumerate(zip(big.sequence.stages, small.sequence.stages)):
            nonzero = any(not c.d(j).is_zero() for j in range(1, c.top_degree + 1))
            if nonzero and not r.size() < c.size():
                notes.append(f"{source} {group} stage {n} not smaller")
            if betti_numbers(r) != betti_numbers(c):
                notes.append(f"{source} {group} stage {n} betti differ")
    return not notes, "; ".join(notes) or "ranks and matrices identical, stages strictly smaller"


def c10_determinism():
    runs = [
        ["equivariant", "fixture:point", "--group", "z2", "--max-degree", "4"],
        ["equivariant", "fixture:point", "--group", "z3", "--max-degree", "3"],
        ["equivariant", "fixture:point", "--group", "z2xz2", "--max-degree", "2"],
        ["equivariant", "fixture:circle", "--group", "z2", "--max-degree", "2"],
        ["equivariant", "fixture:octahedron", "--max-degree", "2", "--kirwan"],
        ["equivariant", "fixture:square_circle", "--max-degree", "1", "--kirwan"],
        ["module", "fixture:point", "--group", "z2", "--max-degree", "3", "--action-degree", "2"],
    ]
    differ = []
    with tempfile.TemporaryDirectory() as tmp:
        for i, argv in enumerate(runs):
            blobs = []
            for rep in range(2):
                prefix = Path(tmp) / f"run{i}_{rep}"
                if main(argv + ["--out", str(prefix)]) != 0:
                    return False, f"{' '.join(argv)} failed"
                blobs.append(b"".join(p.read_bytes() for p in sorted(Path(tmp).glob(f"run{i}_{rep}.*"))))
            if blobs[0] != blobs[1]:
                differ.append(" ".join(argv))
    return not differ, f"{len(runs) - len(differ)}/{len(runs)} reports byte-identical"


CRITERIA = [
    ("1 telescope identity suite", c1_identity_suite, 60),
    ("2 finite telescope retraction", c2_retraction, 30),
    ("3 Z/2 on a point", c3_z2_point, 120),
    ("4 Z/3 on a point", c4_z3_point, 120),
    ("5 Z/2xZ/2 on a point", c5_klein_point, 300),
    ("6 trivial Z/2 on the circle", c6_circle, 120),
    ("7 antipodal octahedron and comparison map", c7_octahedron, 300),
    ("8 module action of Z/2 on a point", c8_module, 300),
    ("9 Morse reduction neutrality", c9_morse_neutrality, 600),
    ("10 byte determinism", c10_determinism, 600),
]


def evaluate(name, check, limit):
    t0 = time.perf_counter()
    ok, detail = check()
    dt = time.perf_counter() - t0
    passed = ok and dt < limit
    line = f"{'PASS' if passed else 'FAIL'}  criterion {name}: {detail} ({dt:.1f}s, limit {limit}s)"
    return passed, line


@pytest.mark.parametrize("name,check,limit", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, check, limit, capsys):
    passed, line = evaluate(name, check, limit)
    with capsys.disabled():
        print("\n" + line)
    assert passed, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(p for p, _ in results) else 1)
