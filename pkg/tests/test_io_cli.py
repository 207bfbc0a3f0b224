import math
import random
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from multipres import Grade, fio
from multipres.blocks import Block
from multipres.experiments import (
    incompleteness_pair,
    incompleteness_witness,
    random_module,
)
from multipres.fibered import Barcode
from multipres.functors import translate_joint
from multipres.presentation import Generator, Presentation, Relation, free, staircase_interval

INF = math.inf

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "multipres" / "fixtures"


def g(*coords):
    return Grade(coords)


class TestFpresFormat:
    def test_round_trip_simple(self):
        P = free([g(0, 0)])
        assert fio.parse_fpres(fio.serialize_fpres(P)) == P

    def test_round_trip_random(self):
        rng = random.Random(91)
        for _ in range(10):
            P = random_module(rng)
            assert fio.parse_fpres(fio.serialize_fpres(P)) == P

    def test_round_trip_zero_module(self):
        from multipres import zero_module

        Z = zero_module(2, 2)
        assert fio.parse_fpres(fio.serialize_fpres(Z)) == Z

    def test_zero_coefficient_entries_are_dropped(self):
        text = "\n".join([
            "fpres 1", "field 2", "params 1",
            "generators 1", "g a 0",
            "relations 1", "r 5 ; 0:0",
        ])
        P = fio.parse_fpres(text)
        assert P.rels[0].col == ()

    def test_fixture_module_n(self):
        N, _ = incompleteness_pair()
        parsed = fio.parse_fpres((FIXTURES / "example31_N.fpres").read_text())
        assert parsed == N
        assert len(parsed.gens) == 2 and len(parsed.rels) == 4

    def test_fixture_module_o(self):
        _, O = incompleteness_pair()
        assert fio.parse_fpres((FIXTURES / "example31_O.fpres").read_text()) == O

    def test_relation_below_generator_rejected_with_line(self):
        bad = "\n".join([
            "fpres 1", "field 2", "params 2",
            "generators 1", "g a 1 1",
            "relations 1", "r 0 0 ; 1:0",
        ])
        with pytest.raises(fio.FormatError) as err:
            fio.parse_fpres(bad)
        assert "line 7" in str(err.value)

    def test_malformed_header(self):
        with pytest.raises(fio.FormatError):
            fio.parse_fpres("fpres 2\n")

    def test_rational_grammar(self):
        assert fio.parse_rational("3/4") == F(3, 4)
        assert fio.parse_rational("-7") == -7
        assert fio.parse_rational("inf") == INF
        with pytest.raises(fio.FormatError):
            fio.parse_rational("1/0", 3)


class TestOtherFormats:
    def test_barcode_round_trip(self):
        B = Barcode({(0, 2): 2, (F(1, 2), INF): 1})
        assert fio.parse_barcode(fio.serialize_barcode(B)).bars == B.bars

    def test_blocks_round_trip(self):
        blocks = [Block("oo", 1, 3), Block("cc", 0, 0), Block("co", F(1, 2), 5)]
        assert fio.parse_blocks(fio.serialize_blocks(blocks)) == blocks

    def test_block_infinite_endpoint_rejected(self):
        with pytest.raises(fio.FormatError):
            fio.parse_blocks("blocks 1\nblk co 0 inf\n")

    def test_witness_round_trip(self):
        N, O = incompleteness_pair()
        w = incompleteness_witness()
        text = fio.serialize_witness(w, N, O)
        assert fio.parse_witness(text, N, O) == w
        fixture = (FIXTURES / "example31_witness.txt").read_text()
        assert fio.parse_witness(fixture, N, O) == w

    def test_joint_round_trip(self):
        rng = random.Random(92)
        J = translate_joint(random_module(rng), 1)
        text = fio.serialize_joint(J)
        back = fio.parse_joint(text)
        assert back == J


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "multipres.cli", *args],
        capture_output=True, text=True,
    )
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    N, O = incompleteness_pair()
    (root / "N.fpres").write_text(fio.serialize_fpres(N))
    (root / "O.fpres").write_text(fio.serialize_fpres(O))
    (root / "w.txt").write_text(fio.serialize_witness(incompleteness_witness(), N, O))
    bad = fio.serialize_witness(incompleteness_witness(F(1, 2)), N, O)
    (root / "w_bad.txt").write_text(bad)
    rect = staircase_interval([g(0, 0)], [g(2, 0), g(0, 3)])
    (root / "rect.fpres").write_text(fio.serialize_fpres(rect))
    (root / "rect_shift.fpres").write_text(
        fio.serialize_fpres(Presentation(
            2, 2,
            tuple(Generator(x.label, x.grade.translate(F(1, 2))) for x in rect.gens),
            tuple(Relation(r.grade.translate(F(1, 2)), r.col) for r in rect.rels),
        ))
    )
    (root / "J.joint").write_text(fio.serialize_joint(translate_joint(rect, 1)))
    (root / "A.blocks").write_text(fio.serialize_blocks([Block("oo", 0, 2), Block("cc", 1, 1)]))
    (root / "B.blocks").write_text(fio.serialize_blocks([Block("oo", F(1, 2), 2)]))
    (root / "B1.bars").write_text("bar 0 10 1\nbar 0 1 1\n")
    (root / "B2.bars").write_text("bar 1 9 1\n")
    (root / "broken.fpres").write_text("fpres 1\nfield 2\nparams 2\ngenerators 1\ng a 1 1\nrelations 1\nr 0 0 ; 1:0\n")
    return root


class TestCli:
    def test_minimize_round_trips(self, files):
        code, out, _ = run_cli("minimize", str(files / "O.fpres"))
        assert code == 0
        assert len(fio.parse_fpres(out).rels) == 5

    def test_betti(self, files):
        code, out, _ = run_cli("betti", str(files / "N.fpres"))
        assert code == 0
        assert "controlling-constant 1" in out
        assert "partial-complexity 6" in out

    def test_hilbert(self, files):
        code, out, _ = run_cli("hilbert", str(files / "N.fpres"), "--at", "1 1")
        assert code == 0 and out.strip() == "2"

    def test_merge_and_simplify(self, files):
        code, out, _ = run_cli("merge", str(files / "rect.fpres"),
                               "--grid", "0 2; 0 3", "--delta", "1/4")
        assert code == 0 and "fpres 1" in out
        code, out, _ = run_cli("simplify", str(files / "rect.fpres"), "--eps", "1/2")
        assert code == 0 and "fpres 1" in out

    def test_grid_align(self, files):
        code, out, err = run_cli("grid-align", str(files / "rect.fpres"),
                                 "--grid-of", str(files / "rect.fpres"),
                                 "--kap-eps", "1/128")
        assert code == 0
        assert "certified interleaving budget 17/64" in err

    def test_restrict_and_barcode(self, files):
        code, out, _ = run_cli("restrict", str(files / "rect.fpres"),
                               "--direction", "1 1", "--base", "0 0")
        assert code == 0 and "params 1" in out
        code, out, _ = run_cli("barcode", str(files / "rect.fpres"),
                               "--direction", "1 1", "--base", "0 0")
        assert code == 0 and out.strip() == "bar 0 2 1"
        code, out, _ = run_cli("barcode", str(files / "rect.fpres"),
                               "--direction", "1 1", "--base", "0 0", "--simplify", "1")
        assert code == 0 and out.strip() == "bar 0 1 1"

    def test_match_dist_deterministic(self, files):
        args = ("match-dist", str(files / "N.fpres"), str(files / "O.fpres"),
                "--lines", "8", "--seed", "7", "--extra", "20", "--emit-argmax")
        first = run_cli(*args)
        second = run_cli(*args)
        assert first == second
        assert first[0] == 0 and "matching-distance 0 (0.000000)" in first[1]

    def test_bottleneck(self, files):
        code, out, _ = run_cli("bottleneck", str(files / "B1.bars"), str(files / "B2.bars"))
        assert code == 0 and "bottleneck 1 (1.000000)" in out

    def test_tabular_format(self, files):
        code, out, _ = run_cli("bottleneck", str(files / "B1.bars"), str(files / "B2.bars"),
                               "--format", "tabular")
        assert code == 0 and out.strip() == "bottleneck\t1\t1.000000"
        code, out, _ = run_cli("match-dist", str(files / "N.fpres"), str(files / "O.fpres"),
                               "--lines", "4", "--format", "tabular")
        assert code == 0 and "matching-distance\t0\t0.000000" in out

    def test_verify_accept_and_reject(self, files):
        code, out, _ = run_cli("verify", str(files / "N.fpres"), str(files / "O.fpres"),
                               str(files / "w.txt"))
        assert code == 0 and "accept at epsilon 1" in out
        code, out, _ = run_cli("verify", str(files / "N.fpres"), str(files / "O.fpres"),
                               str(files / "w_bad.txt"))
        assert code == 2 and "reject" in out

    def test_lower_bound(self, files):
        code, out, _ = run_cli("lower-bound", str(files / "rect.fpres"),
                               str(files / "rect_shift.fpres"))
        assert code == 0 and "interleaving-lower-bound 1/2 (0.500000)" in out
        code, out, _ = run_cli("lower-bound", str(files / "rect.fpres"),
                               str(files / "rect_shift.fpres"), "--probe", "0 0")
        assert code == 0 and "interleaving-lower-bound 1/2 (0.500000)" in out

    def test_interpolate(self, files):
        code, out, _ = run_cli("interpolate", str(files / "J.joint"), "--t", "1/2")
        assert code == 0
        assert fio.parse_fpres(out).n == 2
        code, _, err = run_cli("interpolate", str(files / "J.joint"), "--t", "3")
        assert code == 1

    def test_path_length(self, files):
        code, out, _ = run_cli("path-length", str(files / "rect.fpres"),
                               str(files / "rect_shift.fpres"), "--lines", "4")
        assert code == 0 and "path-length 1/2 (0.500000)" in out

    def test_blocks_commands(self, files):
        code, out, _ = run_cli("blocks", "extend", str(files / "A.blocks"))
        assert code == 0 and "rect oo [-2, 0) x [0, 2)" in out
        code, out, _ = run_cli("blocks", "dist", str(files / "A.blocks"), str(files / "B.blocks"))
        assert code == 0 and "block-matching-distance inf" in out

    def test_experiment_example31(self, files):
        code, out, _ = run_cli("experiment", "example31", "--lines", "40")
        assert code == 0
        assert "d0 sampled         0 (0.000000)" in out
        assert "status             PASS" in out

    def test_experiment_sandwich(self, files):
        code, out, _ = run_cli("experiment", "sandwich", "--seed", "3", "--instances", "2")
        assert code == 0 and "status PASS" in out

    def test_experiment_local_equiv_deterministic(self, files):
        args = ("experiment", "local-equiv", "--seed", "5", "--instances", "2")
        assert run_cli(*args) == run_cli(*args)
        code, out, _ = run_cli(*args)
        assert code == 0 and "status PASS" in out

    def test_broken_input_exits_one(self, files):
        code, _, err = run_cli("betti", str(files / "broken.fpres"))
        assert code == 1 and "line 7" in err
        code, _, err = run_cli("betti", str(files / "missing.fpres"))
        assert code == 1
