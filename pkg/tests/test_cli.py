import csv
import io
import json
import subprocess
import sys

import pytest

from edgecolor.cli import CSV_COLUMNS, main
from edgecolor.graph import read_edge_list


@pytest.fixture(scope="module")
def instance(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    g = d / "g.txt"
    assert main(["gen", "--model", "regular", "--n", "1024", "--d", "8", "--girth-min", "6", "--seed", "7",
                 "--out", str(g)]) == 0
    return d, g


def test_gen_edge_count(instance):
    _, g = instance
    assert read_edge_list(g).m == 4096


def test_gen_cycle(tmp_path):
    out = tmp_path / "c6.txt"
    assert main(["gen", "--model", "cycle", "--n", "6", "--out", str(out)]) == 0
    assert read_edge_list(out).m == 6


def test_gen_infeasible(tmp_path, capsys):
    rc = main(["gen", "--model", "regular", "--n", "256", "--d", "12", "--girth-min", "6", "--out", str(tmp_path / "x")])
    assert rc == 2 and "Moore" in capsys.readouterr().err


def test_run_det_and_verify(instance, capsys):
    d, g = instance
    col, tr = d / "det.col", d / "det.trace"
    assert main(["run", "--in", str(g), "--variant", "det", "--out-coloring", str(col), "--out-trace", str(tr)]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["palette"] == 14 and summary["colorsUsed"] <= 14
    assert main(["verify", "--in", str(g), "--coloring", str(col)]) == 0
    assert tr.read_text().splitlines()[-1].startswith('{"baseRounds"')


def test_rand_twice_identical(instance):
    d, g = instance
    outs = []
    for i in range(2):
        col, tr = d / f"r{i}.col", d / f"r{i}.trace"
        assert main(["run", "--in", str(g), "--variant", "rand", "--seed", "4",
                     "--out-coloring", str(col), "--out-trace", str(tr)]) == 0
        outs.append((col.read_bytes(), tr.read_bytes()))
    assert outs[0] == outs[1]


def test_rand_without_seed(instance):
    _, g = instance
    with pytest.raises(SystemExit) as exc:
        main(["run", "--in", str(g), "--variant", "rand"])
    assert exc.value.code == 2


def test_bad_input_file(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n0 x\n")
    assert main(["run", "--in", str(bad), "--variant", "det"]) == 2
    assert main(["run", "--in", str(tmp_path / "missing.txt"), "--variant", "det"]) == 2


def test_budget_exit(instance):
    _, g = instance
    assert main(["run", "--in", str(g), "--variant", "det", "--max-rounds", "10"]) == 3


def test_odd_cycle_reported(tmp_path):
    c5 = tmp_path / "c5.txt"
    main(["gen", "--model", "cycle", "--n", "5", "--out", str(c5)])
    assert main(["run", "--in", str(c5), "--variant", "det"]) == 2


def _corrupt(src, dst, fn):
    lines = src.read_text().splitlines()
    dst.write_text("\n".join(fn(lines)) + "\n")


def test_verify_corrupted_colour(instance, capsys):
    d, g = instance
    col = d / "v.col"
    main(["run", "--in", str(g), "--variant", "det", "--out-coloring", str(col)])
    capsys.readouterr()

    def clash(lines):
        # give the second edge at vertex 0 the colour of the first
        first = lines[0].split()
        for i, ln in enumerate(lines[1:], 1):
            u, v, c = ln.split()
            if first[0] in (u, v):
                lines[i] = f"{u} {v} {first[2]}"
                return lines
        raise AssertionError("no second edge at vertex 0")

    bad = d / "clash.col"
    _corrupt(col, bad, clash)
    assert main(["verify", "--in", str(g), "--coloring", str(bad)]) == 1
    assert "conflict" in capsys.readouterr().out


def test_verify_palette_overflow(instance):
    d, g = instance
    col = d / "p.col"
    main(["run", "--in", str(g), "--variant", "det", "--out-coloring", str(col)])
    bad = d / "over.col"
    _corrupt(col, bad, lambda ls: [" ".join(ls[0].split()[:2] + ["15"])] + ls[1:])
    assert main(["verify", "--in", str(g), "--coloring", str(bad)]) == 1
    assert main(["verify", "--in", str(g), "--coloring", str(bad), "--palette", "15"]) == 0


def test_bench_rows(capsys):
    assert main(["bench", "--d", "8", "--n-list", "256,512", "--variant", "det", "--seeds", "2"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4
    assert tuple(rows[0]) == CSV_COLUMNS
    assert all(r["check"] == "1" and int(r["colorsUsed"]) <= 14 for r in rows)


def test_bench_single_row(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--d", "8", "--n-list", "256", "--variant", "mis", "--csv", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2


def test_unknown_variant():
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--d", "8", "--n-list", "256", "--variant", "fast"])
    assert exc.value.code == 2


def test_console_script(tmp_path):
    out = tmp_path / "c6.txt"
    proc = subprocess.run([sys.executable, "-m", "edgecolor.cli", "gen", "--model", "cycle", "--n", "6",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["m"] == 6
