import csv
import io
import shutil
import subprocess

import numpy as np
import pytest

from sru.cli import main
from sru.experiment import COLUMNS, run_experiment
from sru.grid import GridArray, parse_pgm, pgm_bytes, read_raw, write_raw
from sru.sources import bernoulli, constant, uniform


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def raw_file(tmp_path):
    x = GridArray(np.random.default_rng(0).integers(0, 2, (24, 24)), 2)
    path = tmp_path / "x.raw"
    write_raw(path, x)
    return path


@pytest.mark.parametrize("extra", [[], ["--baseline"], ["--pointers", "index"], ["--phi", "7/10"]])
def test_compress_decompress_is_identity_on_bytes(capsys, tmp_path, raw_file, extra):
    c, out = tmp_path / "x.sru", tmp_path / "y.raw"
    code, text, _ = run(capsys, "compress", "--input", raw_file, "--output", c, *extra)
    assert code == 0
    (row,) = rows(text)
    assert set(row) == {"n", "events", "payload_bits", "rate"} and row["n"] == "24"
    assert c.read_bytes()[:4] == (b"SRB1" if extra == ["--baseline"] else b"SRU1")
    assert run(capsys, "decompress", "--input", c, "--output", out)[0] == 0
    assert out.read_bytes() == raw_file.read_bytes()


def test_pgm_round_trip_and_padding(capsys, tmp_path):
    pix = (np.random.default_rng(1).integers(0, 2, (10, 16)) * 255).astype(np.uint8)
    src = tmp_path / "a.pgm"
    src.write_bytes(pgm_bytes(pix))
    c, out = tmp_path / "a.sru", tmp_path / "b.pgm"
    code, text, _ = run(capsys, "compress", "--input", src, "--output", c)
    assert code == 0 and rows(text)[0]["n"] == "16"
    assert run(capsys, "decompress", "--input", c, "--output", out)[0] == 0
    assert out.read_bytes() == src.read_bytes()
    assert parse_pgm(out.read_bytes()).shape == (10, 16)


def test_constant_64_rate_line(capsys, tmp_path):
    src = tmp_path / "z.raw"
    write_raw(src, GridArray(np.zeros((64, 64), int), 2))
    code, text, _ = run(capsys, "compress", "--input", src, "--output", tmp_path / "z.sru")
    (row,) = rows(text)
    assert code == 0 and row["payload_bits"] == "772"
    assert float(row["rate"]) == pytest.approx(772 / 4096)


def test_no_flush_decompresses_parsed_cube(capsys, tmp_path):
    src = tmp_path / "z.raw"
    write_raw(src, GridArray(np.zeros((3, 3), int), 2))
    c, out = tmp_path / "z.sru", tmp_path / "o.raw"
    assert run(capsys, "compress", "--input", src, "--output", c, "--no-flush")[0] == 0
    code, _, err = run(capsys, "decompress", "--input", c, "--output", out)
    assert code == 0 and "unflushed" in err
    assert read_raw(out, (2, 2), 2) == GridArray(np.zeros((2, 2), int), 2)


def test_raw_file_of_three_dims_with_shape(capsys, tmp_path):
    x = GridArray(np.random.default_rng(2).integers(0, 4, (3, 5, 4)), 4)
    src = tmp_path / "v.raw"
    write_raw(src, x)
    c, out = tmp_path / "v.sru", tmp_path / "w.raw"
    argv = ["--input", src, "--dims", 3, "--alphabet", 4, "--shape", "3x5x4"]
    assert run(capsys, "compress", "--output", c, *argv)[0] == 0
    assert run(capsys, "decompress", "--input", c, "--output", out)[0] == 0
    assert out.read_bytes() == src.read_bytes()


def test_exit_codes(capsys, tmp_path, raw_file):
    assert run(capsys, "compress", "--input", raw_file, "--output", tmp_path / "o", "--phi", "3/2")[0] == 2
    assert run(capsys, "compress", "--input", tmp_path / "missing", "--output", tmp_path / "o")[0] == 3
    odd = tmp_path / "odd.raw"
    odd.write_bytes(b"\x00" * 7)
    assert run(capsys, "compress", "--input", odd, "--output", tmp_path / "o")[0] == 2
    junk = tmp_path / "junk.sru"
    junk.write_bytes(b"not a container at all")
    code, _, err = run(capsys, "decompress", "--input", junk, "--output", tmp_path / "o")
    assert code == 4 and "BadMagicError" in err
    good = tmp_path / "g.sru"
    run(capsys, "compress", "--input", raw_file, "--output", good)
    data = bytearray(good.read_bytes())
    data[30] ^= 4
    good.write_bytes(bytes(data))
    code, _, err = run(capsys, "decompress", "--input", good, "--output", tmp_path / "o")
    assert code == 4 and "Error" in err
    with pytest.raises(SystemExit) as exc:
        main(["compress", "--bogus"])
    assert exc.value.code == 2


def test_stats(capsys, tmp_path):
    src = tmp_path / "s.raw"
    write_raw(src, GridArray(np.array([0, 0, 1, 1]), 2))
    code, text, _ = run(capsys, "stats", "--input", src, "--dims", 1, "--k", 2)
    (row,) = rows(text)
    assert code == 0 and row["k"] == "2" and row["distinct"] == "2"
    assert float(row["H"]) == pytest.approx(1.0) and float(row["h"]) == pytest.approx(0.5)


def test_gen(capsys, tmp_path):
    out = tmp_path / "g.raw"
    assert run(capsys, "gen", "--source", "kind=iid p=0.3", "--size", 16, "--seed", 5,
               "--output", out)[0] == 0
    assert out.stat().st_size == 256
    again = tmp_path / "h.raw"
    run(capsys, "gen", "--source", "kind=iid p=0.3", "--size", 16, "--seed", 5, "--output", again)
    assert out.read_bytes() == again.read_bytes()
    assert run(capsys, "gen", "--source", "kind=nope", "--output", out)[0] == 2


def test_experiment_csv_deterministic(capsys, tmp_path):
    argv = ["experiment", "--source", "kind=iid p=0.1", "--sizes", "16,32", "--trials", 2,
            "--seed", 3]
    code, first, _ = run(capsys, *argv)
    assert code == 0
    assert run(capsys, *argv)[1] == first
    table = rows(first)
    assert tuple(table[0]) == COLUMNS
    assert [(r["n"], r["trial"]) for r in table] == [("16", "0"), ("16", "1"), ("32", "0"), ("32", "1")]
    out = tmp_path / "e.csv"
    assert run(capsys, *argv, "--jobs", 2, "--output", out)[0] == 0
    assert out.read_text() == first


def test_experiment_trends_small():
    res = run_experiment(uniform(2, d=2, seed=1), "1/2", [64, 256])
    assert all(r["h_true"] == 1.0 for r in res)
    assert res[1]["rate_sru"] < res[0]["rate_sru"]
    res = run_experiment(bernoulli(0.1, d=2, seed=1), "1/2", [64])
    assert 0.469 < res[0]["rate_sru"] < 1.0
    res = run_experiment(constant(d=2, seed=1), "1/2", [32, 64])
    assert res[1]["rate_sru"] < res[0]["rate_sru"]


def test_visualize(capsys, tmp_path):
    src = tmp_path / "z.raw"
    write_raw(src, GridArray(np.zeros((9, 9), int), 2))
    svg = tmp_path / "v.svg"
    assert run(capsys, "visualize", "--input", src, "--output", svg)[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") and text.count('fill="none"') >= 5
    # growing squares: some outline has side 3 or more
    assert 'width="3" height="3" fill="none"' in text
    pgm = tmp_path / "v.pgm"
    assert run(capsys, "visualize", "--input", src, "--output", pgm, "--scale", 4)[0] == 0
    img = parse_pgm(pgm.read_bytes())
    assert img.shape == (36, 36) and (img == 128).any()


def test_visualize_random_is_mostly_unit_blocks(capsys, tmp_path):
    src = tmp_path / "r.raw"
    write_raw(src, GridArray(np.random.default_rng(0).integers(0, 2, (16, 16)), 2))
    svg = tmp_path / "r.svg"
    assert run(capsys, "visualize", "--input", src, "--output", svg)[0] == 0
    text = svg.read_text()
    units = text.count('width="1" height="1" fill="none"')
    outlines = text.count('fill="none"')
    assert units > outlines / 2


def test_visualize_needs_two_dims(capsys, tmp_path):
    src = tmp_path / "l.raw"
    src.write_bytes(b"\x00" * 8)
    assert run(capsys, "visualize", "--input", src, "--dims", 1, "--output", tmp_path / "o.svg")[0] == 2


@pytest.mark.skipif(shutil.which("sru") is None, reason="console script not installed")
def test_console_script(tmp_path):
    src = tmp_path / "x.raw"
    src.write_bytes(bytes(16))
    res = subprocess.run(["sru", "stats", "--input", str(src)], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("k,distinct,H,h")
