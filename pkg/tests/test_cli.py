import math

import pytest

from phaserx.cli import EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from phaserx.phasenoise import PhaseNoise
from phaserx.receivers import perr_bpsk_hom, perr_helstrom_noiseless, perr_ook_dd
from phaserx.constellation import make_bpsk

OOK_DD_2 = 0.009157819444367090146
BPSK_HOM_2 = 0.002338867490523632918

FAST_GRID = ["--grid-resolution", "41", "--beta-resolution", "41"]


def parse_kv(out: str) -> dict:
    pairs = {}
    for line in out.strip().splitlines():
        key, _, value = line.partition(" = ")
        pairs[key] = value
    return pairs


def read_csv(path):
    manifest, header, rows = [], None, []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            manifest.append(line)
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return manifest, header, rows


def test_sql_noiseless_point(capsys):
    assert main(["sql", "--nbar", "2", "--sigma", "0"]) == EXIT_OK
    kv = parse_kv(capsys.readouterr().out)
    assert float(kv["perr_ook_dd"]) == pytest.approx(OOK_DD_2, rel=1e-10)
    assert float(kv["perr_bpsk_hom"]) == pytest.approx(BPSK_HOM_2, rel=1e-10)
    assert float(kv["perr_sql"]) == pytest.approx(BPSK_HOM_2, rel=1e-10)
    assert kv["sql_branch"] == "bpsk_hom"


def test_sql_branch_switches_under_noise(capsys):
    assert main(["sql", "--nbar", "2", "--sigma", "1.0"]) == EXIT_OK
    kv = parse_kv(capsys.readouterr().out)
    assert float(kv["perr_sql"]) == pytest.approx(OOK_DD_2, rel=1e-10)
    assert kv["sql_branch"] == "ook_dd"


def test_sql_zero_power_is_coin_toss(capsys):
    assert main(["sql", "--nbar", "0", "--sigma", "0"]) == EXIT_OK
    kv = parse_kv(capsys.readouterr().out)
    assert float(kv["perr_sql"]) == pytest.approx(0.5, rel=1e-12)


def test_sweep_nbar_csv(tmp_path):
    out = tmp_path / "curves.csv"
    rc = main(["sweep-nbar", "--nbar-max", "10", "--step", "0.5", "--output", str(out)])
    assert rc == EXIT_OK
    manifest, header, rows = read_csv(out)
    assert len(manifest) == 4
    assert manifest[0].startswith("# command: sweep-nbar")
    assert header == ["nbar", "psd_watts_per_hz", "perr_ook_dd", "perr_bpsk_hom",
                      "perr_kennedy", "perr_helstrom"]
    assert len(rows) == 21
    # zero-power row: every receiver is a coin toss
    first = [float(v) for v in rows[0]]
    assert first[0] == 0.0
    assert first[2:] == pytest.approx([0.5, 0.5, 0.5, 0.5], rel=1e-12)
    # nbar = 2 row keeps the known curve ordering
    row2 = [float(v) for v in rows[4]]
    assert row2[0] == 2.0
    assert row2[2] == pytest.approx(OOK_DD_2, rel=1e-9)
    assert row2[3] == pytest.approx(BPSK_HOM_2, rel=1e-9)
    assert row2[2] > row2[3] > row2[4] > row2[5]
    # strictly decreasing columns once power flows
    for col in (2, 3, 4, 5):
        vals = [float(r[col]) for r in rows]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_sweep_nbar_reruns_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["sweep-nbar", "--nbar-max", "2", "--step", "1.0", "--output"]
    assert main(argv + [str(a)]) == EXIT_OK
    assert main(argv + [str(b)]) == EXIT_OK
    data_a = [l for l in a.read_text().splitlines() if not l.startswith("#")]
    data_b = [l for l in b.read_text().splitlines() if not l.startswith("#")]
    assert data_a == data_b


def test_sweep_sigma_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep-sigma", "--nbar", "2", "--sigma-max", "0.45", "--step", "0.45",
               "--pnr-list", "1,2", "--output", str(out), *FAST_GRID])
    assert rc == EXIT_OK
    manifest, header, rows = read_csv(out)
    assert header == ["sigma", "perr_sql", "perr_helstrom_at_optimum",
                      "perr_helstrom_independent", "perr_pnr1", "perr_pnr2",
                      "alpha0", "alpha1", "beta", "threshold_k", "orientation"]
    assert len(rows) == 2
    for row in rows:
        sigma = float(row[0])
        assert float(row[1]) == pytest.approx(
            min(perr_ook_dd(2.0), perr_bpsk_hom(2.0, PhaseNoise(sigma))), rel=1e-9
        )
        # the independently optimized bound cannot exceed the bound at the
        # receiver's constellation
        assert float(row[3]) <= float(row[2]) * (1.0 + 1e-9)
        assert float(row[5]) <= float(row[4]) * (1.0 + 1e-9)
        int(row[9])
        assert row[10] in ("bit1_high", "bit0_high")


def test_optimize_report_and_trace(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    rc = main(["optimize", "--nbar", "2", "--sigma", "0.45", "--pnr", "2",
               "--trace-output", str(trace), *FAST_GRID])
    assert rc == EXIT_OK
    kv = parse_kv(capsys.readouterr().out)
    assert kv["threshold_k"] == "0"
    assert float(kv["perr"]) < float(kv["perr_sql"])
    assert float(kv["perr_helstrom"]) <= float(kv["perr"])
    assert kv["sub_sql"] == "true"
    manifest, header, rows = read_csv(trace)
    assert header == ["iteration", "perr"]
    perrs = [float(r[1]) for r in rows]
    assert all(a >= b - 1e-15 for a, b in zip(perrs, perrs[1:]))


def test_optimize_validate_zscore(capsys):
    rc = main(["optimize", "--nbar", "1.0", "--sigma", "0.3", "--pnr", "1",
               "--validate", "200000", "--seed", "77", *FAST_GRID])
    assert rc == EXIT_OK
    kv = parse_kv(capsys.readouterr().out)
    assert kv["validate_trials"] == "200000"
    assert abs(float(kv["validate_z"])) < 5.0
    assert float(kv["validate_std_error"]) > 0.0


def test_efficiency_rescales_photon_number(capsys):
    assert main(["sql", "--nbar", "4", "--sigma", "0", "--efficiency", "0.5"]) == EXIT_OK
    lossy = parse_kv(capsys.readouterr().out)
    assert main(["sql", "--nbar", "2", "--sigma", "0"]) == EXIT_OK
    ideal = parse_kv(capsys.readouterr().out)
    assert lossy["perr_sql"] == ideal["perr_sql"]


def test_pk_distribution_csv(tmp_path):
    out = tmp_path / "pk.csv"
    rc = main(["pk", "--alpha", "1.2", "--beta", "-0.4", "--sigma", "0.3",
               "--kmax", "12", "--output", str(out)])
    assert rc == EXIT_OK
    manifest, header, rows = read_csv(out)
    assert header == ["k", "probability"]
    assert [int(r[0]) for r in rows] == list(range(13))
    probs = [float(r[1]) for r in rows]
    assert all(p >= 0.0 for p in probs)
    assert sum(probs) == pytest.approx(1.0, abs=1e-6)
    assert any("tail_mass" in line for line in manifest)


def test_helstrom_report(capsys):
    assert main(["helstrom", "--nbar", "2", "--sigma", "0"]) == EXIT_OK
    kv = parse_kv(capsys.readouterr().out)
    assert kv["constellation"] == "parametrized"
    assert float(kv["perr_helstrom"]) == pytest.approx(
        perr_helstrom_noiseless(make_bpsk(2.0)), abs=1e-10
    )
    assert float(kv["perr_helstrom_noiseless"]) == pytest.approx(
        perr_helstrom_noiseless(make_bpsk(2.0)), rel=1e-10
    )


def test_helstrom_explicit_amplitudes(capsys):
    rc = main(["helstrom", "--nbar", "2", "--sigma", "0.45",
               "--alpha0", "-1.9", "--alpha1", "0.15"])
    assert rc == EXIT_OK
    kv = parse_kv(capsys.readouterr().out)
    assert kv["constellation"] == "explicit"
    assert 0.0 < float(kv["perr_helstrom"]) < 0.5


def test_helstrom_optimized_constellation(capsys):
    rc = main(["helstrom", "--nbar", "2", "--sigma", "0.45", "--optimize-constellation"])
    assert rc == EXIT_OK
    kv = parse_kv(capsys.readouterr().out)
    assert kv["constellation"] == "optimized"
    assert float(kv["mean_photon_number"]) == pytest.approx(2.0, rel=1e-9)


def test_usage_errors():
    assert main(["sql", "--nbar", "2"]) == EXIT_USAGE          # missing --sigma
    assert main(["sql", "--nbar", "abc", "--sigma", "0"]) == EXIT_USAGE
    assert main(["sweep-nbar", "--nbar-max", "2", "--step", "-1",
                 "--output", "-"]) == EXIT_USAGE
    assert main(["helstrom", "--nbar", "2", "--sigma", "0",
                 "--alpha0", "1.0"]) == EXIT_USAGE


def test_io_error_exit_code(tmp_path):
    missing = tmp_path / "no-such-dir" / "x.csv"
    rc = main(["sweep-nbar", "--nbar-max", "1", "--step", "1", "--output", str(missing)])
    assert rc == EXIT_IO


def test_numerical_failure_exit_code(capsys):
    # far beyond the quadrature order cap: the average cannot stabilize
    assert main(["sql", "--nbar", "2", "--sigma", "40"]) == EXIT_NUMERICAL
    assert "numerical failure" in capsys.readouterr().err


def test_version_flag(capsys):
    assert main(["--version"]) == EXIT_OK
    assert "phaserx" in capsys.readouterr().out
