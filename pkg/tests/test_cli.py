import json
import socket
import threading
import time

import pytest

from asianpricer import bs_call
from asianpricer.cli import main
from asianpricer.config import parse_config_text

BS5 = """
[model]
type = bs
sigma = 0.2

[market]
spot = 100
rate = 0.05

[schedule]
n_obs = 5
period_days = 1

[mc]
n_paths = 40000
seed = 9

[strikes]
values = 90,100,110
"""


@pytest.fixture
def bs5_config(tmp_path):
    path = tmp_path / "bs5.ini"
    path.write_text(BS5)
    return str(path)


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPriceCommand:
    def test_prints_four_decimals(self, bs5_config, capsys):
        code, out, _ = run_cli(capsys, ["price", "--config", bs5_config, "--strike", "100"])
        assert code == 0
        line = out.strip()
        whole, frac = line.split(".")
        assert len(frac) == 4
        assert 0.4 < float(line) < 0.9

    def test_delta_flag_adds_line(self, bs5_config, capsys):
        code, out, _ = run_cli(capsys, ["price", "--config", bs5_config,
                                        "--strike", "100", "--delta"])
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("delta=")

    def test_single_observation_matches_european_command(self, tmp_path, capsys):
        config = tmp_path / "n1.ini"
        config.write_text(BS5.replace("n_obs = 5", "n_obs = 1"))
        code, out, _ = run_cli(capsys, ["price", "--config", str(config), "--strike", "100"])
        assert code == 0
        price_value = float(out.strip())
        code, out, _ = run_cli(capsys, ["european", "--config", str(config),
                                        "--strikes", "100"])
        assert code == 0
        call_value = float(out.strip().splitlines()[1].split(",")[1])
        assert price_value == pytest.approx(call_value, abs=1e-4)
        assert call_value == pytest.approx(bs_call(100.0, 100.0, 0.05, 0.2, 1 / 365), abs=1e-6)

    def test_json_output_has_full_precision(self, bs5_config, capsys):
        code, out, _ = run_cli(capsys, ["price", "--config", bs5_config,
                                        "--strike", "100", "--output", "json"])
        assert code == 0
        body = json.loads(out)
        assert body["strike"] == 100.0
        assert len(repr(body["price"])) > 8  # not rounded to 4 decimals

    def test_strike_out_of_grid_exits_3(self, bs5_config, capsys):
        code, _, err = run_cli(capsys, ["price", "--config", bs5_config,
                                        "--strike", "5000"])
        assert code == 3
        assert "StrikeOutOfGrid" in err


class TestTableCommand:
    def test_csv_header_and_rows(self, bs5_config, capsys):
        code, out, _ = run_cli(capsys, ["table", "--config", bs5_config])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "strike,price,delta,mc_price,mc_se"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "90"
        assert first[3] == "" and first[4] == ""  # MC columns empty when disabled
        prices = [float(line.split(",")[1]) for line in lines[1:]]
        assert prices == sorted(prices, reverse=True)

    def test_with_mc_fills_columns(self, bs5_config, capsys):
        code, out, _ = run_cli(capsys, ["table", "--config", bs5_config, "--with-mc"])
        assert code == 0
        row = out.strip().splitlines()[1].split(",")
        assert row[3] != "" and row[4] != ""
        assert abs(float(row[1]) - float(row[3])) < 6 * float(row[4]) + 1e-4

    def test_empty_strikes_exits_2(self, tmp_path, capsys):
        config = tmp_path / "nostrikes.ini"
        config.write_text(BS5.replace("[strikes]\nvalues = 90,100,110", ""))
        code, _, err = run_cli(capsys, ["table", "--config", str(config)])
        assert code == 2
        assert "BadConfig" in err

    def test_out_writes_file(self, bs5_config, tmp_path, capsys):
        target = tmp_path / "table.csv"
        code, out, _ = run_cli(capsys, ["table", "--config", bs5_config,
                                        "--out", str(target)])
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("strike,price,delta")


class TestMcCommand:
    def test_fixed_seed_is_byte_identical(self, bs5_config, capsys):
        _, first, _ = run_cli(capsys, ["mc", "--config", bs5_config])
        _, second, _ = run_cli(capsys, ["mc", "--config", bs5_config])
        assert first == second

    def test_worker_count_does_not_change_output(self, bs5_config, capsys):
        _, one, _ = run_cli(capsys, ["mc", "--config", bs5_config, "--workers", "1"])
        _, four, _ = run_cli(capsys, ["mc", "--config", bs5_config, "--workers", "4"])
        assert one == four

    def test_zero_paths_exits_2(self, bs5_config, capsys):
        code, _, err = run_cli(capsys, ["mc", "--config", bs5_config, "--paths", "0"])
        assert code == 2
        assert "BadConfig" in err

    def test_missing_mc_block_exits_2(self, tmp_path, capsys):
        config = tmp_path / "nomc.ini"
        config.write_text(BS5.replace("[mc]\nn_paths = 40000\nseed = 9", ""))
        code, _, err = run_cli(capsys, ["mc", "--config", str(config)])
        assert code == 2
        assert "BadConfig" in err


class TestErrors:
    def test_invalid_sigma_exits_2_with_name(self, tmp_path, capsys):
        config = tmp_path / "bad.ini"
        config.write_text(BS5.replace("sigma = 0.2", "sigma = -0.1"))
        code, _, err = run_cli(capsys, ["price", "--config", str(config),
                                        "--strike", "100"])
        assert code == 2
        assert "NonPositiveSigma" in err

    def test_missing_config_file_exits_2(self, capsys):
        code, _, err = run_cli(capsys, ["price", "--config", "/no/such/file.ini",
                                        "--strike", "100"])
        assert code == 2
        assert "BadConfig" in err

    def test_price_needs_one_strike(self, bs5_config, capsys):
        code, _, err = run_cli(capsys, ["price", "--config", bs5_config])
        assert code == 2


def test_dump_config_round_trips(bs5_config, capsys):
    code, out, _ = run_cli(capsys, ["price", "--config", bs5_config, "--dump-config"])
    assert code == 0
    with open(bs5_config, encoding="utf-8") as fh:
        original = parse_config_text(fh.read())
    assert parse_config_text(out) == original


@pytest.fixture(scope="module")
def server_url():
    import uvicorn

    from asianpricer.service.app import app

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


class TestRemoteServer:
    def test_thin_client_matches_in_process(self, bs5_config, server_url, capsys):
        _, local, _ = run_cli(capsys, ["table", "--config", bs5_config])
        code, remote, _ = run_cli(capsys, ["table", "--config", bs5_config,
                                           "--server", server_url])
        assert code == 0
        assert remote == local

    def test_remote_error_maps_exit_code(self, tmp_path, server_url, capsys):
        config = tmp_path / "bad.ini"
        config.write_text(BS5.replace("sigma = 0.2", "sigma = -0.5"))
        code, _, err = run_cli(capsys, ["price", "--config", str(config),
                                        "--strike", "100", "--server", server_url])
        assert code == 2
        assert "NonPositiveSigma" in err
