import json
import math

from src.core import run_logger
from src.core.run_logger import RunLogger, init_run_logger, run_log_fit, summarize


def _blocks(path):
    return [block for block in path.read_text(encoding="utf-8").split("\n\n") if block.strip()]


def test_lifecycle_blocks(tmp_path):
    logger = RunLogger(log_dir=str(tmp_path), run_id="t1")
    logger.log_start(["fit", "--order", "0,1,0"], {"order": "0,1,0"})
    logger.log_command("fit", {"data": "catalog:exchange_rate_1971_2024"})
    logger.log_fit("fx", (0, 1, 0), True, "exact-mle", loglik=-120.0, aic=244.0, bic=248.0)
    logger.log_error("boom")
    logger.log_stop(1)

    blocks = _blocks(logger.log_file)
    headers = [block.splitlines()[0] for block in blocks]
    assert headers == ["[RUN][START]", "[RUN][COMMAND]", "[RUN][FIT]", "[RUN][ERROR]", "[RUN][STOP]"]
    assert "argv=fit --order 0,1,0" in blocks[0]
    assert "drift=true" in blocks[2]
    assert "exit_code=1" in blocks[4]
    assert "fits=1" in blocks[4] and "errors=1" in blocks[4]


def test_metrics_file_holds_finite_numbers(tmp_path):
    logger = RunLogger(log_dir=str(tmp_path), run_id="t2")
    logger.log_fit("lin", (0, 1, 0), True, "exact-mle", loglik=math.inf, aic=-math.inf, status="degenerate")
    record = json.loads(logger.metrics_file.read_text(encoding="utf-8"))
    assert logger.metrics_file.name == "fits_t2.jsonl"
    assert record["aic"] is None and record["loglik"] is None
    assert record["status"] == "degenerate"
    assert "aic=nan" in logger.log_file.read_text(encoding="utf-8")


def test_disabled_logger_writes_nothing(tmp_path):
    logger = init_run_logger(log_dir=str(tmp_path / "logs"), enabled=False)
    run_log_fit("fx", (0, 1, 0), True, "css")
    logger.log_stop(0)
    assert not (tmp_path / "logs").exists()
    assert run_logger.get_run_logger() is logger


def test_summarize(tmp_path, capsys):
    logger = RunLogger(log_dir=str(tmp_path), run_id="t3")
    logger.log_fit("gdp", (0, 2, 0), False, "exact-mle", aic=989.6, bic=991.1)
    logger.log_fit("gdp", (0, 2, 1), False, "exact-mle", aic=984.4, bic=987.5)
    logger.log_fit("gdp", (1, 2, 1), False, "exact-mle", status="failed:ConvergenceError")
    summarize(str(logger.metrics_file))
    out = capsys.readouterr().out
    assert "Candidates: 3 | ok: 2 | other: 1" in out
    assert out.index("(0,2,1)") < out.index("(0,2,0)")


def test_summarize_missing_file(tmp_path, capsys):
    summarize(str(tmp_path / "none.jsonl"))
    assert "Not found" in capsys.readouterr().out
