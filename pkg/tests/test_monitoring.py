"""
Tests for the monitoring helpers.
"""
import pytest

import monitoring
from monitoring import before_send_filter, log_run_metric, setup_monitoring, track_errors, track_performance


class TestBeforeSend:
    """Tests for the Sentry event filter."""

    def test_drops_test_environment(self):
        """Events from the test environment never leave the process."""
        assert before_send_filter({"environment": "test"}, {}) is None

    def test_drops_interrupts(self):
        """Interrupted runs are not reported."""
        hint = {"exc_info": (KeyboardInterrupt, KeyboardInterrupt(), None)}
        assert before_send_filter({"environment": "production"}, hint) is None

    def test_keeps_errors(self):
        """Real errors pass through unchanged."""
        event = {"environment": "production"}
        hint = {"exc_info": (RuntimeError, RuntimeError("boom"), None)}
        assert before_send_filter(event, hint) is event


class TestDecorators:
    """Tests for the error and performance decorators."""

    def test_track_errors_passes_results(self):
        """A successful call returns its value."""
        @track_errors("double")
        def double(x, seed=0):
            return 2 * x

        assert double(4, seed=3) == 8

    def test_track_errors_logs_and_reraises(self, mocker):
        """Failures are logged with the run context and re-raised."""
        logger = mocker.Mock()
        mocker.patch.object(monitoring, "get_logger", return_value=logger)

        @track_errors("explode")
        def explode(seed=0, workers=1):
            raise ValueError("bad")

        with pytest.raises(ValueError):
            explode(seed=9, workers=2)
        _, fields = logger.error.call_args
        assert fields["operation"] == "explode"
        assert fields["error_type"] == "ValueError"
        assert fields["seed"] == 9 and fields["workers"] == 2

    def test_track_performance_records_duration(self, mocker):
        """Every call records its duration, failed or not."""
        metric = mocker.patch.object(monitoring, "log_run_metric")

        @track_performance("work")
        def work(fail):
            if fail:
                raise RuntimeError("failed")
            return "done"

        assert work(False) == "done"
        with pytest.raises(RuntimeError):
            work(True)
        assert [call.args[0] for call in metric.call_args_list] == ["work.seconds", "work.seconds"]


class TestSetup:
    """Tests for logging setup."""

    def test_setup_without_dsn(self, mocker):
        """Without a DSN Sentry is never initialised."""
        init = mocker.patch.object(monitoring.sentry_sdk, "init")
        setup_monitoring(None)
        init.assert_not_called()

    def test_metrics_go_to_stderr(self, capsys):
        """Structured log output stays off stdout."""
        monitoring.configure_structlog(level="INFO", environment="test")
        log_run_metric("search.best_f", 1.5, {"algorithm": "tabu"})
        assert capsys.readouterr().out == ""
        monitoring.configure_structlog(level="WARNING", environment="test")
