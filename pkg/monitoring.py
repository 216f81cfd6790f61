"""
Monitoring and logging configuration for satpart.
"""
import functools
import logging
import os
import sys
import time

import sentry_sdk
import structlog
from sentry_sdk.integrations.logging import LoggingIntegration

# Keyword arguments of the leader entry points attached to error reports
RUN_CONTEXT_KEYS = ("seed", "workers", "metric", "n", "cap", "max_retries", "stop_on_sat")


def setup_monitoring(config=None):
    """Configure Sentry error tracking and structured logging."""

    sentry_dsn = getattr(config, "sentry_dsn", None) or os.getenv("SENTRY_DSN")
    environment = getattr(config, "environment", None) or os.getenv("ENVIRONMENT", "production")
    log_level = getattr(config, "log_level", None) or os.getenv("SATPART_LOG_LEVEL", "WARNING")

    # Configure Sentry if DSN is provided
    if sentry_dsn:
        logging_integration = LoggingIntegration(
            level=logging.INFO,        # Capture info and above as breadcrumbs
            event_level=logging.ERROR  # Send errors as events
        )

        from satpart import __version__

        sentry_sdk.init(
            dsn=sentry_dsn,
            integrations=[logging_integration],
            environment=environment,
            release=__version__,
            traces_sample_rate=0.1,
            before_send=before_send_filter,
            attach_stacktrace=True,
            send_default_pii=False,
            max_breadcrumbs=100,
            shutdown_timeout=5,
        )

        sentry_sdk.set_context("toolkit", {
            "name": "satpart",
            "version": __version__,
            "environment": environment
        })

    configure_structlog(level=log_level, environment=environment)

    if sentry_dsn:
        get_logger(__name__).info("Sentry monitoring configured", environment=environment)


def before_send_filter(event, hint):
    """Filter events before sending to Sentry."""

    # Don't send test events
    if event.get('environment') == 'test':
        return None

    # Interrupted runs are resumable from their journal, not errors
    if 'exc_info' in hint:
        exc_type, exc_value, tb = hint['exc_info']
        if exc_type is not None and issubclass(exc_type, KeyboardInterrupt):
            return None

    return event


def configure_structlog(level="WARNING", environment="production"):
    """Configure structured logging with structlog."""

    numeric_level = logging.getLevelName(str(level).upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    # stdout is reserved for command output (--json)
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=numeric_level,
    )
    logging.getLogger().setLevel(numeric_level)

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.contextvars.merge_contextvars,
            structlog.processors.UnicodeDecoder(),
            structlog.dev.ConsoleRenderer() if environment == "development"
            else structlog.processors.JSONRenderer()
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
        context_class=dict,
        cache_logger_on_first_use=True,
    )


def get_logger(name: str):
    """Get a structured logger instance."""
    return structlog.get_logger(name)


# Error tracking decorators
def track_errors(operation_name: str = None):
    """Decorator to track errors in Sentry with operation context."""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            op_name = operation_name or f"{func.__module__}.{func.__name__}"

            run_context = {key: kwargs[key] for key in RUN_CONTEXT_KEYS if key in kwargs}

            with sentry_sdk.configure_scope() as scope:
                scope.set_tag("operation", op_name)
                scope.set_context("run", run_context)

                try:
                    return func(*args, **kwargs)
                except Exception as e:
                    logger = get_logger(func.__module__)
                    logger.error(
                        "Operation failed",
                        function=func.__name__,
                        error=str(e),
                        error_type=type(e).__name__,
                        operation=op_name,
                        **run_context,
                    )
                    raise

        return wrapper
    return decorator


# Performance monitoring
def track_performance(operation_name: str = None):
    """Decorator to track performance metrics."""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            op_name = operation_name or f"{func.__name__}"
            started = time.perf_counter()

            with sentry_sdk.start_transaction(
                op="function",
                name=op_name,
                sampled=True
            ) as transaction:
                transaction.set_tag("function_name", func.__name__)
                transaction.set_tag("module", func.__module__)

                try:
                    result = func(*args, **kwargs)
                    transaction.set_tag("status", "success")
                    return result
                except Exception as e:
                    transaction.set_tag("status", "error")
                    transaction.set_tag("error_type", type(e).__name__)
                    raise
                finally:
                    log_run_metric(f"{op_name}.seconds", time.perf_counter() - started)

        return wrapper
    return decorator


def log_run_metric(metric_name: str, value: float, tags: dict = None):
    """Log a numeric run metric (F values, one-core cost, throughput)."""
    logger = get_logger("metrics")
    logger.info(
        "Run metric recorded",
        metric=metric_name,
        value=value,
        tags=tags or {}
    )


def alert_critical_error(error_type: str, details: str = None):
    """Send a critical defect (e.g. an unsound model) to the monitoring system."""
    with sentry_sdk.configure_scope() as scope:
        scope.set_tag("alert_level", "critical")
        scope.set_tag("error_type", error_type)

        scope.set_context("alert_details", {
            "error_type": error_type,
            "details": details,
            "timestamp": time.time(),
            "requires_immediate_attention": True
        })

        sentry_sdk.capture_message(
            f"CRITICAL: {error_type}",
            level="error"
        )

        logger = get_logger("alerts")
        logger.error(
            "Critical alert triggered",
            error_type=error_type,
            details=details
        )
