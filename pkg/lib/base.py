"""
BaseScript — abstract base class for all netlearn commands.

Provides:
  - Rotating file logger + stderr handler, scoped to <NETLEARN_LOG_DIR>/<command>.log
  - Abstract run() method that must return a JSON-serialisable dict
  - build_parser()/execute()/main(): --debug and --threads flags, settings
    loading, JSON summary on stdout, exit code
  - Automatic elapsed-time logging

Exit codes: 0 success/feasible, 2 infeasible, 3 validation failure, 1 error.

Subclass usage:
    class MyScript(BaseScript):
        command = "my-command"

        @classmethod
        def add_arguments(cls, parser):
            parser.add_argument("--instance", type=Path, required=True)

        def run(self) -> dict:
            self.logger.info("doing work...")
            return {"result": "done"}

    if __name__ == "__main__":
        sys.exit(MyScript.main())
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from abc import ABC, abstractmethod
from logging.handlers import RotatingFileHandler
from typing import Any, ClassVar, Optional, Sequence

from .config import Settings, get_settings

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_VALIDATION = 3


class BaseScript(ABC):
    """Abstract base for all netlearn commands."""

    command: ClassVar[str] = ""

    def __init__(self, args: argparse.Namespace, settings: Optional[Settings] = None,
                 log_level: int = logging.INFO) -> None:
        self.args = args
        self.settings = settings or get_settings()
        self.script_name: str = self.command or type(self).__name__.lower()
        self.logger: logging.Logger = self._setup_logger(log_level)
        self.exit_code: int = EXIT_OK

    # ── Logging ───────────────────────────────────────────────────────────────

    def _setup_logger(self, log_level: int) -> logging.Logger:
        """
        Configure a logger that writes to both:
          - <log_dir>/<script_name>.log  (rotating, max 2 MB × 5 backups)
          - stderr (stdout carries the JSON summary)
        """
        log_dir = self.settings.log_dir
        log_dir.mkdir(parents=True, exist_ok=True)

        logger = logging.getLogger(f"netlearn.{self.script_name}")
        logger.setLevel(log_level)
        # Library modules log under "lib.*"; follow the command's level.
        lib_logger = logging.getLogger("lib")
        lib_logger.setLevel(log_level)

        # Rebind on every run: the log dir and stderr may differ between commands
        for target in (logger, lib_logger):
            for handler in list(target.handlers):
                target.removeHandler(handler)
                handler.close()

        fmt = logging.Formatter(
            "%(asctime)s [%(levelname)-8s] %(name)s — %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )

        file_handler = RotatingFileHandler(
            log_dir / f"{self.script_name}.log",
            maxBytes=2_000_000,   # 2 MB per file
            backupCount=5,
            encoding="utf-8",
        )
        file_handler.setFormatter(fmt)

        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.setFormatter(fmt)

        logger.addHandler(file_handler)
        logger.addHandler(stream_handler)
        lib_logger.addHandler(file_handler)
        lib_logger.addHandler(stream_handler)
        return logger

    # ── Abstract interface ────────────────────────────────────────────────────

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Hook for command-specific flags."""

    @abstractmethod
    def run(self) -> dict[str, Any]:
        """
        Execute the command.

        Must return a JSON-serialisable dict; it is printed to stdout.
        Set self.exit_code to report infeasibility or validation failure.
        """

    # ── CLI entrypoint ────────────────────────────────────────────────────────

    @classmethod
    def build_parser(cls, parser: Optional[argparse.ArgumentParser] = None
                     ) -> argparse.ArgumentParser:
        if parser is None:
            doc = (cls.__doc__ or cls.__name__).strip().splitlines()[0]
            parser = argparse.ArgumentParser(prog=cls.command or None, description=doc)
        parser.add_argument(
            "--debug", action="store_true", help="Enable DEBUG-level logging"
        )
        parser.add_argument(
            "--threads", type=int, default=None,
            help="Worker threads (default: NETLEARN_THREADS or 1)",
        )
        cls.add_arguments(parser)
        return parser

    @classmethod
    def execute(cls, args: argparse.Namespace) -> int:
        """Run with parsed arguments; print the JSON summary, return the exit code."""
        log_level = logging.DEBUG if args.debug else logging.INFO
        try:
            settings = get_settings()
            if args.threads is not None:
                settings = settings.with_overrides(threads=max(1, args.threads))
            script = cls(args, settings=settings, log_level=log_level)
        except Exception as exc:
            print(f"{cls.command or cls.__name__}: {exc}", file=sys.stderr)
            return EXIT_ERROR

        t0 = time.monotonic()
        try:
            result = script.run()
        except Exception as exc:
            elapsed = time.monotonic() - t0
            script.logger.debug("Traceback", exc_info=True)
            script.logger.error("Failed after %.2fs: %s", elapsed, exc)
            return EXIT_ERROR

        elapsed = time.monotonic() - t0
        script.logger.info("Completed in %.2fs (exit %d)", elapsed, script.exit_code)
        print(json.dumps(result, indent=2, default=str))
        return script.exit_code

    @classmethod
    def main(cls, argv: Optional[Sequence[str]] = None) -> int:
        """
        Standalone entrypoint. Wire up as:
            if __name__ == "__main__":
                sys.exit(MyScript.main())
        """
        args = cls.build_parser().parse_args(argv)
        return cls.execute(args)
