import os
import shutil
import logging
import logging.handlers
import tempfile
import unittest
from datetime import datetime
from unittest import mock

import pytz

from common.log_context import run_context
from common.logging_config import setup_logging, custom_time

PACKAGES = ("numcore", "features", "seq2seq", "decode", "datakit", "trainer", "evalcli")


class TestLoggingConfig(unittest.TestCase):
    def setUp(self):
        # Create a temporary directory for logs
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        for name in ("test_logger_console", "test_logger_file", "test_logger_ctx") + PACKAGES:
            logger = logging.getLogger(name)
            for handler in logger.handlers:
                handler.close()
            logger.handlers = []
            logger.propagate = True
        shutil.rmtree(self.test_dir)

    def test_setup_logging_console_only(self):
        """Test logging setup without file output."""
        logger = setup_logging("test_logger_console")

        self.assertTrue(logger.handlers)
        stream_handlers = [h for h in logger.handlers if isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler)]
        self.assertTrue(stream_handlers)
        self.assertFalse(logger.propagate)

    def test_setup_logging_with_file(self):
        """Test logging setup with file output."""
        logger = setup_logging("test_logger_file", log_dir=self.test_dir)

        file_handlers = [h for h in logger.handlers if isinstance(h, logging.handlers.TimedRotatingFileHandler)]
        self.assertTrue(file_handlers)

        handler = file_handlers[0]
        self.assertEqual(handler.backupCount, 7)
        self.assertEqual(handler.when, 'MIDNIGHT')
        self.assertTrue(os.path.exists(os.path.join(self.test_dir, "fingerspell.log")))

    def test_package_loggers_share_handlers(self):
        """Library packages log through the application's handlers."""
        logger = setup_logging("evalcli", log_dir=self.test_dir)

        for package in PACKAGES:
            child = logging.getLogger(package)
            self.assertFalse(child.propagate)
            self.assertEqual(child.handlers, logger.handlers)

    def test_run_context_in_log_file(self):
        """Run context fields prefix each line written inside the context."""
        logger = setup_logging("test_logger_ctx", log_dir=self.test_dir)
        with run_context(protocol="SI", target=4, phase="train", epoch=3):
            logger.info("epoch finished")
        for handler in logger.handlers:
            handler.flush()

        with open(os.path.join(self.test_dir, "fingerspell.log"), encoding="utf-8") as fh:
            line = fh.read().strip().splitlines()[-1]
        self.assertIn("SI/target=4/train/epoch=3 | INFO:test_logger_ctx:epoch finished", line)

    def test_log_level_from_environment(self):
        with mock.patch.dict(os.environ, {"LOG_LEVEL": "WARNING"}):
            logger = setup_logging("test_logger_console")
        self.assertEqual(logger.level, logging.WARNING)

    def test_timezone_converter(self):
        """The custom time converter follows LOG_TIMEZONE."""
        with mock.patch.dict(os.environ, {"LOG_TIMEZONE": "Asia/Tokyo"}):
            log_time_tuple = custom_time()
            now_tokyo = datetime.now(pytz.timezone("Asia/Tokyo"))

        # Compare components roughly; minute boundaries are rare enough to ignore
        self.assertEqual(log_time_tuple.tm_hour, now_tokyo.hour)
        self.assertEqual(log_time_tuple.tm_min, now_tokyo.minute)


if __name__ == '__main__':
    unittest.main()
