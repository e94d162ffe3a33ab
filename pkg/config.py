#!/usr/bin/env python3
"""
Configuration settings for the distillation toolkit
"""

import logging
import os
from logging.handlers import RotatingFileHandler

import coloredlogs
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

basedir = os.path.abspath(os.path.dirname(__file__))

LOG_FORMAT = '%(asctime)s %(levelname)s: %(message)s'


class Config:
    """Base configuration class"""

    # Coverage settings
    MAP_SIZE = int(os.environ.get('DISTILL_MAP_SIZE') or 65536)

    # Preprocessing: 300 KiB cutoff
    MAX_SEED_SIZE = int(os.environ.get('DISTILL_MAX_SEED_SIZE') or 300 * 1024)

    # Exact search refuses matrices with more live rows than this
    ORACLE_ROW_LIMIT = int(os.environ.get('DISTILL_ORACLE_ROW_LIMIT') or 20)

    # Hashing / trace conversion threads
    TRACE_WORKERS = int(os.environ.get('DISTILL_TRACE_WORKERS') or 4)

    # Logging
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'
    LOG_DIR = os.path.join(basedir, 'logs')
    TESTING = False

    @classmethod
    def init_logging(cls):
        """Install console logging on stderr"""
        coloredlogs.install(level=cls.LOG_LEVEL, fmt=LOG_FORMAT)


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False

    @classmethod
    def init_logging(cls):
        Config.init_logging()

        # Keep a rotating log of distillation runs
        os.makedirs(cls.LOG_DIR, exist_ok=True)
        file_handler = RotatingFileHandler(
            os.path.join(cls.LOG_DIR, 'distill.log'), maxBytes=1024 * 1024, backupCount=10
        )
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
        ))
        file_handler.setLevel(logging.INFO)
        logging.getLogger().addHandler(file_handler)


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    LOG_LEVEL = 'WARNING'
    TRACE_WORKERS = 2

    @classmethod
    def init_logging(cls):
        # pytest captures records through its own handler
        logging.getLogger().setLevel(cls.LOG_LEVEL)


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
