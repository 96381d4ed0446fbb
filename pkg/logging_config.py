#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
로깅 구성 모듈

CLI 와 모든 tools.* / pipeline.* 모듈이 사용할 표준 로깅 설정을 제공합니다.
콘솔 출력은 stderr 로 보내 stdout 의 명령 요약과 섞이지 않게 합니다.
"""

import logging
import logging.config
import os
from datetime import datetime
from typing import Optional

PACKAGE_LOGGERS = ("ibc_dough", "tools", "pipeline", "utils", "configs")

# 콘솔 핸들러 레벨 (setup_logging 전에는 INFO)
_console_level = logging.INFO


def setup_logging(log_level: str = "INFO", log_dir: Optional[str] = "logs") -> None:
    """
    프로젝트 전체 로깅 설정

    Args:
        log_level: 콘솔 로그 레벨 (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_dir: 로그 파일 저장 디렉토리 (None 이면 파일 로그 없음)
    """
    global _console_level
    log_level = log_level.upper()
    level = logging.getLevelName(log_level)
    _console_level = level if isinstance(level, int) else logging.INFO
    handlers = ["console"]
    handler_config = {
        'console': {
            'level': log_level,
            'class': 'logging.StreamHandler',
            'formatter': 'standard',
            'stream': 'ext://sys.stderr'
        },
    }

    log_filename = None
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        # 로그 파일명 (날짜별)
        log_filename = os.path.join(log_dir, f'ibc_dough_{datetime.now().strftime("%Y%m%d")}.log')
        handler_config['file'] = {
            'level': 'DEBUG',
            'class': 'logging.handlers.RotatingFileHandler',
            'formatter': 'detailed',
            'filename': log_filename,
            'maxBytes': 10485760,  # 10MB
            'backupCount': 5,
            'encoding': 'utf-8'
        }
        handlers.append('file')

    logging_config = {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'standard': {
                'format': '%(asctime)s [%(levelname)s] %(name)s: %(message)s',
                'datefmt': '%Y-%m-%d %H:%M:%S'
            },
            'detailed': {
                'format': '%(asctime)s [%(levelname)s] %(name)s:%(funcName)s:%(lineno)d: %(message)s',
                'datefmt': '%Y-%m-%d %H:%M:%S'
            },
        },
        'handlers': handler_config,
        'loggers': {
            **{name: {'handlers': handlers, 'level': 'DEBUG', 'propagate': False} for name in PACKAGE_LOGGERS},
            'matplotlib': {'level': 'WARNING'},
        },
        'root': {
            'level': log_level,
            'handlers': handlers
        }
    }

    logging.config.dictConfig(logging_config)

    logger = logging.getLogger('ibc_dough')
    logger.debug(f"로깅 시스템이 초기화되었습니다. 로그 레벨: {log_level}")
    if log_filename:
        logger.debug(f"로그 파일: {log_filename}")


def get_logger(name: str) -> logging.Logger:
    """
    로거 인스턴스를 반환합니다.

    Args:
        name: 로거 이름 (일반적으로 모듈명)

    Returns:
        로거 인스턴스
    """
    return logging.getLogger(f'ibc_dough.{name}')


def progress_enabled() -> bool:
    """진행 표시줄(tqdm)은 콘솔 레벨이 INFO 이하일 때만 표시"""
    return _console_level <= logging.INFO
