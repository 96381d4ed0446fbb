#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
프로젝트 전체 설정 관리 모듈

환경 변수(.env 포함)로 로그 레벨/디렉토리, 출력 디렉토리, 기본 실행 설정 파일, 병렬 worker 수를 관리합니다.
실행 설정 파일(YAML)의 값이 있으면 그쪽이 우선합니다.
"""

import os
from typing import Optional

from dotenv import load_dotenv

# .env 파일 로드
load_dotenv()


def _int_env(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"환경 변수 {name} 는 정수여야 합니다: {raw!r}")


class Config:
    """프로젝트 설정 클래스"""

    # 로깅 설정
    LOG_LEVEL: str = os.getenv("IBC_LOG_LEVEL", "INFO")
    LOG_DIR: str = os.getenv("IBC_LOG_DIR", "logs")

    # 애플리케이션 설정
    APP_NAME: str = "ibc-dough"
    APP_VERSION: str = "1.0.0"

    # 실행 설정
    OUTPUT_DIR: str = os.getenv("IBC_OUTPUT_DIR", "runs")
    RUN_CONFIG: Optional[str] = os.getenv("IBC_RUN_CONFIG")
    # 설정되어 있으면 실행 설정의 demos.workers 보다 우선 (CLI --workers 가 가장 우선)
    WORKERS: Optional[int] = _int_env("IBC_WORKERS", None)

    @classmethod
    def default_run_config(cls) -> str:
        """IBC_RUN_CONFIG 가 없으면 패키지에 포함된 기본 설정"""
        if cls.RUN_CONFIG:
            return cls.RUN_CONFIG
        return os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs", "runs", "default.yaml")


# 전역 설정 인스턴스
config = Config()
