"""
툴킷 공통 오류 처리 모듈

자동미분, 시뮬레이터, 학습, 평가 단계에서 발생하는 오류를 하나의 계층으로 묶고
CLI 종료 코드(0 성공, 2 사용자/설정 오류, 3 I/O 오류, 4 수치 오류)로 변환합니다.
"""

import logging
import time
import traceback
from enum import Enum
from typing import Any, Dict, Optional

logger = logging.getLogger("ErrorHandler")

EXIT_OK = 0
EXIT_USER_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_NUMERIC_ERROR = 4


class ErrorSeverity(Enum):
    """오류 심각도 수준"""
    LOW = 1  # 기록 후 계속 진행 (예: 데모 한 개 건너뜀)
    MEDIUM = 2  # 입력/설정 문제, 사용자가 수정 가능
    HIGH = 3  # 실행 중단이 필요한 오류
    CRITICAL = 4  # 수치 발산 등 결과를 신뢰할 수 없는 상태


class IbcError(Exception):
    """툴킷 기본 오류 클래스"""

    exit_code: int = EXIT_USER_ERROR

    def __init__(self, message: str, severity: ErrorSeverity = ErrorSeverity.MEDIUM,
                 error_code: str = "IBC_ERROR", details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.severity = severity
        self.error_code = error_code
        self.details = details or {}
        self.timestamp = time.time()

    def to_dict(self) -> Dict[str, Any]:
        """오류 정보를 딕셔너리로 변환"""
        return {
            "error_code": self.error_code,
            "message": self.message,
            "severity": self.severity.name,
            "details": self.details,
            "exit_code": self.exit_code,
            "timestamp": self.timestamp,
        }


class ConfigurationError(IbcError):
    """실행 설정 관련 오류"""

    def __init__(self, message: str, config_key: Optional[str] = None):
        super().__init__(
            message,
            severity=ErrorSeverity.HIGH,
            error_code="CONFIG_ERROR",
            details={"config_key": config_key} if config_key else {},
        )
        self.config_key = config_key


class ValidationError(IbcError):
    """입력 데이터 검증 오류"""

    def __init__(self, message: str, field: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        details = dict(details or {})
        if field:
            details["field"] = field
        super().__init__(
            message,
            severity=ErrorSeverity.MEDIUM,
            error_code="VALIDATION_ERROR",
            details=details,
        )


class ShapeError(ValidationError):
    """연산 종류와 입력 shape 가 맞지 않을 때"""

    def __init__(self, kind: str, *shapes: Any):
        shape_text = " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(
            f"shape mismatch in '{kind}': {shape_text}",
            details={"kind": kind, "shapes": [tuple(s) for s in shapes]},
        )
        self.error_code = "SHAPE_ERROR"
        self.kind = kind


class CheckpointFormatError(IbcError):
    """체크포인트 파일 형식/버전/모델 종류 불일치"""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(
            message,
            severity=ErrorSeverity.HIGH,
            error_code="CHECKPOINT_FORMAT",
            details={"path": path} if path else {},
        )


class DatasetIOError(IbcError):
    """데이터셋/결과 파일 읽기·쓰기 실패"""

    exit_code = EXIT_IO_ERROR

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(
            message,
            severity=ErrorSeverity.HIGH,
            error_code="IO_ERROR",
            details={"path": path} if path else {},
        )


class NumericalError(IbcError):
    """비유한 값(NaN/inf) 등 수치 실패"""

    exit_code = EXIT_NUMERIC_ERROR

    def __init__(self, message: str, **where: Any):
        super().__init__(
            message,
            severity=ErrorSeverity.CRITICAL,
            error_code="NUMERIC_ERROR",
            details=dict(where),
        )


class ConvergenceError(NumericalError):
    """반복 알고리즘이 허용 횟수 안에 수렴하지 못함"""

    def __init__(self, message: str, violation: float, iterations: int):
        super().__init__(message, violation=violation, iterations=iterations)
        self.error_code = "CONVERGENCE_ERROR"
        self.violation = violation


class ErrorHandler:
    """오류 처리 및 관리 클래스"""

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        """예외를 CLI 종료 코드로 변환"""
        if isinstance(error, IbcError):
            return error.exit_code
        if isinstance(error, (FileNotFoundError, IsADirectoryError, PermissionError)):
            return EXIT_IO_ERROR
        if isinstance(error, OSError):
            return EXIT_IO_ERROR
        if isinstance(error, FloatingPointError):
            return EXIT_NUMERIC_ERROR
        return EXIT_USER_ERROR

    @staticmethod
    def handle_error(error: BaseException, context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        발생한 오류를 기록하고 표준화된 응답을 생성

        Args:
            error: 발생한 예외
            context: 오류 컨텍스트 정보 (명령 이름, 설정 경로 등)

        Returns:
            오류 처리 결과 딕셔너리 (exit_code 포함)
        """
        context = context or {}
        error_info: Dict[str, Any] = {
            "success": False,
            "error_type": type(error).__name__,
            "message": str(error),
            "context": context,
        }

        if logger.isEnabledFor(logging.DEBUG):
            error_info["stack_trace"] = traceback.format_exc()

        if isinstance(error, IbcError):
            error_info.update({
                "error_code": error.error_code,
                "severity": error.severity.name,
                "details": error.details,
            })
            if error.severity == ErrorSeverity.CRITICAL:
                logger.critical(f"Critical Error: {error} {error.details}")
            elif error.severity == ErrorSeverity.HIGH:
                logger.error(f"High Severity Error: {error}")
            elif error.severity == ErrorSeverity.MEDIUM:
                logger.warning(f"Medium Severity Error: {error}")
            else:
                logger.info(f"Low Severity Error: {error}")
        else:
            logger.error(f"Unhandled Error: {error}", exc_info=True)

        return {
            "status": "error",
            "exit_code": ErrorHandler.exit_code_for(error),
            "error_info": error_info,
        }
