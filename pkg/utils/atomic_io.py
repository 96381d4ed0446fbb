# utils/atomic_io.py
# -*- coding: utf-8 -*-
"""
결과 파일을 임시 파일에 쓴 뒤 os.replace 로 교체하는 공통 유틸.
중간에 실패해도 이전 결과 파일이 반쯤 쓰인 상태로 남지 않습니다.
"""
import os
import tempfile

from tools.error_handler import DatasetIOError


def write_bytes_atomic(path: str, blob: bytes) -> None:
    """임시 파일에 쓴 뒤 rename"""
    directory = os.path.dirname(os.path.abspath(path))
    tmp_path = None
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="-" + os.path.basename(path))
        with os.fdopen(fd, "wb") as f:
            f.write(blob)
        os.replace(tmp_path, path)
    except OSError as e:
        if tmp_path and os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise DatasetIOError(f"cannot write {path}: {e}", path=path) from e


def write_text_atomic(path: str, text: str) -> None:
    write_bytes_atomic(path, text.encode("utf-8"))
