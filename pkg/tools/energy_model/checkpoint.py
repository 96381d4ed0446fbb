"""
파라미터 체크포인트 직렬화

형식은 configs.py 의 설명대로 평탄한 버전 관리 바이너리입니다. 층마다 이름을 함께
저장하므로 모델 종류 태그와 이름으로 파라미터 묶음을 복원합니다. float64 원본 바이트를 그대로 쓰므로
저장 → 로드 결과가 비트 단위로 같습니다.
"""

import logging
import struct
from collections import OrderedDict
from typing import List, Tuple

import numpy as np

from tools.error_handler import CheckpointFormatError, DatasetIOError
from utils.atomic_io import write_bytes_atomic

from .configs import (
    CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
    ERROR_BAD_KIND,
    ERROR_BAD_MAGIC,
    ERROR_BAD_VERSION,
    ERROR_TRUNCATED,
    LOG_CHECKPOINT_LOADED,
    LOG_CHECKPOINT_SAVED,
    MODEL_KINDS,
)
from .core import EnergyParams
from .layers import ParamSet

logger = logging.getLogger(__name__)

_KIND_NAMES = {code: name for name, code in MODEL_KINDS.items()}


def encode_checkpoint(kind: str, names: List[str], arrays: List[np.ndarray]) -> bytes:
    """헤더 + 층별 (shape, data) 바이트열"""
    if kind not in MODEL_KINDS:
        raise CheckpointFormatError(f"unknown model kind '{kind}'")
    chunks = [CHECKPOINT_MAGIC, struct.pack("<III", CHECKPOINT_VERSION, MODEL_KINDS[kind], len(arrays))]
    for name, array in zip(names, arrays):
        array = np.ascontiguousarray(array, dtype="<f8")
        # 층 이름 길이 + 이름: 로드 시 배열 의미를 복원하는 데 필요
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}I", *array.shape))
        chunks.append(array.tobytes(order="C"))
    return b"".join(chunks)


def decode_checkpoint(blob: bytes, path: str = "<bytes>") -> Tuple[str, "OrderedDict[str, np.ndarray]"]:
    """encode_checkpoint 의 역변환"""
    if not blob.startswith(CHECKPOINT_MAGIC):
        raise CheckpointFormatError(ERROR_BAD_MAGIC.format(path), path=path)
    offset = len(CHECKPOINT_MAGIC)

    def take(fmt: str) -> Tuple[int, ...]:
        nonlocal offset
        size = struct.calcsize(fmt)
        if offset + size > len(blob):
            raise CheckpointFormatError(ERROR_TRUNCATED.format(path), path=path)
        values = struct.unpack_from(fmt, blob, offset)
        offset += size
        return values

    version, kind_code, count = take("<III")
    if version != CHECKPOINT_VERSION:
        raise CheckpointFormatError(ERROR_BAD_VERSION.format(version, CHECKPOINT_VERSION), path=path)
    if kind_code not in _KIND_NAMES:
        raise CheckpointFormatError(f"unknown model kind code {kind_code}", path=path)

    arrays: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for _ in range(count):
        (name_len,) = take("<I")
        if offset + name_len > len(blob):
            raise CheckpointFormatError(ERROR_TRUNCATED.format(path), path=path)
        name = blob[offset:offset + name_len].decode("utf-8")
        offset += name_len
        (ndim,) = take("<I")
        shape = take(f"<{ndim}I") if ndim else ()
        nbytes = 8 * int(np.prod(shape, dtype=np.int64))
        if offset + nbytes > len(blob):
            raise CheckpointFormatError(ERROR_TRUNCATED.format(path), path=path)
        data = np.frombuffer(blob, dtype="<f8", count=nbytes // 8, offset=offset).reshape(shape)
        offset += nbytes
        arrays[name] = data.astype(np.float64, copy=True)
    if offset != len(blob):
        raise CheckpointFormatError(f"trailing bytes after checkpoint payload: {path}", path=path)
    return _KIND_NAMES[kind_code], arrays


def save_checkpoint(path: str, params: ParamSet, kind: str = "") -> None:
    kind = kind or params.MODEL_KIND
    write_bytes_atomic(path, encode_checkpoint(kind, params.names, params.as_list()))
    logger.info(LOG_CHECKPOINT_SAVED.format(path, len(params.names), kind))


def read_checkpoint(path: str) -> Tuple[str, "OrderedDict[str, np.ndarray]"]:
    try:
        with open(path, "rb") as f:
            blob = f.read()
    except OSError as e:
        raise DatasetIOError(f"cannot read checkpoint {path}: {e}", path=path) from e
    kind, arrays = decode_checkpoint(blob, path)
    logger.info(LOG_CHECKPOINT_LOADED.format(path, len(arrays), kind))
    return kind, arrays


def load_energy_params(path: str) -> EnergyParams:
    kind, arrays = read_checkpoint(path)
    if kind != EnergyParams.MODEL_KIND:
        raise CheckpointFormatError(ERROR_BAD_KIND.format(kind, EnergyParams.MODEL_KIND), path=path)
    return EnergyParams(arrays)
