# utils/seeding.py
# -*- coding: utf-8 -*-
"""
전역 시드에서 이름 붙은 하위 시드를 계층적으로 파생하는 공통 유틸.

derive_rng(seed, "train", "implicit-langevin", epoch, batch) 처럼 부르면 같은 인자에
항상 같은 numpy Generator 가 나오므로, 어느 단계든 따로 재실행해도 결과가 같습니다.
이름(문자열)은 crc32 로, 정수는 그대로 spawn_key 에 들어갑니다.
"""
import zlib
from typing import Tuple, Union

import numpy as np

Key = Union[str, int]


def _key_to_int(key: Key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    if int(key) < 0:
        raise ValueError(f"seed keys must be non-negative, got {key}")
    return int(key)


def derive_seed_sequence(seed: int, *keys: Key) -> np.random.SeedSequence:
    spawn_key: Tuple[int, ...] = tuple(_key_to_int(k) for k in keys)
    return np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key)


def derive_rng(seed: int, *keys: Key) -> np.random.Generator:
    """(seed, keys...) 로부터 결정적인 Generator 생성"""
    return np.random.default_rng(derive_seed_sequence(seed, *keys))


def derive_int_seed(seed: int, *keys: Key) -> int:
    """하위 설정에 넘길 정수 시드 (32bit)"""
    return int(derive_seed_sequence(seed, *keys).generate_state(1, dtype=np.uint32)[0])
