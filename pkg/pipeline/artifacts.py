"""
실행 산출물 경로와 CSV 입출력

모든 산출물은 output_dir 아래 고정된 이름으로 쓰이며, 임시 파일에 쓴 뒤 rename 하므로
중간에 실패해도 반쯤 쓰인 파일이 남지 않습니다.
"""

import io
import logging
import os
from dataclasses import dataclass
from typing import Sequence

import pandas as pd

from utils.atomic_io import write_text_atomic

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


@dataclass(frozen=True)
class RunPaths:
    """output_dir 기준 산출물 경로"""

    output_dir: str

    def _path(self, *parts: str) -> str:
        return os.path.join(self.output_dir, *parts)

    @property
    def dataset(self) -> str:
        return self._path("demos.txt")

    @property
    def provenance(self) -> str:
        return self._path("demos_provenance.csv")

    def checkpoint(self, method: str, seed_index: int) -> str:
        return self._path("checkpoints", f"{method}-seed{seed_index}.ckpt")

    def history(self, method: str, seed_index: int) -> str:
        return self._path("histories", f"{method}-seed{seed_index}.csv")

    def evaluation(self, label: str, split: str) -> str:
        return self._path("eval", f"{label}-{split}.csv")

    @property
    def compare_csv(self) -> str:
        return self._path("compare.csv")

    @property
    def compare_text(self) -> str:
        return self._path("compare.txt")

    def diagnostic(self, name: str, extension: str = "csv") -> str:
        return self._path("diagnostics", f"{name}.{extension}")


def write_csv(path: str, table: pd.DataFrame) -> None:
    """DataFrame 을 CSV 로 원자적 기록 (고정 실수 형식이라 재실행 시 바이트 단위로 같음)"""
    buffer = io.StringIO()
    table.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    write_text_atomic(path, buffer.getvalue())
    logger.info(f"CSV written: {path} ({len(table)} rows)")


def history_table(history: Sequence[float], split: str = "train") -> pd.DataFrame:
    """에폭별 손실: epoch, split, loss"""
    return pd.DataFrame({
        "epoch": range(1, len(history) + 1),
        "split": split,
        "loss": list(history),
    }, columns=["epoch", "split", "loss"])
