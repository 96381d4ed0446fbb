"""
진단 차트 생성

평가 점수 산점도(반죽 반지름 × 목표 거리), 에너지 지형 히트맵, Langevin 체인 궤적을
PNG 로 저장합니다. 화면 없이 돌도록 Agg 백엔드를 씁니다.
"""

import io
import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from utils.atomic_io import write_bytes_atomic  # noqa: E402

logger = logging.getLogger(__name__)


class ChartGenerator:
    """차트 생성 클래스"""

    dpi = 120

    def _save(self, fig: "plt.Figure", path: str) -> str:
        buffer = io.BytesIO()
        # 메타데이터에 생성 시각을 넣지 않아야 재실행 시 같은 바이트가 나옴
        fig.savefig(buffer, format="png", dpi=self.dpi, metadata={"Software": None})
        plt.close(fig)
        write_bytes_atomic(path, buffer.getvalue())
        logger.info(f"chart written: {path}")
        return path

    def score_scatter(self, table: pd.DataFrame, path: str, title: str = "") -> str:
        """과제별 점수: x = 반죽 반지름, y = 목표 거리, 색 = 정규화 EMD"""
        fig, ax = plt.subplots(figsize=(5, 4))
        points = ax.scatter(table["dough_radius"], table["target_distance"], c=table["score"],
                            cmap="viridis", vmin=min(0.0, float(table["score"].min())), vmax=1.0)
        fig.colorbar(points, ax=ax, label="normalized EMD")
        ax.set_xlabel("dough radius")
        ax.set_ylabel("target distance")
        ax.set_title(title or "per-configuration score")
        return self._save(fig, path)

    def energy_heatmap(self, table: pd.DataFrame, path: str, title: str = "") -> str:
        """(a0, a1, energy) 격자 표 -> 히트맵"""
        grid = table.pivot(index="a1", columns="a0", values="energy")
        fig, ax = plt.subplots(figsize=(5, 4))
        image = ax.imshow(grid.to_numpy(), origin="lower", aspect="auto", cmap="magma",
                          extent=(grid.columns.min(), grid.columns.max(), grid.index.min(), grid.index.max()))
        fig.colorbar(image, ax=ax, label="energy")
        ax.set_xlabel("a0")
        ax.set_ylabel("a1")
        ax.set_title(title or "energy landscape")
        return self._save(fig, path)

    def chain_traces(self, table: pd.DataFrame, path: str, title: str = "") -> str:
        """체인별 에너지 궤적"""
        fig, ax = plt.subplots(figsize=(5, 4))
        for _, rows in table.groupby("chain"):
            ax.plot(rows["step"].to_numpy(), rows["energy"].to_numpy(), linewidth=0.8, alpha=0.6)
        best = table.groupby("step")["energy"].min()
        ax.plot(best.index.to_numpy(), np.asarray(best), color="black", linewidth=1.5, label="best")
        ax.set_xlabel("step")
        ax.set_ylabel("energy")
        ax.legend()
        ax.set_title(title or "Langevin chains")
        return self._save(fig, path)
