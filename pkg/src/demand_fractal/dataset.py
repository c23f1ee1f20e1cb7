"""Loader for the demand datasets shipped with the package."""

from __future__ import annotations

from importlib import resources
from typing import IO

import pandas as pd

TABLE1_FILENAME = "table1.csv"


class DemandDatasetLoader:
    def __init__(
        self,
        filename: str = TABLE1_FILENAME,
        package: str = "demand_fractal.data",
    ) -> None:
        self._filename = filename
        self._package = package
        self._frame: pd.DataFrame | None = None

    def _open_resource(self) -> IO[str]:
        try:
            resource = resources.files(self._package).joinpath(self._filename)
            return resource.open("r", encoding="utf-8")
        except FileNotFoundError as exc:
            raise FileNotFoundError(
                f"Dataset not found in package: {self._package}/{self._filename}"
            ) from exc

    def load(self) -> pd.DataFrame:
        """Return the dataset as a frame indexed by hour.

        The frame is cached; callers get a copy so the cache stays intact.
        """
        if self._frame is None:
            with self._open_resource() as f:
                self._frame = pd.read_csv(f, comment="#").set_index("hour")
        return self._frame.copy()
