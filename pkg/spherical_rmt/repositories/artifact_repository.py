import hashlib
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from ..core.config import OutputFormat
from ..core.constants import MANIFEST_FILE
from ..core.logger import logger
from ..schemas.density import DensityGrid
from ..schemas.manifest import OutputRecord, RunManifest
from ..schemas.spectrum import SpectrumBatch
from ..utils.exceptions import ArtifactException


def sha256_of(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _dumps(payload: Union[BaseModel, Dict[str, Any], List[Any]]) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", by_alias=True)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class ArtifactRepository:
    """Writes run outputs under one directory and remembers their digests."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.records: List[OutputRecord] = []

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            error_msg = f"Error writing {path}: {str(e)}"
            logger.error(error_msg)
            raise ArtifactException(error_msg)

        self.records = [r for r in self.records if r.path != name]
        self.records.append(OutputRecord(path=name, sha256=sha256_of(path)))
        logger.info(f"Wrote {path}")
        return path

    def write_json(self, name: str, payload: Union[BaseModel, Dict[str, Any], List[Any]]) -> Path:
        return self.write_text(name, _dumps(payload))

    def write_grid(self, stem: str, grid: DensityGrid, fmt: OutputFormat = OutputFormat.CSV) -> Path:
        if OutputFormat(fmt) is OutputFormat.JSON:
            return self.write_json(f"{stem}.json", grid.to_json_dict())
        return self.write_text(f"{stem}.csv", grid.to_csv())

    def write_overlay_csv(
        self,
        name: str,
        points: np.ndarray,
        estimated: np.ndarray,
        reference: np.ndarray,
        meta: Optional[Dict[str, Any]] = None,
    ) -> Path:
        """Three-column `x,estimated,reference` table with a `#` metadata line."""
        buffer = io.StringIO()
        if meta:
            buffer.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        buffer.write("x,estimated,reference\n")
        for x, e, r in zip(points, estimated, reference):
            buffer.write(f"{x:.17g},{e:.17g},{r:.17g}\n")
        return self.write_text(name, buffer.getvalue())

    def write_samples(self, name: str, batch: SpectrumBatch, meta: Optional[Dict[str, Any]] = None) -> Path:
        """One sorted spectrum per row, prefixed by its sample index within the run."""
        buffer = io.StringIO()
        if meta:
            buffer.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        buffer.write(",".join(["index"] + [f"x{i + 1}" for i in range(batch.N)]) + "\n")
        for sample in batch.samples():
            values = ",".join(f"{x:.17g}" for x in sample.eigenvalues)
            buffer.write(f"{sample.seed_path[1]},{values}\n")
        return self.write_text(name, buffer.getvalue())

    def save_manifest(self, manifest: RunManifest) -> Path:
        manifest = manifest.model_copy(update={"outputs": sorted(self.records, key=lambda r: r.path)})
        path = self.out_dir / MANIFEST_FILE
        try:
            path.write_text(_dumps(manifest), encoding="utf-8")
        except OSError as e:
            raise ArtifactException(f"Error writing manifest {path}: {str(e)}")
        logger.info(f"Manifest saved with {len(manifest.outputs)} outputs")
        return path

    @staticmethod
    def verify_manifest(path: Path) -> List[str]:
        """Recompute every listed digest; returns the paths that are missing or differ."""
        path = Path(path)
        try:
            manifest = RunManifest.model_validate_json(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ArtifactException(f"Cannot read manifest {path}: {str(e)}")
        except ValidationError as e:
            raise ArtifactException(f"Malformed manifest {path}: {str(e)}")

        mismatches = []
        for record in manifest.outputs:
            target = path.parent / record.path
            if not target.is_file() or sha256_of(target) != record.sha256:
                logger.warning(f"Digest mismatch for {target}")
                mismatches.append(record.path)
        return mismatches
