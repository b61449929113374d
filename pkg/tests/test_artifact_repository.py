import json

import numpy as np
import pytest

from spherical_rmt.repositories.artifact_repository import ArtifactRepository, sha256_of
from spherical_rmt.schemas.manifest import RunManifest
from spherical_rmt.utils.exceptions import ArtifactException


def test_records_digest_of_each_output(out_dir):
    repository = ArtifactRepository(out_dir)
    path = repository.write_text("notes.txt", "hello\n")
    assert repository.records[0].path == "notes.txt"
    assert repository.records[0].sha256 == sha256_of(path)


def test_rewriting_a_file_keeps_one_record(out_dir):
    repository = ArtifactRepository(out_dir)
    repository.write_text("a.txt", "1\n")
    repository.write_text("a.txt", "2\n")
    assert len(repository.records) == 1


def test_overlay_csv_layout(out_dir):
    repository = ArtifactRepository(out_dir)
    path = repository.write_overlay_csv("o.csv", np.array([0.0, 0.5]), np.array([1.0, 2.0]), np.array([1.5, 2.5]), meta={"N": 4})
    assert path.read_text() == "# N=4\nx,estimated,reference\n0,1,1.5\n0.5,2,2.5\n"


def test_manifest_round_trip(out_dir):
    repository = ArtifactRepository(out_dir)
    repository.write_json("report.json", {"pass": True})
    manifest_path = repository.save_manifest(RunManifest(command="ratio", master_seed=1, N=[2], num_samples=10, num_streams=1))
    payload = json.loads(manifest_path.read_text())
    assert payload["outputs"][0]["path"] == "report.json"
    assert ArtifactRepository.verify_manifest(manifest_path) == []

    (out_dir / "report.json").unlink()
    assert ArtifactRepository.verify_manifest(manifest_path) == ["report.json"]


def test_unwritable_target_raises(out_dir):
    (out_dir / "taken").write_text("file, not a directory")
    with pytest.raises(ArtifactException):
        ArtifactRepository(out_dir).write_text("taken/inner.txt", "x")


def test_malformed_manifest_raises(out_dir):
    path = out_dir / "manifest.json"
    path.write_text('{"command": "ratio"}')
    with pytest.raises(ArtifactException):
        ArtifactRepository.verify_manifest(path)
