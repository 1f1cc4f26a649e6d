"""
Tests for run manifests.
"""

import hashlib
from pathlib import Path

import yaml

from forcedyn.experiments.manifest import (
    ManifestRecorder,
    RunManifest,
    content_hash,
    file_sha256,
    load_manifest,
)


class TestHashes:
    """Test file and content hashes."""

    def test_file_sha256(self, tmp_path: Path) -> None:
        """Test the hex digest of a file."""
        path = tmp_path / "a.txt"
        path.write_bytes(b"forces\n")
        assert file_sha256(path) == hashlib.sha256(b"forces\n").hexdigest()

    def test_content_hash_ignores_order(self) -> None:
        """Test that the combined hash depends on pairs, not their order."""
        pairs = [("a.csv", "11"), ("b.csv", "22")]
        assert content_hash(pairs) == content_hash(list(reversed(pairs)))
        assert content_hash(pairs) != content_hash([("a.csv", "11"), ("b.csv", "23")])


class TestRecorder:
    """Test recording and writing manifests."""

    def test_write(self, run_dir: Path) -> None:
        """Test relative paths, hashes and both manifest copies."""
        (run_dir / "data").mkdir(parents=True)
        source = run_dir / "data" / "round-15.grid.csv"
        source.write_text("n=2\n")
        target = run_dir / "eval.csv"
        target.write_text("hole,data_fraction,err\n")

        recorder = ManifestRecorder(run_dir, "eval", "c0ffee", seed=3)
        recorder.read(source)
        recorder.wrote(target)
        recorder.wrote(target)
        manifest = recorder.write()

        assert manifest.inputs == ["data/round-15.grid.csv"]
        assert manifest.outputs == {"eval.csv": file_sha256(target)}
        assert manifest.seed == 3
        assert load_manifest(run_dir / "manifest.yaml") == manifest
        assert load_manifest(run_dir / "manifests" / "eval.yaml") == manifest

    def test_no_timestamps(self, run_dir: Path) -> None:
        """Test that rewriting with the same files gives identical bytes."""
        run_dir.mkdir()
        (run_dir / "out.csv").write_text("x\n")
        first = ManifestRecorder(run_dir, "report", "abc", 0)
        first.wrote(run_dir / "out.csv")
        first.write()
        before = (run_dir / "manifest.yaml").read_bytes()
        second = ManifestRecorder(run_dir, "report", "abc", 0)
        second.wrote(run_dir / "out.csv")
        second.write()
        assert (run_dir / "manifest.yaml").read_bytes() == before
        assert set(yaml.safe_load(before)) == {
            "command",
            "config_hash",
            "seed",
            "input_hash",
            "inputs",
            "outputs",
        }

    def test_dict_round_trip(self) -> None:
        """Test to_dict and from_dict."""
        manifest = RunManifest("gen-data", "h", 1, "i", ["a"], {"b": "c"})
        assert RunManifest.from_dict(manifest.to_dict()) == manifest
