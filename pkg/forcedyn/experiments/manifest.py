"""
Run manifests.

Every command writes a manifest listing the configuration hash, the root
seed, a combined content hash of the files it read and the SHA-256 of every
file it wrote. Paths are relative to the run directory. Manifests hold no
timestamps, so reruns with identical inputs produce identical manifests.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Tuple, Union

import yaml

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def file_sha256(path: PathLike) -> str:
    """Hex SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def content_hash(entries: Iterable[Tuple[str, str]]) -> str:
    """Combined hash of ``(relative path, file hash)`` pairs, order-independent."""
    digest = hashlib.sha256()
    for name, file_hash in sorted(entries):
        digest.update(f"{name}\0{file_hash}\n".encode("utf-8"))
    return digest.hexdigest()


@dataclass
class RunManifest:
    """
    Provenance of one command run.

    Attributes:
        command: Subcommand name
        config_hash: SHA-256 of the canonical configuration
        seed: Root seed
        input_hash: Combined content hash of the files read
        inputs: Relative paths of the files read, sorted
        outputs: Relative path to SHA-256 of every file written
    """

    command: str
    config_hash: str
    seed: int
    input_hash: str = ""
    inputs: List[str] = field(default_factory=list)
    outputs: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Plain mapping for YAML output."""
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "input_hash": self.input_hash,
            "inputs": list(self.inputs),
            "outputs": dict(sorted(self.outputs.items())),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        """Inverse of ``to_dict``."""
        return cls(
            command=str(data["command"]),
            config_hash=str(data["config_hash"]),
            seed=int(data["seed"]),
            input_hash=str(data.get("input_hash", "")),
            inputs=[str(v) for v in data.get("inputs", [])],
            outputs={str(k): str(v) for k, v in (data.get("outputs") or {}).items()},
        )


class ManifestRecorder:
    """Collects the files a command reads and writes inside a run directory."""

    def __init__(self, root: PathLike, command: str, config_hash: str, seed: int) -> None:
        self.root = Path(root)
        self.command = command
        self.config_hash = config_hash
        self.seed = seed
        self._inputs: Dict[str, str] = {}
        self._outputs: List[Path] = []

    def _relative(self, path: PathLike) -> str:
        resolved = Path(path).resolve()
        try:
            return resolved.relative_to(self.root.resolve()).as_posix()
        except ValueError:
            return resolved.as_posix()

    def read(self, path: PathLike) -> Path:
        """Record an input file and return its path."""
        self._inputs[self._relative(path)] = file_sha256(path)
        return Path(path)

    def wrote(self, path: PathLike) -> Path:
        """Record an output file and return its path."""
        if Path(path) not in self._outputs:
            self._outputs.append(Path(path))
        return Path(path)

    def build(self) -> RunManifest:
        """Hash the recorded files into a manifest."""
        return RunManifest(
            command=self.command,
            config_hash=self.config_hash,
            seed=self.seed,
            input_hash=content_hash(self._inputs.items()),
            inputs=sorted(self._inputs),
            outputs={self._relative(path): file_sha256(path) for path in self._outputs},
        )

    def write(self) -> RunManifest:
        """
        Write ``manifest.yaml`` and ``manifests/<command>.yaml`` to the run
        directory.
        """
        manifest = self.build()
        text = yaml.safe_dump(manifest.to_dict(), sort_keys=False, default_flow_style=False)
        (self.root / "manifests").mkdir(parents=True, exist_ok=True)
        (self.root / "manifests" / f"{self.command}.yaml").write_text(text, encoding="utf-8")
        (self.root / "manifest.yaml").write_text(text, encoding="utf-8")
        logger.info("Wrote manifest for %s with %d outputs", self.command, len(manifest.outputs))
        return manifest


def load_manifest(path: PathLike) -> RunManifest:
    """
    Read a manifest file.

    Raises:
        FileNotFoundError: If the file does not exist
        KeyError: If a required field is missing
    """
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    return RunManifest.from_dict(data)
