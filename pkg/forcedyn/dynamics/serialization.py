"""
Versioned XML container for model and policy files.

Layout::

    <forcedyn magic="FORCEDYN-MODEL" version="1" kind="dynamics">
      <config>
        <entry key="hidden_size">64</entry>
        ...
      </config>
      <array name="state_mean" shape="30">v0 v1 ...</array>
      ...
    </forcedyn>

Floats are written with ``repr`` so that arrays round-trip bit-exactly.
Dynamics arrays appear in the order ``state_mean, state_std, action_mean,
action_std, W1, b1, W2, b2, Wy, by``.
"""

import logging
from pathlib import Path
from typing import Dict, Mapping, Tuple, Union

import numpy as np
from lxml import etree

from ..core.exceptions import ModelFormatError, ModelVersionError
from . import lstm
from .model import DynamicsConfig, DynamicsModel, NormStats

logger = logging.getLogger(__name__)

MAGIC = "FORCEDYN-MODEL"
FORMAT_VERSION = "1"
NORM_ARRAYS = ("state_mean", "state_std", "action_mean", "action_std")

PathLike = Union[str, Path]


def save_container(
    path: PathLike,
    kind: str,
    config: Mapping[str, Union[int, float, str]],
    arrays: Mapping[str, np.ndarray],
) -> None:
    """
    Write a container file.

    Args:
        path: Destination
        kind: Payload kind (``dynamics`` or ``policy``)
        config: Scalar settings stored as text
        arrays: Named arrays, written in iteration order
    """
    root = etree.Element("forcedyn", magic=MAGIC, version=FORMAT_VERSION, kind=kind)
    config_element = etree.SubElement(root, "config")
    for key, value in config.items():
        entry = etree.SubElement(config_element, "entry", key=key)
        entry.text = repr(value) if isinstance(value, float) else str(value)
    for name, array in arrays.items():
        values = np.asarray(array, dtype=float)
        element = etree.SubElement(
            root, "array", name=name, shape=",".join(str(d) for d in values.shape)
        )
        element.text = " ".join(repr(float(v)) for v in values.reshape(-1))
    tree = etree.ElementTree(root)
    tree.write(str(path), xml_declaration=True, encoding="UTF-8", pretty_print=True)


def load_container(
    path: PathLike, kind: str
) -> Tuple[Dict[str, str], Dict[str, np.ndarray]]:
    """
    Read a container file.

    Args:
        path: Source file
        kind: Expected payload kind

    Returns:
        (config entries as text, named arrays)

    Raises:
        FileNotFoundError: If the file does not exist
        ModelVersionError: On a wrong magic string or version
        ModelFormatError: On malformed XML, a wrong kind or a corrupt array
    """
    source = str(path)
    if not Path(path).exists():
        raise FileNotFoundError(f"Model file not found: {source}")
    try:
        root = etree.parse(source).getroot()
    except etree.XMLSyntaxError as exc:
        raise ModelFormatError(f"Invalid XML: {exc}", path=source) from exc

    magic, version = root.get("magic"), root.get("version")
    if magic != MAGIC or version != FORMAT_VERSION:
        raise ModelVersionError(
            "Unsupported model file header",
            found=f"{magic} {version}",
            expected=f"{MAGIC} {FORMAT_VERSION}",
            path=source,
        )
    if root.get("kind") != kind:
        raise ModelFormatError(f"Expected a {kind} file, got {root.get('kind')!r}", path=source)

    config: Dict[str, str] = {}
    config_element = root.find("config")
    if config_element is not None:
        for entry in config_element.iterfind("entry"):
            config[str(entry.get("key"))] = (entry.text or "").strip()

    arrays: Dict[str, np.ndarray] = {}
    for element in root.iterfind("array"):
        name = str(element.get("name"))
        try:
            shape = tuple(int(d) for d in str(element.get("shape", "")).split(",") if d)
            values = np.array([float(v) for v in (element.text or "").split()], dtype=float)
            arrays[name] = values.reshape(shape)
        except ValueError as exc:
            raise ModelFormatError(f"Corrupt array {name!r}: {exc}", path=source) from exc
        if not np.all(np.isfinite(arrays[name])):
            raise ModelFormatError(f"Array {name!r} holds non-finite values", path=source)
    return config, arrays


def require_arrays(
    arrays: Mapping[str, np.ndarray], names: Tuple[str, ...], source: str
) -> None:
    """
    Raises:
        ModelFormatError: If any named array is missing
    """
    missing = [name for name in names if name not in arrays]
    if missing:
        raise ModelFormatError(f"Missing arrays: {missing}", path=source)


def save_model(model: DynamicsModel, path: PathLike) -> None:
    """Write a dynamics model."""
    stats = model.norm_stats
    arrays: Dict[str, np.ndarray] = {
        "state_mean": stats.state_mean,
        "state_std": stats.state_std,
        "action_mean": stats.action_mean,
        "action_std": stats.action_std,
    }
    arrays.update((name, model.params[name]) for name in lstm.PARAM_ORDER)
    config = {
        "hidden_size": model.config.hidden_size,
        "learning_rate": float(model.config.learning_rate),
        "seed": model.config.seed,
    }
    save_container(path, "dynamics", config, arrays)
    logger.info("Saved dynamics model to %s", path)


def load_model(path: PathLike) -> DynamicsModel:
    """
    Read a dynamics model written by ``save_model``.

    Raises:
        FileNotFoundError: If the file does not exist
        ModelVersionError: On a wrong header
        ModelFormatError: On missing, corrupt or mis-shaped arrays or config
    """
    source = str(path)
    config_text, arrays = load_container(path, "dynamics")
    require_arrays(arrays, NORM_ARRAYS + lstm.PARAM_ORDER, source)
    try:
        config = DynamicsConfig(
            hidden_size=int(config_text["hidden_size"]),
            learning_rate=float(config_text["learning_rate"]),
            seed=int(config_text["seed"]),
        )
        stats = NormStats(*(arrays[name] for name in NORM_ARRAYS))
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"Invalid model configuration: {exc}", path=source) from exc

    params = {name: arrays[name] for name in lstm.PARAM_ORDER}
    expected = lstm.init_params(
        stats.state_mean.size + stats.action_mean.size,
        config.hidden_size,
        stats.state_mean.size,
        np.random.default_rng(0),
    )
    for name in lstm.PARAM_ORDER:
        if params[name].shape != expected[name].shape:
            raise ModelFormatError(
                f"Parameter {name} has shape {params[name].shape}, "
                f"expected {expected[name].shape}",
                path=source,
            )
    return DynamicsModel(config, params, stats)
