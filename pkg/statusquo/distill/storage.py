"""Versioned .npz files for GameDistill datasets and models.

Every archive carries a ``header`` entry holding a JSON document with the
file format and version; arrays are stored as-is so values round-trip exactly.
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from ..envs.coin import OBSERVATION_SHAPE
from ..errors import StorageFormatError
from ..nn import LayerSpec, NetworkModel
from .models import WINDOW, OracleModel, SequenceDataset

logger = logging.getLogger(__name__)

DATASET_FORMAT = "statusquo-dataset"
MODEL_FORMAT = "statusquo-model"
VERSION = 1

PathLike = Union[str, Path]


def _write(path: PathLike, header: dict, **arrays):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as handle:
        np.savez(handle, header=np.array(json.dumps(header, sort_keys=True)), **arrays)
    logger.debug(f"Wrote {header['format']} to {path}")


def _read(path: PathLike, expected_format: str):
    try:
        archive = np.load(Path(path), allow_pickle=False)
    except (OSError, ValueError) as e:
        raise StorageFormatError(f"{path} is not a readable archive: {e}") from e
    with archive:
        if "header" not in archive.files:
            raise StorageFormatError(f"{path} has no header")
        try:
            header = json.loads(str(archive["header"]))
        except json.JSONDecodeError as e:
            raise StorageFormatError(f"{path} has a corrupt header") from e
        if header.get("format") != expected_format:
            raise StorageFormatError(f"{path} is a {header.get('format')!r} file, expected {expected_format!r}")
        if header.get("version") != VERSION:
            raise StorageFormatError(f"{path} has unsupported version {header.get('version')!r}")
        arrays = {name: archive[name] for name in archive.files if name != "header"}
    return header, arrays


def save_dataset(path: PathLike, dataset: SequenceDataset):
    header = {
        "format": DATASET_FORMAT,
        "version": VERSION,
        "agent": dataset.agent,
        "count": len(dataset),
        "window": WINDOW,
        "obs_shape": list(OBSERVATION_SHAPE),
    }
    _write(
        path,
        header,
        states=dataset.states,
        actions=dataset.actions,
        own_reward=dataset.own_reward,
        opponent_reward=dataset.opponent_reward,
        coin_color=dataset.coin_color,
        padded=dataset.padded,
    )


def load_dataset(path: PathLike) -> SequenceDataset:
    header, arrays = _read(path, DATASET_FORMAT)
    if header.get("window") != WINDOW or tuple(header.get("obs_shape", ())) != OBSERVATION_SHAPE:
        raise StorageFormatError(f"{path} holds windows of an unsupported shape")
    try:
        dataset = SequenceDataset(header["agent"], **arrays)
    except (KeyError, TypeError, ValueError) as e:
        raise StorageFormatError(f"{path} is missing dataset fields: {e}") from e
    if len(dataset) != header["count"]:
        raise StorageFormatError(f"{path} declares {header['count']} rows but holds {len(dataset)}")
    return dataset


def save_model(path: PathLike, oracle: OracleModel):
    header = {
        "format": MODEL_FORMAT,
        "version": VERSION,
        "role": oracle.role,
        "topology": oracle.network.topology(),
        "training_accuracy": oracle.training_accuracy,
    }
    _write(path, header, parameters=oracle.network.parameters)


def load_model(path: PathLike) -> OracleModel:
    header, arrays = _read(path, MODEL_FORMAT)
    try:
        layers = [LayerSpec.from_dict(layer) for layer in header["topology"]]
        network = NetworkModel(layers, arrays["parameters"])
        return OracleModel(network, header["role"], header.get("training_accuracy"))
    except (KeyError, TypeError, ValueError) as e:
        raise StorageFormatError(f"{path} does not describe a valid oracle: {e}") from e
