"""
Configuration Loader and Registry.

Reads named model and HICODE presets from ``experiments.yaml``.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import yaml

from src.core.errors import ConfigError, ParameterError
from src.core.hicode import HicodeConfig
from src.core.louvain import LouvainConfig
from src.core.sbm import LayerSpec, Placement, SbmParams
from src.core.weaken import ReduceFactorRule, WeakenMethod


@dataclass
class ModelConfig:
    name: str  # preset identifier
    n: int
    layers: List[LayerSpec]
    placement: Placement
    seed: int
    notes: str

    def to_params(self, seed: Optional[int] = None) -> SbmParams:
        return SbmParams(self.n, tuple(self.layers), self.seed if seed is None else seed, self.placement)


@dataclass
class HicodePreset:
    name: str
    method: WeakenMethod
    rule: ReduceFactorRule
    layers: int
    refine_rounds: int
    convergence_nmi: float
    louvain: Dict[str, Any]

    def to_config(self, seed: int = 0, num_layers: Optional[int] = None) -> HicodeConfig:
        return HicodeConfig(
            num_layers=self.layers if num_layers is None else num_layers,
            base=LouvainConfig(**self.louvain),
            method=self.method,
            rule=self.rule,
            refine_rounds=self.refine_rounds,
            convergence_nmi=self.convergence_nmi,
            seed=seed,
        )


def _enum(enum_cls, value, where: str):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise ConfigError(f"{where}: {value!r} is not one of {choices}") from None


class ConfigLoader:

    DEFAULT_PATH = "experiments.yaml"

    @staticmethod
    def _load(config_path: str) -> dict:
        try:
            with open(config_path, "r") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"{config_path}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{config_path}: top level must be a mapping")
        return data

    @staticmethod
    def load_models(config_path: str = DEFAULT_PATH) -> List[ModelConfig]:
        data = ConfigLoader._load(config_path)
        models = []
        for entry in data.get("models", []):
            name = entry.get("name")
            try:
                models.append(ModelConfig(
                    name=name,
                    n=int(entry["n"]),
                    layers=[LayerSpec(int(l["communities"]), float(l["p"])) for l in entry["layers"]],
                    placement=_enum(Placement, entry.get("placement", "random-balanced"), f"model {name}"),
                    seed=int(entry.get("seed", 0)),
                    notes=entry.get("notes", ""),
                ))
                models[-1].to_params()
            except (KeyError, TypeError) as e:
                raise ConfigError(f"{config_path}: model {name!r} is missing field {e}") from None
            except ParameterError as e:
                raise ConfigError(f"{config_path}: model {name!r}: {e}") from None
        return models

    @staticmethod
    def load_hicode(config_path: str = DEFAULT_PATH) -> List[HicodePreset]:
        data = ConfigLoader._load(config_path)
        presets = []
        for entry in data.get("hicode", []):
            name = entry.get("name")
            presets.append(HicodePreset(
                name=name,
                method=_enum(WeakenMethod, entry.get("method", "reduce-edge"), f"hicode {name}"),
                rule=_enum(ReduceFactorRule, entry.get("rule", "background"), f"hicode {name}"),
                layers=int(entry.get("layers", 2)),
                refine_rounds=int(entry.get("refine_rounds", 5)),
                convergence_nmi=float(entry.get("convergence_nmi", 0.999)),
                louvain=dict(entry.get("louvain", {})),
            ))
        return presets

    @classmethod
    def get_model(cls, name: str, config_path: str = DEFAULT_PATH) -> ModelConfig:
        for model in cls.load_models(config_path):
            if model.name == name:
                return model
        raise ConfigError(f"Unknown model preset: {name}")

    @classmethod
    def get_hicode(cls, name: str, config_path: str = DEFAULT_PATH) -> HicodePreset:
        for preset in cls.load_hicode(config_path):
            if preset.name == name:
                return preset
        raise ConfigError(f"Unknown HICODE preset: {name}")
