"""
Configuration models.

Flat ``key=value`` config files map onto these models; explicit
command-line flags take precedence over file values, which take
precedence over the defaults declared here.
"""

from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from topictiler.errors import ConfigError


class SegmenterConfig(BaseModel):
    """Parameters of the window/similarity/smoothing pipeline"""
    window_size: int = Field(default=25, ge=1, description="Non-stopword tokens per window")
    step: float = Field(
        default=0.5, gt=0.0, le=1.0,
        description="Fraction of the distance to the neighbours' midpoint moved per smoothing iteration"
    )
    iterations: int = Field(default=2, ge=0, description="Number of smoothing iterations")
    min_relevance: Optional[float] = Field(
        default=None, ge=0.0,
        description="Drop boundaries whose relevance is below this value"
    )
    max_boundaries: Optional[int] = Field(
        default=None, ge=0,
        description="Keep at most this many boundaries, the most relevant ones"
    )
    dice_product: bool = Field(
        default=False,
        description="Use the product of squared norms as the Dice denominator"
    )


class ExtractionConfig(BaseModel):
    """Parameters of the concept cut extraction"""
    a: float = Field(
        default=0.5, ge=0.0, le=1.0,
        description="Weight of informativeness against genericity in the combined score"
    )
    unweighted_average: bool = Field(
        default=False,
        description="Average children's scores without weighting by covered leaf paths"
    )
    hypernym_only: bool = Field(
        default=False,
        description="Measure concept distances through common ancestors only"
    )


class RunConfig(BaseModel):
    lexicon: Optional[str] = Field(default=None, description="Lexicon TSV path")
    stoplist: Optional[str] = Field(default=None, description="Stoplist path")
    taxonomy: Optional[str] = Field(default=None, description="Taxonomy path")
    segmenter: SegmenterConfig = Field(default_factory=SegmenterConfig)
    extraction: ExtractionConfig = Field(default_factory=ExtractionConfig)
    seed: Optional[int] = Field(default=None, description="Random seed for synthesis commands")
    out: Optional[str] = Field(default=None, description="Output file or directory")
    workers: int = Field(default=4, ge=1, description="Documents processed concurrently")

    @classmethod
    def build(cls, file_values: Optional[Dict[str, Any]] = None, **flags: Any) -> "RunConfig":
        """Merge config-file values under explicit flags; None flags are unset"""
        merged: Dict[str, Any] = dict(file_values or {})
        merged.update({key: value for key, value in flags.items() if value is not None})

        nested: Dict[str, Any] = {"segmenter": {}, "extraction": {}}
        for key, value in merged.items():
            key = KEY_ALIASES.get(key, key)
            if key in SegmenterConfig.model_fields:
                nested["segmenter"][key] = value
            elif key in ExtractionConfig.model_fields:
                nested["extraction"][key] = value
            elif key in cls.model_fields and key not in ("segmenter", "extraction"):
                nested[key] = value
            else:
                raise ConfigError(f"unknown configuration key {key!r}")
        return cls.model_validate(nested)


KEY_ALIASES = {
    "lambda": "step",
    "smooth_iters": "iterations",
    "unweighted_g": "unweighted_average",
}


def load_config_file(path: str) -> Dict[str, str]:
    """Read ``key=value`` lines; ``#`` starts a comment"""
    values: Dict[str, str] = {}
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e

    for line_number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{line_number}: expected key=value")
        values[key.strip()] = value.strip()
    return values
