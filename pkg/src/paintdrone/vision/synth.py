"""Seeded synthetic curb images: alternating painted blocks, some partly worn.

A worn block keeps its paint on the top rows and fades to bare grey
concrete (intensity 0) below. Every pixel gets Gaussian noise, then the
image is quantised to 8 bits.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .pgm import from_gray, write_pgm
from .segment import COLOR_NAMES

GROUND_TRUTH_COLUMNS = ("image", "block_index", "action", "color")


class CorpusConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusSpec:
    count: int = 200
    height: int = 48
    width: int = 192
    stripe_min: int = 20
    stripe_max: int = 32
    erasure_rate: float = 0.2
    noise_std: float = 0.1
    # Fraction of a worn block's height that has faded to grey.
    worn_min: float = 0.4
    worn_max: float = 0.9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.count < 0:
            raise CorpusConfigError("count must be >= 0")
        if self.height < 1 or self.width < 1:
            raise CorpusConfigError("image size must be positive")
        if not 1 <= self.stripe_min <= self.stripe_max:
            raise CorpusConfigError("need 1 <= stripe_min <= stripe_max")
        if self.width < 3 * self.stripe_min:
            raise CorpusConfigError("image too narrow for three blocks")
        if not 0.0 <= self.erasure_rate <= 1.0:
            raise CorpusConfigError("erasure_rate must be in [0, 1]")
        if self.noise_std < 0:
            raise CorpusConfigError("noise_std must be >= 0")
        if not 0.0 < self.worn_min <= self.worn_max <= 1.0:
            raise CorpusConfigError("need 0 < worn_min <= worn_max <= 1")


@dataclass(frozen=True)
class SyntheticImage:
    name: str
    pixels: np.ndarray  # uint8
    widths: tuple[int, ...]
    colors: tuple[int, ...]  # painted colour per block, +1 white / -1 black
    erased: tuple[int, ...]  # 1-based indices of worn blocks

    def ground_truth(self) -> list[tuple[str, int, str, str]]:
        worn = set(self.erased)
        return [(self.name, i, "repaint" if i in worn else "keep", COLOR_NAMES[c])
                for i, c in enumerate(self.colors, start=1)]


def _stripe_widths(rng: np.random.Generator, spec: CorpusSpec) -> list[int]:
    widths = []
    left = spec.width
    while left > 0:
        w = int(rng.integers(spec.stripe_min, spec.stripe_max + 1))
        if left - w < spec.stripe_min:
            w = left
        widths.append(w)
        left -= w
    return widths


def generate_image(rng: np.random.Generator, spec: CorpusSpec, name: str) -> SyntheticImage:
    widths = _stripe_widths(rng, spec)
    first = 1 if rng.random() < 0.5 else -1
    colors = [first * (-1) ** i for i in range(len(widths))]
    worn = rng.random(len(widths)) < spec.erasure_rate
    img = np.empty((spec.height, spec.width))
    col = 0
    for w, c, e in zip(widths, colors, worn):
        img[:, col:col + w] = c
        if e:
            frac = rng.uniform(spec.worn_min, spec.worn_max)
            faded = max(1, int(round(frac * spec.height)))
            img[spec.height - faded:, col:col + w] = 0.0
        col += w
    if spec.noise_std > 0:
        img = img + rng.normal(0.0, spec.noise_std, img.shape)
    pixels = from_gray(np.clip(img, -1.0, 1.0))
    erased = tuple(i for i, e in enumerate(worn, start=1) if e)
    return SyntheticImage(name, pixels, tuple(widths), tuple(colors), erased)


def generate_synthetic(spec: CorpusSpec) -> list[SyntheticImage]:
    rng = np.random.default_rng(spec.seed)
    return [generate_image(rng, spec, f"img{i:04d}.pgm") for i in range(spec.count)]


def write_rows(path: str | Path, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(GROUND_TRUTH_COLUMNS)
        w.writerows(rows)
    return path


def read_rows(path: str | Path) -> list[tuple[str, int, str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [(r["image"], int(r["block_index"]), r["action"], r["color"])
                for r in csv.DictReader(fh)]


def write_corpus(images: list[SyntheticImage], out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [write_pgm(out / im.name, im.pixels) for im in images]
    rows = [row for im in images for row in im.ground_truth()]
    written.append(write_rows(out / "ground_truth.csv", rows))
    return written


def corpus_spec_from_dict(data: Mapping[str, Any] | None) -> CorpusSpec:
    data = data or {}
    if not isinstance(data, Mapping):
        raise CorpusConfigError("corpus spec must be a mapping")
    known = {f.name: f.type for f in fields(CorpusSpec)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise CorpusConfigError(f"unknown corpus keys {unknown}")
    try:
        return CorpusSpec(**data)
    except TypeError as exc:
        raise CorpusConfigError(str(exc)) from None


def load_corpus_spec(path: str | Path) -> CorpusSpec:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise CorpusConfigError(f"{path}: {exc}") from None
    return corpus_spec_from_dict(data)


def dump_corpus_spec(spec: CorpusSpec) -> str:
    return yaml.safe_dump(asdict(spec), sort_keys=False)
