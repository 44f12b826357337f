"""Workspace discovery: model sources and configuration under one root."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .base import ParseError
from .ced import ModelRepository, parse_model
from .lint import LintConfig, parse_config

CONFIG_NAME = "commev.cfg"
SOURCE_SUFFIXES = (".ced", ".msl", ".cet")


@dataclass
class Workspace:
    root: Path
    config: LintConfig
    source_paths: list[Path] = field(default_factory=list)

    def sources(self) -> list[tuple[str, str]]:
        out = []
        for path in self.source_paths:
            out.append((path.relative_to(self.root).as_posix(), path.read_text(encoding="utf-8")))
        return out

    def load_repository(self) -> ModelRepository:
        return parse_model(self.sources())


def discover(root: str | Path, config_path: str | Path | None = None) -> Workspace:
    """Collect model sources recursively in deterministic (lexicographic
    path) order; read the configuration file when present."""
    root = Path(root)
    if not root.is_dir():
        raise ParseError(f"workspace root '{root}' is not a directory")
    paths = sorted(
        (p for p in root.rglob("*") if p.is_file() and p.suffix in SOURCE_SUFFIXES),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    if config_path is None:
        candidate = root / CONFIG_NAME
        config_path = candidate if candidate.is_file() else None
    if config_path is not None:
        config_file = Path(config_path)
        config = parse_config(config_file.read_text(encoding="utf-8"), str(config_file))
    else:
        config = LintConfig()
    return Workspace(root=root, config=config, source_paths=paths)
