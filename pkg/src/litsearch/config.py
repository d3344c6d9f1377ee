"""Runtime configuration: JSON file plus LITSEARCH_* env overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass
class AppConfig:
    graph_path: str | None = None
    corpus_path: str | None = None
    backend: str = "local"  # "local" or "remote"
    entrez_base_url: str = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils"
    entrez_api_key: str | None = None
    ner_url: str | None = None
    fill_url: str | None = None
    embed_url: str | None = None
    mask_terms_path: str | None = None  # recorded substitute table (JSON)
    rate_limit_rps: float = 3.0
    retmax: int = 100
    similarity_threshold: float = 0.5
    max_mask_terms: int = 3
    n_min: int = 20
    k: int = 5
    data_dir: str = "litsearch_data"
    webui_dir: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000

    @property
    def feedback_log(self) -> Path:
        return Path(self.data_dir) / "feedback.jsonl"

    @property
    def sessions_log(self) -> Path:
        return Path(self.data_dir) / "sessions.jsonl"

    @classmethod
    def load(cls, path: str | Path | None = None,
             env: dict[str, str] | None = None) -> "AppConfig":
        """Config from an optional JSON file, then env overrides.

        Every field can be overridden by LITSEARCH_<FIELD_NAME> (upper
        case), e.g. LITSEARCH_ENTREZ_BASE_URL.
        """
        env = os.environ if env is None else env
        values: dict = {}
        if path is not None:
            config_dir = Path(path).parent
            raw = json.loads(Path(path).read_text("utf-8"))
            unknown = set(raw) - {f.name for f in fields(cls)}
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            for key in ("graph_path", "corpus_path", "mask_terms_path", "webui_dir"):
                if raw.get(key):
                    raw[key] = str((config_dir / raw[key]).resolve())
            values.update(raw)
        for spec in fields(cls):
            key = f"LITSEARCH_{spec.name.upper()}"
            if key in env:
                values[spec.name] = _coerce(env[key], spec.type)
        return cls(**values)


def _coerce(raw: str, annotation: str):
    if "int" in annotation:
        return int(raw)
    if "float" in annotation:
        return float(raw)
    return raw
