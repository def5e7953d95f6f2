"""
Run manifests and deterministic manifest IDs.

Every data file a command writes carries `#` header lines pointing at the
manifest that produced it. The ID depends only on the command, the resolved
parameters and the flags, never on wall-clock time:

    skr-s0-3f9a0c1d2b7e
    sweep-s7-0c55e1a9d2f4

so rerunning an identical command reproduces identical data files, while
the manifest JSON next to them records when the run happened.
"""
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from src.constants import TOOL_NAME, TOOL_VERSION
from src.schemas.reports import RunManifest
from src.schemas.system_params import SystemParams
from src.utils.logging_config import setup_logger
from src.utils.path_utils import ensure_output_dir

logger = setup_logger(__name__)


def _canonical(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    return value


def generate_manifest_id(command: str, params: SystemParams, flags: dict[str, Any] | None = None) -> str:
    """
    Deterministic ID for (command, params, flags).

    Examples:
        >>> generate_manifest_id("skr", SystemParams()).startswith("skr-s0-")
        True
    """
    payload = {
        "command": command,
        "params": params.model_dump(mode="json"),
        "flags": _canonical(flags or {}),
        "tool": TOOL_VERSION,
    }
    digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()
    return f"{command}-s{params.seed}-{digest[:12]}"


def new_manifest(command: str, params: SystemParams, flags: dict[str, Any] | None = None) -> RunManifest:
    flags = _canonical(flags or {})
    return RunManifest(
        manifest_id=generate_manifest_id(command, params, flags),
        command=command,
        seed=params.seed,
        tool_version=TOOL_VERSION,
        params=params,
        flags=flags,
        started_at=datetime.now(timezone.utc),
    )


def header_lines(manifest: RunManifest) -> list[str]:
    """Header comment lines written at the top of every output file."""
    return [
        f"manifest: {manifest.manifest_id}",
        f"command: {manifest.command}",
        f"seed: {manifest.seed}",
        f"tool: {TOOL_NAME} {manifest.tool_version}",
    ]


def write_manifest(manifest: RunManifest, output_dir: str | Path) -> Path:
    """Stamps the finish time and writes `<manifest_id>.json` into output_dir."""
    out_dir = ensure_output_dir(output_dir)
    finished = manifest.model_copy(update={"finished_at": datetime.now(timezone.utc)})
    path = out_dir / f"{manifest.manifest_id}.json"
    path.write_text(finished.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"[Manifest] wrote {path}")
    return path
