"""Run configuration, manifests, and the minimal SVG plot emitter.

Configs and manifests are YAML (nested key-value tables).  A manifest embeds
the fully-resolved configuration plus a content hash, so re-running from a
manifest reproduces the outputs bit for bit (no timestamps are recorded).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import yaml

__all__ = [
    "ConfigError",
    "load_config",
    "validate_config",
    "config_hash",
    "write_manifest",
    "read_manifest",
    "line_plot_svg",
]


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


_ALLOWED_TOP = {"domain", "contrast", "plan", "noise", "solver", "output"}


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a mapping")
    return validate_config(cfg)


def _require(table: dict, name: str, key: str, types, pred=None) -> None:
    if key not in table:
        raise ConfigError(f"{name}.{key} is required")
    val = table[key]
    if not isinstance(val, types):
        raise ConfigError(f"{name}.{key} has wrong type {type(val).__name__}")
    if pred is not None and not pred(val):
        raise ConfigError(f"{name}.{key} = {val!r} is out of range")


def validate_config(cfg: dict) -> dict:
    """Validate a run configuration against module preconditions."""
    unknown = set(cfg) - _ALLOWED_TOP
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    dom = cfg.get("domain", {})
    _require(dom, "domain", "radius", (int, float), lambda v: v > 0)
    _require(dom, "domain", "delta", (int, float), lambda v: v >= 0)
    _require(dom, "domain", "mode", int, lambda v: v >= 1)
    if "second_amplitude" in dom and not isinstance(dom["second_amplitude"], (int, float)):
        raise ConfigError("domain.second_amplitude must be a number")

    con = cfg.get("contrast", {})
    _require(con, "contrast", "eps", (int, float), lambda v: v > 0)

    plan = cfg.get("plan", {})
    _require(plan, "plan", "kind", str,
             lambda v: v in ("set1", "set2", "set3", "optimal"))
    kind = plan["kind"]
    if kind == "set1":
        _require(plan, "plan", "n0", int, lambda v: v >= 1)
    if kind in ("set2", "set3"):
        _require(plan, "plan", "n", int, lambda v: v >= 1)
        _require(plan, "plan", "u_count", int, lambda v: v >= 1)
    if kind == "optimal":
        _require(plan, "plan", "n", int, lambda v: v >= 1)
        _require(plan, "plan", "m0", int, lambda v: v >= 1)
    if kind != "optimal":
        _require(plan, "plan", "k_values", list,
                 lambda v: len(v) > 0 and all(isinstance(x, (int, float)) and x > 0 for x in v))

    noise = cfg.get("noise", {})
    _require(noise, "noise", "model", str, lambda v: v in ("uniform", "gaussian", "none"))
    if noise["model"] != "none":
        _require(noise, "noise", "sigma", (int, float), lambda v: v >= 0)
        _require(noise, "noise", "seed", int)
    if "seeds" in noise:
        _require(noise, "noise", "seeds", int, lambda v: v >= 1)

    sol = cfg.get("solver", {})
    _require(sol, "solver", "band", int, lambda v: 1 <= v <= 200)
    _require(sol, "solver", "alpha", (int, float), lambda v: v > 0)
    _require(sol, "solver", "beta", (int, float), lambda v: v >= 0)
    return cfg


def config_hash(cfg: dict) -> str:
    """Stable content hash of a configuration mapping."""
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=float)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def write_manifest(path, cfg: dict, extra: dict | None = None) -> None:
    doc = {"config": cfg, "config_hash": config_hash(cfg)}
    if extra:
        doc.update(extra)
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=True, default_flow_style=False))


def read_manifest(path) -> dict:
    with open(path) as fh:
        return yaml.safe_load(fh)


def line_plot_svg(path, x, ys, labels=(), title: str = "", xlabel: str = "",
                  ylabel: str = "", logy: bool = False,
                  size=(640, 480)) -> None:
    """Write a minimal SVG 1.1 line plot (no plotting dependency).

    ``ys`` is a list of series, each the same length as ``x``.
    """
    import math

    w, h = size
    ml, mr, mt, mb = 64, 16, 28, 44
    pw, ph = w - ml - mr, h - mt - mb
    x = [float(v) for v in x]
    series = [[float(v) for v in ys_i] for ys_i in ys]
    ally = [v for s in series for v in s]
    if logy:
        ally = [math.log10(max(v, 1e-300)) for v in ally]
    x0, x1 = min(x), max(x)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(v):
        return ml + pw * (v - x0) / (x1 - x0)

    def py(v):
        if logy:
            v = math.log10(max(v, 1e-300))
        return mt + ph * (1.0 - (v - y0) / (y1 - y0))

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        xp = px(xv)
        yp = mt + ph * (1 - i / 4)
        ylab = f"1e{yv:.1f}" if logy else f"{yv:.3g}"
        parts.append(f'<line x1="{xp:.1f}" y1="{mt + ph}" x2="{xp:.1f}" '
                     f'y2="{mt + ph + 4}" stroke="#333"/>')
        parts.append(f'<text x="{xp:.1f}" y="{mt + ph + 18}" font-size="11" '
                     f'text-anchor="middle">{xv:.3g}</text>')
        parts.append(f'<line x1="{ml - 4}" y1="{yp:.1f}" x2="{ml}" y2="{yp:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{ml - 8}" y="{yp + 4:.1f}" font-size="11" '
                     f'text-anchor="end">{ylab}</text>')
    for idx, s in enumerate(series):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, s))
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{colors[idx % len(colors)]}" stroke-width="1.5"/>')
        if idx < len(labels):
            parts.append(f'<text x="{ml + 10}" y="{mt + 16 + 14 * idx}" font-size="12" '
                         f'fill="{colors[idx % len(colors)]}">{labels[idx]}</text>')
    if title:
        parts.append(f'<text x="{w / 2}" y="18" font-size="13" text-anchor="middle">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{ml + pw / 2}" y="{h - 8}" font-size="12" '
                     f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="14" y="{mt + ph / 2}" font-size="12" text-anchor="middle" '
                     f'transform="rotate(-90 14 {mt + ph / 2})">{ylabel}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
