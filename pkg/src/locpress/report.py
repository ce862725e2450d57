"""Output plumbing: delimited tables, self-contained SVG figures, and
the line-oriented run-configuration format.

All numeric output uses 15 significant digits and is locale
independent; files are written atomically (temporary file + rename).
CSV files start with versioned comment headers recording the tool
version and, when sampling is involved, the seed.
"""

from __future__ import annotations

import configparser
import os
import tempfile
from typing import Iterable, Sequence

import numpy as np

from .potentials import (
    FishGeometry,
    FishPotential,
    LocallyConstantPotential,
)
from .shift import TransitionSystem

CSV_VERSION = "locpress-csv v1"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return format(x, ".15g")
    return str(x)


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_csv(
    path: str,
    header: Sequence[str],
    rows: Iterable[Sequence],
    comments: Sequence[str] = (),
) -> None:
    lines = [f"# {CSV_VERSION}"]
    lines.extend(f"# {c}" for c in comments)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def cloud_rows(cloud) -> tuple[list[str], list[tuple]]:
    m = cloud.dim
    header = ["period", "generator"] + [f"coord{i+1}" for i in range(m)]
    rows = []
    for orbit, point in zip(cloud.orbits, cloud.points):
        rows.append((orbit.period, orbit.label(), *[float(c) for c in point]))
    return header, rows


def render_rotation_figure(
    path: str,
    cloud,
    hull=None,
    fan=None,
    curve: FishGeometry | None = None,
    title: str | None = None,
) -> None:
    """Scatter of the rotation cloud with the hull polyline and an
    optional vertex-fan overlay, written as a self-contained SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 5.2))
    pts = cloud.points
    ax.plot(pts[:, 0], pts[:, 1], ".", ms=2.0, color="#20507a", alpha=0.55,
            label=f"orbit points (n={len(pts)})")
    if hull is not None and hull.vertices.shape[0] >= 3:
        V = np.vstack([hull.vertices, hull.vertices[:1]])
        ax.plot(V[:, 0], V[:, 1], "-", lw=1.2, color="#b34700", label="cloud hull")
    if fan is not None:
        for arr in (fan.lower, fan.upper):
            ax.plot(arr[:, 0], arr[:, 1], "s--", ms=3.5, lw=0.8,
                    color="#2a7a2a", mfc="none")
        ax.plot([], [], "s--", ms=3.5, lw=0.8, color="#2a7a2a", mfc="none",
                label="vertex fan")
    if curve is not None:
        theta = np.linspace(0, 2 * np.pi, 400)
        a, b = curve.curve.a, curve.curve.b
        ax.plot(a + a * np.cos(theta), b * np.sin(theta), ":", lw=0.9,
                color="#777777", label="boundary body")
    ax.set_xlabel("first average")
    ax.set_ylabel("second average")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8, framealpha=0.9)
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".svg")
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg")
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.unlink(tmp)


class ConfigError(ValueError):
    pass


_KNOWN_SECTIONS = {"system", "potential", "pressure", "rotset", "localized", "gallery"}
_KNOWN_KEYS = {
    "system": {"preset", "matrix"},
    "potential": {"kind", "depth", "dim", "values", "alpha", "ellipse_a",
                  "ellipse_b", "x1", "tail_base", "truncation_depth"},
    "pressure": {"t_grid", "potential_dim"},
    "rotset": {"points", "max_period", "fan", "fan_j_max"},
    "localized": {"w", "r", "depth", "horizons", "bins", "grid", "mode"},
    "gallery": {"only", "points"},
}


class RunConfig:
    """Parsed line-oriented configuration: [section] headers with
    key = value lines; unknown sections or keys are rejected."""

    def __init__(self, sections: dict[str, dict[str, str]]):
        self.sections = sections

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # keep case
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"config parse error: {exc}") from None
        sections: dict[str, dict[str, str]] = {}
        for name in parser.sections():
            if name not in _KNOWN_SECTIONS:
                raise ConfigError(f"unknown config section [{name}]")
            known = _KNOWN_KEYS[name]
            body = {}
            for key, value in parser.items(name):
                if key not in known:
                    raise ConfigError(f"unknown key {key!r} in section [{name}]")
                body[key] = value
            sections[name] = body
        return cls(sections)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        with open(path) as handle:
            return cls.parse(handle.read())

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def system(self) -> TransitionSystem:
        body = self.sections.get("system", {})
        if "preset" in body and "matrix" in body:
            raise ConfigError("give either a system preset or a matrix, not both")
        if "preset" in body:
            try:
                return TransitionSystem.preset(body["preset"])
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if "matrix" in body:
            try:
                return TransitionSystem.parse(body["matrix"])
            except ValueError as exc:
                raise ConfigError(f"bad transition matrix: {exc}") from None
        raise ConfigError("config needs a [system] section with preset or matrix")

    def potential(self, ts: TransitionSystem):
        body = self.sections.get("potential", {})
        kind = body.get("kind")
        if kind is None:
            raise ConfigError("config needs [potential] kind = ...")
        if kind == "fish-figure1":
            K = int(body.get("truncation_depth", "20"))
            return FishPotential.figure1(truncation_depth=K)
        if kind == "fish":
            from .potentials import BoundaryCurve

            geom = FishGeometry(
                alpha=int(body.get("alpha", "3")),
                curve=BoundaryCurve(
                    float(body.get("ellipse_a", "1")), float(body.get("ellipse_b", "2"))
                ),
                x1=float(body.get("x1", "1")),
                tail_base=float(body.get("tail_base", "6")),
            )
            return FishPotential(geom, int(body.get("truncation_depth", "20")))
        if kind == "locally-constant":
            depth = int(body.get("depth", "1"))
            dim = int(body.get("dim", "1"))
            rows = body.get("values", "").strip().splitlines()
            if not rows:
                raise ConfigError("locally-constant potential needs value rows")
            values = {}
            for line in rows:
                parts = line.split()
                if len(parts) != 1 + dim:
                    raise ConfigError(f"value row {line!r}: expected word + {dim} numbers")
                word = tuple(int(c) for c in parts[0])
                if len(word) != depth:
                    raise ConfigError(f"value row {line!r}: word length must be {depth}")
                values[word] = np.array([float(p) for p in parts[1:]])
            try:
                return LocallyConstantPotential(depth, dim, values)
            except (ValueError, KeyError) as exc:
                raise ConfigError(f"bad potential table: {exc}") from None
        raise ConfigError(f"unknown potential kind {kind!r}")

    def floats(self, section: str, key: str, default: str | None = None) -> list[float]:
        raw = self.get(section, key, default)
        if raw is None:
            return []
        return [float(tok) for tok in str(raw).replace(",", " ").split()]

    def ints(self, section: str, key: str, default: str | None = None) -> list[int]:
        return [int(round(v)) for v in self.floats(section, key, default)]
