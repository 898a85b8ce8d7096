"""Experiment configuration: TOML loading, strict validation, unit handling.

A configuration is a small TOML document with tables [gate], [pulse],
[sequence], [noise], [integrator], [run].  Frequencies are given as
value/2pi in MHz (``*_mhz`` keys), times in us; conversion to angular
rad/us happens here and nowhere else.  Unknown tables or keys are
rejected, never ignored: silent typos in a physics config are worse
than a hard failure.  Every loaded config carries a content hash so
that output files can state exactly which inputs produced them.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

try:
    import tomllib as tomli
except ModuleNotFoundError:
    import tomli

from .atom import AtomModel, AtomNoise, ExcitationKind, default_model
from .pulses import (
    LcgParams,
    PulseSchedule,
    ZchgParams,
    build_sequence,
    double_sequence,
)

TWO_PI = 2.0 * math.pi

SCHEMA = "rydgate-experiment-v1"


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the table and key."""


@dataclass(frozen=True)
class NoiseToggles:
    """Which imperfections a simulation includes.

    ``decay`` gates the collapse operators (and with them the decay-only
    stage); the remaining flags gate individual Monte-Carlo draws.
    Disabled draws are replaced by their identity values after sampling,
    so toggling one imperfection never changes the draws of the others.
    """

    decay: bool = True
    positions: bool = True
    intensity: bool = True
    doppler: bool = True
    magnetic: bool = True
    runs: int = 0

    def __post_init__(self) -> None:
        if self.runs < 0:
            raise ConfigError("noise.runs must be >= 0")

    @property
    def any_mc(self) -> bool:
        return self.runs > 0


@dataclass(frozen=True)
class ExperimentConfig:
    """One gate experiment, fully determined up to the RNG seed."""

    kind: ExcitationKind
    synthesis: str                     # "tqd" or "adiabatic"
    t_gate: float                      # us
    base: LcgParams | ZchgParams       # duration = t_gate / segment count
    search_phases: bool
    phi_r: float                       # rad; 0.0 when search_phases
    phi_big: float
    noise: NoiseToggles
    step: float                        # integrator step, us
    seed: int
    label: str
    source_hash: str
    out_dir: str | None = None

    def model(self) -> AtomModel:
        """Atom model for this experiment (decay channels per toggle)."""
        m = default_model(self.kind)
        if not self.noise.decay:
            m = replace(m, decay=())
        return m

    def schedule(
        self, phi_r: float | None = None, phi_big: float | None = None
    ) -> PulseSchedule:
        """Pulse schedule; explicit phases override the configured ones."""
        if self.synthesis == "adiabatic":
            return double_sequence(self.kind, self.base, synthesis="adiabatic")
        pr = self.phi_r if phi_r is None else phi_r
        pb = self.phi_big if phi_big is None else phi_big
        return build_sequence(self.kind, self.base, pr, pb, synthesis="tqd")


def config_hash(parsed: dict) -> str:
    """12-hex-digit digest of the parsed document (key order independent)."""
    canon = json.dumps(parsed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _take(table: dict, table_name: str, spec: dict[str, type | tuple[type, ...]]):
    """Pop known keys with type checks; any leftover key is an error."""
    out = {}
    for key, types in spec.items():
        if key in table:
            val = table.pop(key)
            tt = types if isinstance(types, tuple) else (types,)
            if bool in tt and isinstance(val, bool):
                pass
            elif isinstance(val, bool) or not isinstance(val, tt):
                names = "/".join(t.__name__ for t in tt)
                raise ConfigError(f"{table_name}.{key} must be {names}, got {val!r}")
            out[key] = val
    if table:
        raise ConfigError(f"unknown key(s) in [{table_name}]: {', '.join(sorted(table))}")
    return out


def _require(values: dict, table_name: str, *keys: str) -> None:
    missing = [k for k in keys if k not in values]
    if missing:
        raise ConfigError(f"[{table_name}] missing required key(s): {', '.join(missing)}")


def _positive(values: dict, table_name: str, *keys: str) -> None:
    for k in keys:
        if k in values and not values[k] > 0:
            raise ConfigError(f"{table_name}.{k} must be positive, got {values[k]}")


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate an experiment TOML file."""
    text = Path(path).read_bytes()
    try:
        doc = tomli.loads(text.decode())
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(doc, label_default=Path(path).stem)


def parse_config(doc: dict, label_default: str = "experiment") -> ExperimentConfig:
    """Validate a parsed TOML document and convert units."""
    digest = config_hash(doc)
    doc = {k: (dict(v) if isinstance(v, dict) else v) for k, v in doc.items()}

    top = {k: doc.pop(k) for k in ("schema",) if k in doc}
    if top.get("schema", SCHEMA) != SCHEMA:
        raise ConfigError(f"schema {top.get('schema')!r} not supported (expected {SCHEMA!r})")

    known_tables = ("gate", "pulse", "sequence", "noise", "integrator", "run")
    extra = [k for k in doc if k not in known_tables]
    if extra:
        raise ConfigError(f"unknown table(s): {', '.join(sorted(extra))}")
    for name in known_tables:
        if name in doc and not isinstance(doc[name], dict):
            raise ConfigError(f"[{name}] must be a table")

    gate = _take(doc.get("gate", {}), "gate", {
        "kind": str, "synthesis": str, "t_gate_us": (int, float),
    })
    _require(gate, "gate", "kind", "synthesis", "t_gate_us")
    _positive(gate, "gate", "t_gate_us")
    try:
        kind = ExcitationKind(gate["kind"])
    except ValueError:
        raise ConfigError(f"gate.kind must be 'dipole' or 'quadrupole', got {gate['kind']!r}")
    synthesis = gate["synthesis"]
    if synthesis not in ("tqd", "adiabatic"):
        raise ConfigError(f"gate.synthesis must be 'tqd' or 'adiabatic', got {synthesis!r}")
    t_gate = float(gate["t_gate_us"])
    n_segments = 2 if synthesis == "adiabatic" else 4
    t_base = t_gate / n_segments

    pulse = _take(doc.get("pulse", {}), "pulse", {
        "omega0_mhz": (int, float), "delta0_mhz": (int, float),
        "tau_fraction": (int, float),
        "omega_b0_mhz": (int, float), "omega_r0_mhz": (int, float),
        "delta_b_mhz": (int, float),
        "tau_b_fraction": (int, float), "tau_r_fraction": (int, float),
    })
    lcg_keys = {"omega0_mhz", "delta0_mhz", "tau_fraction"}
    zchg_keys = {"omega_b0_mhz", "omega_r0_mhz", "delta_b_mhz",
                 "tau_b_fraction", "tau_r_fraction"}
    if kind is ExcitationKind.DIPOLE:
        wrong = set(pulse) & zchg_keys
        if wrong:
            raise ConfigError(f"dipole pulse takes {sorted(lcg_keys)}, not {sorted(wrong)}")
        _require(pulse, "pulse", *sorted(lcg_keys))
        _positive(pulse, "pulse", *sorted(lcg_keys))
        base: LcgParams | ZchgParams = LcgParams(
            duration=t_base,
            omega0=TWO_PI * float(pulse["omega0_mhz"]),
            delta0=TWO_PI * float(pulse["delta0_mhz"]),
            tau=float(pulse["tau_fraction"]) * t_base,
        )
    else:
        wrong = set(pulse) & lcg_keys
        if wrong:
            raise ConfigError(f"quadrupole pulse takes {sorted(zchg_keys)}, not {sorted(wrong)}")
        _require(pulse, "pulse", *sorted(zchg_keys))
        _positive(pulse, "pulse", *sorted(zchg_keys))
        base = ZchgParams(
            duration=t_base,
            omega_b0=TWO_PI * float(pulse["omega_b0_mhz"]),
            omega_r0=TWO_PI * float(pulse["omega_r0_mhz"]),
            delta_b=TWO_PI * float(pulse["delta_b_mhz"]),
            tau_b=float(pulse["tau_b_fraction"]) * t_base,
            tau_r=float(pulse["tau_r_fraction"]) * t_base,
        )

    seq = _take(doc.get("sequence", {}), "sequence", {
        "search": bool, "phi_r_over_pi": (int, float), "phi_big_over_pi": (int, float),
    })
    search = bool(seq.get("search", False))
    has_phases = "phi_r_over_pi" in seq or "phi_big_over_pi" in seq
    if synthesis == "adiabatic":
        if search or has_phases:
            raise ConfigError("[sequence] does not apply to an adiabatic gate")
        phi_r = phi_big = 0.0
    elif search:
        if has_phases:
            raise ConfigError("[sequence] gives explicit phases AND search = true")
        phi_r = phi_big = 0.0
    else:
        _require(seq, "sequence", "phi_r_over_pi", "phi_big_over_pi")
        phi_r = float(seq["phi_r_over_pi"]) * math.pi
        phi_big = float(seq["phi_big_over_pi"]) * math.pi

    noise_tbl = _take(doc.get("noise", {}), "noise", {
        "decay": bool, "positions": bool, "intensity": bool,
        "doppler": bool, "magnetic": bool, "runs": int,
    })
    noise = NoiseToggles(
        decay=noise_tbl.get("decay", True),
        positions=noise_tbl.get("positions", True),
        intensity=noise_tbl.get("intensity", True),
        doppler=noise_tbl.get("doppler", True),
        magnetic=noise_tbl.get("magnetic", True),
        runs=noise_tbl.get("runs", 0),
    )

    integ = _take(doc.get("integrator", {}), "integrator", {"step_us": (int, float)})
    _positive(integ, "integrator", "step_us")
    step = float(integ.get("step_us", 1e-5))

    run_tbl = _take(doc.get("run", {}), "run", {"seed": int, "label": str, "out_dir": str})
    seed = run_tbl.get("seed", 0)
    if seed < 0:
        raise ConfigError("run.seed must be >= 0")
    label = run_tbl.get("label", label_default)

    return ExperimentConfig(
        kind=kind,
        synthesis=synthesis,
        t_gate=t_gate,
        base=base,
        search_phases=search,
        phi_r=phi_r,
        phi_big=phi_big,
        noise=noise,
        step=step,
        seed=seed,
        label=label,
        source_hash=digest,
        out_dir=run_tbl.get("out_dir"),
    )


def mask_noise(noise: AtomNoise, toggles: NoiseToggles) -> AtomNoise:
    """Replace disabled imperfections with their identity values.

    Masking happens after sampling, so the random draws (and therefore
    the enabled imperfections) are identical across toggle settings of
    the same seed.
    """
    ones = tuple(1.0 for _ in noise.spatial)
    return AtomNoise(
        spatial=noise.spatial if toggles.positions else ones,
        intensity=noise.intensity if toggles.intensity else ones,
        delta_doppler=noise.delta_doppler if toggles.doppler else 0.0,
        delta_magnetic=noise.delta_magnetic if toggles.magnetic else 0.0,
        position_um=noise.position_um if toggles.positions else (0.0, 0.0, 0.0),
    )


def mask_pairs(
    pairs: list[tuple[AtomNoise, AtomNoise]], toggles: NoiseToggles
) -> list[tuple[AtomNoise, AtomNoise]]:
    """Apply :func:`mask_noise` to both atoms of every run."""
    return [(mask_noise(a, toggles), mask_noise(b, toggles)) for a, b in pairs]
