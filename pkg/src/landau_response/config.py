"""Scenario configuration: JSON loading and validation with field-level diagnostics."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

SCENARIOS = ("causal-solution", "conductivity-sweep", "limiting-absorption",
             "multiplier-equivalence", "model-problem", "remainder-decomposition")

# default acceptance thresholds per scenario; a config may override any of them
DEFAULT_TOLERANCES = {
    "causal-solution": {"residual_rel": 1e-5, "fd_order_min": 1.9},
    "limiting-absorption": {"final_rel": 1e-3, "mono_tol": 1e-9},
    "conductivity-sweep": {"symbol_rel": 5e-3, "discrimination": 10.0, "cold_plasma": 1e-2,
                           "dissipation": 1e-12, "reality": 1e-10, "hilbert_pair": 1e-6,
                           "hilbert_symbol": 1e-4, "hilbert_l2": 1e-3},
    "multiplier-equivalence": {"two_route_rel": 1e-3, "imag_residual": 1e-10},
    "remainder-decomposition": {"lambda_rel": 1e-4},
    "model-problem": {"fourier": 1e-6, "erf_match": 1e-10, "growth_rel": 1e-10},
}

COMMON_KEYS = {"scenario", "output_dir", "seed", "tolerances", "species"}
SCENARIO_KEYS = {
    "causal-solution": {"field", "nu", "h", "probes"},
    "limiting-absorption": {"field", "nu_sweep", "probes"},
    "conductivity-sweep": {"nu_sweep", "probes", "cold_plasma_u", "n_random"},
    "multiplier-equivalence": {"field", "grid", "lambda"},
    "remainder-decomposition": {"field", "lambda", "lambda_alt", "psi"},
    "model-problem": {"source", "nu", "grid", "nu_sweep", "uniqueness"},
}
REQUIRED_KEYS = {
    "causal-solution": {"field", "nu"},
    "limiting-absorption": {"field", "nu_sweep"},
    "conductivity-sweep": {"nu_sweep"},
    "multiplier-equivalence": {"field", "grid", "lambda"},
    "remainder-decomposition": {"field", "lambda", "lambda_alt"},
    "model-problem": {"source", "nu", "grid"},
}

SPECIES_KEYS = ("q", "m", "n", "v_t")
PACKET_KEYS = ("kind", "amplitude", "t0", "x0", "tau", "ell", "omega0", "k0")
GRID_KEYS = ("t_min", "t_max", "n_t", "x_min", "x_max", "n_x")
SOURCE_KEYS = ("amplitude", "t0", "tau", "x0", "ell")
PSI_KEYS = ("omega_c", "k_c", "width")


class ConfigError(Exception):
    """Config could not be parsed or failed validation; ``diagnostics`` lists why."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass
class ScenarioConfig:
    data: dict
    source_text: str

    @property
    def scenario(self):
        return self.data["scenario"]

    def tolerances(self):
        tol = dict(DEFAULT_TOLERANCES[self.scenario])
        tol.update(self.data.get("tolerances", {}))
        return tol

    def config_hash(self):
        canon = json.dumps(self.data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _check_number(diag, path, value, *, positive=False, nonneg=False, integer=False):
    if integer:
        if not isinstance(value, int) or isinstance(value, bool):
            diag.append(f"{path}: expected an integer, got {value!r}")
            return False
    elif not _is_num(value):
        diag.append(f"{path}: expected a finite number, got {value!r}")
        return False
    if positive and not value > 0:
        diag.append(f"{path}: must be > 0, got {value!r}")
        return False
    if nonneg and not value >= 0:
        diag.append(f"{path}: must be >= 0, got {value!r}")
        return False
    return True


def _check_section(diag, path, section, allowed, required=()):
    if not isinstance(section, dict):
        diag.append(f"{path}: expected an object, got {type(section).__name__}")
        return False
    for key in section:
        if key not in allowed:
            diag.append(f"{path}.{key}: unknown key")
    for key in required:
        if key not in section:
            diag.append(f"{path}.{key}: missing required key")
    return True


def _check_field(diag, path, f):
    if not isinstance(f, dict):
        diag.append(f"{path}: expected an object")
        return
    kind = f.get("kind")
    if kind == "superposition":
        _check_section(diag, path, f, {"kind", "components"}, ("components",))
        comps = f.get("components")
        if not isinstance(comps, list) or not comps:
            diag.append(f"{path}.components: expected a non-empty list")
            return
        for i, c in enumerate(comps):
            _check_field(diag, f"{path}.components[{i}]", c)
        return
    if kind not in ("gaussian-packet", "modulated-packet"):
        diag.append(f"{path}.kind: must be gaussian-packet, modulated-packet or superposition, "
                    f"got {kind!r}")
        return
    allowed = set(PACKET_KEYS) if kind == "modulated-packet" else set(PACKET_KEYS[:6])
    _check_section(diag, path, f, allowed)
    for key in allowed - {"kind"}:
        if key in f:
            _check_number(diag, f"{path}.{key}", f[key], positive=key in ("tau", "ell"))


def _check_grid(diag, path, g):
    if not _check_section(diag, path, g, set(GRID_KEYS), GRID_KEYS):
        return
    for key in ("n_t", "n_x"):
        if key in g and _check_number(diag, f"{path}.{key}", g[key], integer=True, positive=True):
            if g[key] < 2 or g[key] & (g[key] - 1):
                diag.append(f"{path}.{key}: must be a power of two, got {g[key]}")
    for lo, hi in (("t_min", "t_max"), ("x_min", "x_max")):
        ok = all(k in g and _check_number(diag, f"{path}.{k}", g[k]) for k in (lo, hi))
        if ok and not g[hi] > g[lo]:
            diag.append(f"{path}.{hi}: must exceed {lo}")


def _check_nu_sweep(diag, path, sweep):
    if not isinstance(sweep, list) or not sweep:
        diag.append(f"{path}: expected a non-empty list")
        return
    for i, nu in enumerate(sweep):
        if not _is_num(nu):
            diag.append(f"{path}[{i}]: expected a number, got {nu!r}")
        elif not nu > 0:
            diag.append(f"{path}[{i}]: nu = {nu!r} violates nu > 0, the precondition of the "
                        "regularized (damped) problem")
    nums = [n for n in sweep if _is_num(n)]
    if len(nums) == len(sweep) and any(b >= a for a, b in zip(nums, nums[1:])):
        diag.append(f"{path}: must be strictly decreasing towards 0")


def _check_range(diag, path, r):
    if not (isinstance(r, list) and len(r) == 2 and all(_is_num(v) for v in r) and r[0] <= r[1]):
        diag.append(f"{path}: expected [low, high] with low <= high, got {r!r}")


def validate(data) -> list:
    """Every violated invariant of a parsed config, as human-readable lines."""
    diag = []
    if not isinstance(data, dict):
        return ["<root>: expected a JSON object"]
    scenario = data.get("scenario")
    if scenario not in SCENARIOS:
        return [f"scenario: must be one of {', '.join(SCENARIOS)}, got {scenario!r}"]
    allowed = COMMON_KEYS | SCENARIO_KEYS[scenario]
    for key in data:
        if key not in allowed:
            diag.append(f"{key}: unknown key for scenario {scenario}")
    for key in sorted(REQUIRED_KEYS[scenario]):
        if key not in data:
            diag.append(f"{key}: missing required key for scenario {scenario}")

    if "species" in data and _check_section(diag, "species", data["species"], set(SPECIES_KEYS)):
        for key, val in data["species"].items():
            if key in SPECIES_KEYS:
                _check_number(diag, f"species.{key}", val, positive=True)
    if "output_dir" in data and not isinstance(data["output_dir"], str):
        diag.append("output_dir: expected a string path")
    if "seed" in data:
        _check_number(diag, "seed", data["seed"], integer=True, nonneg=True)
    if "tolerances" in data and _check_section(diag, "tolerances", data["tolerances"],
                                               set(DEFAULT_TOLERANCES[scenario])):
        for key, val in data["tolerances"].items():
            _check_number(diag, f"tolerances.{key}", val, positive=True)
    if "field" in data:
        _check_field(diag, "field", data["field"])
    if "grid" in data:
        _check_grid(diag, "grid", data["grid"])
    if "nu" in data:
        positive = scenario == "model-problem"
        if _check_number(diag, "nu", data["nu"], nonneg=True) and positive and not data["nu"] > 0:
            diag.append("nu: must be > 0, the precondition of the regularized (damped) problem")
    if "nu_sweep" in data:
        _check_nu_sweep(diag, "nu_sweep", data["nu_sweep"])
    for key in ("lambda", "lambda_alt", "h", "cold_plasma_u"):
        if key in data:
            _check_number(diag, key, data[key], positive=True)
    if "n_random" in data:
        _check_number(diag, "n_random", data["n_random"], integer=True, nonneg=True)
    if "psi" in data and _check_section(diag, "psi", data["psi"], set(PSI_KEYS)):
        for key, val in data["psi"].items():
            if key in PSI_KEYS:
                _check_number(diag, f"psi.{key}", val, positive=key == "width")
    if "source" in data and _check_section(diag, "source", data["source"], set(SOURCE_KEYS)):
        for key, val in data["source"].items():
            if key in SOURCE_KEYS:
                _check_number(diag, f"source.{key}", val, positive=key in ("tau", "ell"))
    if "uniqueness" in data and _check_section(diag, "uniqueness", data["uniqueness"],
                                               {"delta", "horizon"}):
        u = data["uniqueness"]
        if "delta" in u:
            _check_number(diag, "uniqueness.delta", u["delta"])
        if "horizon" in u:
            _check_number(diag, "uniqueness.horizon", u["horizon"], positive=True)
    if "probes" in data:
        p = data["probes"]
        if scenario == "conductivity-sweep":
            if _check_section(diag, "probes", p, {"omega", "k"}, ("omega", "k")):
                for key in ("omega", "k"):
                    vals = p.get(key)
                    if not (isinstance(vals, list) and vals and all(_is_num(v) for v in vals)):
                        diag.append(f"probes.{key}: expected a non-empty list of numbers")
                    elif key == "k" and any(v == 0 for v in vals):
                        diag.append("probes.k: the limiting symbol needs k != 0")
        elif _check_section(diag, "probes", p, {"t_range", "x_range", "v_range", "n"}):
            for key in ("t_range", "x_range", "v_range"):
                if key in p:
                    _check_range(diag, f"probes.{key}", p[key])
            if "n" in p:
                _check_number(diag, "probes.n", p["n"], integer=True, positive=True)
    return diag


def parse_text(text) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    diag = validate(data)
    if diag:
        raise ConfigError(diag)
    return ScenarioConfig(data, text)


def load(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror}"]) from None
    return parse_text(text)
