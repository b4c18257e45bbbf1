"""Experiment configuration: grammar, validation and scenario presets.

Grammar
-------
A config is plain text, one ``key = value`` per line.  ``#`` or ``;`` start a
comment line.  Keys before the first ``[section]`` header are top-level.
Unknown sections and keys are rejected.

Top level
    ``scenario`` (required: a preset name or ``custom``), ``seed``,
    ``output_dir``, ``horizon_time``.
``[model]``
    ``kind`` (TC, Dicke, PF), ``n_tls``, ``n_cavity``, ``omega``,
    ``omega_c``, ``omega_tls`` (one value or a comma list), ``g``,
    ``kappa``, ``converge_fock`` (bool).
``[initial_state]``
    ``pattern``: ``fully_excited``, ``singly_excited:j``, ``k_excited:k``,
    ``coherent_superposition``.
``[learning]``
    ``dt``, ``window_time``, ``backend``, ``compare_windows`` (list),
    ``trajectory_stride`` (exact reference computed at ``dt / stride``).
``[observables]``
    ``name = operator`` with operator one of ``sz:j``, ``sx:j``,
    ``sz_total``, ``survival``.
``[kinetics]``
    ``steady_state``, ``relaxation``, ``moments``, ``resonance_scan``
    (bools), ``dt_grid`` (grid), ``scan_window``, ``scan_observable``,
    ``null_correction`` (bool).
``[sweep]``
    ``kind`` (``none``, ``kappa``, ``delta``, ``peak``), ``values`` (grid),
    ``n_tls`` (list), ``models`` (list), ``omega`` (list; resonant
    ``omega_c = omega_tls``), ``observable``, ``memory_factor`` (kappa sweeps:
    learning window ``max(4, memory_factor / kappa)``, default 2),
    ``fock_cutoff`` (cavity levels used for Dicke/PF sweep models).
``[disorder]``
    ``parameter``, ``lo``, ``hi``, ``center``, ``n_realizations``,
    ``shared`` (bool), ``ensemble`` (bool: build DA/averaged-tensor
    comparison).

Numbers may be written as arithmetic expressions using ``sqrt``, ``pi``,
``exp``, ``log`` and ``+ - * / **``.  Grids are a comma list,
``linspace(a, b, n)`` or ``logspace(a, b, n)`` (exponents of ten).
Booleans are ``true``/``false``/``yes``/``no``/``1``/``0``.
"""

import ast
from dataclasses import dataclass, field
import math
import operator

import numpy as np

from .models import KINDS, ModelError, ModelSpec, default_coupling, parse_pattern, tls_observable


class ConfigError(ValueError):
    """Invalid experiment configuration; ``str(err)`` is the one-line message."""

    def __init__(self, message):
        super().__init__(message if message.startswith("config:") else f"config: {message}")


# -- scalar parsing ----------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "log": math.log, "log10": math.log10}
_CONSTS = {"pi": math.pi}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.Name) and node.id in _CONSTS:
        return _CONSTS[node.id]
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError("unsupported expression")


def parse_number(text, where):
    try:
        value = _eval_node(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError, TypeError):
        raise ConfigError(f"{where}: invalid number {text.strip()!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{where}: value must be finite")
    return value


def parse_int(text, where):
    v = parse_number(text, where)
    if v != int(v):
        raise ConfigError(f"{where}: expected an integer, got {text.strip()!r}")
    return int(v)


def parse_bool(text, where):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{where}: expected a boolean, got {text.strip()!r}")


def _split_args(body):
    parts, depth, cur = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p for p in (x.strip() for x in parts) if p]


def parse_list(text, where):
    return [parse_number(p, where) for p in _split_args(text)]


def parse_grid(text, where):
    t = text.strip()
    for name, fn in (("linspace", np.linspace), ("logspace", np.logspace)):
        if t.startswith(name + "(") and t.endswith(")"):
            args = _split_args(t[len(name) + 1:-1])
            if len(args) != 3:
                raise ConfigError(f"{where}: {name} takes (start, stop, count)")
            a, b = parse_number(args[0], where), parse_number(args[1], where)
            n = parse_int(args[2], where)
            if n < 1:
                raise ConfigError(f"{where}: grid count must be positive")
            return [float(x) for x in fn(a, b, n)]
    return parse_list(t, where)


def _fmt_value(v):
    if isinstance(v, bool):
        return str(v).lower()
    return v if isinstance(v, str) else repr(v)


def _fmt_list(values):
    return ", ".join(repr(float(v)) for v in values)


# -- schema --------------------------------------------------------------------------

_TOP = {"scenario": "str", "seed": "int", "output_dir": "str", "horizon_time": "num"}
_SECTIONS = {
    "model": {"kind": "str", "n_tls": "int", "n_cavity": "int", "omega": "num", "omega_c": "num",
              "omega_tls": "list", "g": "num", "kappa": "num", "converge_fock": "bool"},
    "initial_state": {"pattern": "str"},
    "learning": {"dt": "num", "window_time": "num", "backend": "str", "compare_windows": "list",
                 "trajectory_stride": "int"},
    "observables": None,  # free-form names
    "kinetics": {"steady_state": "bool", "relaxation": "bool", "moments": "bool",
                 "resonance_scan": "bool", "dt_grid": "grid", "scan_window": "num",
                 "scan_observable": "str", "null_correction": "bool"},
    "sweep": {"kind": "str", "values": "grid", "n_tls": "list", "models": "str", "omega": "list",
              "observable": "str", "memory_factor": "num", "fock_cutoff": "int"},
    "disorder": {"parameter": "str", "lo": "num", "hi": "num", "center": "num",
                 "n_realizations": "int", "shared": "bool", "ensemble": "bool"},
}
_PARSERS = {"int": parse_int, "num": parse_number, "bool": parse_bool, "list": parse_list,
            "grid": parse_grid, "str": lambda t, w: t.strip()}


def parse_text(text):
    """Raw ``{section: {key: value-string}}``; top-level keys live under ``""``."""
    raw = {"": {}}
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("["):
            if not s.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header")
            section = s[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            if section in raw:
                raise ConfigError(f"line {lineno}: duplicate section [{section}]")
            raw[section] = {}
            continue
        if "=" not in s:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (x.strip() for x in s.split("=", 1))
        schema = _TOP if section == "" else _SECTIONS[section]
        if schema is not None and key not in schema:
            where = "top level" if section == "" else f"[{section}]"
            raise ConfigError(f"line {lineno}: unknown key '{key}' in {where}")
        if schema is None and not key.isidentifier():
            raise ConfigError(f"line {lineno}: observable name '{key}' is not an identifier")
        if key in raw[section]:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        raw[section][key] = value
    return raw


def _typed(raw):
    out = {}
    for section, items in raw.items():
        schema = _TOP if section == "" else _SECTIONS[section]
        typed = {}
        for key, value in items.items():
            kind = "str" if schema is None else schema[key]
            where = key if section == "" else f"[{section}] {key}"
            typed[key] = _PARSERS[kind](value, where)
        out[section] = typed
    return out


# -- resolved configuration ----------------------------------------------------------------

@dataclass
class ExperimentConfig:
    scenario: str
    model: ModelSpec
    pattern: str
    dt: float
    window_time: float
    horizon_time: float
    observables: dict
    output_dir: str
    seed: int = 0
    backend: str = "auto"
    compare_windows: list = field(default_factory=list)
    trajectory_stride: int = 1
    converge_fock: bool = False
    kinetics: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    disorder: dict = field(default_factory=dict)
    source: str = ""

    def to_text(self):
        """Fully resolved config in the input grammar."""
        m = self.model
        lines = [f"scenario = {self.scenario}", f"seed = {self.seed}",
                 f"output_dir = {self.output_dir}", f"horizon_time = {self.horizon_time!r}", "",
                 "[model]", f"kind = {m.kind}", f"n_tls = {m.n_tls}", f"n_cavity = {m.n_cavity}",
                 f"omega_c = {m.omega_c!r}", f"omega_tls = {_fmt_list(m.omega_tls)}",
                 f"g = {m.g!r}", f"kappa = {m.kappa!r}",
                 f"converge_fock = {str(self.converge_fock).lower()}", "",
                 "[initial_state]", f"pattern = {self.pattern}", "",
                 "[learning]", f"dt = {self.dt!r}", f"window_time = {self.window_time!r}",
                 f"backend = {self.backend}", f"trajectory_stride = {self.trajectory_stride}"]
        if self.compare_windows:
            lines.append(f"compare_windows = {_fmt_list(self.compare_windows)}")
        lines += ["", "[observables]"] + [f"{k} = {v}" for k, v in self.observables.items()]
        k = self.kinetics
        lines += ["", "[kinetics]"]
        for key in ("steady_state", "relaxation", "moments", "resonance_scan", "null_correction"):
            lines.append(f"{key} = {str(k[key]).lower()}")
        if k["resonance_scan"]:
            lines += [f"dt_grid = {_fmt_list(k['dt_grid'])}", f"scan_window = {k['scan_window']!r}",
                      f"scan_observable = {k['scan_observable']}"]
        if self.sweep.get("kind", "none") != "none":
            s = self.sweep
            lines += ["", "[sweep]", f"kind = {s['kind']}", f"values = {_fmt_list(s['values'])}"]
            for key in ("n_tls", "omega"):
                if s.get(key):
                    lines.append(f"{key} = {_fmt_list(s[key])}")
            if s.get("models"):
                lines.append(f"models = {', '.join(s['models'])}")
            if s.get("observable"):
                lines.append(f"observable = {s['observable']}")
            if s.get("memory_factor") is not None:
                lines.append(f"memory_factor = {s['memory_factor']!r}")
            if s.get("fock_cutoff") is not None:
                lines.append(f"fock_cutoff = {s['fock_cutoff']}")
        if self.disorder:
            d = self.disorder
            lines += ["", "[disorder]"] + [f"{key} = {_fmt_value(v)}" for key, v in d.items()]
        return "\n".join(lines) + "\n"


def _merge(base, override):
    out = {s: dict(items) for s, items in base.items()}
    for section, items in override.items():
        out.setdefault(section, {}).update(items)
    return out


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def load_config(text, overrides=None):
    """Parse, overlay on the named preset, and validate a config text."""
    raw = parse_text(text)
    if "scenario" not in raw[""]:
        raise ConfigError("missing field 'scenario'")
    name = raw[""]["scenario"].strip()
    if name != "custom":
        if name not in PRESETS:
            raise ConfigError(f"unknown scenario '{name}'")
        raw = _merge(parse_text(PRESETS[name][2]), raw)
    for key, value in (overrides or {}).items():
        raw[""][key] = str(value)
    return resolve(_typed(raw), text)


def _tls_frequencies(values, n_tls):
    if values is None:
        return None
    return tuple(values) * n_tls if len(values) == 1 else tuple(values)


def resolve(cfg, source=""):
    top = cfg.get("", {})
    scenario = top.get("scenario", "custom")
    model = cfg.get("model", {})
    for key in ("n_tls",):
        _require(key in model, f"missing field '[model] {key}'")
    kind = model.get("kind", "TC")
    _require(kind in KINDS, f"[model] kind must be one of {', '.join(KINDS)}")
    n_tls = model["n_tls"]
    omega_tls = model.get("omega_tls")
    try:
        spec = ModelSpec.create(kind=kind, n_tls=n_tls, n_cavity=model.get("n_cavity"),
                                omega=model.get("omega", 0.0), omega_c=model.get("omega_c"),
                                omega_tls=_tls_frequencies(omega_tls, n_tls),
                                g=model.get("g"), kappa=model.get("kappa", 1.0))
    except (ModelError, ValueError, TypeError) as exc:
        raise ConfigError(f"[model] {exc}") from None

    pattern = cfg.get("initial_state", {}).get("pattern", "fully_excited")
    try:
        parse_pattern(pattern)
    except (ModelError, ValueError) as exc:
        raise ConfigError(f"[initial_state] {exc}") from None

    learning = cfg.get("learning", {})
    _require("dt" in learning, "missing field '[learning] dt'")
    _require("window_time" in learning, "missing field '[learning] window_time'")
    dt, window = learning["dt"], learning["window_time"]
    _require(dt > 0, "[learning] dt must be positive")
    _require(window >= dt, "[learning] window_time must be >= dt")
    horizon = top.get("horizon_time", window)
    _require(horizon >= window, "horizon_time must be >= window_time")
    backend = learning.get("backend", "auto")
    _require(backend in ("auto", "dense", "taylor", "rk"), "[learning] unknown backend")
    compare = learning.get("compare_windows", [])
    _require(all(dt <= w <= horizon for w in compare), "[learning] compare_windows must lie in [dt, horizon]")
    stride = learning.get("trajectory_stride", 1)
    _require(stride >= 1, "[learning] trajectory_stride must be >= 1")

    observables = dict(cfg.get("observables", {})) or {"sz": "sz:1"}
    for name, op in observables.items():
        try:
            tls_observable(op, n_tls)
        except (ModelError, ValueError) as exc:
            raise ConfigError(f"[observables] {name}: {exc}") from None

    kin = cfg.get("kinetics", {})
    kinetics = {"steady_state": kin.get("steady_state", True), "relaxation": kin.get("relaxation", True),
                "moments": kin.get("moments", True), "resonance_scan": kin.get("resonance_scan", False),
                "null_correction": kin.get("null_correction", True)}
    if kinetics["resonance_scan"]:
        _require("dt_grid" in kin, "missing field '[kinetics] dt_grid'")
        grid = kin["dt_grid"]
        _require(all(x > 0 for x in grid) and all(b > a for a, b in zip(grid, grid[1:])),
                 "[kinetics] dt_grid must be positive and ascending")
        scan_window = kin.get("scan_window", window)
        _require(scan_window >= grid[-1], "[kinetics] scan_window shorter than one dt step")
        scan_obs = kin.get("scan_observable", next(iter(observables)))
        _require(scan_obs in observables, f"[kinetics] scan_observable '{scan_obs}' is not an observable")
        kinetics.update(dt_grid=grid, scan_window=scan_window, scan_observable=scan_obs)
    elif any(k in kin for k in ("dt_grid", "scan_window", "scan_observable")):
        raise ConfigError("[kinetics] scan settings given but resonance_scan is false")

    sw = cfg.get("sweep", {})
    sweep = {"kind": sw.get("kind", "none")}
    _require(sweep["kind"] in ("none", "kappa", "delta", "peak"), "[sweep] kind must be none, kappa, delta or peak")
    if sweep["kind"] != "none":
        _require("values" in sw, "missing field '[sweep] values'")
        vals = sw["values"]
        _require(len(vals) > 0 and all(v > 0 for v in vals), "[sweep] values must be positive")
        sweep["values"] = vals
        sweep["n_tls"] = [int(n) for n in sw.get("n_tls", [n_tls])]
        _require(all(n >= 1 and n == int(n) for n in sw.get("n_tls", [n_tls])), "[sweep] n_tls must be positive integers")
        models = [m.strip() for m in sw.get("models", kind).split(",") if m.strip()]
        _require(all(m in KINDS for m in models), "[sweep] unknown model in models")
        sweep["models"] = models
        sweep["omega"] = sw.get("omega", [])
        obs = sw.get("observable", next(iter(observables)))
        _require(obs in observables, f"[sweep] observable '{obs}' is not an observable")
        sweep["observable"] = obs
        sweep["memory_factor"] = sw.get("memory_factor", 2.0)
        _require(sweep["memory_factor"] > 0, "[sweep] memory_factor must be positive")
        sweep["fock_cutoff"] = sw.get("fock_cutoff")
        _require(sweep["fock_cutoff"] is None or sweep["fock_cutoff"] >= 1, "[sweep] fock_cutoff must be positive")
        if sweep["kind"] == "peak":
            _require(kinetics["resonance_scan"], "[sweep] kind = peak needs [kinetics] resonance_scan")
        if sweep["kind"] == "delta":
            _require(all(b > a for a, b in zip(vals, vals[1:])), "[sweep] delta values must ascend")
    elif any(k in sw for k in ("values", "n_tls", "models", "omega", "observable", "memory_factor",
                                 "fock_cutoff")):
        raise ConfigError("[sweep] settings given but kind is none")

    dis = dict(cfg.get("disorder", {}))
    if dis:
        dis.setdefault("parameter", "omega_tls")
        _require(dis["parameter"] in ("omega_tls", "omega_c", "g", "kappa"), "[disorder] unknown parameter")
        dis.setdefault("n_realizations", 1)
        _require(dis["n_realizations"] >= 1, "[disorder] n_realizations must be >= 1")
        dis.setdefault("shared", False)
        dis.setdefault("ensemble", True)
        if sweep["kind"] == "delta":
            _require("center" in dis, "missing field '[disorder] center'")
        if dis["ensemble"]:
            _require("lo" in dis and "hi" in dis, "missing field '[disorder] lo'" if "lo" not in dis
                     else "missing field '[disorder] hi'")
            _require(dis["lo"] <= dis["hi"], "[disorder] lo must not exceed hi")
    elif sweep["kind"] == "delta":
        raise ConfigError("[sweep] kind = delta needs a [disorder] section")

    seed = top.get("seed", 0)
    _require(0 <= seed < 2 ** 64, "seed must fit in 64 unsigned bits")
    out = top.get("output_dir", f"out/{scenario}")
    return ExperimentConfig(scenario=scenario, model=spec, pattern=pattern, dt=dt, window_time=window,
                            horizon_time=horizon, observables=observables, output_dir=out, seed=seed,
                            backend=backend, compare_windows=list(compare), trajectory_stride=stride,
                            converge_fock=model.get("converge_fock", False), kinetics=kinetics,
                            sweep=sweep, disorder=dis, source=source)


# -- presets ---------------------------------------------------------------------------------

_KAPPA_GRID = "logspace(-2, 3, 12)"

PRESETS = {
    "fig2": ("TTM vs exact propagation, N=4 TC, windows 3.5 and 1.5", "figure 2", """
horizon_time = 20
[model]
kind = TC
n_tls = 4
n_cavity = 5
g = 5
[learning]
dt = 0.01
window_time = 3.5
compare_windows = 1.5
[observables]
sz = sz:1
[kinetics]
moments = false
"""),
    "fig3a": ("steady state, fully excited N=2", "figure 3a", """
horizon_time = 20
[model]
kind = TC
n_tls = 2
g = 10
[initial_state]
pattern = fully_excited
[learning]
dt = 0.01
window_time = 6
[observables]
sz = sz:1
sz2 = sz:2
"""),
    "fig3b": ("steady state, singly excited N=2 (partially trapped)", "figure 3b", """
horizon_time = 20
[model]
kind = TC
n_tls = 2
g = 10
[initial_state]
pattern = singly_excited:1
[learning]
dt = 0.01
window_time = 6
[observables]
sz = sz:1
sz2 = sz:2
"""),
    "fig3c": ("steady state, fully excited N=4", "figure 3c", """
horizon_time = 20
[model]
kind = TC
n_tls = 4
n_cavity = 5
g = 10
[initial_state]
pattern = fully_excited
[learning]
dt = 0.01
window_time = 4
[observables]
sz = sz:1
sz4 = sz:4
[kinetics]
moments = false
"""),
    "fig3d": ("steady state, triply excited N=4 (partially trapped)", "figure 3d", """
horizon_time = 20
[model]
kind = TC
n_tls = 4
n_cavity = 5
g = 10
[initial_state]
pattern = k_excited:3
[learning]
dt = 0.01
window_time = 4
[observables]
sz = sz:1
sz4 = sz:4
[kinetics]
moments = false
"""),
    "fig4": ("sigma_z relaxation time, N=2, under/critically/over-damped", "figure 4", """
horizon_time = 10
[model]
kind = TC
n_tls = 2
[learning]
dt = 0.01
window_time = 8
[observables]
sz = sz:1
[sweep]
kind = kappa
values = 1, 15, 1000
"""),
    "fig5": ("rate vs kappa turnover, N=2,3,4", "figure 5", f"""
horizon_time = 8
[model]
kind = TC
n_tls = 2
[learning]
dt = 0.01
window_time = 8
[observables]
survival = survival
[sweep]
kind = kappa
values = {_KAPPA_GRID}
n_tls = 2, 3, 4
"""),
    "fig6": ("lifetime vs time step resonances, singly excited N=2", "figure 6", """
horizon_time = 8
[model]
kind = TC
n_tls = 2
[initial_state]
pattern = singly_excited:1
[learning]
dt = 0.01
window_time = 8
[observables]
sz = sz:1
[kinetics]
resonance_scan = true
dt_grid = linspace(0.005, 2, 400)
scan_window = 8
"""),
    "fig7": ("singly excited N=2 dynamics sampled at the resonant step", "figure 7", """
horizon_time = 8
[model]
kind = TC
n_tls = 2
[initial_state]
pattern = singly_excited:1
[learning]
dt = pi/5
window_time = 8
[observables]
sz = sz:1
"""),
    "fig8": ("resonance peak rate vs kappa (kappa/4 law)", "figure 8", """
horizon_time = 8
[model]
kind = TC
n_tls = 2
[initial_state]
pattern = singly_excited:1
[learning]
dt = 0.01
window_time = 8
[observables]
sz = sz:1
[kinetics]
resonance_scan = true
dt_grid = linspace(0.4, 0.9, 101)
scan_window = 16
[sweep]
kind = peak
values = 0.5, 1, 2
"""),
    "fig9": ("survival-probability resonances, fully excited N=2", "figure 9", """
horizon_time = 8
[model]
kind = TC
n_tls = 2
[learning]
dt = 0.01
window_time = 8
[observables]
survival = survival
[kinetics]
resonance_scan = true
dt_grid = linspace(0.005, 2, 400)
scan_window = 8
"""),
    "fig10": ("disorder-averaged decay rate vs disorder width", "figure 10", """
horizon_time = 10
seed = 1
[model]
kind = TC
n_tls = 2
omega_c = 50
omega_tls = 45
[learning]
dt = 0.02
window_time = 10
[observables]
sz = sz:1
[kinetics]
moments = false
[sweep]
kind = delta
values = 0.001, 0.01, 0.1, 1, 5, 10, 25
[disorder]
parameter = omega_tls
center = 45
n_realizations = 50
ensemble = false
"""),
    "fig11a": ("DA-TTM vs averaged tensors, fully excited", "figure 11a", """
horizon_time = 10
seed = 1
[model]
kind = TC
n_tls = 2
omega_c = 50
omega_tls = 45
[initial_state]
pattern = fully_excited
[learning]
dt = 0.1
window_time = 8
trajectory_stride = 10
[observables]
sz = sz:1
[kinetics]
moments = false
[disorder]
parameter = omega_tls
lo = 40
hi = 50
n_realizations = 50
"""),
    "fig11b": ("DA-TTM vs averaged tensors, singly excited", "figure 11b", """
horizon_time = 10
seed = 1
[model]
kind = TC
n_tls = 2
omega_c = 50
omega_tls = 45
[initial_state]
pattern = singly_excited:1
[learning]
dt = 0.1
window_time = 8
trajectory_stride = 10
[observables]
sz = sz:1
[kinetics]
moments = false
[disorder]
parameter = omega_tls
lo = 40
hi = 50
n_realizations = 50
"""),
    "fig11c": ("DA-TTM vs averaged tensors, coherent superposition", "figure 11c", """
horizon_time = 10
seed = 1
[model]
kind = TC
n_tls = 2
omega_c = 50
omega_tls = 45
[initial_state]
pattern = coherent_superposition
[learning]
dt = 0.1
window_time = 8
trajectory_stride = 10
[observables]
sz = sz:1
[kinetics]
moments = false
[disorder]
parameter = omega_tls
lo = 40
hi = 50
n_realizations = 50
"""),
    "fig12a": ("TC/Dicke/PF rate vs kappa, resonant omega = 10 and 100", "figure 12a", f"""
horizon_time = 8
[model]
kind = TC
n_tls = 2
[learning]
dt = 0.01
window_time = 8
[observables]
sz = sz:1
[sweep]
kind = kappa
values = {_KAPPA_GRID}
models = TC, Dicke, PF
omega = 10, 100
memory_factor = 6
fock_cutoff = 8
"""),
    "fig12b": ("TC/Dicke/PF rate vs kappa, omega_a = 10, omega_c = 15", "figure 12b", f"""
horizon_time = 8
[model]
kind = TC
n_tls = 2
omega_c = 15
omega_tls = 10
[learning]
dt = 0.01
window_time = 8
[observables]
sz = sz:1
[sweep]
kind = kappa
values = {_KAPPA_GRID}
models = TC, Dicke, PF
memory_factor = 6
fock_cutoff = 8
"""),
}


def catalog():
    """``(name, description, anchor)`` for every preset, in order."""
    return [(name, desc, anchor) for name, (desc, anchor, _) in PRESETS.items()]
