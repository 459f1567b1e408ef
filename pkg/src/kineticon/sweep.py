"""Config-driven design-space sweeps and their CSV / gnuplot-block output.

A config is a JSON document::

    {
      "schema_version": 1,
      "mode": "alpha_vs_L_Istar",
      "axes": [{"name": "L_nH", "start": 0.1, "stop": 10, "points": 100, "scale": "log"},
               {"name": "Istar_uA", "start": 1, "stop": 100, "points": 100, "scale": "log"}],
      "fixed": {"f_r_GHz": 100},
      "materials": [],
      "output": {"path": "alpha.csv", "format": "csv"}
    }

Quantity names carry their unit as a suffix; values are converted to SI
when the sweep runs. Grids are evaluated in row-major order (first axis
outermost) and always written in that order.
"""

import csv
import hashlib
import io
import json
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import cavity, circuit, materials, resonator
from . import constants as const
from .constants import CONSTANTS_VERSION
from .errors import (
    AmbiguousResonanceError,
    BifurcationError,
    ConfigValidationError,
    ConvergenceError,
    DomainError,
    KineticonError,
    ValidityError,
    ValidityWarning,
)

SCHEMA_VERSION = 1

NETWORK_DEFAULTS = {
    "f0_GHz": 100.0,
    "Z0_ohm": 50.0,
    "eps_eff": 6.45,
    "C_couple_fF": 1.0,
    "L0k_nH": 1.0,
    "Istar_uA": 10.0,
    "Zref_ohm": 50.0,
    "loss_Np_per_m": 0.0,
    "length_um": None,
    "elements": None,
}

MODES = {
    "alpha_vs_L_Istar": {
        "axes": ("L_nH", "Istar_uA"),
        "fixed": {"f_r_GHz": 100.0},
    },
    "alpha_vs_dimension": {
        "axes": ("side_um",),
        "fixed": {"f_r_GHz": 100.0, "thickness_nm": 5.0},
        "materials": ("TiN", "NbN"),
    },
    "resonator_s21": {
        "axes": ("f_hz",),
        "fixed": dict(NETWORK_DEFAULTS),
    },
    "duffing_power": {
        "axes": ("power_W",),
        "fixed": dict(NETWORK_DEFAULTS, kerr_factor=resonator.KERR_FACTOR),
    },
    "cavity_modes": {
        "axes": (),
        "fixed": {"a_mm": 1.0, "b_mm": 2.54, "d_mm": 1.4, "eps_eff": 1.0, "max_index": 2},
    },
    "coupled_s21": {
        "axes": ("f_hz",),
        "fixed": {
            "f_cavity_GHz": 100.0,
            "f_qubit_GHz": 100.0,
            "lambda_q": 0.0,
            "g_MHz": 50.0,
            "kappa1_MHz": 5.0,
            "kappa2_MHz": 5.0,
            "gamma_MHz": 1.0,
        },
    },
}

FORMATS = ("csv", "contour")
REASONS = {ValidityError: "validity", DomainError: "validity", ConvergenceError: "convergence", BifurcationError: "bifurcation"}


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    axes: tuple
    fixed: dict
    materials: tuple
    output_path: str = None
    output_format: str = "csv"
    schema_version: int = SCHEMA_VERSION
    source: dict = field(default_factory=dict, compare=False)

    def digest(self):
        return hashlib.sha256(json.dumps(self.source, sort_keys=True).encode()).hexdigest()


@dataclass
class SweepResult:
    columns: tuple
    rows: list
    reasons: list
    shape: tuple
    provenance: dict

    @property
    def failed(self):
        return sum(1 for r in self.reasons if r)


def _check_axis(i, ax, errors):
    label = f"axes[{i}]" + (f" ({ax.get('name')})" if isinstance(ax, dict) and "name" in ax else "")
    if not isinstance(ax, dict):
        errors.append(f"{label}: must be an object")
        return None
    for key in ("name", "start", "stop", "points"):
        if key not in ax:
            errors.append(f"{label}: missing '{key}'")
    unknown = set(ax) - {"name", "start", "stop", "points", "scale"}
    if unknown:
        errors.append(f"{label}: unknown keys {sorted(unknown)}")
    if any(k not in ax for k in ("name", "start", "stop", "points")):
        return None
    ok = True
    if not isinstance(ax["points"], int) or isinstance(ax["points"], bool) or ax["points"] < 2:
        errors.append(f"{label}: points must be an integer >= 2, got {ax['points']!r}")
        ok = False
    nums = all(isinstance(ax[k], (int, float)) and not isinstance(ax[k], bool) for k in ("start", "stop"))
    if not nums:
        errors.append(f"{label}: start and stop must be numbers")
        return None
    if not ax["start"] < ax["stop"]:
        errors.append(f"{label}: start must be below stop")
        ok = False
    scale = ax.get("scale", "linear")
    if scale not in ("linear", "log"):
        errors.append(f"{label}: scale must be 'linear' or 'log'")
        ok = False
    elif scale == "log" and ax["start"] <= 0:
        errors.append(f"{label}: log axis needs positive bounds")
        ok = False
    if not ok:
        return None
    return Axis(ax["name"], float(ax["start"]), float(ax["stop"]), ax["points"], scale)


def parse_config(text, registry=None):
    """Validate a JSON config, reporting every schema problem at once."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigValidationError([f"malformed JSON: {exc}"]) from None
    if not isinstance(doc, dict):
        raise ConfigValidationError(["config must be a JSON object"])
    errors = []
    unknown = set(doc) - {"schema_version", "mode", "axes", "fixed", "materials", "output"}
    if unknown:
        errors.append(f"unknown top-level keys {sorted(unknown)}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        errors.append(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    mode = doc.get("mode")
    spec = MODES.get(mode)
    if spec is None:
        errors.append(f"mode must be one of {sorted(MODES)}, got {mode!r}")

    axes = []
    raw_axes = doc.get("axes", [])
    if not isinstance(raw_axes, list):
        errors.append("axes must be a list")
        raw_axes = []
    for i, ax in enumerate(raw_axes):
        parsed = _check_axis(i, ax, errors)
        if parsed is not None:
            axes.append(parsed)
    if spec is not None:
        names = [a.get("name") for a in raw_axes if isinstance(a, dict)]
        if tuple(names) != spec["axes"]:
            errors.append(f"mode {mode} needs axes {list(spec['axes'])} in that order, got {names}")

    fixed = doc.get("fixed", {})
    if not isinstance(fixed, dict):
        errors.append("fixed must be an object")
        fixed = {}
    if spec is not None:
        bad = set(fixed) - set(spec["fixed"])
        if bad:
            errors.append(f"unknown fixed parameters for {mode}: {sorted(bad)}; allowed: {sorted(spec['fixed'])}")
        fixed = dict(spec["fixed"], **fixed)

    raw_materials = doc.get("materials", [])
    if not isinstance(raw_materials, list):
        errors.append("materials must be a list")
        raw_materials = []
    for i, m in enumerate(raw_materials):
        if not isinstance(m, (str, dict)):
            errors.append(f"materials[{i}]: expected a name or an object")

    output = doc.get("output", {})
    if not isinstance(output, dict):
        errors.append("output must be an object")
        output = {}
    fmt = output.get("format", "csv")
    if fmt not in FORMATS:
        errors.append(f"output.format must be one of {list(FORMATS)}, got {fmt!r}")

    if errors:
        raise ConfigValidationError(errors)

    extra = []
    for m in raw_materials:
        if isinstance(m, dict):
            try:
                extra.append(materials.material_from_config(m))
            except DomainError as exc:
                errors.append(f"material {m.get('name', '?')}: {exc}")
    if errors:
        raise ConfigValidationError(errors)
    reg = registry or materials.MaterialRegistry(extra)
    if registry is not None and extra:
        reg = materials.MaterialRegistry(list(registry.values()) + extra)
    names = [m if isinstance(m, str) else m["name"] for m in raw_materials]
    if not names and "materials" in spec:
        names = list(spec["materials"])
    resolved = tuple(reg[n] for n in names)  # RegistryError on unknown names

    return SweepConfig(
        mode=mode,
        axes=tuple(axes),
        fixed=fixed,
        materials=resolved,
        output_path=output.get("path"),
        output_format=fmt,
        schema_version=version,
        source=doc,
    )


# ---------------------------------------------------------------------------
# evaluation


def network_from_fixed(fixed):
    """Build a ResonatorNetwork from sweep ``fixed`` parameters (lab units)."""
    elements = fixed.get("elements")
    if elements is None:
        length = fixed.get("length_um")
        return resonator.fabry_perot(
            f0=fixed["f0_GHz"] * 1e9,
            Z0=fixed["Z0_ohm"],
            eps_eff=fixed["eps_eff"],
            C_couple=fixed["C_couple_fF"] * 1e-15,
            L0k=fixed["L0k_nH"] * 1e-9,
            Istar=fixed["Istar_uA"] * 1e-6,
            Zref=fixed["Zref_ohm"],
            loss=fixed["loss_Np_per_m"],
            length=None if length is None else length * 1e-6,
        )
    return network_from_elements(elements, fixed.get("Zref_ohm", 50.0))


def network_from_elements(elements, Zref=50.0):
    """Element-list schema: objects with a ``type`` key.

    ``line``: Z0_ohm, eps_eff, length_um, loss_Np_per_m (optional);
    ``series_capacitor``: C_fF; ``series_inductor``: L_nH;
    ``shunt_capacitor``: C_fF; ``nanowire``: L0k_nH, Istar_uA (exactly one).
    """
    out = []
    wire = None
    for i, el in enumerate(elements):
        kind = el.get("type")
        if kind == "line":
            out.append(
                resonator.TransmissionLine(
                    Z0=el["Z0_ohm"],
                    v_ph=const.c / math.sqrt(el.get("eps_eff", 1.0)),
                    length=el["length_um"] * 1e-6,
                    loss=el.get("loss_Np_per_m", 0.0),
                )
            )
        elif kind == "series_capacitor":
            out.append(resonator.SeriesCapacitor(el["C_fF"] * 1e-15))
        elif kind == "series_inductor":
            out.append(resonator.SeriesInductor(el["L_nH"] * 1e-9))
        elif kind == "shunt_capacitor":
            out.append(resonator.ShuntCapacitor(el["C_fF"] * 1e-15))
        elif kind == "nanowire":
            wire = i
            out.append(resonator.Nanowire(el["L0k_nH"] * 1e-9, el["Istar_uA"] * 1e-6))
        else:
            raise DomainError(f"elements[{i}]: unknown element type {kind!r}")
    return resonator.ResonatorNetwork(tuple(out), Zref=Zref, nanowire_index=wire if wire is not None else -1)


def _db(s):
    return 20 * math.log10(abs(s)) if s != 0 else -math.inf


def _grid(axes):
    values = [ax.values() for ax in axes]
    if not values:
        return [()], ()
    mesh = np.meshgrid(*values, indexing="ij")
    points = list(zip(*(m.ravel().tolist() for m in mesh)))
    return points, tuple(len(v) for v in values)


def _run_points(points, fields, evaluate, strict):
    rows, reasons = [], []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("error" if strict else "always", ValidityWarning)
        for pt in points:
            try:
                vals = evaluate(*pt)
                reasons.append("")
            except (KineticonError, ValidityWarning) as exc:
                vals = (math.nan,) * len(fields)
                reasons.append(_reason(exc))
            rows.append(tuple(pt) + tuple(vals))
    soft = [w for w in caught if issubclass(w.category, ValidityWarning)]
    if soft:
        warnings.warn(
            f"{len(soft)} validity warnings across the sweep, first: {soft[0].message}",
            ValidityWarning,
            stacklevel=3,
        )
    return rows, reasons


def _reason(exc):
    if isinstance(exc, ValidityWarning):
        return "validity"
    for cls, code in REASONS.items():
        if isinstance(exc, cls):
            return code
    return "validity"


def _alpha_vs_L_Istar(cfg, points):
    f_r = cfg.fixed["f_r_GHz"] * 1e9

    def evaluate(L_nH, I_uA):
        c = circuit.KineticonCircuit.from_frequency(L_nH * 1e-9, f_r, I_uA * 1e-6)
        return (circuit.alpha_perturbative(c),)

    return ("alpha",), evaluate


def _alpha_vs_dimension(cfg, points):
    f_r = cfg.fixed["f_r_GHz"] * 1e9
    t = cfg.fixed["thickness_nm"] * 1e-9
    mats = cfg.materials

    def evaluate(side_um):
        side = side_um * 1e-6
        V = materials.NanowireGeometry(w=side, l=side, t=t).volume
        return tuple(materials.alpha_volume(m, f_r, V) for m in mats)

    return tuple(f"alpha_{m.name}" for m in mats), evaluate


def _resonator_s21(cfg, points):
    net = network_from_fixed(cfg.fixed)

    def evaluate(f):
        s = complex(resonator.s21(resonator.cascade(net.elements, f), net.Zref))
        return s.real, s.imag, _db(s)

    return ("s21_re", "s21_im", "s21_db"), evaluate


def _duffing_power(cfg, points):
    net = network_from_fixed(cfg.fixed)
    kerr = cfg.fixed["kerr_factor"]
    f0 = resonator.small_signal_f0(net)
    B = _bandwidth(net, f0)

    def evaluate(power):
        res = resonator.duffing_shift(net, power, kerr_factor=kerr)
        ok = resonator.readout_ok(abs(res.delta_f), res.n_photons, B)
        return res.f0_shifted, res.delta_f, res.n_photons, B, int(ok)

    return ("f0_shifted_hz", "delta_f_hz", "n_photons", "bandwidth_hz", "readout_ok"), evaluate


def _bandwidth(net, f0):
    span = 0.05 * f0
    for _ in range(8):
        sweep = resonator.sweep_s21(net, f0 - span, f0 + span, 4001)
        try:
            res = resonator.find_resonance(sweep)
        except AmbiguousResonanceError:
            span /= 4
            continue
        if res.B > 20 * span / 4000:
            return res.B
        span /= 4
    raise ConvergenceError("could not resolve the resonator bandwidth")


def _coupled_s21(cfg, points):
    fx = cfg.fixed
    system = cavity.CoupledSystem(
        f_cavity=fx["f_cavity_GHz"] * 1e9,
        f_qubit=fx["f_qubit_GHz"] * 1e9,
        lambda_q=fx["lambda_q"],
        g=fx["g_MHz"] * 1e6,
        kappa1=fx["kappa1_MHz"] * 1e6,
        kappa2=fx["kappa2_MHz"] * 1e6,
        gamma=fx["gamma_MHz"] * 1e6,
    )

    def evaluate(f):
        s = complex(cavity.s21_coupled(system, [f])[0][1])
        return s.real, s.imag, _db(s)

    return ("s21_re", "s21_im", "s21_db"), evaluate


_EVALUATORS = {
    "alpha_vs_L_Istar": _alpha_vs_L_Istar,
    "alpha_vs_dimension": _alpha_vs_dimension,
    "resonator_s21": _resonator_s21,
    "duffing_power": _duffing_power,
    "coupled_s21": _coupled_s21,
}


def run_sweep(cfg, strict=False):
    """Evaluate every grid point in order. ``strict`` turns validity warnings into point failures."""
    provenance = {
        "config_sha256": cfg.digest(),
        "constants": CONSTANTS_VERSION,
        "mode": cfg.mode,
        "schema_version": cfg.schema_version,
    }
    if cfg.mode == "cavity_modes":
        fx = cfg.fixed
        box = cavity.RectCavity(fx["a_mm"] * 1e-3, fx["b_mm"] * 1e-3, fx["d_mm"] * 1e-3, fx["eps_eff"])
        rows = cavity.mode_table(box, int(fx["max_index"]))
        return SweepResult(("family", "m", "n", "p", "f_hz"), rows, [""] * len(rows), (len(rows),), provenance)
    points, shape = _grid(cfg.axes)
    fields, evaluate = _EVALUATORS[cfg.mode](cfg, points)
    rows, reasons = _run_points(points, fields, evaluate, strict)
    columns = tuple(ax.name for ax in cfg.axes) + fields
    return SweepResult(columns, rows, reasons, shape, provenance)


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(result, fmt="csv"):
    """Serialize a result to text. Re-rendering the same result is byte-identical."""
    with_reason = result.failed > 0
    columns = list(result.columns) + (["reason"] if with_reason else [])
    rows = [
        [_fmt(v) for v in row] + ([reason] if with_reason else [])
        for row, reason in zip(result.rows, result.reasons)
    ]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "contour":
        lines = [f"# {k}: {v}" for k, v in sorted(result.provenance.items())]
        lines.append("# " + " ".join(columns))
        inner = result.shape[-1] if result.shape else len(rows)
        for i, row in enumerate(rows):
            if i and i % inner == 0:
                lines.append("")
            lines.append(" ".join(v if v else "-" for v in row))
        return "\n".join(lines) + "\n"
    raise DomainError(f"unknown output format {fmt!r}")


def emit(result, path, fmt="csv"):
    """Write ``result`` to ``path``; CSV output also gets a ``.meta.json`` provenance file."""
    text = render(result, fmt)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
        if fmt == "csv":
            with open(os.fspath(path) + ".meta.json", "w") as fh:
                json.dump(result.provenance, fh, sort_keys=True, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write sweep output to {path}: {exc.strerror}") from exc
    return path
