"""End-to-end session orchestration, metrics, and CSV trace export.

Four session types mirror the library's experiments: pure
synchronization, analog masked transmission, the digital fixed-point
bitstream path, and synchronization-gated channel hopping.  Every
session is deterministic in (config, seed).
"""

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _accel
from .bitcodec import FrameSpec, correlate, decide, lsb_bits, mask_bits, spread
from .core import BasinEscapeError, LogisticParams
from .fixedpoint import FixedParams, fx_run_sync
from .hopper import ChannelTable, build_default_table, hop_trigger, select_channel
from .masking import (
    DEFAULT_HOLD,
    DEFAULT_OPERATOR,
    DEFAULT_SETTLE,
    get_operator,
    threshold_detect,
)

TRACE_COLUMNS = ("n", "x", "y", "z", "e", "epsilon", "u", "i", "i_hat", "bit", "channel")

SOURCE_OFF = "off"
SOURCE_BERNOULLI = "bernoulli"
SOURCE_PATTERN = "pattern"

CHANNEL_IDEAL = "ideal"
CHANNEL_DISTURBANCE = "disturbance"

DEFAULT_SYNC_TOL = 1e-6
DEFAULT_SYNC_WINDOW = 5
DEFAULT_GUARD_FACTOR = 1e3


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


class DivergenceError(RuntimeError):
    """Response state exceeded the configured guard bound."""


@dataclass(frozen=True)
class ScenarioConfig:
    """All experiment knobs for one session."""

    mu: float = 3.7
    k: float = 1.0
    rho: float = 0.5
    x0: float = 0.1
    y0: float = -1.0
    steps: int = 50
    sample_time: float = 2.5e-4  # pacing/plot metadata only
    operator: str = DEFAULT_OPERATOR
    amplitude: float = 1.0
    hold: int = DEFAULT_HOLD
    settle: int = DEFAULT_SETTLE
    threshold: float | None = None  # None -> amplitude / 2
    source: str = SOURCE_OFF
    source_p: float = 0.5
    seed: int | None = None
    pattern: str = ""
    mode: str = "float"
    frame_m: int = 16
    frame_n: int = 4
    frac_bits: int = 12
    channel: str = CHANNEL_IDEAL
    disturbance: float = 0.0
    sessions: int = 20
    active_steps: int = 40
    sync_tol: float = DEFAULT_SYNC_TOL
    sync_window: int = DEFAULT_SYNC_WINDOW
    guard: float = DEFAULT_GUARD_FACTOR

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if not 0.0 < self.x0_real < self.k_real:
            raise ConfigError(f"x0 must lie in (0, {self.k_real})")
        if self.settle >= self.steps:
            raise ConfigError("settle must be smaller than steps")
        if self.source not in (SOURCE_OFF, SOURCE_BERNOULLI, SOURCE_PATTERN):
            raise ConfigError(f"unknown source {self.source!r}")
        if self.channel not in (CHANNEL_IDEAL, CHANNEL_DISTURBANCE):
            raise ConfigError(f"unknown channel model {self.channel!r}")
        if self.mode not in ("float", "fixed"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.source == SOURCE_BERNOULLI and self.seed is None:
            raise ConfigError("bernoulli source requires an explicit seed")
        if self.source == SOURCE_PATTERN and not set(self.pattern) <= {"0", "1"}:
            raise ConfigError("pattern must be a nonempty string over {0,1}")
        if self.source == SOURCE_PATTERN and not self.pattern:
            raise ConfigError("pattern must be a nonempty string over {0,1}")

    @property
    def k_real(self) -> float:
        return float(self.k)

    @property
    def x0_real(self) -> float:
        return float(self.x0)

    @property
    def detect_threshold(self) -> float:
        return self.amplitude / 2.0 if self.threshold is None else self.threshold

    @property
    def frame(self) -> FrameSpec:
        return FrameSpec(m=self.frame_m, n=self.frame_n)

    @property
    def logistic(self) -> LogisticParams:
        return LogisticParams(mu=self.mu, k=self.k)

    @property
    def fixed_params(self) -> FixedParams:
        if int(self.k) != self.k:
            raise ConfigError("fixed mode requires an integer scale factor")
        return FixedParams.from_real(self.mu, self.rho, k=int(self.k),
                                     frac_bits=self.frac_bits)


_BOOLISH = ()

_FIELD_PARSERS = {
    "mu": float, "k": float, "rho": float, "x0": float, "y0": float,
    "steps": int, "sample_time": float, "operator": str, "amplitude": float,
    "hold": int, "settle": int, "threshold": float, "source": str,
    "source_p": float, "seed": int, "pattern": str, "mode": str,
    "frame_m": int, "frame_n": int, "frac_bits": int, "channel": str,
    "disturbance": float, "sessions": int, "active_steps": int,
    "sync_tol": float, "sync_window": int, "guard": float,
}


def parse_config_text(text: str) -> ScenarioConfig:
    """Flat key=value scenario file; '#' comments; unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _FIELD_PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _FIELD_PARSERS[key](value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    return ScenarioConfig(**values)


def load_config(path) -> ScenarioConfig:
    with open(path) as fh:
        return parse_config_text(fh.read())


@dataclass
class SessionTrace:
    """Per-step records as parallel columns; None marks an absent field."""

    data: dict

    @classmethod
    def empty(cls) -> "SessionTrace":
        return cls(data={name: [] for name in TRACE_COLUMNS})

    def append(self, **fields) -> None:
        for name in TRACE_COLUMNS:
            self.data[name].append(fields.get(name))

    def __len__(self):
        return len(self.data["n"])

    def column(self, name: str) -> list:
        return self.data[name]

    def array(self, name: str) -> np.ndarray:
        """Column as float array with NaN for absent entries."""
        return np.array(
            [math.nan if v is None else float(v) for v in self.data[name]]
        )


@dataclass(frozen=True)
class HopRecord:
    session: int
    step: int
    j_tx: int
    j_rx: int
    error: int


@dataclass(frozen=True)
class Metrics:
    """Summary quantities extracted from a session trace."""

    sync_step: int | None
    max_abs_error: float
    ber: float | None = None
    channel_error_count: int | None = None
    bits_total: int | None = None
    bit_errors: int | None = None
    saturations: int | None = None
    hops: tuple = ()

    def summary_lines(self) -> list[str]:
        def show(v):
            return "n/a" if v is None else v

        lines = [
            f"sync_step: {show(self.sync_step)}",
            f"max_abs_error: {self.max_abs_error!r}",
            f"ber: {show(self.ber)}",
        ]
        if self.bits_total is not None:
            lines.append(f"bits_total: {self.bits_total}")
            lines.append(f"bit_errors: {self.bit_errors}")
        if self.channel_error_count is not None:
            lines.append(f"channel_error_count: {self.channel_error_count}")
            lines.append(f"hop_count: {len(self.hops)}")
            lines.append(
                f"distinct_channels: {len({h.j_tx for h in self.hops})}"
            )
        if self.saturations is not None:
            lines.append(f"saturations: {self.saturations}")
        return lines


def _sync_step(errors, tol: float, window: int) -> int | None:
    """First index n such that |e| < tol for the window ending at n."""
    run = 0
    for n, e in enumerate(errors):
        if e is None or math.isnan(e):
            run = 0
            continue
        run = run + 1 if abs(e) < tol else 0
        if run >= window:
            return n
    return None


def _symbol_stream(cfg: ScenarioConfig, n_blocks: int, rng) -> np.ndarray:
    """Source bits for n_blocks hold-windows."""
    if cfg.source == SOURCE_BERNOULLI:
        return (rng.random(n_blocks) < cfg.source_p).astype(np.uint8)
    if cfg.source == SOURCE_PATTERN:
        pattern = np.array([int(c) for c in cfg.pattern], dtype=np.uint8)
        return np.resize(pattern, n_blocks)
    return np.zeros(n_blocks, dtype=np.uint8)


def run_sync_session(cfg: ScenarioConfig):
    """Idle synchronization: drive on its orbit, response tracking it."""
    if cfg.source != SOURCE_OFF:
        raise ConfigError("sync session requires source=off")
    cfg.logistic  # validate parameters
    xs, ys, us, escape = _accel.coupled_sync(
        cfg.mu, cfg.k, cfg.rho, cfg.x0, cfg.y0, cfg.steps
    )
    if escape >= 0:
        raise BasinEscapeError(escape, xs[escape])
    trace = SessionTrace.empty()
    for n in range(cfg.steps + 1):
        trace.append(
            n=n, x=xs[n], y=ys[n], e=ys[n] - xs[n],
            u=us[n] if n < cfg.steps else None,
        )
    errors = [ys[n] - xs[n] for n in range(cfg.steps + 1)]
    metrics = Metrics(
        sync_step=_sync_step(errors, cfg.sync_tol, cfg.sync_window),
        max_abs_error=float(np.max(np.abs(errors))),
    )
    return trace, metrics


def run_transmit_session(cfg: ScenarioConfig):
    """Analog masked transmission with per-hold-window bit decisions."""
    if cfg.source == SOURCE_OFF:
        raise ConfigError("transmit session requires an information source")
    if cfg.mode != "float":
        raise ConfigError("transmit session runs in float mode")
    if cfg.steps % cfg.hold != 0:
        raise ConfigError("steps must be a multiple of hold")
    cfg.logistic  # validate parameters
    rng = np.random.default_rng(cfg.seed)
    n_blocks = cfg.steps // cfg.hold
    bits = _symbol_stream(cfg, n_blocks, rng)
    info = np.repeat(bits.astype(float) * cfg.amplitude, cfg.hold)
    if cfg.channel == CHANNEL_DISTURBANCE and cfg.disturbance > 0:
        dist = rng.uniform(-cfg.disturbance, cfg.disturbance, cfg.steps)
    else:
        dist = np.zeros(cfg.steps)
    guard = cfg.guard * cfg.k

    op = get_operator(cfg.operator)
    if cfg.operator == DEFAULT_OPERATOR:
        xs, ys, zs, us, eps, escape, diverge = _accel.additive_transmit(
            cfg.mu, cfg.k, cfg.rho, cfg.x0, cfg.y0, info, dist, guard
        )
        if escape >= 0:
            raise BasinEscapeError(escape, xs[escape])
        if diverge >= 0:
            raise DivergenceError(
                f"response exceeded guard {guard} at step {diverge}"
            )
        ihat = zs - ys[:-1]
    else:
        xs = np.zeros(cfg.steps + 1)
        ys = np.zeros(cfg.steps + 1)
        zs = np.zeros(cfg.steps)
        us = np.zeros(cfg.steps)
        eps = np.zeros(cfg.steps)
        ihat = np.zeros(cfg.steps)
        xs[0], ys[0] = cfg.x0, cfg.y0
        x, y = cfg.x0, cfg.y0
        mu, k, rho = cfg.mu, cfg.k, cfg.rho
        for n in range(cfg.steps):
            z = op.forward(x, info[n]) + dist[n]
            zs[n] = z
            e = y - z
            eps[n] = e
            ihat[n] = op.recover(z, y)
            u = (mu * (e + 2.0 * z - k) + rho * k) * e / k
            us[n] = u
            y = mu * y * (1.0 - y / k) + u
            x = mu * x * (1.0 - x / k)
            xs[n + 1] = x
            ys[n + 1] = y
            if not 0.0 < x < k:
                raise BasinEscapeError(n + 1, x)
            if abs(y) > guard:
                raise DivergenceError(f"response exceeded guard {guard} at step {n + 1}")

    decisions = threshold_detect(ihat, cfg.hold, cfg.detect_threshold)

    trace = SessionTrace.empty()
    for n in range(cfg.steps + 1):
        last_of_block = n < cfg.steps and (n + 1) % cfg.hold == 0
        trace.append(
            n=n, x=xs[n], y=ys[n], e=ys[n] - xs[n],
            z=zs[n] if n < cfg.steps else None,
            epsilon=eps[n] if n < cfg.steps else None,
            u=us[n] if n < cfg.steps else None,
            i=info[n] if n < cfg.steps else None,
            i_hat=ihat[n] if n < cfg.steps else None,
            bit=int(decisions[n // cfg.hold]) if last_of_block else None,
        )

    post = np.arange(n_blocks) * cfg.hold >= cfg.settle
    bit_errors = int(np.count_nonzero(decisions[post] != bits[post]))
    bits_total = int(np.count_nonzero(post))
    errors = ys - xs
    metrics = Metrics(
        sync_step=_sync_step(errors, cfg.sync_tol, cfg.sync_window),
        max_abs_error=float(np.max(np.abs(errors))),
        ber=bit_errors / bits_total if bits_total else None,
        bits_total=bits_total,
        bit_errors=bit_errors,
    )
    return trace, metrics


def run_digital_session(cfg: ScenarioConfig):
    """Fixed-point bitstream path: spread, XOR-mask, correlate, decide.

    Carrier bits are the least-significant bits of the 16-bit drive
    states; the receiver descrambles with its own response-state bits.
    BER counts frames that start after exact synchronization.
    """
    if cfg.mode != "fixed":
        raise ConfigError("digital session requires mode=fixed")
    spec = cfg.frame
    params = cfg.fixed_params
    if cfg.steps % spec.m != 0:
        raise ConfigError("steps must be a multiple of frame_m")
    x0, y0 = int(cfg.x0), int(cfg.y0)
    run = fx_run_sync(params, x0, y0, cfg.steps)
    rng = np.random.default_rng(cfg.seed)
    n_frames = cfg.steps // spec.m
    info_bits = _symbol_stream(cfg, n_frames * spec.n, rng)

    tx_carrier = lsb_bits(run.x[:-1])
    rx_carrier = lsb_bits(run.y[:-1])

    line = np.zeros(cfg.steps, dtype=np.uint8)
    spread_all = np.zeros(cfg.steps, dtype=np.uint8)
    ihat_all = np.full(cfg.steps, np.nan)
    decided = np.zeros(n_frames * spec.n, dtype=np.uint8)
    for f in range(n_frames):
        lo = f * spec.m
        word = info_bits[f * spec.n:(f + 1) * spec.n]
        tx_bits = spread(word, spec)
        spread_all[lo:lo + spec.m] = tx_bits
        masked = mask_bits(tx_bits, tx_carrier[lo:lo + spec.m])
        line[lo:lo + spec.m] = masked
        unmasked = mask_bits(masked, rx_carrier[lo:lo + spec.m])
        means = correlate(unmasked, spec)
        decided[f * spec.n:(f + 1) * spec.n] = decide(means)
        # correlator soft outputs land on the final step of each r-block
        for p in range(spec.n):
            ihat_all[lo + (p + 1) * spec.r - 1] = means[p]

    trace = SessionTrace.empty()
    r = spec.r
    for n in range(cfg.steps + 1):
        in_run = n < cfg.steps
        block_end = in_run and (n + 1) % r == 0
        idx = (n // spec.m) * spec.n + (n % spec.m) // r if in_run else 0
        trace.append(
            n=n, x=float(run.x[n]), y=float(run.y[n]),
            e=float(run.y[n] - run.x[n]),
            z=float(line[n]) if in_run else None,
            i=float(spread_all[n]) if in_run else None,
            i_hat=float(ihat_all[n]) if block_end else None,
            bit=int(decided[idx]) if block_end else None,
        )

    sync_at = run.first_equal if run.held else None
    if sync_at is not None:
        frame_start = np.arange(n_frames) * spec.m
        post_frames = frame_start >= sync_at
        post_bits = np.repeat(post_frames, spec.n)
        bit_errors = int(np.count_nonzero(decided[post_bits] != info_bits[post_bits]))
        bits_total = int(np.count_nonzero(post_bits))
    else:
        bit_errors = 0
        bits_total = 0
    errors = run.y - run.x
    metrics = Metrics(
        sync_step=run.first_equal,
        max_abs_error=float(np.max(np.abs(errors))),
        ber=bit_errors / bits_total if bits_total else None,
        bits_total=bits_total,
        bit_errors=bit_errors,
        saturations=run.saturations,
    )
    return trace, metrics


MAX_IDLE_STEPS = 10_000


def run_hop_session(cfg: ScenarioConfig, table: ChannelTable | None = None):
    """Alternating idle/transmit sessions with sync-gated channel hops.

    Each session idles until the trigger (|epsilon| < sync_tol for
    sync_window consecutive samples), hops on the first post-trigger
    drive sample, then transmits for active_steps.  Both sides select on
    their own states, so the selection error measures residual desync.
    """
    if table is None:
        table = build_default_table()
    cfg.logistic  # validate parameters
    rng = np.random.default_rng(cfg.seed)
    mu, k, rho = cfg.mu, cfg.k, cfg.rho
    guard = cfg.guard * cfg.k
    op = get_operator(cfg.operator)
    x, y = cfg.x0, cfg.y0
    trace = SessionTrace.empty()
    hops = []
    n = 0
    eps_hist: list[float] = []

    def advance(d, u_val):
        nonlocal x, y
        y = mu * y * (1.0 - y / k) + u_val
        x = mu * x * (1.0 - x / k)
        if not 0.0 < x < k:
            raise BasinEscapeError(n + 1, x)
        if abs(y) > guard:
            raise DivergenceError(f"response exceeded guard {guard} at step {n + 1}")

    max_err = abs(y - x)
    for session in range(cfg.sessions):
        # idle phase: line carries the bare drive state
        idle = 0
        while True:
            e = y - x
            eps_hist.append(e)
            max_err = max(max_err, abs(e))
            u = (mu * (e + 2.0 * x - k) + rho * k) * e / k
            trace.append(n=n, x=x, y=y, e=e, epsilon=e, u=u, z=x, i=0.0)
            advance(x, u)
            n += 1
            idle += 1
            if len(eps_hist) >= cfg.sync_window and hop_trigger(
                eps_hist, cfg.sync_tol, cfg.sync_window
            ):
                break
            if idle > MAX_IDLE_STEPS:
                raise DivergenceError(
                    f"no sync trigger within {MAX_IDLE_STEPS} idle steps"
                )
        # hop on the first post-trigger drive sample
        j_tx = select_channel(x, k, table)
        j_rx = select_channel(y, k, table)
        hops.append(HopRecord(session=session, step=n, j_tx=j_tx, j_rx=j_rx,
                              error=j_tx - j_rx))
        # active phase: masked transmission on the new channel
        if cfg.source != SOURCE_OFF and cfg.active_steps > 0:
            n_blocks = -(-cfg.active_steps // cfg.hold)
            bits = _symbol_stream(cfg, n_blocks, rng)
            info = np.repeat(bits.astype(float) * cfg.amplitude, cfg.hold)
            for step_i in range(cfg.active_steps):
                z = op.forward(x, info[step_i])
                e = y - z
                eps_hist.append(e)
                max_err = max(max_err, abs(y - x))
                u = (mu * (e + 2.0 * z - k) + rho * k) * e / k
                trace.append(
                    n=n, x=x, y=y, e=y - x, epsilon=e, u=u, z=z,
                    i=info[step_i], i_hat=op.recover(z, y),
                    channel=j_tx if step_i == 0 else None,
                )
                advance(z, u)
                n += 1
        else:
            trace.append(n=n, x=x, y=y, e=y - x, epsilon=y - x, channel=j_tx)
            advance(x, (mu * ((y - x) + 2.0 * x - k) + rho * k) * (y - x) / k)
            n += 1
    trace.append(n=n, x=x, y=y, e=y - x)

    metrics = Metrics(
        sync_step=_sync_step(trace.column("e"), cfg.sync_tol, cfg.sync_window),
        max_abs_error=max_err,
        channel_error_count=sum(1 for h in hops if h.error != 0),
        hops=tuple(hops),
    )
    return trace, metrics


def _format_cell(value) -> str:
    if value is None:
        return ""
    v = float(value)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return format(v, ".17g")


def export_csv(trace: SessionTrace, path) -> None:
    """Fixed column order; absent fields as empty cells; reals round-trip."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in zip(*(trace.data[name] for name in TRACE_COLUMNS)):
            writer.writerow([_format_cell(v) for v in row])


def load_trace_csv(path) -> SessionTrace:
    trace = SessionTrace.empty()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace header in {path}")
        for row in reader:
            trace.append(**{
                name: (float(row[name]) if row[name] != "" else None)
                for name in TRACE_COLUMNS
            })
    return trace


def export_hops_csv(hops, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["session", "step", "j_tx", "j_rx", "error"])
        for h in hops:
            writer.writerow([h.session, h.step, h.j_tx, h.j_rx, h.error])
