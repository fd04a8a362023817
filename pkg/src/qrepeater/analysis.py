"""Fixed-point and asymptotic fidelity analysis, plus parameter sweeps.

Pumping a stored pair forever does not push its fidelity to one when
gates and measurements err: the gain per round shrinks until it balances
the noise injected by the round itself, and the fidelity stalls at a
fixed point that depends on the distance.  Across nesting levels those
fixed points approach a distance-independent asymptote.  Both limits are
computed here by direct iteration of the same maps the protocol uses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .bell import fidelity
from .ops import purify
from .protocol import (
    ProtocolConfig,
    ProtocolError,
    build_b_pair,
    build_c_pair,
    default_schedule,
    elementary_pair,
    run_protocol,
)

FIXED_POINT_TOL = 1e-9
FIXED_POINT_MAX_ITER = 10_000
ASYMPTOTE_TOL = 1e-6
ASYMPTOTE_MAX_LEVELS = 40

#: Below this singlet weight a pair is separable-grade and pumping it is
#: pointless; the asymptote search reports failure instead of a value.
USEFUL_FIDELITY_FLOOR = 0.5


@dataclass(frozen=True)
class FixedPointResult:
    value: float
    iterations: int
    converged: bool
    tolerance: float


@dataclass(frozen=True)
class SweepTable:
    """Cartesian-product sweep results: ``axes`` names the grids in
    order, ``rows`` holds one record per grid point (lexicographic)."""

    axes: tuple[tuple[str, tuple], ...]
    rows: tuple[dict, ...]


def _with_target_span(config: ProtocolConfig, span: int) -> ProtocolConfig:
    schedule = default_schedule(span)
    if isinstance(config.m, int):
        m = config.m
    else:
        # Per-level m stretched to the new depth; deeper levels reuse the
        # last configured value.
        m = tuple(
            config.m[i] if i < len(config.m) else config.m[-1]
            for i in range(len(schedule))
        )
    return ProtocolConfig(
        link=config.link,
        noise=config.noise,
        m=m,
        target_span=span,
        schedule=schedule,
        f0=config.f0,
    )


def fixed_point_at_distance(
    config: ProtocolConfig,
    span: int,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = FIXED_POINT_MAX_ITER,
) -> FixedPointResult:
    """Limiting fidelity of pumping without bound at the top nesting
    level for the given span; the levels below run with the configured m.
    """
    if span == 1:
        return FixedPointResult(
            value=fidelity(elementary_pair(config).state),
            iterations=0,
            converged=True,
            tolerance=tol,
        )
    sub = _with_target_span(config, span)
    built = {1: elementary_pair(sub)}
    result = run_protocol(sub)
    for record in result.per_level:
        built[record.span] = record
    n_top = sub.schedule[-1]
    b = build_b_pair(built[n_top], built[n_top], sub)
    c = build_c_pair(sub, n_top, built)
    state = b.state
    value = fidelity(state)
    small_steps = 0
    for iteration in range(1, max_iter + 1):
        outcome = purify(state, c.state, sub.noise)
        if not outcome.purifiable:
            return FixedPointResult(value, iteration, False, tol)
        state = outcome.state
        new_value = fidelity(state)
        delta = abs(new_value - value)
        value = new_value
        # The pumping map alternates error types between rounds, so one
        # small step can be a zero-gain parity step; require two in a row.
        small_steps = small_steps + 1 if delta <= tol else 0
        if small_steps >= 2:
            return FixedPointResult(value, iteration, True, tol)
    return FixedPointResult(value, max_iter, False, tol)


def asymptotic_fidelity(
    config: ProtocolConfig,
    tol: float = ASYMPTOTE_TOL,
    max_levels: int = ASYMPTOTE_MAX_LEVELS,
) -> FixedPointResult:
    """Distance-independent limit of the fixed-point fidelity, found by
    growing the nesting depth until successive fixed points differ by at
    most ``tol``.  A fixed point falling below 0.5 means entanglement is
    lost and is reported as not converged."""
    previous = None
    span = 1
    for level in range(1, max_levels + 1):
        span = 2 * span + 1
        fp = fixed_point_at_distance(config, span)
        if fp.value < USEFUL_FIDELITY_FLOOR:
            return FixedPointResult(fp.value, level, False, tol)
        if previous is not None and abs(fp.value - previous) <= tol:
            return FixedPointResult(fp.value, level, True, tol)
        previous = fp.value
    return FixedPointResult(previous, max_levels, False, tol)


_LINK_FIELDS = frozenset(
    ("l0_km", "attenuation_db_per_km", "p_em", "eps_local", "t0_s", "tc_s")
)
_NOISE_FIELDS = frozenset(("p", "eta", "upsilon"))
_CONFIG_FIELDS = frozenset(("m", "target_span", "f0"))


def apply_overrides(config: ProtocolConfig, **overrides) -> ProtocolConfig:
    """New ProtocolConfig with the named physical parameters replaced;
    the schedule is rebuilt when the target span changes.  The virtual
    field ``p_eta`` sets the gate and measurement reliabilities jointly."""
    if "p_eta" in overrides:
        value = overrides.pop("p_eta")
        overrides.setdefault("p", value)
        overrides.setdefault("eta", value)
    link_kw = {k: v for k, v in overrides.items() if k in _LINK_FIELDS}
    noise_kw = {k: v for k, v in overrides.items() if k in _NOISE_FIELDS}
    cfg_kw = {k: v for k, v in overrides.items() if k in _CONFIG_FIELDS}
    unknown = set(overrides) - _LINK_FIELDS - _NOISE_FIELDS - _CONFIG_FIELDS
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    link = replace(config.link, **link_kw) if link_kw else config.link
    noise = replace(config.noise, **noise_kw) if noise_kw else config.noise
    target = cfg_kw.get("target_span", config.target_span)
    schedule = default_schedule(target)
    m = cfg_kw.get("m", config.m)
    if not isinstance(m, int):
        m = tuple(m[i] if i < len(m) else m[-1] for i in range(len(schedule)))
    return ProtocolConfig(
        link=link,
        noise=noise,
        m=m,
        target_span=target,
        schedule=schedule,
        f0=cfg_kw.get("f0", config.f0),
    )


def sweep(base_config: ProtocolConfig, axes: Mapping[str, Sequence]) -> SweepTable:
    """Evaluate the protocol, its fixed point and its asymptote on every
    point of the cartesian grid.  Per-point failures are recorded in the
    row's ``error`` field and the sweep continues."""
    if not axes or any(len(values) == 0 for values in axes.values()):
        raise ValueError("sweep needs at least one axis with at least one value")
    names = list(axes.keys())
    grids = [tuple(axes[name]) for name in names]
    rows = []
    for point in itertools.product(*grids):
        coords = dict(zip(names, point))
        row = dict(coords)
        try:
            cfg = apply_overrides(base_config, **coords)
            result = run_protocol(cfg)
            fp = fixed_point_at_distance(cfg, cfg.target_span)
            asym = asymptotic_fidelity(cfg)
            row.update(
                fidelity=fidelity(result.final.state),
                f_fp=fp.value,
                f_inf=asym.value,
                expected_time_s=result.total_expected_time,
                error="",
            )
        except (ValueError, ProtocolError) as exc:
            row.update(
                fidelity=None, f_fp=None, f_inf=None, expected_time_s=None,
                error=str(exc),
            )
        rows.append(row)
    return SweepTable(
        axes=tuple((name, tuple(axes[name])) for name in names),
        rows=tuple(rows),
    )
