"""Time-bin interferometer cascade: arrival peaks, photon counting, fringe fit.

A photon is split into short/long temporal modes by an unbalanced
interferometer, flies the link, and is recombined by a second one of equal
delay. At one output port the short-short and long-long paths land in
distinguishable early/late windows (amplitude 1/4 each), while the
short-long and long-short paths overlap in the central window and
interfere with relative phase phi:

    early = late = 1/16
    central = (1/8) (1 + V cos phi)

The complementary port carries (1/8)(1 - V cos phi) in its central window,
so both ports plus all windows add to 1/2; the remaining half leaves the
preparation interferometer's unused port and is never detected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .errors import DegenerateVisibility, FitDiverged, InsufficientScan

_MIN_SCAN_POINTS = 4
_MIN_SCAN_SPAN = math.pi - 1e-9
_MIN_VISIBILITY = 0.05


@dataclass(frozen=True)
class PeakIntensities:
    """Per-photon detection probabilities in the three arrival windows
    at one output port (not normalized across ports)."""

    early: float
    central: float
    late: float

    def __post_init__(self):
        for name in ("early", "central", "late"):
            p = getattr(self, name)
            if not 0.0 <= p <= 0.375:
                raise ValueError(f"{name} = {p} outside [0, 3/8]")

    @property
    def total(self) -> float:
        return self.early + self.central + self.late


@dataclass(frozen=True)
class DetectionHistogram:
    """Counts in the three arrival windows for one phase setting."""

    counts_early: int
    counts_central: int
    counts_late: int
    n_sent: int
    phase_setting: float

    def __post_init__(self):
        for name in ("counts_early", "counts_central", "counts_late", "n_sent"):
            v = getattr(self, name)
            if v < 0 or v != int(v):
                raise ValueError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))
        total = self.counts_early + self.counts_central + self.counts_late
        if total > self.n_sent:
            raise ValueError(f"total counts {total} exceed n_sent {self.n_sent}")


class PhaseFit(NamedTuple):
    phi_hat: float      # rad, wrapped to (-pi, pi]
    sigma_phi: float    # rad
    visibility_hat: float


def cascade_intensities(phi: float, visibility: float = 1.0) -> PeakIntensities:
    """Arrival-window probabilities at the monitored port for phase phi."""
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    central = 0.125 * (1.0 + visibility * math.cos(phi))
    return PeakIntensities(early=0.0625, central=central, late=0.0625)


def simulate_counts(
    intensities: PeakIntensities,
    n_sent: int,
    link_efficiency: float,
    rng_seed,
    dark_rate: float = 0.0,
    phase_setting: float = 0.0,
) -> DetectionHistogram:
    """Draw shot-noise counts for one phase setting.

    The three windows and the no-detection outcome are drawn as one
    multinomial, so each window's count is binomial(n_sent, p) with
    p = intensity * link_efficiency + dark_rate, and the total can never
    exceed n_sent. dark_rate is the background click probability per
    window per sent pulse. rng_seed may be an int or a numpy Generator.
    """
    if n_sent <= 0:
        raise ValueError("n_sent must be positive")
    if not 0.0 <= link_efficiency <= 1.0:
        raise ValueError(f"link_efficiency must lie in [0, 1], got {link_efficiency}")
    if dark_rate < 0.0:
        raise ValueError("dark_rate must be non-negative")
    probs = np.array(
        [
            intensities.early * link_efficiency + dark_rate,
            intensities.central * link_efficiency + dark_rate,
            intensities.late * link_efficiency + dark_rate,
        ]
    )
    p_any = float(probs.sum())
    if p_any > 1.0:
        raise ValueError(f"window probabilities sum to {p_any:.3f} > 1")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    early, central, late, _ = rng.multinomial(
        n_sent, np.append(probs, 1.0 - p_any)
    )
    return DetectionHistogram(
        counts_early=int(early),
        counts_central=int(central),
        counts_late=int(late),
        n_sent=n_sent,
        phase_setting=phase_setting,
    )


def _check_scan_offsets(phi_offsets: Sequence[float]) -> np.ndarray:
    offsets = np.asarray(phi_offsets, dtype=float)
    if offsets.size < _MIN_SCAN_POINTS:
        raise InsufficientScan(
            f"need >= {_MIN_SCAN_POINTS} scan points, got {offsets.size}"
        )
    span = float(offsets.max() - offsets.min())
    if span < _MIN_SCAN_SPAN:
        raise InsufficientScan(f"scan span {span:.3f} rad must cover >= pi")
    return offsets


def fringe_scan(
    phi_offsets: Sequence[float],
    base_phase: float,
    visibility: float,
    n_per_point: int,
    efficiency: float,
    seed,
    dark_rate: float = 0.0,
) -> list[DetectionHistogram]:
    """Histogram per scan offset at total phase base_phase + offset.

    Each point gets an independent child seed, so points could be drawn
    concurrently without changing the result.
    """
    offsets = _check_scan_offsets(phi_offsets)
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = seq.spawn(offsets.size)
    scan = []
    for offset, child in zip(offsets, children):
        inten = cascade_intensities(base_phase + offset, visibility)
        scan.append(
            simulate_counts(
                inten,
                n_per_point,
                efficiency,
                np.random.default_rng(child),
                dark_rate=dark_rate,
                phase_setting=float(offset),
            )
        )
    return scan


def noiseless_scan(
    phi_offsets: Sequence[float],
    base_phase: float,
    visibility: float,
    n_per_point: int,
    efficiency: float = 1.0,
) -> list[DetectionHistogram]:
    """Expected-count histograms (rounded to integers), no shot noise."""
    offsets = _check_scan_offsets(phi_offsets)
    scan = []
    for offset in offsets:
        inten = cascade_intensities(base_phase + offset, visibility)
        scan.append(
            DetectionHistogram(
                counts_early=round(inten.early * efficiency * n_per_point),
                counts_central=round(inten.central * efficiency * n_per_point),
                counts_late=round(inten.late * efficiency * n_per_point),
                n_sent=n_per_point,
                phase_setting=float(offset),
            )
        )
    return scan


def _wrap_phase(phi: float) -> float:
    """Map to (-pi, pi]."""
    wrapped = math.remainder(phi, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def fit_phase(scan: Sequence[DetectionHistogram]) -> PhaseFit:
    """Extract the fringe phase from a scan of central-peak counts.

    Weighted nonlinear least squares of counts against
    A (1 + V cos(phi + offset)), seeded by the closed-form linear fit in
    (A, A V cos phi, A V sin phi). Count weights are Poissonian,
    sigma = sqrt(max(counts, 1)).

    Returns phi wrapped to (-pi, pi], its 1-sigma uncertainty from the fit
    covariance, and the visibility estimate.

    Raises
    ------
    InsufficientScan, DegenerateVisibility (fitted |V| < 0.05),
    FitDiverged (optimizer failure; message carries the residuals).
    """
    offsets = _check_scan_offsets([h.phase_setting for h in scan])
    counts = np.array([h.counts_central for h in scan], dtype=float)
    if counts.sum() <= 0:
        raise DegenerateVisibility("no central-peak counts; phase unidentifiable")

    # linear pre-fit: counts ~ a0 + a1 cos(offset) + a2 sin(offset)
    design = np.column_stack([np.ones_like(offsets), np.cos(offsets), np.sin(offsets)])
    coef, *_ = np.linalg.lstsq(design, counts, rcond=None)
    a0, a1, a2 = coef
    if a0 <= 0.0:
        raise DegenerateVisibility(f"non-positive fringe baseline {a0:.3g}")
    v0 = min(math.hypot(a1, a2) / a0, 1.0)
    phi0 = math.atan2(-a2, a1)

    def model(x, amp, vis, phi):
        return amp * (1.0 + vis * np.cos(phi + x))

    sigma = np.sqrt(np.maximum(counts, 1.0))
    try:
        popt, pcov = curve_fit(
            model,
            offsets,
            counts,
            p0=[a0, max(v0, 1e-3), phi0],
            sigma=sigma,
            absolute_sigma=True,
            maxfev=10000,
        )
    except (RuntimeError, ValueError) as exc:
        residuals = counts - model(offsets, a0, v0, phi0)
        raise FitDiverged(
            f"fringe fit failed ({exc}); pre-fit residuals: {residuals.tolist()}"
        ) from None

    amp_hat, vis_hat, phi_hat = popt
    # sign gauge: keep V >= 0 by absorbing a flip into the phase
    if vis_hat < 0.0:
        vis_hat = -vis_hat
        phi_hat += math.pi
    if vis_hat < _MIN_VISIBILITY:
        raise DegenerateVisibility(
            f"fitted visibility {vis_hat:.3f} < {_MIN_VISIBILITY}; phase unidentifiable"
        )
    sigma_phi = float(math.sqrt(max(pcov[2, 2], 0.0)))
    if not math.isfinite(sigma_phi) or sigma_phi <= 0.0:
        raise FitDiverged(f"fit covariance unusable: sigma_phi = {sigma_phi}")
    return PhaseFit(
        phi_hat=_wrap_phase(float(phi_hat)),
        sigma_phi=sigma_phi,
        visibility_hat=float(vis_hat),
    )


def serialize_scan(scan: Sequence[DetectionHistogram]) -> str:
    """Columnar text: offset, three window counts, pulses sent."""
    lines = ["# offset_rad counts_early counts_central counts_late n_sent"]
    for h in scan:
        lines.append(
            f"{h.phase_setting:.12e} {h.counts_early} {h.counts_central} "
            f"{h.counts_late} {h.n_sent}"
        )
    return "\n".join(lines) + "\n"
