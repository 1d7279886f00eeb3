"""Software stand-in for a node's sensing chain.

Synthesizes sampled voltage/current waveforms (with the sensing circuit's DC
offset) and reduces sample pairs to RMS values, real/apparent power and power
factor.  All estimators assume whole-cycle windows; that discipline is
enforced where waveforms are specified, not re-derived from raw samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HansimError


class MeteringError(HansimError):
    pass


class InvalidSpec(MeteringError):
    pass


class EmptySeries(MeteringError):
    pass


class LengthMismatch(MeteringError):
    pass


class ZeroSignal(MeteringError):
    """Apparent power is zero, so power factor is undefined."""


@dataclass(frozen=True)
class WaveformSpec:
    """A sampled sine: peak amplitude, frequency, phase, DC offset and window.

    The sample rate floor (32 samples per cycle) keeps the plain time-domain
    estimators inside their stated tolerances, and the window must span a
    whole number of cycles so means over the window are leakage-free.
    """

    amplitude: float
    frequency_hz: float
    phase_rad: float = 0.0
    dc_offset: float = 0.0
    sample_rate: float = 3200.0
    duration_s: float = 0.2

    def __post_init__(self) -> None:
        if self.amplitude < 0:
            raise InvalidSpec(f"amplitude must be >= 0, got {self.amplitude}")
        if self.frequency_hz <= 0 or self.duration_s <= 0 or self.sample_rate <= 0:
            raise InvalidSpec("frequency, duration and sample rate must be positive")
        if self.sample_rate < 32 * self.frequency_hz:
            raise InvalidSpec(
                f"sample rate {self.sample_rate} below 32x frequency {self.frequency_hz}"
            )
        cycles = self.frequency_hz * self.duration_s
        if abs(cycles - round(cycles)) > 1e-9 or round(cycles) < 1:
            raise InvalidSpec(f"duration must cover whole cycles, got {cycles}")
        n = self.sample_rate * self.duration_s
        if abs(n - round(n)) > 1e-6:
            raise InvalidSpec(f"window must hold a whole number of samples, got {n}")

    @property
    def num_samples(self) -> int:
        return round(self.sample_rate * self.duration_s)


@dataclass(frozen=True)
class ElectricalParams:
    """Reduced electrical quantities for one measurement window."""

    vrms: float
    irms: float
    real_power: float
    apparent_power: float
    power_factor: float


def synthesize(spec: WaveformSpec) -> np.ndarray:
    """Sample the specified sine: offset + A*sin(2*pi*f*k/fs + phase)."""
    k = np.arange(spec.num_samples)
    return spec.dc_offset + spec.amplitude * np.sin(
        2.0 * np.pi * spec.frequency_hz * k / spec.sample_rate + spec.phase_rad
    )


def remove_dc_offset(samples: np.ndarray) -> np.ndarray:
    """Subtract the window mean, undoing the sensing chain's DC bias."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise EmptySeries("cannot remove offset from an empty series")
    return arr - arr.mean()


def compute_params(v: np.ndarray, i: np.ndarray) -> ElectricalParams:
    """Reduce an offset-free whole-cycle (v, i) sample pair to ElectricalParams.

    Power factor is reported as a magnitude; when both channels are silent the
    ratio is undefined and ZeroSignal is raised instead of inventing a value.
    """
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    if v.shape != i.shape:
        raise LengthMismatch(f"voltage has {v.size} samples, current has {i.size}")
    if v.size == 0:
        raise EmptySeries("cannot compute parameters of empty series")
    vrms = float(np.sqrt(np.mean(v * v)))
    irms = float(np.sqrt(np.mean(i * i)))
    real = float(np.mean(v * i))
    apparent = vrms * irms
    if apparent == 0.0:
        raise ZeroSignal("apparent power is zero; power factor undefined")
    pf = min(abs(real) / apparent, 1.0)
    return ElectricalParams(vrms, irms, real, apparent, pf)
