"""Closed-form calculus for displaced thermal states under one-parameter
phase-insensitive Gaussian channels.

A state is the pair (amp, nbar): rho = D(amp) rho_th(nbar) D(amp)^dagger with
rho_th the thermal state of mean photon number nbar.  The three channels
tracked here act on ladder operators as

    TwoModeSqueeze(r):  a -> cosh(r) a + sinh(r) b^dag   (b in vacuum, traced)
    Attenuate(theta):   a -> cos(theta) a + sin(theta) b (b in vacuum, traced)
    Identity:           a -> a

so amplitudes scale by cosh(r) / cos(theta) / 1 and thermal occupation maps to
cosh(r)^2 nbar + sinh(r)^2 / cos(theta)^2 nbar / nbar.  Both nontrivial
channels keep displaced thermal states displaced thermal, which is what makes
the averaged fidelity a one-line Gaussian integral.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError
from .params import NoisyEnsemble


@dataclass(frozen=True)
class DisplacedThermal:
    """Displacement amplitude and thermal occupation of a Gaussian state."""

    amp: complex
    nbar: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.nbar) and self.nbar >= 0.0):
            raise DomainError(f"nbar must be finite and >= 0, got {self.nbar!r}")
        if not (math.isfinite(abs(complex(self.amp)))):
            raise DomainError("amp must be finite")


class ChannelKind(enum.Enum):
    TWO_MODE_SQUEEZE = "TwoModeSqueeze"
    ATTENUATE = "Attenuate"
    IDENTITY = "Identity"


@dataclass(frozen=True)
class ChannelParam:
    """A channel tag plus its single real parameter.

    value is the squeeze parameter r >= 0, the beamsplitter angle
    theta in [0, pi/2], or ignored for Identity.
    """

    kind: ChannelKind
    value: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is ChannelKind.TWO_MODE_SQUEEZE:
            if not (math.isfinite(self.value) and self.value >= 0.0):
                raise DomainError(f"squeeze parameter must be >= 0, got {self.value!r}")
        elif self.kind is ChannelKind.ATTENUATE:
            if not (0.0 <= self.value <= math.pi / 2.0):
                raise DomainError(
                    f"attenuation angle must be in [0, pi/2], got {self.value!r}"
                )

    def amp_scale(self) -> float:
        """Factor multiplying the displacement amplitude."""
        if self.kind is ChannelKind.TWO_MODE_SQUEEZE:
            return math.cosh(self.value)
        if self.kind is ChannelKind.ATTENUATE:
            return math.cos(self.value)
        return 1.0

    def added_noise(self) -> float:
        """Thermal photons added to vacuum input (cosh^2 - 1 for the squeezer)."""
        if self.kind is ChannelKind.TWO_MODE_SQUEEZE:
            return math.sinh(self.value) ** 2
        return 0.0


def apply_gaussian(state: DisplacedThermal, ch: ChannelParam) -> DisplacedThermal:
    """Push a displaced thermal state through a channel, in closed form."""
    s = ch.amp_scale()
    return DisplacedThermal(amp=s * state.amp, nbar=s * s * state.nbar + ch.added_noise())


def coherent_overlap(state: DisplacedThermal, target_amp: complex) -> float:
    """<beta| rho |beta> for a displaced thermal rho and coherent |beta>.

    Equals exp(-|beta - amp|^2 / (nbar + 1)) / (nbar + 1).
    """
    d = abs(complex(target_amp) - complex(state.amp))
    return math.exp(-d * d / (state.nbar + 1.0)) / (state.nbar + 1.0)


def avg_fidelity_gaussian(ens: NoisyEnsemble, ch: ChannelParam) -> float:
    """Prior-averaged fidelity of a one-parameter Gaussian protocol.

    Averaging coherent_overlap(applied state, g' alpha) over the Gaussian
    prior gives

        F = lambda' / (lambda' (nbar_out + 1) + (g' - s)^2)

    with s the channel's amplitude scale and nbar_out its output occupation
    on the thermal input nbar = 1/mu.  For the squeezer this is
    lambda' mu / (lambda'(mu+1) cosh^2 r + mu (g' - cosh r)^2).
    """
    out = apply_gaussian(DisplacedThermal(amp=1.0, nbar=1.0 / ens.mu), ch)
    s = out.amp.real
    lam = ens.lambda_prime
    return lam / (lam * (out.nbar + 1.0) + (ens.g_prime - s) ** 2)
