"""Truncated-Shannon link budget for short-range 60 GHz directional links.

The chain is free-space path loss plus linear atmospheric attenuation, thermal
noise over the channel bandwidth, Shannon capacity, then a hard truncation:
rates above the cap saturate at the cap, rates below the floor mean the link is
unusable at that distance. Defaults are stand-ins for a detailed PHY model and
every parameter is configurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class LinkBudgetParams:
    carrier_ghz: float = 60.0
    tx_power_dbm: float = 23.0
    bandwidth_mhz: float = 2160.0
    antenna_gain_dbi: float = 24.0      # per end
    noise_figure_db: float = 7.0
    atmospheric_db_per_km: float = 15.0
    rate_floor_mbps: float = 1000.0
    rate_cap_mbps: float = 4640.0

    def as_pairs(self) -> tuple[tuple[str, float], ...]:
        return tuple(sorted((k, float(v)) for k, v in self.__dict__.items()))


DEFAULT_PARAMS = LinkBudgetParams()


def free_space_path_loss_db(distance_m: float, carrier_ghz: float) -> float:
    freq_hz = carrier_ghz * 1e9
    return 20.0 * math.log10(4.0 * math.pi * distance_m * freq_hz / SPEED_OF_LIGHT)

def noise_floor_dbm(params: LinkBudgetParams) -> float:
    return -174.0 + 10.0 * math.log10(params.bandwidth_mhz * 1e6) + params.noise_figure_db


def snr_db(distance_m: float, params: LinkBudgetParams = DEFAULT_PARAMS) -> float:
    rx_dbm = (params.tx_power_dbm + 2.0 * params.antenna_gain_dbi
              - free_space_path_loss_db(distance_m, params.carrier_ghz)
              - params.atmospheric_db_per_km * distance_m / 1000.0)
    return rx_dbm - noise_floor_dbm(params)


def link_rate(distance_m: float,
              params: LinkBudgetParams = DEFAULT_PARAMS) -> float | None:
    """Usable rate in Mbps at the given distance, or None below the floor.

    Rounded to 1 kbps so downstream flow arithmetic is exact. Monotone
    non-increasing in distance for any fixed parameter set.
    """
    if distance_m <= 0:
        raise ValueError("distance must be positive")
    shannon_mbps = params.bandwidth_mhz * math.log2(
        1.0 + 10.0 ** (snr_db(distance_m, params) / 10.0))
    if shannon_mbps < params.rate_floor_mbps:
        return None
    return round(min(shannon_mbps, params.rate_cap_mbps), 3)
