"""Desk-scale full-stack link simulator for indoor networks above 100 GHz."""

from .antenna import AntennaMode, AntennaState, boresight_at, gain_db
from .channels import (ChannelError, Cir, CountLaw, FscParams, HbcParams, Mpc,
                       MpcKind, aoa_histogram, gen_fsc, gen_hbc,
                       gen_los_baseline, strongest_path)
from .engine import (AntennaConfig, ChannelType, ConfigError, FlowStats,
                     Pointing, ScenarioConfig, ecdf, mac_link_up, run,
                     run_summary, windowed_throughput)
from .geometry import (SPEED_OF_LIGHT, Box, GeometryError, Material, RayPath,
                       Room, fresnel_reflection, is_los, trace)
from .io_formats import (RayFileError, ScenarioError, dumps_scenario,
                         export_rays, load_rays, load_scenario, loads_scenario,
                         save_scenario)
from .link import (LinkBudget, LinkDownError, achievable_rate, airtime,
                   link_budget, rx_power)
from .radio import AbsorptionTable, FrequencyGrid, fspl_amplitude, fspl_db

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
