"""Virtual smart load node.

Each node owns one load: it walks the consumer through the screen flow to log
a schedule, obeys relay commands from the master, and meters its load every
interval.  Nodes never decide scheduling; the master is authoritative, and the
node's only self-protection is refusing to run past its logged run time.
"""

from __future__ import annotations

import dataclasses
from enum import Enum

from . import domain, metering
from .domain import LoadClass, LoadSpec, ScheduleConfig, TimeModel
from .errors import HansimError
from .protocol import Ack, Action, Command, ConfigLog, Telemetry

MAINS_VRMS = 230.0
MAINS_HZ = 50.0


class SlnError(HansimError):
    pass


class WrongScreen(SlnError):
    pass


class WrongNode(SlnError):
    pass


class NinslCommand(SlnError):
    """Commands addressed to a non-schedulable node are protocol violations."""


class Screen(Enum):
    DEFAULT = "Default"
    MENU = "Menu"
    NODE_CONFIG = "NodeConfig"
    DATA_LOGGING = "DataLogging"


def _sine_params(irms: float, vrms: float = MAINS_VRMS) -> metering.ElectricalParams:
    """Meter a unity-power-factor load of the given RMS current."""
    v_spec = metering.WaveformSpec(amplitude=vrms * 2 ** 0.5, frequency_hz=MAINS_HZ)
    i_spec = metering.WaveformSpec(amplitude=irms * 2 ** 0.5, frequency_hz=MAINS_HZ)
    v = metering.remove_dc_offset(metering.synthesize(v_spec))
    i = metering.remove_dc_offset(metering.synthesize(i_spec))
    return metering.compute_params(v, i)


_IDLE_PARAMS = metering.ElectricalParams(MAINS_VRMS, 0.0, 0.0, 0.0, 0.0)

# Current scales every power quantity linearly and leaves PF alone, so one
# unit-current measurement serves every demand level.
_UNIT_PARAMS = _sine_params(1.0)


def _params_for_kw(power_kw: float) -> metering.ElectricalParams:
    if power_kw <= 0:
        return _IDLE_PARAMS
    irms = power_kw * 1000.0 / MAINS_VRMS
    return metering.ElectricalParams(
        vrms=_UNIT_PARAMS.vrms,
        irms=_UNIT_PARAMS.irms * irms,
        real_power=_UNIT_PARAMS.real_power * irms,
        apparent_power=_UNIT_PARAMS.apparent_power * irms,
        power_factor=_UNIT_PARAMS.power_factor,
    )


class SmartLoadNode:
    """State machine for one retrofit node: screen flow, relay, accumulators."""

    def __init__(self, spec: LoadSpec, tm: TimeModel):
        self.spec = spec.validated(tm)
        self.tm = tm
        self.screen = Screen.DEFAULT
        # NINSL relays are never commanded; power passes straight through.
        self.relay = Action.OFF if spec.load_class.schedulable else Action.ON
        self.minutes_run = 0
        self.energy_kwh = 0.0
        self.last_telemetry: Telemetry | None = None

    @property
    def node_id(self) -> str:
        return self.spec.load_id

    @property
    def gamma_minutes(self) -> int:
        return self.spec.config.gamma_minutes if self.spec.config else 0

    # -- screen flow (menu button, Fig.-3 style navigation) ------------------

    def press_menu(self) -> None:
        self.screen = Screen.MENU

    def select_node_config(self) -> None:
        if self.screen is not Screen.MENU:
            raise WrongScreen(f"node config is reached from the menu, not {self.screen.value}")
        self.screen = Screen.NODE_CONFIG

    def open_data_logging(self) -> None:
        if self.screen is not Screen.NODE_CONFIG:
            raise WrongScreen(f"data logging is reached from node config, not {self.screen.value}")
        self.screen = Screen.DATA_LOGGING

    def show_default(self) -> None:
        self.screen = Screen.DEFAULT

    # -- configuration --------------------------------------------------------

    def log_config(self, load_class: LoadClass, alpha: int, beta: int,
                   gamma_minutes: int) -> ConfigLog:
        """Validate and store the consumer's input; emit the line for the master.

        The node keeps its previous configuration when validation fails.
        """
        if self.screen is not Screen.DATA_LOGGING:
            raise WrongScreen(f"data logging request while on {self.screen.value} screen")
        cfg = domain.validate_config(
            load_class, ScheduleConfig(alpha, beta, gamma_minutes), self.tm
        )
        if load_class.schedulable:
            if not self.spec.rated_kw > 0:
                raise domain.InvalidLoadSpec(
                    f"{self.node_id}: cannot log a schedulable mode without a positive rating"
                )
            self.spec = dataclasses.replace(
                self.spec, load_class=load_class, config=cfg, ninsl_demand=None
            ).validated(self.tm)
            self.relay = Action.OFF
        else:
            demand = self.spec.ninsl_demand or tuple(0.0 for _ in range(self.tm.horizon))
            self.spec = dataclasses.replace(
                self.spec, load_class=load_class, config=None, ninsl_demand=demand
            ).validated(self.tm)
            self.relay = Action.ON
        self.minutes_run = 0
        self.energy_kwh = 0.0
        self.screen = Screen.DEFAULT
        return ConfigLog(
            node_id=self.node_id,
            load_class=load_class,
            alpha=cfg.alpha,
            beta=cfg.beta,
            gamma_minutes=cfg.gamma_minutes,
            rated_kw=self.spec.rated_kw,
        )

    # -- relay commands --------------------------------------------------------

    def apply_command(self, cmd: Command) -> Ack:
        """Switch the relay as told; idempotent, and never past the run-time cap."""
        if cmd.node_id != self.node_id:
            raise WrongNode(f"command for {cmd.node_id} reached node {self.node_id}")
        if not self.spec.load_class.schedulable:
            raise NinslCommand(f"{self.node_id} is non-schedulable and takes no commands")
        if cmd.action is Action.ON:
            if self.minutes_run >= self.gamma_minutes:
                return Ack(self.node_id, "CMD", "run_complete")
            self.relay = Action.ON
        else:
            self.relay = Action.OFF
        return Ack(self.node_id, "CMD", "ok")

    # -- metering loop -----------------------------------------------------------

    def tick(self, interval_index: int) -> Telemetry:
        """Run one interval: advance accumulators, emit end-of-interval telemetry."""
        minutes = self.tm.interval_minutes
        if self.spec.load_class.schedulable:
            if self.relay is Action.ON and self.minutes_run >= self.gamma_minutes:
                self.relay = Action.OFF  # refuse to over-run
            if self.relay is Action.ON:
                self.minutes_run += minutes
                self.energy_kwh += self.spec.rated_kw * minutes / 60.0
                params = _params_for_kw(self.spec.rated_kw)
            else:
                params = _IDLE_PARAMS
        else:
            demand = self.spec.ninsl_demand[interval_index]
            self.energy_kwh += demand * minutes / 60.0
            params = _params_for_kw(demand)
        tel = Telemetry(
            node_id=self.node_id,
            timestamp=(interval_index + 1) * self.tm.interval_seconds,
            vrms=params.vrms,
            irms=params.irms,
            real_power=params.real_power,
            power_factor=params.power_factor,
            relay=self.relay,
        )
        self.last_telemetry = tel
        # A completed load opens its relay at the boundary even if the master's
        # OFF never arrives.
        if (self.spec.load_class.schedulable and self.relay is Action.ON
                and self.minutes_run >= self.gamma_minutes):
            self.relay = Action.OFF
        return tel
