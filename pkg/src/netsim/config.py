"""
Simulator configuration.
"""

from pydantic import BaseModel, ConfigDict, Field

from ..wire.sizing import SizeModel


class SimConfig(BaseModel):
    """Transport parameters and the attacker-capability model."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=0, ge=0, lt=2**64)
    latency_ticks: int = Field(default=1, ge=1)
    # Spoof gate: forged sources pass only if sequence numbers are defeated or the attacker is on-path.
    tcp_sequence_compromised: bool = False
    attacker_on_path: bool = False
    size_model: SizeModel = Field(default_factory=SizeModel)
    max_ticks: int = Field(default=1_000_000, ge=1)
    record_trace: bool = True

    @property
    def spoof_gate_open(self) -> bool:
        return self.tcp_sequence_compromised or self.attacker_on_path
