"""
DNS seed service used by booting nodes to find their first peers.

A compromised seed answers only with attacker-controlled addresses. Honest
answers are a uniform sample; real seeds favour high-uptime nodes but that
weighting is not modelled.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np
import structlog

from ..exceptions import EmptySeedPool
from ..wire.types import NetAddress

logger = structlog.get_logger(__name__)

SEED_SAMPLE_SIZE = 8


def _sample(pool: List[NetAddress], rng: np.random.Generator, size: int) -> List[NetAddress]:
    ordered = sorted(pool)
    k = min(size, len(ordered))
    picked = rng.choice(len(ordered), size=k, replace=False)
    return [ordered[i] for i in picked]


@dataclass
class SeedService:
    name: str = "seed"
    honest_peers: List[NetAddress] = field(default_factory=list)
    attacker_peers: List[NetAddress] = field(default_factory=list)
    compromised: bool = False

    def query(self, rng: np.random.Generator, size: int = SEED_SAMPLE_SIZE) -> List[NetAddress]:
        return seed_query(self, rng, size)


def seed_query(svc: SeedService, rng: np.random.Generator, size: int = SEED_SAMPLE_SIZE) -> List[NetAddress]:
    """Answer one seed lookup. Raises ``EmptySeedPool`` when the service knows no one."""
    if not svc.honest_peers and not svc.attacker_peers:
        raise EmptySeedPool(f"Seed service '{svc.name}' has no addresses")

    pool = svc.attacker_peers if svc.compromised else svc.honest_peers
    if not pool:
        pool = svc.honest_peers or svc.attacker_peers
        logger.debug("Seed pool empty, answering from the other pool", seed=svc.name, compromised=svc.compromised)

    answer = _sample(pool, rng, size)
    logger.debug("Seed query answered", seed=svc.name, compromised=svc.compromised, returned=len(answer))
    return answer


@dataclass
class SeedDirectory:
    """Several independent seed services queried together by a booting node."""

    services: List[SeedService] = field(default_factory=list)

    def query_all(self, rng: np.random.Generator, size: int = SEED_SAMPLE_SIZE) -> List[NetAddress]:
        merged: List[NetAddress] = []
        seen = set()
        for svc in self.services:
            try:
                answer = svc.query(rng, size)
            except EmptySeedPool:
                logger.warning("Seed service returned nothing", seed=svc.name)
                continue
            for addr in answer:
                if addr not in seen:
                    seen.add(addr)
                    merged.append(addr)
        if not merged:
            raise EmptySeedPool("No seed service returned any address")
        return merged
