"""Concurrent (g, theta) grid sweeps"""

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from app.analysis import bell_boundary, concurrence, concurrence_avg_closed, gamma_closed, horodecki
from app.config import get_settings
from app.errors import DegeneratePostselectionError
from app.models import STATUS_UNDEFINED, SweepRow, SweepSpec
from app.protocol import ProtocolConfig, averaged_state, conditional_states_kraus, p_bell

logger = logging.getLogger(__name__)


class SweepService:
    """Service for evaluating a rectangular grid of the canonical example"""

    def __init__(self, threads: Optional[int] = None):
        self.workers = get_settings().worker_count(threads)

    def grid_row(self, spec: SweepSpec, g: float, theta: float, kind: str = "grid") -> SweepRow:
        cfg = ProtocolConfig.canonical(g, theta)
        row = {"kind": kind, "g": cfg.g, "theta": cfg.theta}
        if spec.concurrence:
            row["c_closed"] = concurrence_avg_closed(cfg.g, cfg.theta)
        if spec.gamma:
            row["gamma_closed"] = gamma_closed(cfg.g, cfg.theta)
        if spec.p_bell:
            row["p_bell"] = p_bell(cfg.g, cfg.theta)

        try:
            rho = averaged_state(conditional_states_kraus(cfg))
        except DegeneratePostselectionError:
            return SweepRow(status=STATUS_UNDEFINED, **row)

        if spec.concurrence:
            row["c_numeric"] = concurrence(rho)
        if spec.gamma:
            row["gamma_numeric"] = horodecki(rho).gamma
        return SweepRow(**row)

    def boundary_row(self, spec: SweepSpec, g: float) -> SweepRow:
        """Row at theta_B(g); undefined at g = 0 where no boundary exists"""
        if g <= 0.0:
            return SweepRow(kind="boundary", g=g, status=STATUS_UNDEFINED)
        return self.grid_row(spec, g, bell_boundary(g), kind="boundary")

    async def run(self, spec: SweepSpec) -> List[SweepRow]:
        """Grid rows in g-major order, then one boundary row per g"""
        g_values = [float(g) for g in spec.g_values()]
        theta_values = [float(t) for t in spec.theta_values()]
        logger.info(f"🚀 Starting sweep: {len(g_values)}x{len(theta_values)} grid on {self.workers} workers")

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            jobs = [
                loop.run_in_executor(pool, self.grid_row, spec, g, theta)
                for g in g_values
                for theta in theta_values
            ]
            if spec.boundary:
                jobs += [loop.run_in_executor(pool, self.boundary_row, spec, g) for g in g_values]
            rows = await asyncio.gather(*jobs)

        undefined = sum(row.status == STATUS_UNDEFINED for row in rows)
        logger.info(f"✅ Sweep complete: {len(rows)} rows ({undefined} undefined)")
        return list(rows)

    def run_blocking(self, spec: SweepSpec) -> List[SweepRow]:
        return asyncio.run(self.run(spec))
