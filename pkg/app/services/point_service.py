"""Single-point evaluation of the canonical example"""

import logging
from typing import List

from app.analysis import (
    concurrence,
    concurrence_avg_closed,
    gamma_closed,
    horodecki,
    sector_concurrence,
)
from app.errors import DegeneratePostselectionError
from app.models import STATUS_OK, STATUS_UNDEFINED, DilationRecord, PointRecord, sector_fields
from app.protocol import (
    ProtocolConfig,
    averaged_state,
    conditional_states_dilation,
    conditional_states_kraus,
    p_bell,
)
from app.qcore import fidelity

logger = logging.getLogger(__name__)


class PointService:
    """Service for evaluating one (g, theta) point"""

    def evaluate(self, g: float, theta: float) -> PointRecord:
        """Closed-form and numeric figures of merit at one point

        Sector weights, sector concurrences and closed-form columns are
        always filled; numeric columns stay empty when postselection
        vanishes.
        """
        cfg = ProtocolConfig.canonical(g, theta)
        sectors = conditional_states_kraus(cfg)

        values = {
            "g": cfg.g,
            "theta": cfg.theta,
            "c_closed": concurrence_avg_closed(cfg.g, cfg.theta),
            "gamma_closed": gamma_closed(cfg.g, cfg.theta),
            "p_bell": p_bell(cfg.g, cfg.theta),
        }
        for name, sector in zip(sector_fields("w"), sectors):
            values[name] = sector.weight
        for name, sector in zip(sector_fields("c"), sectors):
            values[name] = sector_concurrence(sector)

        try:
            rho = averaged_state(sectors)
        except DegeneratePostselectionError as e:
            logger.debug(f"Point g={cfg.g}, theta={cfg.theta} is undefined: {e}")
            return PointRecord(status=STATUS_UNDEFINED, **values)

        report = horodecki(rho)
        return PointRecord(
            status=STATUS_OK,
            c_numeric=concurrence(rho),
            gamma_numeric=report.gamma,
            b_max=report.b_max,
            violating=report.violating,
            **values,
        )

    def compare_dilation(self, g: float, theta: float) -> List[DilationRecord]:
        """Kraus path against the full controlled-unitary path, per sector"""
        cfg = ProtocolConfig.canonical(g, theta)
        records = []
        for kraus, dilated in zip(conditional_states_kraus(cfg), conditional_states_dilation(cfg)):
            overlap = None
            if not (kraus.is_degenerate or dilated.is_degenerate):
                overlap = fidelity(kraus.psi, dilated.psi)
            records.append(DilationRecord(
                g=cfg.g,
                theta=cfg.theta,
                sector=kraus.name,
                weight_kraus=kraus.weight,
                weight_dilation=dilated.weight,
                weight_diff=abs(kraus.weight - dilated.weight),
                fidelity=overlap,
            ))
        return records
