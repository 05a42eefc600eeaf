from src.tools import qseries, quadrature

__all__ = ["qseries", "quadrature"]
