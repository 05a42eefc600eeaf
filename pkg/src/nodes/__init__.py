from src.nodes.aggregator import aggregate_scan
from src.nodes.pipeline import judge_roots

__all__ = ["aggregate_scan", "judge_roots"]
