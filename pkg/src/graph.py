"""LangGraph verification workflow for one (form, part, m) request.

State: VerifyState (from src.state) is a TypedDict with Annotated reducers: operator.add for
certificates, operator.ior for timings, so nodes contribute pieces instead of overwriting.

Graph flow:
  START -> classify_scope -> [build_table | skip_table] -> build_polynomial -> find_roots
        -> classify_roots -> [certify | skip_certify] -> verdict -> END
Conditional edges: tilde-odd parts have no L-derivative table; certificates run only when the
scope lists some.
"""

import logging

from langgraph.graph import END, START, StateGraph

from src.config import RunConfig
from src.nodes.pipeline import (
    BuildPolynomialNode,
    BuildTableNode,
    CertifyNode,
    ClassifyRootsNode,
    ClassifyScopeNode,
    FindRootsNode,
    VerdictNode,
)
from src.state import FormSpec, VerificationReport, VerifyState

logger = logging.getLogger(__name__)


def _route_table(state: dict) -> str:
    return "skip_table" if state.get("part") == "tilde-odd" else "build_table"


def _route_certify(state: dict) -> str:
    scope = state.get("scope") or {}
    return "certify" if scope.get("certificates") else "skip_certify"


def _noop_node(_state: dict) -> dict:
    return {}


def build_verification_graph():
    g = StateGraph(VerifyState)

    g.add_node("classify_scope", ClassifyScopeNode)
    g.add_node("build_table", BuildTableNode)
    g.add_node("skip_table", _noop_node)
    g.add_node("build_polynomial", BuildPolynomialNode)
    g.add_node("find_roots", FindRootsNode)
    g.add_node("classify_roots", ClassifyRootsNode)
    g.add_node("certify", CertifyNode)
    g.add_node("skip_certify", _noop_node)
    g.add_node("verdict", VerdictNode)

    g.add_edge(START, "classify_scope")
    g.add_conditional_edges(
        "classify_scope",
        _route_table,
        {"build_table": "build_table", "skip_table": "skip_table"},
    )
    g.add_edge("build_table", "build_polynomial")
    g.add_edge("skip_table", "build_polynomial")
    g.add_edge("build_polynomial", "find_roots")
    g.add_edge("find_roots", "classify_roots")
    g.add_conditional_edges(
        "classify_roots",
        _route_certify,
        {"certify": "certify", "skip_certify": "skip_certify"},
    )
    g.add_edge("certify", "verdict")
    g.add_edge("skip_certify", "verdict")
    g.add_edge("verdict", END)

    return g.compile()


def run_verification(spec: FormSpec, part: str, m: int, config: RunConfig, store=None) -> VerificationReport:
    """Invoke the verification graph and return its report."""
    graph = build_verification_graph()
    state = graph.invoke(
        {
            "spec": spec,
            "part": part,
            "order": m,
            "precision_bits": config.precision_bits,
            "tolerance": config.tolerance,
            "store": store,
        },
        config={
            "run_name": "verify",
            "tags": ["verify", spec.label, part],
            "metadata": {"form": spec.label, "part": part, "m": m, "precision_bits": config.precision_bits},
        },
    )
    return state["report"]
