"""
Verify graph assembly using LangGraph.

One node per selected check group, chained in a fixed order:
sequences → associated → testfun → boundary → wavefront → determinism → END

With ``fail_fast`` set, the conditional edge after each group ends the run
as soon as some group has failed.
"""

import logging
from typing import Any, Sequence

from langgraph.graph import END, StateGraph

from commands.state import VerifyState
from commands.verify.checks import GROUP_ORDER, CheckContext
from commands.verify.nodes import make_group_node
from core.errors import ConfigurationError

logger = logging.getLogger(__name__)


def _should_continue(state: VerifyState) -> str:
    """
    Decide whether the next group runs.

    Returns:
        "end" when fail_fast is set and a group has failed, "continue" otherwise
    """
    if state.get("fail_fast") and state.get("failed_groups"):
        logger.warning(f"fail_fast: stopping after failing groups {state.get('failed_groups')}")
        return "end"
    return "continue"


def create_verify_graph(groups: Sequence[str], ctx: CheckContext, jobs: int = 1) -> Any:
    """
    Create and compile the verify graph for the selected groups.

    Raises:
        ConfigurationError: If no known group is selected
    """
    ordered = [g for g in GROUP_ORDER if g in set(groups)]
    if not ordered:
        raise ConfigurationError(f"verify.groups: select at least one of {GROUP_ORDER}")
    logger.debug(f"Creating verify graph over {ordered}")

    graph_builder = StateGraph(VerifyState)
    for group in ordered:
        graph_builder.add_node(group, make_group_node(group, ctx, jobs))
    graph_builder.set_entry_point(ordered[0])

    for current, following in zip(ordered, ordered[1:]):
        graph_builder.add_conditional_edges(
            current,
            _should_continue,
            {
                "continue": following,
                "end": END,
            },
        )
    graph_builder.add_edge(ordered[-1], END)
    return graph_builder.compile()
