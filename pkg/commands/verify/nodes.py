"""
Node functions of the verify graph.

Each node runs the checks of one group:
1. Checks run in worker threads, at most ``jobs`` at a time
2. A check that raises is recorded as a failing row with the exception text
3. The node returns its rows, its failed group (if any) and log entries;
   the state reducers append them
"""

import asyncio
import logging
import time
from typing import Any, Awaitable, Callable, Dict, List

from commands.state import CheckRecord, VerifyState, log_entry
from commands.verify.checks import CheckContext, CheckSpec, checks_for

logger = logging.getLogger(__name__)

GroupNode = Callable[[VerifyState], Awaitable[Dict[str, Any]]]


def run_check(spec: CheckSpec, ctx: CheckContext) -> CheckRecord:
    """Run one check; exceptions become FAIL rows and budget overruns are logged."""
    start = time.perf_counter()
    try:
        record = spec.run(ctx)
    except Exception as e:
        logger.error(f"check {spec.id} ({spec.name}) raised: {e}", exc_info=True)
        record = {
            "id": spec.id,
            "name": spec.name,
            "group": spec.group,
            "passed": False,
            "detail": f"{type(e).__name__}: {e}",
            "constants": {},
        }
    elapsed = time.perf_counter() - start
    if elapsed > spec.budget_seconds:
        logger.warning(
            f"check {spec.id} ({spec.name}) took {elapsed:.2f}s, over its {spec.budget_seconds:g}s budget"
        )
    logger.info(f"check {spec.id} {spec.name}: {'PASS' if record['passed'] else 'FAIL'}")
    return record


def make_group_node(group: str, ctx: CheckContext, jobs: int = 1) -> GroupNode:
    """Build the node that runs every check of ``group``."""

    async def group_node(state: VerifyState) -> Dict[str, Any]:
        specs = checks_for(group)
        logger.info(f"Starting verify group {group} ({len(specs)} checks, jobs={jobs})")
        semaphore = asyncio.Semaphore(jobs)

        async def run_one(spec: CheckSpec) -> CheckRecord:
            async with semaphore:
                return await asyncio.to_thread(run_check, spec, ctx)

        records: List[CheckRecord] = list(await asyncio.gather(*(run_one(s) for s in specs)))
        failed = [r["name"] for r in records if not r["passed"]]
        return {
            "results": records,
            "failed_groups": [group] if failed else [],
            "execution_log": [
                log_entry(
                    component=group,
                    event_type="failed" if failed else "completed",
                    message=f"{len(records) - len(failed)} of {len(records)} checks passed",
                    details={"failed": failed},
                )
            ],
        }

    group_node.__name__ = f"{group}_node"
    return group_node
