"""
State and result schemas shared by the command runners and the verify graph.

These are TypedDicts so they can serve directly as LangGraph state.
"""

import operator
from datetime import datetime
from typing import Annotated, Any, Dict, List, Optional, TypedDict


class CommandResult(TypedDict, total=False):
    """
    Result of running one subcommand.

    Attributes:
        command_name: Name of the executed command
        status: success, failure (a verification FAIL) or error
        output: Summary data of the run
        artifacts: Relative paths of the files written
        execution_time_seconds: Wall time, for logs only
        error: Error message if status is error
        error_type: Exception class name if status is error
        metadata: Additional metadata about the run
    """

    command_name: str
    status: str
    output: Dict[str, Any]
    artifacts: List[str]
    execution_time_seconds: float
    error: Optional[str]
    error_type: Optional[str]
    metadata: Dict[str, Any]


class CheckRecord(TypedDict, total=False):
    """
    One row of the verification table.

    Attributes:
        id: Criterion number; rows are ordered by it
        name: Short name of the check
        group: Check group (one verify graph node per group)
        passed: Verdict
        detail: One-line explanation
        constants: Fitted constants and measured values
    """

    id: int
    name: str
    group: str
    passed: bool
    detail: str
    constants: Dict[str, Any]


class LogEntry(TypedDict, total=False):
    timestamp: str
    component: str
    event_type: str
    message: str
    details: Dict[str, Any]


class VerifyState(TypedDict, total=False):
    """
    State of the verify graph.

    Attributes:
        config: Resolved run config as plain data
        out_dir: Output directory of the run
        groups: Groups selected for this run
        fail_fast: Stop after the first failing group
        results: Check rows, accumulated across nodes
        failed_groups: Groups with at least one failing check, accumulated
        execution_log: Log entries, accumulated
    """

    config: Dict[str, Any]
    out_dir: str
    groups: List[str]
    fail_fast: bool
    results: Annotated[List[CheckRecord], operator.add]
    failed_groups: Annotated[List[str], operator.add]
    execution_log: Annotated[List[LogEntry], operator.add]


def log_entry(
    component: str, event_type: str, message: str, details: Optional[Dict[str, Any]] = None
) -> LogEntry:
    return {
        "timestamp": datetime.now().isoformat(),
        "component": component,
        "event_type": event_type,
        "message": message,
        "details": details or {},
    }


def create_initial_state(config: Dict[str, Any], out_dir: str) -> VerifyState:
    verify = config.get("verify", {})
    return {
        "config": config,
        "out_dir": out_dir,
        "groups": list(verify.get("groups", [])),
        "fail_fast": bool(verify.get("fail_fast", False)),
        "results": [],
        "failed_groups": [],
        "execution_log": [],
    }
