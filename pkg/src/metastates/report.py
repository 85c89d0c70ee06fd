"""Run summaries derived from telemetry frames."""
from __future__ import annotations

from typing import Iterable, Mapping

from .mpi import MpiColor


def build_run_report(frames: Iterable[Mapping], tick_ms: int) -> dict:
    """Summarize a frame sequence (dict form, as serialized).

    Dwell times are attributed one tick per frame, so they always sum to the
    run duration. Reaction event counts tally channel enter-transitions per
    animation id; break suggestions count suggestion episodes (rising
    edges), not suggested ticks.
    """
    ticks = 0
    dwell = {color.wire: 0 for color in MpiColor}
    reaction_events: dict[str, int] = {}
    errors = 0
    completed = False
    completion_ms: int | None = None
    break_suggestions = 0
    previous_suggested = False
    for frame in frames:
        ticks += 1
        dwell[frame["mpi"]["color"]] += tick_ms
        for entry in frame["reactions"].values():
            if entry["changed"]:
                animation = entry["animation_id"]
                reaction_events[animation] = reaction_events.get(animation, 0) + 1
        task = frame["task"]
        errors = task["errors"]
        if task["completed"] and not completed:
            completed = True
            completion_ms = (frame["tick"] + 1) * tick_ms
        suggested = task["break_suggested"]
        if suggested and not previous_suggested:
            break_suggestions += 1
        previous_suggested = suggested
    return {
        "ticks": ticks,
        "tick_ms": tick_ms,
        "duration_ms": ticks * tick_ms,
        "task": {
            "completed": completed,
            "completion_ms": completion_ms,
            "errors": errors,
        },
        "dwell_ms": dwell,
        "reaction_events": dict(sorted(reaction_events.items())),
        "break_suggestions": break_suggestions,
    }


def format_report_table(report: Mapping) -> str:
    """Small human-readable rendering of a run report."""
    lines = [
        f"ticks            {report['ticks']} ({report['duration_ms']} ms)",
        f"task completed   {report['task']['completed']}"
        + (f" in {report['task']['completion_ms']} ms"
           if report['task']['completion_ms'] is not None else ""),
        f"task errors      {report['task']['errors']}",
        "dwell            " + "  ".join(
            f"{color}={ms}ms" for color, ms in report["dwell_ms"].items()),
        f"break suggested  {report['break_suggestions']}",
    ]
    if report["reaction_events"]:
        lines.append("reactions        " + "  ".join(
            f"{anim}x{n}" for anim, n in report["reaction_events"].items()))
    return "\n".join(lines)
