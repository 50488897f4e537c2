"""Command-line entry points.

Subcommands: serve (host the live gateway), plan (emit a counterbalanced
study plan), headless (run scripted sessions to archives and logs),
analyze (logs to study report), replay (verify an archive byte-for-byte),
fixture (emit the interaction conformance tables as JSON).

Usage errors exit 2 (argparse); operational failures print a diagnostic
to stderr and exit 1. WARELAB_PORT and WARELAB_DATA_DIR provide defaults
for --port and output directories.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import sys

from ..interaction import conformance_fixture
from ..metrics import (
    MetricsError,
    QuestionnaireSchemaError,
    SessionRecord,
    SubjectQuestionnaire,
    comparative_from_events,
    derive_timings,
    plot_csv,
    read_log,
    render_table,
    summarize_study,
    sus_from_events,
)
from ..metrics.eventlog import EventKind
from ..orchestrator import latin_plan, load_plan, save_plan
from ..sim.scene import default_scene, load_scene
from .errors import GatewayError
from .headless import load_archive, replay, run_headless, save_archive
from .server import GatewayServer, ServeConfig


def _env_port(default=8765):
    try:
        return int(os.environ.get("WARELAB_PORT", default))
    except ValueError:
        return default


def _env_data_dir():
    return os.environ.get("WARELAB_DATA_DIR", ".")


def _scene_arg(args):
    if getattr(args, "scene", None):
        return load_scene(args.scene)
    return default_scene()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warelab",
        description="Warehouse teleoperation testbed: simulation gateway and "
        "study tooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="emit a counterbalanced study plan")
    p_plan.add_argument("--subjects", type=int, required=True)
    p_plan.add_argument("--seed", type=int, required=True)
    p_plan.add_argument("-o", "--out", help="output file (default stdout)")

    p_serve = sub.add_parser("serve", help="host the live gateway")
    p_serve.add_argument("--plan", required=True, help="plan file from `plan`")
    p_serve.add_argument("--subject", required=True)
    p_serve.add_argument("--session", type=int, default=0, choices=(0, 1))
    p_serve.add_argument("--scene", help="scene YAML (default: packaged scene)")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--notify-delay", type=float, default=30.0)
    p_serve.add_argument("--snapshot-hz", type=float, default=30.0)
    p_serve.add_argument("--time-scale", type=float, default=1.0)

    p_head = sub.add_parser("headless", help="run scripted sessions")
    p_head.add_argument("--plan", required=True)
    p_head.add_argument("--subject", action="append",
                        help="subject id (repeatable; default: all)")
    p_head.add_argument("--scene")
    p_head.add_argument("--seed", type=int, default=0)
    p_head.add_argument("--notify-delay", type=float, default=30.0)
    p_head.add_argument("--out", default=None, help="output directory")

    p_an = sub.add_parser("analyze", help="derive a study report from logs")
    p_an.add_argument("logs", nargs="+", help="session .ndjson files")
    p_an.add_argument("--out", default=None, help="output directory")

    p_rep = sub.add_parser("replay", help="verify an archive reproduces its log")
    p_rep.add_argument("archive", help="archive JSON from `headless`")

    p_fix = sub.add_parser("fixture", help="emit interaction conformance tables")
    p_fix.add_argument("-o", "--out", help="output file (default stdout)")

    return parser


def cmd_plan(args) -> int:
    plans = latin_plan(args.subjects, args.seed)
    if args.out:
        save_plan(args.out, plans, master_seed=args.seed)
        print(f"wrote {len(plans)}-subject plan to {args.out}")
    else:
        from ..orchestrator import plans_to_doc

        json.dump(plans_to_doc(plans, args.seed), sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def _find_plan(path, subject_id):
    plans = load_plan(path)
    for plan in plans:
        if plan.subject_id == subject_id:
            return plan
    raise GatewayError(f"subject {subject_id!r} not in plan {path}")


def cmd_serve(args) -> int:
    plan = _find_plan(args.plan, args.subject)
    config = ServeConfig(
        scene=_scene_arg(args),
        plan=plan,
        session_index=args.session,
        host=args.host,
        port=_env_port() if args.port is None else args.port,
        notify_delay=args.notify_delay,
        snapshot_hz=args.snapshot_hz,
        time_scale=args.time_scale,
    )
    server = GatewayServer(config)
    port = server.start()
    print(f"serving {plan.subject_id} session {args.session} "
          f"({plan.modality_order[args.session].value}) on "
          f"ws://{config.host}:{port}")
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()
    return 0


def cmd_headless(args) -> int:
    scene = _scene_arg(args)
    plans = load_plan(args.plan)
    wanted = set(args.subject) if args.subject else None
    out_dir = pathlib.Path(args.out if args.out is not None else _env_data_dir())
    out_dir.mkdir(parents=True, exist_ok=True)
    ran = 0
    for plan in plans:
        if wanted is not None and plan.subject_id not in wanted:
            continue
        archive = run_headless(
            plan, scene, seed=args.seed, notify_delay=args.notify_delay
        )
        archive_path = out_dir / f"{plan.subject_id}.archive.json"
        save_archive(archive_path, archive)
        for entry in archive.sessions:
            log_path = out_dir / (
                f"{plan.subject_id}_{entry['session_index']}_"
                f"{entry['modality']}.ndjson"
            )
            log_path.write_text(entry["log"], encoding="utf-8")
        print(f"{plan.subject_id}: archive + {len(archive.sessions)} logs "
              f"-> {out_dir}")
        ran += 1
    if wanted is not None and ran < len(wanted):
        raise GatewayError("some requested subjects were not in the plan")
    return 0


def _collect_sessions(paths):
    records, by_subject = [], {}
    for path in paths:
        events = read_log(path)
        start = next(e for e in events if e.kind is EventKind.SESSION_START)
        subject = start.data["subject"]
        modality = start.data["modality"]
        session_index = start.data["session_index"]
        records.append(
            SessionRecord(
                subject_id=subject,
                modality=modality,
                timings=derive_timings(events),
            )
        )
        by_subject.setdefault(subject, {})[session_index] = (modality, events)
    return records, by_subject


def _collect_questionnaires(by_subject):
    questionnaires = []
    for subject, sessions in sorted(by_subject.items()):
        if sorted(sessions) != [0, 1]:
            return None
        sus = {}
        for session_index, (modality, events) in sessions.items():
            sus[modality] = sus_from_events(events)
        comparative = comparative_from_events(sessions[1][1])
        if not comparative:
            return None
        questionnaires.append(
            SubjectQuestionnaire(
                subject_id=subject, sus=sus, comparative=comparative
            )
        )
    return questionnaires


def cmd_analyze(args) -> int:
    records, by_subject = _collect_sessions(args.logs)
    try:
        questionnaires = _collect_questionnaires(by_subject)
    except QuestionnaireSchemaError:
        questionnaires = None
    if questionnaires is None:
        print("note: incomplete questionnaires; reporting timings only",
              file=sys.stderr)
        questionnaires = ()
    report = summarize_study(records, questionnaires)
    out_dir = pathlib.Path(args.out if args.out is not None else _env_data_dir())
    out_dir.mkdir(parents=True, exist_ok=True)
    table_path = out_dir / "report.txt"
    table_path.write_text(render_table(report), encoding="utf-8")
    plot_path = out_dir / "plot.csv"
    plot_path.write_text(plot_csv(report), encoding="utf-8")
    sys.stdout.write(render_table(report))
    print(f"\nwrote {table_path} and {plot_path}")
    return 0


def cmd_replay(args) -> int:
    archive = load_archive(args.archive)
    timings, verdict = replay(archive)
    print(f"verdict: {verdict}")
    for session_index in sorted(timings):
        t = timings[session_index]
        print(
            f"session {session_index}: total={t.total_time:.2f}s "
            f"reaction={[round(x, 2) for x in t.reaction_time]} "
            f"robot={[round(x, 2) for x in t.robot_time]}"
        )
    return 0


def cmd_fixture(args) -> int:
    doc = json.dumps(conformance_fixture(), indent=2, sort_keys=True) + "\n"
    if args.out:
        pathlib.Path(args.out).write_text(doc, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(doc)
    return 0


_COMMANDS = {
    "plan": cmd_plan,
    "serve": cmd_serve,
    "headless": cmd_headless,
    "analyze": cmd_analyze,
    "replay": cmd_replay,
    "fixture": cmd_fixture,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (GatewayError, MetricsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
