"""Operator entry point. Every command runs headless.

  serve       run the HTTP/websocket service
  host        host a match (TCP lockstep + websocket bridge), print results
  join        connect a bot to a hosted match over TCP
  tournament  run a bot tournament, write replays and stats tables
  replay      verify/replay a .vzr file; print stats or export frames
  bench       renderer benchmark

Exit codes: 0 success, 1 runtime failure, 2 usage error. The PIXELARENA_LOG
environment variable sets the log level.
"""
from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

from . import configure_logging


def _parse_resolution(text: str) -> tuple[int, int]:
    w, _, h = text.lower().partition("x")
    try:
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad resolution {text!r}, want WxH") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pixelarena", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("serve", help="run the HTTP/websocket service")
    sp.add_argument("--port", type=int, default=5030)
    sp.add_argument("--ui-dir", default=None)

    hp = sub.add_parser("host", help="host a match and wait for it to finish")
    hp.add_argument("--config", required=True)
    hp.add_argument("--port", type=int, default=5029, help="TCP lockstep port")
    hp.add_argument("--ws-port", type=int, default=5030, help="bridge/service port")
    hp.add_argument("--players", type=int, default=2, help="remote TCP player slots")
    hp.add_argument("--ws-players", type=int, default=0, help="websocket player slots")
    hp.add_argument("--bots", default="", help="comma-separated bot specs to fill slots")
    hp.add_argument("--duration", type=int, default=21000, help="match length in tics")
    hp.add_argument("--record", default=None, help="write a .vzr replay here")
    hp.add_argument("--seed", type=int, default=None)

    jp = sub.add_parser("join", help="join a hosted match with a bot")
    jp.add_argument("--addr", default="127.0.0.1:5029")
    jp.add_argument("--bot", default="fighter", help="idle|wanderer|fighter[:seed]")
    jp.add_argument("--name", default=None)

    tp = sub.add_parser("tournament", help="run an offline bot tournament")
    tp.add_argument("--config", required=True)
    tp.add_argument("--bots", required=True, help="comma-separated bot specs")
    tp.add_argument("--matches", type=int, default=10)
    tp.add_argument("--capacity", type=int, default=8)
    tp.add_argument("--worst-exclude", type=int, default=2)
    tp.add_argument("--duration", type=int, default=21000)
    tp.add_argument("--out", required=True, help="output directory")
    tp.add_argument("--seed", type=int, default=None)

    rp = sub.add_parser("replay", help="verify and analyze a replay")
    rp.add_argument("file")
    rp.add_argument("--stats", action="store_true", help="print the summary CSV")
    rp.add_argument("--render", default=None, help="export frames to this directory")
    rp.add_argument("--resolution", type=_parse_resolution, default=None)
    rp.add_argument("--every", type=int, default=35, help="export every Nth tic")
    rp.add_argument("--player", type=int, default=0, help="viewpoint for --render")

    bp = sub.add_parser("bench", help="renderer benchmark (single-threaded)")
    bp.add_argument("--resolution", type=_parse_resolution, default=(320, 240))
    bp.add_argument("--tics", type=int, default=1000)
    bp.add_argument("--no-buffers", action="store_true",
                    help="skip the per-buffer breakdown")
    return p


def parse_args(argv=None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app

    app = create_app(ui_dir=args.ui_dir or _default_ui_dir())
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return 0


def _default_ui_dir() -> str | None:
    candidate = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    return str(candidate) if candidate.is_dir() else None


def _cmd_host(args) -> int:
    import uvicorn

    from .netplay.host import HostSession
    from .replay import ReplayWriter
    from .scenario import load_scenario
    from .service import MatchManager, create_app
    from .stats import PlayerStats, emit_csv

    cfg = load_scenario(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    bots = [b for b in args.bots.split(",") if b]
    recorder = None
    if args.record:
        recorder = ReplayWriter(open(args.record, "wb"))
    session = HostSession(cfg, n_remote=args.players, bot_specs=bots,
                          n_virtual=args.ws_players, duration_tics=args.duration,
                          port=args.port, recorder=recorder)

    async def main() -> int:
        manager = MatchManager()
        app = create_app(ui_dir=_default_ui_dir(), manager=manager)
        server = uvicorn.Server(uvicorn.Config(
            app, host="127.0.0.1", port=args.ws_port, log_level="warning"))
        server_task = asyncio.create_task(server.serve())
        match = manager.start(session, args.duration)
        print(f"hosting on tcp://127.0.0.1:{args.port} "
              f"(bridge ws://127.0.0.1:{args.ws_port}/matches/{match.id}/ws); "
              f"waiting for {args.players} player(s)")
        await match.task
        server.should_exit = True
        await server_task
        if match.error:
            print(f"match failed: {match.error}", file=sys.stderr)
            return 1
        report = match.report
        if report.desync is not None:
            d = report.desync
            print(f"match invalidated: desync at tic {d.tic} "
                  f"(player {d.player_id})", file=sys.stderr)
            return 1
        rows = [PlayerStats(name, c)
                for name, c in zip(report.names, report.counters)]
        print(emit_csv(rows), end="")
        print(f"# final tic {report.final_tic}, "
              f"realized rate {report.realized_tic_rate:.2f} Hz")
        return 0

    return asyncio.run(main())


def _cmd_join(args) -> int:
    from .netplay import JoinError, join_match

    host, _, port = args.addr.partition(":")
    name = args.name or f"{args.bot.partition(':')[0]}-client"
    try:
        report = asyncio.run(join_match(host or "127.0.0.1", int(port or 5029),
                                        name, args.bot))
    except (JoinError, ConnectionError, OSError) as e:
        print(f"join failed: {e}", file=sys.stderr)
        return 1
    print(f"played as slot {report.player_id}; final tic {report.final_tic}; "
          f"state hash {report.final_hash:#018x}")
    return 0


def _cmd_tournament(args) -> int:
    from .scenario import load_scenario
    from .tournament import ScheduleError, run_tournament

    bots = [b for b in args.bots.split(",") if b]
    if len(bots) < 2:
        print("need >= 2 participants", file=sys.stderr)
        return 1
    cfg = load_scenario(args.config)
    try:
        result = run_tournament(cfg, bots, args.matches, capacity=args.capacity,
                                worst_exclude=args.worst_exclude,
                                duration_tics=args.duration, out_dir=args.out,
                                seed=args.seed)
    except ScheduleError as e:
        print(f"tournament aborted: {e}", file=sys.stderr)
        return 1
    print(result.summary_csv, end="")
    print(f"# wrote {len(result.reports)} matches to {result.out_dir}")
    return 0


def _cmd_replay(args) -> int:
    from .replay import ReplayError, ReplayDesyncError, replay
    from .stats import PlayerStats, emit_csv

    render_dir = Path(args.render) if args.render else None
    on_tic = None
    if render_dir is not None:
        render_dir.mkdir(parents=True, exist_ok=True)
        import dataclasses

        from .render import render_frame
        from .render.ppm import write_frame
        from .scenario import parse_config

        from .replay import load_header
        hdr = load_header(args.file)
        opts = parse_config(hdr.config_text).render
        if args.resolution:
            opts = dataclasses.replace(opts, width=args.resolution[0],
                                       height=args.resolution[1])
        opts = dataclasses.replace(opts, depth_enabled=True, labels_enabled=True,
                                   automap_enabled=True, automap_full=True)

        def on_tic(world, actions, events):
            if world.tic % args.every == 0:
                bundle = render_frame(world, args.player, opts)
                write_frame(render_dir / f"tic_{world.tic:06d}", bundle)

    try:
        result = replay(args.file, on_tic=on_tic)
    except ReplayDesyncError as e:
        print(f"replay corrupt: {e}", file=sys.stderr)
        return 1
    except (ReplayError, OSError) as e:
        print(f"replay failed: {e}", file=sys.stderr)
        return 1
    if args.stats:
        rows = [PlayerStats(f"player_{i}", c) for i, c in enumerate(result.counters)]
        print(emit_csv(rows), end="")
    print(f"# replay OK: {result.final_tic} tics, "
          f"final hash {result.final_hash:#018x}")
    return 0


def _cmd_bench(args) -> int:
    from .render.bench import run_bench

    w, h = args.resolution
    report = run_bench(w, h, args.tics, buffers=not args.no_buffers)
    print(report.summary())
    return 0


_COMMANDS = {
    "serve": _cmd_serve,
    "host": _cmd_host,
    "join": _cmd_join,
    "tournament": _cmd_tournament,
    "replay": _cmd_replay,
    "bench": _cmd_bench,
}


def run(args: argparse.Namespace) -> int:
    configure_logging()
    return _COMMANDS[args.command](args)


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
