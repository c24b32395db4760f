"""Command-line entry point.

Every command works inside one output directory: ``build`` writes the
network there, and ``cluster``, ``rank``, ``ego``, ``export`` and
``report`` read it back.  Options can also come from a JSON file given
with ``--config`` whose keys are flag names (``"window-seconds": 300``);
explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .actions import ActionType
from .cluster import Clustering, cluster_density, densest_cluster, multiview_cluster, read_clustering, write_clustering
from .gen import generate, load_scenario, write_labels
from .ingest import read_corpus, write_corpus, write_error_report
from .metrics import ConvergenceError, rank_cluster, write_report
from .network import (
    MultiViewNetwork,
    NetworkError,
    ego,
    export_network,
    format_weight,
    import_edge_csv,
    strongest_edges,
    view_summary,
)
from .pipeline import build_network
from .window import TieBreak, WindowConfig

log = logging.getLogger("syncaction")

CAVEAT = (
    "NOTE: synchronized activity marks accounts as suspicious only; "
    "it is not evidence of affiliation and should be reviewed by a person."
)
NETWORK_BASENAME = "network"
MANIFEST = "network.json"


class CLIError(Exception):
    pass


def _csv_write(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _load_network(out: Path) -> MultiViewNetwork:
    manifest = out / MANIFEST
    if not manifest.exists():
        raise CLIError(f"no built network in {out} (run 'build' first)")
    meta = json.loads(manifest.read_text(encoding="utf-8"))
    views = [ActionType(v) for v in meta["views"]]
    return import_edge_csv(out / NETWORK_BASENAME, views)


def _load_clustering(out: Path) -> Clustering:
    path = out / "clustering.csv"
    if not path.exists():
        raise CLIError(f"no clustering in {out} (run 'cluster' first)")
    return read_clustering(path)


def _safe_name(user: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", user)


def cmd_build(args) -> List[str]:
    views = ActionType.parse_list(args.views)
    if not views:
        raise CLIError("at least one view must be selected")
    config = WindowConfig(args.window_seconds, TieBreak(args.tie_break), args.downweight_popular)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    parsed = read_corpus([Path(p) for p in args.input], strict=args.strict)
    write_error_report(parsed.errors, out / "errors.csv")
    if not parsed.tweets:
        raise CLIError("no valid tweets in input")

    network = build_network(parsed.tweets, views, config, args.min_weight, args.include_retweets, args.workers)
    export_network(network, "edge-csv", out / NETWORK_BASENAME)
    if args.graphml:
        export_network(network, "graphml", out / NETWORK_BASENAME)
    meta = {
        "views": [v.value for v in views],
        "window_seconds": config.window_seconds,
        "tie_break": config.tie_break.value,
        "popularity_downweight": config.popularity_downweight,
        "min_weight": args.min_weight,
        "include_retweets": args.include_retweets,
        "tweets": len(parsed.tweets),
        "parse_errors": len(parsed.errors),
        "users": len(network.users),
    }
    (out / MANIFEST).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    stats = view_summary(network)
    _csv_write(
        out / "view_stats.csv",
        ["view", "active_nodes", "edges", "total_weight", "max_weight"],
        [[s["view"], s["active_nodes"], s["edges"], format_weight(s["total_weight"]), format_weight(s["max_weight"])] for s in stats],
    )
    top = strongest_edges(network, args.top, "averaged") if network.users else []
    _csv_write(
        out / "strongest_edges.csv",
        ["source", "target"] + [f"w_{v.value}" for v in views] + ["mean_weight"],
        [[e.pair[0], e.pair[1], *map(format_weight, e.weights), repr(float(e.score))] for e in top],
    )

    lines = [
        f"tweets: {len(parsed.tweets)} parsed, {len(parsed.errors)} rejected",
        f"network: {len(network.users)} users across {len(views)} views",
    ]
    for s in stats:
        lines.append(f"  {s['view']:<16} nodes={s['active_nodes']:<7} edges={s['edges']:<8} max_weight={format_weight(s['max_weight'])}")
    if top:
        lines.append("strongest links (mean weight across views):")
        for e in top:
            lines.append(f"  {e.pair[0]} -- {e.pair[1]}  {e.score:.3f}")
    lines.append(CAVEAT)
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return lines


def cmd_cluster(args) -> List[str]:
    out = Path(args.out)
    network = _load_network(out)
    if not network.users:
        raise CLIError("network is empty; nothing to cluster")
    clustering = multiview_cluster(network, args.resolution, args.coupling, args.seed)
    write_clustering(clustering, out / "clustering.csv")

    profile = []
    for cid, members in clustering.clusters().items():
        density, total = cluster_density(network, members)
        profile.append([cid, len(members), repr(density), format_weight(total)])
    _csv_write(out / "clusters.csv", ["cluster", "size", "density", "total_weight"], profile)

    lines = [f"clusters: {clustering.n_clusters} (objective {clustering.objective:.6f})"]
    try:
        best = densest_cluster(network, clustering, args.min_size)
    except NetworkError as exc:
        lines.append(f"densest cluster: none ({exc})")
        lines.append(CAVEAT)
        return lines
    members = clustering.members(best)
    _csv_write(out / "densest.csv", ["user_id", "cluster"], [[u, best] for u in members])
    report = rank_cluster(network, clustering, best)
    write_report(report, out / "report.csv")
    density, _ = cluster_density(network, members)
    lines.append(f"densest cluster: {best} ({len(members)} members, density {density:.3f})")
    for u in report.users[:10]:
        lines.append(f"  {u:<24} total_degree={format_weight(report.total_degree[u])} vitality={report.vitality[u]:+.5f}")
    lines.append(CAVEAT)
    return lines


def cmd_rank(args) -> List[str]:
    out = Path(args.out)
    network = _load_network(out)
    clustering = _load_clustering(out)
    cid = args.cluster_id if args.cluster_id is not None else densest_cluster(network, clustering, args.min_size)
    vview = ActionType.parse(args.vitality_view) if args.vitality_view else None
    report = rank_cluster(network, clustering, cid, vitality_view=vview)
    path = out / f"rank_{cid}.csv"
    write_report(report, path)
    lines = [f"cluster {cid}: {len(report.users)} members -> {path.name}"]
    for u in report.users[: args.top]:
        lines.append(f"  {report.rank_degree[u]:>3}. {u}  total_degree={format_weight(report.total_degree[u])}")
    lines.append(CAVEAT)
    return lines


def cmd_ego(args) -> List[str]:
    out = Path(args.out)
    network = _load_network(out)
    sub = ego(network, args.user, args.radius)
    base = out / f"ego_{_safe_name(args.user)}_r{args.radius}"
    written = export_network(sub, args.format, base)
    _csv_write(Path(str(base) + ".nodes.csv"), ["user_id"], [[u] for u in sub.users])
    lines = [f"ego of {args.user} (radius {args.radius}): {len(sub.users)} users"]
    lines += [f"  wrote {p.name}" for p in written]
    return lines


def cmd_export(args) -> List[str]:
    out = Path(args.out)
    network = _load_network(out)
    dest = Path(args.dest) if args.dest else out / NETWORK_BASENAME
    written = export_network(network, args.format, dest)
    return [f"wrote {p}" for p in written]


def cmd_simulate(args) -> List[str]:
    scenario = load_scenario(Path(args.scenario))
    if args.seed is not None:
        scenario.seed = args.seed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tweets, labels = generate(scenario)
    write_corpus(tweets, out / "corpus.jsonl")
    write_labels(labels, out / "labels.csv")
    n_camp = sum(1 for v in labels.values() if v != "background")
    return [f"simulated {len(tweets)} tweets from {len(labels)} users ({n_camp} planted) -> {out}"]


def cmd_report(args) -> List[str]:
    from . import plotting

    out = Path(args.out)
    network = _load_network(out)
    rdir = out / "report"
    rdir.mkdir(exist_ok=True)
    written = [plotting.plot_weight_distribution(network, rdir / "weight_distribution.png")]
    stats = view_summary(network)
    _csv_write(
        rdir / "view_stats.csv",
        ["view", "active_nodes", "edges", "total_weight", "max_weight"],
        [[s["view"], s["active_nodes"], s["edges"], format_weight(s["total_weight"]), format_weight(s["max_weight"])] for s in stats],
    )
    written.append(rdir / "view_stats.csv")
    if (out / "clustering.csv").exists() and network.users:
        clustering = read_clustering(out / "clustering.csv")
        items = list(clustering.clusters().items())
        sizes, dens = [], []
        for _, members in items:
            d, _ = cluster_density(network, members)
            sizes.append(len(members))
            dens.append(d)
        try:
            best = densest_cluster(network, clustering, args.min_size)
        except NetworkError:
            best = None
        hi = [cid for cid, _ in items].index(best) if best is not None else None
        written.append(plotting.plot_cluster_profile(sizes, dens, hi, rdir / "cluster_profile.png"))
        if best is not None:
            report = rank_cluster(network, clustering, best)
            write_report(report, rdir / "densest_ranking.csv")
            written.append(rdir / "densest_ranking.csv")
            written.append(plotting.plot_cluster_ranking(report, rdir / "densest_ranking.png"))
            center = args.user or report.users[0]
            sub = ego(network, center, args.radius)
            written.append(plotting.plot_network(sub, rdir / f"ego_{_safe_name(center)}.png", center=center))
    elif args.user:
        sub = ego(network, args.user, args.radius)
        written.append(plotting.plot_network(sub, rdir / f"ego_{_safe_name(args.user)}.png", center=args.user))
    return [f"wrote {p.relative_to(out)}" for p in written] + [CAVEAT]


COMMANDS = {
    "build": cmd_build,
    "cluster": cmd_cluster,
    "rank": cmd_rank,
    "ego": cmd_ego,
    "export": cmd_export,
    "simulate": cmd_simulate,
    "report": cmd_report,
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="syncaction", description="Synchronized-action coordination networks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file of flag-name keys")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_out(p):
        p.add_argument("--out", "-o", required=True, help="working/output directory")
        return p

    p = with_out(sub.add_parser("build", help="tweets -> multi-view network"))
    p.add_argument("--input", "-i", nargs="+", required=True)
    p.add_argument("--views", default="hashtag,url,mention")
    p.add_argument("--window-seconds", type=_positive_int, default=300)
    p.add_argument("--tie-break", choices=[t.value for t in TieBreak], default=TieBreak.EARLIEST_ANCHOR.value)
    p.add_argument("--min-weight", type=float, default=1)
    p.add_argument("--include-retweets", action="store_true", default=False)
    p.add_argument("--downweight-popular", action="store_true", default=False)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--strict", action="store_true", default=False)
    p.add_argument("--graphml", action="store_true", default=False)
    p.add_argument("--top", type=_positive_int, default=10)

    p = with_out(sub.add_parser("cluster", help="multi-view clustering and densest-cluster report"))
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--min-size", type=int, default=2)

    p = with_out(sub.add_parser("rank", help="rank the members of one cluster"))
    p.add_argument("--cluster-id", type=int)
    p.add_argument("--min-size", type=int, default=2)
    p.add_argument("--vitality-view", help="compute vitality on one view instead of the summed graph")
    p.add_argument("--top", type=_positive_int, default=10)

    p = with_out(sub.add_parser("ego", help="export the ego network of one user"))
    p.add_argument("--user", required=True)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--format", choices=["edge-csv", "graphml"], default="edge-csv")

    p = with_out(sub.add_parser("export", help="re-export the built network"))
    p.add_argument("--format", choices=["edge-csv", "graphml"], default="graphml")
    p.add_argument("--dest", help="basename for the exported files")

    p = with_out(sub.add_parser("simulate", help="generate a synthetic corpus with planted campaigns"))
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--seed", type=int)

    p = with_out(sub.add_parser("report", help="figures and tables for a built (and clustered) network"))
    p.add_argument("--user", help="center of the ego figure (default: top-ranked densest member)")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--min-size", type=int, default=2)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        data = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CLIError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(data, dict):
        raise CLIError("config file must hold a JSON object")
    defaults = {str(k).lstrip("-").replace("-", "_"): v for k, v in data.items()}
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    known_dests = {a.dest for sp in subparsers.choices.values() for a in sp._actions}
    unknown = sorted(set(defaults) - known_dests)
    if unknown:
        raise CLIError(f"unknown config keys: {', '.join(unknown)}")
    for sp in subparsers.choices.values():
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in defaults.items() if k in dests})
        for a in sp._actions:
            if a.dest in defaults and a.required:
                a.required = False


def _fail(command: Optional[str], exc: BaseException) -> int:
    payload = {"status": "error", "command": command, "error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except CLIError as exc:
        return _fail(None, exc)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        lines = COMMANDS[args.command](args)
    except (CLIError, NetworkError, ConvergenceError, ValueError, OSError, KeyError) as exc:
        return _fail(args.command, exc)
    for line in lines:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
