"""Command-line entry points: gameset, serve, logstore, chains, stats."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from refgame import analytics
from refgame import chains as chains_mod
from refgame import logstore as logstore_mod
from refgame.gameset import build as gameset_build
from refgame.gameset import filtering
from refgame.text import default_stopwords, load_stopwords


@click.group()
def main() -> None:
    """Two-player image-labelling dialogue game tools."""


@main.command("gameset")
@click.option("--annotations", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSONL annotation file (one image per line).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--sets", type=int, default=30, show_default=True)
@click.option("--synthetic", is_flag=True,
              help="Emit placeholder sets without annotations (for demos and tests).")
def gameset_cmd(annotations: str | None, seed: int, out: str, sets: int, synthetic: bool) -> None:
    """Build gamesets.json: image sets plus both highlight variants each."""
    if synthetic:
        image_sets = gameset_build.synthetic_image_sets(sets, seed=seed)
    else:
        if annotations is None:
            raise click.UsageError("--annotations is required unless --synthetic is given")
        records = filtering.read_annotations(annotations)
        groups = filtering.group_similar_images(records)
        try:
            image_sets = gameset_build.build_image_sets(groups, seed, set_count=sets)
        except gameset_build.InsufficientGroups as exc:
            raise click.ClickException(str(exc)) from exc
    pairs = [gameset_build.derive_variants(s) for s in image_sets]
    gameset_build.write_gamesets(out, pairs, seed=seed)
    click.echo(f"wrote {len(pairs)} game set pairs to {out}")


@main.command("serve")
@click.option("--port", type=int, default=8765, show_default=True, envvar="PB_PORT")
@click.option("--host", default="127.0.0.1", show_default=True, envvar="PB_HOST")
@click.option("--gamesets", "gamesets_path", type=click.Path(exists=True, dir_okay=False),
              required=True, envvar="PB_GAMESETS")
@click.option("--log-dir", type=click.Path(file_okay=False), required=True, envvar="PB_LOG_DIR")
@click.option("--seed", type=int, default=0, show_default=True, envvar="PB_SEED")
@click.option("--max-games", type=int, default=5, show_default=True, envvar="PB_MAX_GAMES")
@click.option("--match-timeout", type=float, default=120.0, show_default=True,
              envvar="PB_MATCH_TIMEOUT")
@click.option("--images-dir", type=click.Path(file_okay=False), default=None,
              envvar="PB_IMAGES_DIR")
def serve_cmd(port: int, host: str, gamesets_path: str, log_dir: str, seed: int,
              max_games: int, match_timeout: float, images_dir: str | None) -> None:
    """Run the live game server (WebSocket endpoint at /ws)."""
    import uvicorn

    from refgame.server.app import create_app

    pairs = gameset_build.load_gamesets(gamesets_path)
    app = create_app(
        pairs,
        log_dir,
        seed=seed,
        max_games=max_games,
        match_timeout=match_timeout,
        images_dir=images_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.group("logstore")
def logstore_group() -> None:
    """Inspect, export and import game logs."""


@logstore_group.command("export")
@click.argument("game_id")
@click.option("--logs", "root", type=click.Path(exists=True, file_okay=False), required=True)
def logstore_export(game_id: str, root: str) -> None:
    store = logstore_mod.LogStore(root)
    try:
        sys.stdout.write(store.export_game(game_id))
    except logstore_mod.UnknownGame:
        raise click.ClickException(f"unknown game {game_id}")


@logstore_group.command("import")
@click.argument("path", type=click.Path(exists=True, file_okay=False))
def logstore_import(path: str) -> None:
    _logs, report = logstore_mod.import_corpus(path)
    click.echo(json.dumps(report.to_doc(), indent=2, sort_keys=True))


@logstore_group.command("verify")
@click.option("--logs", "root", type=click.Path(exists=True, file_okay=False), required=True)
def logstore_verify(root: str) -> None:
    """Round-trip check: every closed log re-exports byte-identically."""
    store = logstore_mod.LogStore(root)
    bad = 0
    for game_id in store.closed_games():
        text = store.export_game(game_id)
        doc = logstore_mod.GameLog.from_doc(json.loads(text))
        if logstore_mod.canonical_dumps(doc.to_doc()) != text:
            click.echo(f"MISMATCH {game_id}")
            bad += 1
    click.echo(f"verified {len(store.closed_games())} logs, {bad} mismatches")
    if bad:
        sys.exit(1)


@main.group("chains")
def chains_group() -> None:
    """Extract dialogue segments and reference chains from game logs."""


@chains_group.command("extract")
@click.option("--logs", "root", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def chains_extract(root: str, out: str) -> None:
    logs, report = logstore_mod.import_corpus(root)
    segments, chains, diagnostics = chains_mod.extract_chains(logs)
    doc = chains_mod.chains_to_doc(logs, segments, chains, diagnostics)
    chains_mod.write_chains(out, doc)
    click.echo(
        f"{report.games} games -> {len(segments)} segments, {len(chains)} chains "
        f"({diagnostics.dropped_labels} labels dropped)"
    )


@chains_group.command("stats")
@click.option("--chains", "chains_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
def chains_stats(chains_path: str) -> None:
    doc = chains_mod.load_chains_doc(chains_path)
    segments, chains = chains_mod.chains_from_doc(doc)
    stats = chains_mod.chain_statistics(chains, segments)
    click.echo(json.dumps(stats.to_doc(), indent=2, sort_keys=True))


@chains_group.command("split")
@click.option("--chains", "chains_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--fractions", default="0.70,0.15,0.15", show_default=True)
def chains_split(chains_path: str, seed: int, out: str, fractions: str) -> None:
    parts = tuple(float(x) for x in fractions.split(","))
    if len(parts) != 3:
        raise click.UsageError("--fractions must be three comma-separated numbers")
    doc = chains_mod.load_chains_doc(chains_path)
    _segments, chains = chains_mod.chains_from_doc(doc)
    try:
        assignment = chains_mod.split_chains(chains, parts, seed=seed)
    except chains_mod.FractionMismatch as exc:
        raise click.ClickException(str(exc)) from exc
    chains_mod.write_splits(out, assignment)
    click.echo(json.dumps(assignment.counts(), sort_keys=True))


@main.command("stats")
@click.option("--logs", "root", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--vectors", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--annotations", "annotations_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="First/last description annotations (JSON) for the caption comparison.")
@click.option("--tags", type=click.Path(exists=True, dir_okay=False), default=None,
              help="External tagger output (JSONL) for the word-class shift.")
@click.option("--stopwords", "stopwords_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), required=True)
@click.option("--plots", type=click.Path(file_okay=False), default=None,
              help="Also emit SVG plots into this directory.")
def stats_cmd(root: str, vectors: str | None, annotations_path: str | None, tags: str | None,
              stopwords_path: str | None, report_path: str, plots: str | None) -> None:
    """Corpus measurements over a directory of game logs."""
    logs, _ = logstore_mod.import_corpus(root)
    stopwords = load_stopwords(stopwords_path) if stopwords_path else default_stopwords()
    vectors_map = analytics.load_word_vectors(vectors) if vectors else None
    annotations = (
        json.loads(Path(annotations_path).read_text(encoding="utf-8"))
        if annotations_path
        else None
    )
    tag_records = None
    if tags:
        tag_records = [
            json.loads(line)
            for line in Path(tags).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
    report = analytics.corpus_report(
        logs, stopwords, vectors=vectors_map, annotations=annotations, tag_records=tag_records
    )
    Path(report_path).write_text(json.dumps(report, indent=2, sort_keys=True), encoding="utf-8")
    click.echo(f"wrote report for {report['games']} games to {report_path}")
    if plots:
        _emit_plots(report, Path(plots))


def _emit_plots(report: dict, out_dir: Path) -> None:
    try:
        import matplotlib

        matplotlib.use("svg")
        import matplotlib.pyplot as plt
    except ImportError:
        click.echo("matplotlib not installed; skipping plots", err=True)
        return
    out_dir.mkdir(parents=True, exist_ok=True)
    rounds = [rs["round_index"] for rs in report["round_stats"]]

    fig, ax1 = plt.subplots()
    ax1.plot(rounds, [rs["mean_duration_s"] for rs in report["round_stats"]], "b-o")
    ax1.set_xlabel("round")
    ax1.set_ylabel("mean duration (s)")
    ax2 = ax1.twinx()
    ax2.plot(rounds, [rs["mean_correct_labels"] for rs in report["round_stats"]], "r--s")
    ax2.set_ylabel("mean correct labels")
    fig.savefig(out_dir / "efficiency.svg")
    plt.close(fig)

    fig, ax = plt.subplots()
    ax.plot(rounds, report["content_ratio"]["per_round_ratio"], "g-o")
    ax.set_xlabel("round")
    ax.set_ylabel("content token ratio")
    fig.savefig(out_dir / "content_ratio.svg")
    plt.close(fig)

    fig, ax = plt.subplots()
    ax.plot(rounds, report["novelty"]["mean_novel_ratio"], "m-o")
    ax.set_xlabel("round")
    ax.set_ylabel("novel content token ratio")
    fig.savefig(out_dir / "novelty.svg")
    plt.close(fig)
    click.echo(f"wrote plots to {out_dir}")


if __name__ == "__main__":
    main()
