"""CLI: train and evaluate the candidate-scoring baselines."""

from __future__ import annotations

import json
from pathlib import Path

import click

from refgame_resolver.baseline import random_baseline
from refgame_resolver.data import count_classes, load_resolution_data
from refgame_resolver.evaluate import evaluate
from refgame_resolver.model import CONDITIONS, ModelConfig
from refgame_resolver.train import load_model, save_model, train


@click.group()
def main() -> None:
    """Reference-resolution baselines over extracted segment chains."""


def data_options(fn):
    fn = click.option("--chains", "chains_path", required=True,
                      type=click.Path(exists=True, dir_okay=False))(fn)
    fn = click.option("--splits", "splits_path", required=True,
                      type=click.Path(exists=True, dir_okay=False))(fn)
    fn = click.option("--features", "features_path", required=True,
                      type=click.Path(exists=True, dir_okay=False))(fn)
    return fn


@main.command("train")
@data_options
@click.option("--condition", type=click.Choice(CONDITIONS), default="history",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--embedding-dim", type=int, default=512, show_default=True)
@click.option("--hidden-dim", type=int, default=512, show_default=True)
@click.option("--batch-size", type=int, default=512, show_default=True)
@click.option("--learning-rate", type=float, default=0.001, show_default=True)
@click.option("--positive-weight", type=float, default=5.5, show_default=True)
@click.option("--max-epochs", type=int, default=100, show_default=True)
@click.option("--patience", type=int, default=5, show_default=True)
def train_cmd(chains_path, splits_path, features_path, condition, seed, out_path,
              embedding_dim, hidden_dim, batch_size, learning_rate, positive_weight,
              max_epochs, patience) -> None:
    data = load_resolution_data(chains_path, splits_path, features_path)
    config = ModelConfig(
        embedding_dim=embedding_dim,
        hidden_dim=hidden_dim,
        batch_size=batch_size,
        learning_rate=learning_rate,
        positive_weight=positive_weight,
        condition=condition,
    )
    model, report = train(data, config, seed, max_epochs=max_epochs, patience=patience)
    save_model(out_path, model, data.vocabulary)
    click.echo(json.dumps(report.to_doc(), indent=2, sort_keys=True))


@main.command("eval")
@data_options
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--split", type=click.Choice(["train", "val", "test"]), default="test",
              show_default=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
def eval_cmd(chains_path, splits_path, features_path, model_path, split, report_path) -> None:
    model, vocabulary = load_model(model_path)
    data = load_resolution_data(chains_path, splits_path, features_path)
    examples = data.split(split)
    report = evaluate(model, examples, batch_size=model.config.batch_size)
    doc = report.to_doc()
    targets, non_targets = count_classes(examples)
    doc["random_baseline"] = random_baseline(targets, non_targets).to_doc()
    text = json.dumps(doc, indent=2, sort_keys=True)
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")
    click.echo(text)


if __name__ == "__main__":
    main()
