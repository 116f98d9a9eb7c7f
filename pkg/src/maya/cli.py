"""The ``maya`` command line: dataset tooling, training, sessions, service.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from . import __version__
from .augment import (
    DEFAULT_FRACTIONS,
    DatasetManifest,
    build_dataset,
    build_half_banks,
    stratified_split,
    synth_corpus,
    write_packed,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .errors import DatasetError, MayaError
from .fer import FerModel, build_maya_net, evaluate, predict
from .landmarks import parse_landmark_file, write_landmark_file
from .nn import TrainConfig, train
from .sessions import BoardConfig, simulate_game
from .stats import (
    compare_groups,
    compare_questions,
    pain_report,
    parse_responses_csv,
    render_pain_report,
    render_utaut_report,
    utaut_report_csv,
)
from .stats.reports import parse_pain_csv

CORPUS_FILE = "corpus.lmk.jsonl"
MANIFEST_FILE = "manifest.json"
PACKED_FILE = "composites.mayd"


class MayaCli(click.Group):
    """Group that maps domain errors to exit code 1."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except MayaError as exc:
            click.echo(f"error ({exc.code}): {exc}", err=True)
            ctx.exit(1)


@click.group(cls=MayaCli)
@click.version_option(__version__, prog_name="maya")
def main():
    """Expression recognition and session tooling for the Maya robot."""


@main.command()
@click.option("--per-class", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jitter", type=float, default=2.0, show_default=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=CORPUS_FILE,
              show_default=True)
def synth(per_class, seed, jitter, out):
    """Generate the synthetic landmark corpus."""
    sets = synth_corpus(per_class=per_class, seed=seed, jitter=jitter)
    write_landmark_file(sets, out)
    click.echo(f"wrote {len(sets)} landmark sets to {out}")


def _load_dataset(corpus_path):
    with open(corpus_path, "rb") as fh:
        sets = parse_landmark_file(fh.read())
    return build_dataset(build_half_banks(sets))


@main.command()
@click.option("--input", "-i", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Landmark corpus (.lmk.jsonl).")
@click.option("--out-dir", type=click.Path(file_okay=False), default="maya-data",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--leakage-mode", type=click.Choice(["paper", "source-disjoint"]),
              default="paper", show_default=True)
@click.option("--pack/--no-pack", default=False, show_default=True,
              help="Also materialize composites to the packed binary format.")
def augment(input_path, out_dir, seed, leakage_mode, pack):
    """Build the composite dataset manifest (and optionally pack images)."""
    dataset = _load_dataset(input_path)
    manifest = stratified_split(dataset, DEFAULT_FRACTIONS, seed=seed, leakage_mode=leakage_mode)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / MANIFEST_FILE).write_text(manifest.to_json(), encoding="utf-8")
    corpus_copy = out / CORPUS_FILE
    if Path(input_path).resolve() != corpus_copy.resolve():
        corpus_copy.write_bytes(Path(input_path).read_bytes())
    for name, count in manifest.per_class_counts.items():
        click.echo(f"{name}: {count}")
    click.echo(f"total: {manifest.total}")
    train_n, val_n, test_n = manifest.split_sizes()
    click.echo(f"split ({leakage_mode}): train {train_n}, val {val_n}, test {test_n}")
    if pack:
        count = write_packed(dataset.iter_samples(), out / PACKED_FILE)
        click.echo(f"packed {count} composites to {out / PACKED_FILE}")


def _load_split(data_dir, split):
    data = Path(data_dir)
    manifest = DatasetManifest.from_json((data / MANIFEST_FILE).read_text(encoding="utf-8"))
    dataset = _load_dataset(data / CORPUS_FILE)
    if split not in manifest.splits:
        raise DatasetError(f"unknown split {split!r}")
    xs, ys = dataset.materialize(manifest.splits[split])
    return manifest, xs, ys


@main.command(name="train")
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False), default="maya.ckpt",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--lr", type=float, default=0.001, show_default=True)
@click.option("--batch-size", type=int, default=64, show_default=True)
@click.option("--max-epochs", type=int, default=50, show_default=True)
@click.option("--patience", type=int, default=5, show_default=True)
def train_cmd(data_dir, out, seed, lr, batch_size, max_epochs, patience):
    """Train the recognition network on an augmented dataset."""
    manifest, train_x, train_y = _load_split(data_dir, "train")
    _, val_x, val_y = _load_split(data_dir, "val")
    model = build_maya_net(seed=seed)
    config = TrainConfig(learning_rate=lr, batch_size=batch_size, max_epochs=max_epochs,
                         seed=seed, patience=patience)

    def log(m):
        click.echo(
            f"epoch {m.epoch:3d}  train loss {m.train_loss:.4f} acc {m.train_acc:.4f}  "
            f"val loss {m.val_loss:.4f} acc {m.val_acc:.4f}"
        )

    result = train(model.network, train_x, train_y, val_x, val_y, config, log=log)
    meta = {
        "seed": seed,
        "leakage_mode": manifest.leakage_mode,
        "manifest_seed": manifest.seed,
        "best_epoch": result.best_epoch,
        "best_val_acc": result.best_val_acc,
        "epochs_run": len(result.metrics),
    }
    save_checkpoint(model.network, out, meta)
    click.echo(f"best epoch {result.best_epoch} (val acc {result.best_val_acc:.4f})")
    click.echo(model.ledger_text())
    click.echo(f"saved checkpoint to {out}")


@main.command(name="eval")
@click.option("--model", "-m", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--split", type=click.Choice(["train", "val", "test"]), default="test",
              show_default=True)
@click.option("--csv-out", type=click.Path(dir_okay=False), default=None)
def eval_cmd(model_path, data_dir, split, csv_out):
    """Confusion matrix and accuracy on one split."""
    network, meta = load_checkpoint(model_path)
    model = FerModel(network=network, meta=meta)
    _, xs, ys = _load_split(data_dir, split)
    matrix = evaluate(model, zip(ys, xs))
    click.echo(matrix.to_text())
    if csv_out:
        Path(csv_out).write_text(matrix.to_csv(), encoding="utf-8")
        click.echo(f"wrote {csv_out}")


@main.command(name="predict")
@click.option("--model", "-m", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--input", "-i", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
def predict_cmd(model_path, input_path):
    """Predict every landmark set in a file; one JSON line each."""
    network, meta = load_checkpoint(model_path)
    model = FerModel(network=network, meta=meta)
    with open(input_path, "rb") as fh:
        sets = parse_landmark_file(fh.read())
    for ls in sets:
        pred = predict(model, ls)
        click.echo(json.dumps({
            "subject": ls.subject_id,
            "top": pred.top.display_name,
            "probs": [round(float(p), 6) for p in pred.probs],
            "latency_ms": round(pred.latency_ms, 3),
        }, sort_keys=True))


@main.group()
def game():
    """Game session tools."""


@game.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cells", type=int, default=30, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Board configuration JSON (overrides --cells).")
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None,
              help="Write the event log here instead of stdout.")
def simulate(seed, cells, config_path, out):
    """Play a scripted full game and emit its event log (JSON Lines)."""
    if config_path:
        board = BoardConfig.from_dict(json.loads(Path(config_path).read_text(encoding="utf-8")))
    else:
        board = BoardConfig(cell_count=cells)
    engine = simulate_game(seed=seed, config=board)
    lines = "\n".join(event.to_json() for event in engine.events) + "\n"
    if out:
        Path(out).write_text(lines, encoding="utf-8")
        click.echo(f"wrote {len(engine.events)} events to {out} "
                   f"(winner: {engine.state.winner})")
    else:
        click.echo(lines, nl=False)


@main.group()
def stats():
    """Statistics over pain records and questionnaire responses."""


@stats.command()
@click.option("--input", "-i", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="CSV: participant_id,mode,score[,order]")
@click.option("--json", "as_json", is_flag=True, default=False)
def pain(input_path, as_json):
    """Paired pain analysis across modes A and B."""
    records = parse_pain_csv(Path(input_path).read_text(encoding="utf-8"))
    report = pain_report(records)
    if as_json:
        doc = {
            "n": report.n, "mean_a": report.mean_a, "sd_a": report.sd_a,
            "mean_b": report.mean_b, "sd_b": report.sd_b,
            "t_test": None if report.ttest is None else vars(report.ttest),
            "error": report.error, "chart": report.chart,
        }
        click.echo(json.dumps(doc, sort_keys=True))
    else:
        click.echo(render_pain_report(report))


@stats.command()
@click.option("--input", "-i", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="CSV: respondent_id,group,dyad_id,q1..q43")
@click.option("--pairing", type=click.Choice(["independent", "by_dyad"]),
              default="independent", show_default=True)
@click.option("--questions", default=None,
              help="Comma-separated question indices for per-item tests.")
@click.option("--csv-out", type=click.Path(dir_okay=False), default=None)
def utaut(input_path, pairing, questions, csv_out):
    """Category-level children-vs-parents comparison."""
    responses = parse_responses_csv(Path(input_path).read_text(encoding="utf-8"))
    children = [r for r in responses if r.group == "child"]
    parents = [r for r in responses if r.group == "parent"]
    rows = compare_groups(children, parents, pairing=pairing)
    click.echo(render_utaut_report(rows))
    if questions:
        indices = [int(q) for q in questions.split(",") if q.strip()]
        extra = compare_questions(children, parents, indices, pairing=pairing)
        click.echo(render_utaut_report(extra, title="Per-question comparison"))
    if csv_out:
        Path(csv_out).write_text(utaut_report_csv(rows), encoding="utf-8")
        click.echo(f"wrote {csv_out}")


@main.command()
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--model", "-m", "model_path", type=click.Path(dir_okay=False), default=None)
@click.option("--data-dir", type=click.Path(file_okay=False), default="maya-data",
              show_default=True)
@click.option("--gallery", type=click.Path(dir_okay=False), default=None)
@click.option("--max-sessions", type=int, default=64, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file with ApiConfig fields; flags win.")
def serve(port, host, model_path, data_dir, gallery, max_sessions, config_path):
    """Start the HTTP service."""
    import uvicorn

    from .service import ApiConfig, create_app

    fields = {
        "host": host,
        "port": port,
        "model_path": model_path,
        "data_dir": data_dir,
        "gallery_path": gallery,
        "max_sessions": max_sessions,
    }
    if config_path:
        loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        for key, value in loaded.items():
            if key in fields and fields[key] in (None, *_SERVE_DEFAULTS.get(key, ())):
                fields[key] = value
    config = ApiConfig(**fields)
    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="warning")


_SERVE_DEFAULTS = {
    "host": ("127.0.0.1",),
    "port": (8765,),
    "data_dir": ("maya-data",),
    "max_sessions": (64,),
}


if __name__ == "__main__":
    main()
