"""Command-line surface: profile, resample, evaluate, mine, recommend, generate.

Thin argument-parsing layer over the core package; every command with a
fixed --seed writes byte-identical output files. Exit codes: 0 success,
1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import json
import sys

import click

from . import dataset as ds
from . import evaluate as ev
from . import reports
from .errors import DataError
from .forest import ForestConfig
from .profiling import profile as compute_profile
from .recommend import get_model, model_to_doc, recommend as run_recommend, RuleModel
from .resample import EVALUATION_STRATEGIES, ResampleConfig, StrategyId, apply
from .rules import mine_rules


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _load_dataset(path, fmt, label_col, minority):
    if fmt == "keel":
        return ds.load_keel(path, minority_label=minority)
    if label_col is None:
        raise click.UsageError("--label-col is required for CSV input")
    return ds.load_csv(path, label_column=label_col, minority_label=minority)


_INGEST_OPTIONS = [
    click.option("--label-col", default=None, help="Label column name (CSV input)."),
    click.option("--minority", default=None, help="Minority class label (default: rarer class)."),
    click.option("--format", "fmt", type=click.Choice(["csv", "keel"]), default="csv",
                 show_default=True, help="Input file format."),
]


def _with_ingest(fn):
    for option in reversed(_INGEST_OPTIONS):
        fn = option(fn)
    return fn


@click.group()
def cli():
    """Profile, resample, evaluate and pick strategies for imbalanced data."""


@cli.command("profile")
@click.argument("path", type=click.Path())
@_with_ingest
@click.option("--out", default=None, type=click.Path(), help="Write the profile document here.")
def profile_cmd(path, label_col, minority, fmt, out):
    """Compute the meta-feature profile of a dataset."""
    d = _load_dataset(path, fmt, label_col, minority)
    doc = reports.profile_doc(compute_profile(d))
    _emit(reports.dump_json(doc), out)


@cli.command("resample")
@click.argument("path", type=click.Path())
@_with_ingest
@click.option("--method", required=True, help="Strategy token, e.g. smote, rus, smote-tl.")
@click.option("--perc-over", default=500, show_default=True, help="Oversampling percentage.")
@click.option("--minority-share", default=0.5, show_default=True,
              help="Target minority share for RUS.")
@click.option("--k-smote", default=6, show_default=True)
@click.option("--k-cnn", default=1, show_default=True)
@click.option("--k-enn", default=3, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Output CSV path.")
def resample_cmd(path, label_col, minority, fmt, method, perc_over, minority_share,
                 k_smote, k_cnn, k_enn, seed, out):
    """Apply one resampling strategy and write the result as CSV."""
    try:
        strategy = StrategyId.from_token(method)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    d = _load_dataset(path, fmt, label_col, minority)
    cfg = ResampleConfig(perc_over=perc_over, perc_under_minority_share=minority_share,
                         k_smote=k_smote, k_cnn=k_cnn, k_enn=k_enn, seed=seed)
    ds.write_csv(apply(strategy, d, cfg), out)


def _parse_strategies(tokens: str):
    if tokens.strip().lower() == "all":
        return EVALUATION_STRATEGIES
    try:
        return tuple(StrategyId.from_token(t) for t in tokens.split(",") if t.strip())
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


@cli.command("evaluate")
@click.argument("path", type=click.Path())
@_with_ingest
@click.option("--strategies", default="all", show_default=True,
              help="'all' or a comma-separated strategy list.")
@click.option("--folds", default=10, show_default=True)
@click.option("--repeats", default=5, show_default=True)
@click.option("--trees", default=100, show_default=True)
@click.option("--perc-over", default=500, show_default=True)
@click.option("--minority-share", default=0.5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--threads", default=1, show_default=True, help="Worker threads; output is identical for any value.")
@click.option("--out", default=None, type=click.Path(), help="Report JSON path (default stdout).")
@click.option("--folds-out", default=None, type=click.Path(),
              help="Flat per-fold CSV path (default: <out>.folds.csv).")
@click.option("--progress/--no-progress", default=False, help="Print per-fold progress to stderr.")
def evaluate_cmd(path, label_col, minority, fmt, strategies, folds, repeats, trees,
                 perc_over, minority_share, seed, threads, out, folds_out, progress):
    """Compare strategies under repeated stratified cross-validation."""
    d = _load_dataset(path, fmt, label_col, minority)
    chosen = _parse_strategies(strategies)
    if not chosen:
        raise click.UsageError("no strategies selected")
    cfg = ResampleConfig(perc_over=perc_over, perc_under_minority_share=minority_share, seed=seed)
    fcfg = ForestConfig(n_trees=trees, seed=seed)

    def on_fold(outcome):
        if progress:
            click.echo(
                f"rep={outcome.rep} fold={outcome.fold} strategy={outcome.strategy.token} "
                f"g_mean={outcome.report.g_mean:.4f}",
                err=True,
            )

    report = ev.run_experiment(d, chosen, cfg, fcfg, K=folds, R=repeats, seed=seed,
                               threads=threads, on_fold=on_fold)
    _emit(reports.dump_json(reports.experiment_doc(report)), out)
    csv_path = folds_out or (out + ".folds.csv" if out else None)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(reports.folds_csv(report))


@cli.command("mine")
@click.argument("profiles_file", type=click.Path())
@click.option("--min-conf", default=0.9, show_default=True)
@click.option("--min-supp", default=0.05, show_default=True)
@click.option("--name", default="user-model", show_default=True, help="Name stored in the model.")
@click.option("--out", required=True, type=click.Path(), help="Rule model JSON path.")
def mine_cmd(profiles_file, min_conf, min_supp, name, out):
    """Mine a rule model from labeled profiles (JSON document)."""
    try:
        with open(profiles_file, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {profiles_file}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{profiles_file}: invalid JSON: {exc}") from exc
    labeled = reports.labeled_profiles_from_doc(doc)
    rules = mine_rules(labeled, min_support=min_supp, min_confidence=min_conf)
    model = RuleModel(name, tuple(rules), provenance=f"mined from {len(labeled)} profiles")
    _emit(reports.dump_json(model_to_doc(model)), out)


@cli.command("recommend")
@click.argument("path", type=click.Path())
@_with_ingest
@click.option("--model", "model_name", default="builtin-overall", show_default=True,
              help="builtin-iba, builtin-overall, or a model file path.")
@click.option("--out", default=None, type=click.Path())
def recommend_cmd(path, label_col, minority, fmt, model_name, out):
    """Recommend a strategy for a dataset file or a profile document."""
    model = get_model(model_name)
    doc = None
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError):
        doc = None
    if isinstance(doc, dict) and doc.get("kind") == "profile":
        prof = reports.profile_from_doc(doc)
    else:
        d = _load_dataset(path, fmt, label_col, minority)
        prof = compute_profile(d)
    rec = run_recommend(prof, model)
    _emit(reports.dump_json(reports.recommendation_doc(rec, model)), out)


@cli.command("generate")
@click.option("--n", required=True, type=int, help="Instance count.")
@click.option("--ir", required=True, type=float, help="Target imbalance ratio.")
@click.option("--features", required=True, type=int, help="Feature count.")
@click.option("--informative", default=None, type=int,
              help="Informative feature count (default: all).")
@click.option("--sep", default=1.0, show_default=True, help="Class separation.")
@click.option("--flip", default=0.0, show_default=True, help="Label noise fraction.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Output CSV path.")
def generate_cmd(n, ir, features, informative, sep, flip, seed, out):
    """Generate a synthetic imbalanced dataset as CSV."""
    spec = ds.SynthSpec(
        n=n,
        p=features,
        informative=features if informative is None else informative,
        ir_target=ir,
        class_sep=sep,
        noise_flip_fraction=flip,
        seed=seed,
    )
    ds.write_csv(ds.make_imbalanced(spec), out)


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 3
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        click.echo(f"internal error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
