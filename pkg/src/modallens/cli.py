"""Command-line pipeline: ingest, attribute, analyze, mine, project, serve,
export, demo.  All inputs arrive via flags; exit codes are 1 (usage),
2 (validation), 3 (provider), 4 (incomplete upstream)."""
from __future__ import annotations

import sys

import click

from . import pipeline
from .attribution import AttributionConfig
from .errors import (ArgumentError, DegenerateError, IncompleteUpstream,
                     ModalLensError, NotFound, NotReady, ParseError,
                     ProviderError, RangeError, SchemaError, ShapeError)
from .interactions import Thresholds
from .projection import ProjectionConfig
from .store import Store, canonical_json, resolve_store_dir, write_atomic

EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_PROVIDER = 3
EXIT_UPSTREAM = 4

click.UsageError.exit_code = EXIT_USAGE


def _store_option(f):
    return click.option("--store", "store_dir", default=None,
                        help="Store directory (default: $MODALLENS_STORE or ./store)")(f)


def _get_store(store_dir: str | None) -> Store:
    return Store(resolve_store_dir(store_dir))


@click.group()
def cli():
    """Explanation pipeline for multimodal sentiment models."""


@cli.command()
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--instances", "instances_path", required=True, type=click.Path(exists=True))
@_store_option
def ingest(schema_path, instances_path, store_dir):
    """Validate and snapshot the schema and instance files."""
    fp = pipeline.ingest(_get_store(store_dir), schema_path, instances_path)
    click.echo(f"ingest ok fingerprint={fp}")


@cli.command()
@click.option("--provider", "provider_spec", required=True,
              help="linear:FILE | mlp:FILE | subprocess:CMD | http:URL")
@click.option("--method", type=click.Choice(["exact", "kernel", "linear"]), default="exact")
@click.option("--samples", "n_samples", default=2048, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--background", type=click.Choice(["dataset-mean", "zeros"]),
              default="dataset-mean", show_default=True)
@click.option("--background-size", default=50, show_default=True)
@click.option("--jobs", default=1, show_default=True,
              help="Reserved for instance-parallel attribution")
@_store_option
def attribute(provider_spec, method, n_samples, seed, background, background_size,
              jobs, store_dir):
    """Compute feature- and word-level attributions for every instance."""
    cfg = AttributionConfig(method=method, n_samples=n_samples, seed=seed,
                            background=background, background_size=background_size)
    fp = pipeline.attribute(_get_store(store_dir), provider_spec, cfg)
    click.echo(f"attribute ok fingerprint={fp}")


@cli.command()
@click.option("--grid-step", default=0.05, show_default=True)
@click.option("--thresholds", "thresholds_str", default=None,
              help="Skip the grid search: TH_SIG,TH_DOM,TH_CONFL")
@_store_option
def analyze(grid_step, thresholds_str, store_dir):
    """Aggregate importances, optimize thresholds, label interactions."""
    th = None
    if thresholds_str:
        parts = [float(v) for v in thresholds_str.split(",")]
        if len(parts) != 3:
            raise click.UsageError("--thresholds needs three comma-separated values")
        th = Thresholds(*parts)
    fp = pipeline.analyze(_get_store(store_dir), grid_step=grid_step, thresholds=th)
    click.echo(f"analyze ok fingerprint={fp}")


@cli.command()
@click.option("--min-support", default=0.05, show_default=True)
@click.option("--cutoff-percentile", default=90.0, show_default=True)
@_store_option
def mine(min_support, cutoff_percentile, store_dir):
    """Mine frequent influential-feature templates for the full dataset."""
    params = pipeline.MiningParams(min_support=min_support,
                                   cutoff_percentile=cutoff_percentile)
    fp = pipeline.mine(_get_store(store_dir), params)
    click.echo(f"mine ok fingerprint={fp}")


@cli.command()
@click.option("--perplexity", default=30.0, show_default=True)
@click.option("--iters", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--language-rep", type=click.Choice(["embeddings", "bag-of-words"]),
              default="embeddings", show_default=True)
@_store_option
def project(perplexity, iters, seed, language_rep, store_dir):
    """Embed per-modality feature vectors to 2D and derive glyphs."""
    cfg = ProjectionConfig(perplexity=perplexity, iters=iters, seed=seed,
                           language_rep=language_rep)
    fp = pipeline.project(_get_store(store_dir), cfg)
    click.echo(f"project ok fingerprint={fp}")


@cli.command()
@click.option("--port", default=8765, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@_store_option
def serve(port, host, store_dir):
    """Start the read-only query API."""
    from .service import serve as run_serve

    run_serve(_get_store(store_dir), port=port, host=host)


@cli.command()
@click.option("--view", required=True,
              type=click.Choice(["summary", "templates", "projection", "instance",
                                 "metrics", "meta"]))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--modality", default="vision", show_default=True)
@click.option("--instance-id", default=None)
@click.option("--heat-mode", default="error", show_default=True)
@_store_option
def export(view, out_path, modality, instance_id, heat_mode, store_dir):
    """Write one view payload (identical to the API response body) to a file."""
    from .payloads import AnalysisBundle

    bundle = AnalysisBundle.load(_get_store(store_dir))
    if view == "summary":
        payload = bundle.summary_payload()
    elif view == "templates":
        payload = bundle.templates_payload()
    elif view == "projection":
        payload = bundle.projection_payload(modality, heat_mode=heat_mode)
    elif view == "instance":
        if not instance_id:
            raise click.UsageError("--instance-id is required for the instance view")
        payload = bundle.instance_payload(instance_id)
    elif view == "metrics":
        payload = bundle.metrics_payload()
    else:
        payload = bundle.meta_payload()
    write_atomic(out_path, canonical_json(payload))
    click.echo(f"export ok {out_path}")


@cli.command()
@click.option("--seed", default=7, show_default=True)
@click.option("--n", default=600, show_default=True)
@click.option("--grid-step", default=0.05, show_default=True)
@click.option("--port", default=None, type=int,
              help="Also start the query API on this port after the pipeline")
@_store_option
def demo(seed, n, grid_step, port, store_dir):
    """Generate the planted-interaction dataset and run the full pipeline."""
    store = _get_store(store_dir)
    fp = pipeline.demo(store, seed=seed, n=n, grid_step=grid_step)
    click.echo(f"demo ok store_fingerprint={fp}")
    if port is not None:
        from .service import serve as run_serve

        run_serve(store, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except IncompleteUpstream as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_UPSTREAM
    except ProviderError as exc:
        click.echo(f"provider error: {exc}", err=True)
        return EXIT_PROVIDER
    except (ParseError, SchemaError, ShapeError, RangeError, ArgumentError,
            DegenerateError, NotFound, NotReady, ModalLensError) as exc:
        click.echo(f"validation error: {exc}", err=True)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
