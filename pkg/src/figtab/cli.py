"""Command-line entry point: detect, extract, eval, export, serve.

Machine-readable output goes to stdout (JSON everywhere when --json is
passed), logs and errors go to stderr. Exit codes: 0 success, 1
operational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .exporters import ExportOptions, ExportRequest, export as export_table, import_table_file
from .metrics import Tolerance
from .pdf import EncryptedPdf, MalformedPdf, write_figure_outputs
from .tables import EmptyTable, parse_reply, to_json_dict, to_tsv
from .vlm import (
    BackendConfig,
    PromptProfile,
    VlmClient,
    VlmError,
    load_backends_file,
    preprocess,
)

log = logging.getLogger("figtab")


class CliError(Exception):
    """Operational failure worth an exit code of 1."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figtab",
        description="Extract data tables from chart figures in PDFs",
    )
    parser.add_argument("--log-level", default="warning",
                        choices=["debug", "info", "warning", "error"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="find and render captioned figures in a PDF")
    p.add_argument("--pdf", required=True)
    p.add_argument("--out", required=True, help="output directory for PNGs + manifest")
    p.add_argument("--dpi", type=int, default=144)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("extract", help="extract a table from one chart image")
    p.add_argument("--image", required=True)
    p.add_argument("--backends-file", required=True)
    p.add_argument("--backend", default=None, help="backend name (default from file)")
    p.add_argument("--prompt", default="simple", choices=["simple", "detailed"])
    p.add_argument("--preprocess", action="store_true", help="2x upscale before sending")
    p.add_argument("--request-log", default=None, help="append per-attempt JSON lines here")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval", help="run the benchmark harness over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--backends-file", required=True)
    p.add_argument("--backend", default=None)
    p.add_argument("--prompt", default="simple", choices=["simple", "detailed"])
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--patches", default=None, help="JSON-lines ground-truth patches")
    p.add_argument("--cache", default=None, help="response cache directory")
    p.add_argument("--resamples", type=int, default=10_000)
    p.add_argument("--chart-type", default=None)
    p.add_argument("--split", default=None, choices=["dev", "validation"])
    p.add_argument("--preprocess", action="store_true")
    p.add_argument("--request-log", default=None, help="append per-attempt JSON lines here")
    p.add_argument("--format", default="markdown-table",
                   choices=["json", "markdown-table", "heatmap-csv"],
                   help="what to print on stdout")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("export", help="convert a stored table to another format")
    p.add_argument("--table", required=True, help="table file (.tsv or .json)")
    p.add_argument("--format", required=True,
                   choices=["csv", "tsv", "json", "latex", "r", "xlsx"])
    p.add_argument("--out", default=None, help="output path (default: beside input)")
    p.add_argument("--name", default="extracted", help="data frame name for R output")
    p.add_argument("--confidence", action="store_true", help="append confidence column")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the review HTTP service")
    p.add_argument("--config", required=True, help="service config JSON")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--json", action="store_true")

    return parser


def _load_backend(args) -> BackendConfig:
    backends, default = load_backends_file(args.backends_file)
    name = args.backend or default
    if name not in backends:
        raise CliError(f"backend {name!r} not defined in {args.backends_file}")
    return backends[name]


def _cmd_detect(args) -> int:
    data = Path(args.pdf).read_bytes()
    manifest = write_figure_outputs(data, args.out, Path(args.pdf).name, dpi=args.dpi)
    if args.json:
        print(json.dumps(manifest, indent=2))
    else:
        for entry in manifest["figures"]:
            print(f"{entry['label']}\tpage {entry['page'] + 1}\t{entry['image_path']}")
        log.info("wrote %d figures to %s", len(manifest["figures"]), args.out)
    return 0


def _cmd_extract(args) -> int:
    backend = _load_backend(args)
    png = Path(args.image).read_bytes()
    if args.preprocess:
        import io

        from PIL import Image

        from .vlm import to_png_bytes

        png = to_png_bytes(preprocess(Image.open(io.BytesIO(png)).convert("RGB")))
    from .vlm import AttemptLog

    client = VlmClient(backend, log=AttemptLog(args.request_log) if args.request_log else None)
    extraction = client.extract(png, PromptProfile.named(args.prompt))
    table = parse_reply(extraction.response_text)
    if args.json:
        print(json.dumps(to_json_dict(table), indent=2))
    else:
        sys.stdout.write(to_tsv(table))
    return 0


def _cmd_eval(args) -> int:
    backend = _load_backend(args)
    records = bench.load_dataset(
        args.manifest, chart_type=args.chart_type, split=args.split
    )
    if not records:
        raise CliError("no records matched the given filters")
    if args.patches:
        records = bench.apply_patches(records, bench.load_patches(args.patches))
    from .vlm import AttemptLog

    report = bench.run_eval(
        records,
        backend,
        PromptProfile.named(args.prompt),
        tol=Tolerance(relative=args.tolerance),
        seed=args.seed,
        parallelism=args.parallelism,
        cache_dir=args.cache,
        resamples=args.resamples,
        preprocess_images=args.preprocess,
        log=AttemptLog(args.request_log) if args.request_log else None,
    )
    report_json = bench.render_report(report, "json")
    if args.out:
        Path(args.out).write_bytes(report_json)
        log.info("wrote report to %s", args.out)
    fmt = "json" if args.json else args.format
    sys.stdout.buffer.write(bench.render_report(report, fmt))
    return 0


def _cmd_export(args) -> int:
    path = Path(args.table)
    source_fmt = "json" if path.suffix.lower() == ".json" else "tsv"
    table = import_table_file(path.read_bytes(), source_fmt)
    data = export_table(
        ExportRequest(
            table,
            args.format,
            ExportOptions(include_confidence=args.confidence, table_name=args.name),
        )
    )
    ext = {"latex": "tex", "r": "R"}.get(args.format, args.format)
    out = Path(args.out) if args.out else path.with_suffix(f".{ext}")
    out.write_bytes(data)
    if args.json:
        print(json.dumps({"out": str(out), "format": args.format, "size": len(data)}))
    else:
        print(out)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    config_path = Path(args.config)
    config = json.loads(config_path.read_text())
    backends, default = load_backends_file(config_path)
    storage_root = config.get("storage_root", "sessions")
    storage = (config_path.parent / storage_root).resolve()
    ui_dir = config.get("ui_dir")
    if ui_dir:
        ui_dir = (config_path.parent / ui_dir).resolve()
    app = create_app(
        SessionStore(storage),
        backends,
        default,
        ui_dir=ui_dir,
        start_gc_thread=True,
    )
    if args.json:
        print(json.dumps({"host": args.host, "port": args.port, "storage": str(storage)}))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "detect": _cmd_detect,
    "extract": _cmd_extract,
    "eval": _cmd_eval,
    "export": _cmd_export,
    "serve": _cmd_serve,
}

_OPERATIONAL_ERRORS = (
    CliError,
    VlmError,
    EmptyTable,
    MalformedPdf,
    EncryptedPdf,
    bench.SchemaError,
    bench.MissingImage,
    bench.UnknownRecord,
    bench.PatchConflict,
    bench.InsufficientData,
    OSError,
    ValueError,
)


def dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except _OPERATIONAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
