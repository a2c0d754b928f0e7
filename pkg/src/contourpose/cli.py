"""Batch command-line interface.

Subcommands: ``decompose``, ``gen-synthetic``, ``train``, ``eval``,
``predict``.  Exit codes: 0 success, 1 usage error, 2 data error (unreadable
or malformed inputs, label/dimension mismatches), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import classify, features, image_io, pipeline
from .contourlet import PdfbConfig, pdfb_decompose
from .features import SingularScatterError
from .model_io import ModelBundle, load_model, save_model

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_nlevs(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise _UsageError(f"bad --nlevs value {text!r} (expected e.g. '0,1')") from None


def _parse_crop(text: str) -> image_io.CropRect:
    parts = text.split(",")
    if len(parts) != 4:
        raise _UsageError(f"bad --crop value {text!r} (expected 'top,left,height,width')")
    try:
        top, left, height, width = (int(v) for v in parts)
    except ValueError:
        raise _UsageError(f"bad --crop value {text!r} (fields must be integers)") from None
    return image_io.CropRect(top=top, left=left, height=height, width=width)


def _build_parser() -> _Parser:
    parser = _Parser(prog="contourpose", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="write the subbands of one image")
    p.add_argument("image")
    p.add_argument("--nlevs", default="0,1")
    p.add_argument("--out", required=True)

    p = sub.add_parser("gen-synthetic", help="generate the synthetic grating corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=150)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("train", help="train on a manifest and report the confusion matrix")
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-per-class", type=int, default=10)
    p.add_argument("--classifier", choices=("knn", "mindist"), default="knn")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--pca-energy", type=float, default=0.99)
    p.add_argument("--nlevs", default="0,1")
    p.add_argument("--model-out", default=None)
    p.add_argument("--csv", default=None, help="also write the confusion matrix as CSV")

    p = sub.add_parser("eval", help="evaluate a saved model on every manifest entry")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--csv", default=None)

    p = sub.add_parser("predict", help="classify a single image")
    p.add_argument("--model", required=True)
    p.add_argument("image")
    p.add_argument("--crop", default=None, help="top,left,height,width")
    p.add_argument("--trace", action="store_true",
                   help="print each stage's output dimensions to stderr")
    return parser


def _emit_confusion(confusion, csv_path) -> None:
    print(confusion.to_text())
    if csv_path:
        Path(csv_path).write_text(confusion.to_csv())


def _cmd_decompose(args) -> int:
    nlevs = _parse_nlevs(args.nlevs)
    cfg = PdfbConfig(nlevs)
    img = image_io.parse_netpbm(Path(args.image).read_bytes())
    if img.ndim == 3:
        img = image_io.to_grayscale(img)
    dec = pdfb_decompose(img, cfg)
    manifest = pipeline.save_decomposition(dec, cfg, args.out)
    print(f"wrote {dec.subband_count} subbands to {manifest.parent}")
    return EXIT_OK


def _cmd_gen_synthetic(args) -> int:
    manifest = pipeline.gen_synthetic(args.out, args.per_class, args.seed)
    print(f"wrote manifest {manifest}")
    return EXIT_OK


def _cmd_train(args) -> int:
    cfg = pipeline.RunConfig(
        nlevs=_parse_nlevs(args.nlevs),
        pca_energy=args.pca_energy,
        q=args.q,
        classifier=args.classifier,
        k=args.k,
    )
    spec = pipeline.SplitSpec(train_per_class=args.train_per_class, seed=args.seed)
    entries = pipeline.load_manifest(args.manifest)
    projection, model, confusion = pipeline.run_train(entries, cfg, spec)
    if args.model_out:
        bundle = ModelBundle(
            projection=projection, classifier=model,
            resize=cfg.resize, nlevs=cfg.nlevs, pca_energy=cfg.pca_energy,
        )
        save_model(bundle, args.model_out)
    _emit_confusion(confusion, args.csv)
    return EXIT_OK


def _cmd_eval(args) -> int:
    bundle = load_model(args.model)
    entries = pipeline.load_manifest(args.manifest)
    if not entries:
        raise ValueError("manifest is empty")
    cfg = pipeline.RunConfig(
        nlevs=bundle.nlevs, resize=bundle.resize,
        classifier=bundle.classifier.kind, k=max(bundle.classifier.k, 1),
        alphabet=bundle.classifier.alphabet,
    )
    X = pipeline.feature_matrix(entries, cfg)
    Z = features.project(bundle.projection, X)
    confusion = classify.evaluate(bundle.classifier, Z, [e.label for e in entries])
    _emit_confusion(confusion, args.csv)
    return EXIT_OK


def _cmd_predict(args) -> int:
    bundle = load_model(args.model)
    rect = _parse_crop(args.crop) if args.crop else None
    label = pipeline.run_predict(bundle, args.image, rect, trace=args.trace)
    print(label)
    return EXIT_OK


_COMMANDS = {
    "decompose": _cmd_decompose,
    "gen-synthetic": _cmd_gen_synthetic,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "predict": _cmd_predict,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularScatterError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
