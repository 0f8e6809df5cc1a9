"""Command-line interface.

Subcommands: predict, classify, train, eval, bins, cdf, fixtures, serve.
Exit codes: 0 success, 1 usage error, 2 data/validation error.  Every
command that samples or trains takes an explicit --seed so results are
reproducible from the printed metadata.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import artifacts as art
from . import pipeline
from .classifier import MODE_ORDER, confusion_matrix
from .closed_form import EstimatorFamily, classify_fixed, estimate
from .dataset import dataset_to_csv, parse_dataset
from .errors import ColmpError
from .evaluation import (
    bin_analysis,
    box_stats,
    default_bins,
    error_cdf,
    misclass_error_table,
)
from .fixtures import generate_fixture
from .types import ColumnFeatures, Dataset, SectionShape

FAMILY_NAMES = tuple(f.value for f in EstimatorFamily)


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    data errors, so remap usage failures to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_feature_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shape", required=True, choices=["R", "C"])
    p.add_argument("--ad", required=True, type=float,
                   help="span-to-depth ratio a/d")
    p.add_argument("--axial", required=True, type=float,
                   help="axial load ratio P/(Ag*f'c)")
    p.add_argument("--rhol", required=True, type=float,
                   help="longitudinal reinforcement ratio")
    p.add_argument("--rhot", required=True, type=float,
                   help="transverse reinforcement ratio")
    p.add_argument("--sd", required=True, type=float,
                   help="spacing-to-depth ratio s/d")
    p.add_argument("--vyvo", required=True, type=float,
                   help="shear capacity ratio Vy/Vo")


def _features(args) -> ColumnFeatures:
    return ColumnFeatures(
        span_depth=args.ad, axial_ratio=args.axial, rho_l=args.rhol,
        rho_t=args.rhot, spacing_depth=args.sd, shear_ratio=args.vyvo,
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text, encoding="utf-8")


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _read_dataset(path: str) -> Dataset:
    return parse_dataset(Path(path).read_text(encoding="utf-8"))


def _load_predictor(name: str) -> Optional[pipeline.Predictor]:
    """Treat a model argument as an artifact path if such a file exists."""
    p = Path(name)
    if p.is_file():
        return pipeline.Predictor(art.load_model(p.read_bytes()))
    return None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_predict(args) -> int:
    f = _features(args)
    shape = SectionShape(args.shape)
    names = [m.strip() for m in args.model.split(",") if m.strip()]
    rows = []
    for name in names:
        predictor = _load_predictor(name)
        if predictor is not None:
            raw = predictor.predict_raw(f)
            clamped = max(raw, 0.0)
            a = clamped if predictor.target == "a" else ""
            b = clamped if predictor.target == "b" else ""
            raw_a = raw if predictor.target == "a" else ""
            raw_b = raw if predictor.target == "b" else ""
            rows.append((name, a, b, raw_a, raw_b))
        elif name in FAMILY_NAMES:
            e = estimate(EstimatorFamily(name), f, shape)
            rows.append((name, e.a, e.b, e.raw_a, e.raw_b))
        else:
            raise ColmpError(f"unknown model {name!r} "
                             f"(expected one of {', '.join(FAMILY_NAMES)} "
                             f"or an artifact path)")
    if len(rows) == 1 and rows[0][1] != "" and rows[0][2] != "":
        _, a, b, _, _ = rows[0]
        _emit(f"a={a:.5f} b={b:.5f}", args.out)
    else:
        _emit(_csv_text(("model", "a", "b", "raw_a", "raw_b"), rows), args.out)
    return 0


def _cmd_classify(args) -> int:
    f = _features(args)
    shape = SectionShape(args.shape)
    if args.artifact:
        predictor = pipeline.Predictor(
            art.load_model(Path(args.artifact).read_bytes()))
        scores = predictor.classify(f)
    else:
        scores = classify_fixed(f, shape)
    _emit(
        f"mode={scores.predicted.value} "
        f"prob_FC={scores.prob_fc:.6f} prob_FSC={scores.prob_fsc:.6f} "
        f"prob_SC={scores.prob_sc:.6f}",
        args.out,
    )
    return 0


def _cmd_train(args) -> int:
    ds = _read_dataset(args.data)
    shape = SectionShape(args.shape)
    family = args.family
    if family != "ova" and args.target is None:
        raise ColmpError("--target is required for estimator families")

    if family == "mlr":
        trained = pipeline.train_mlr(ds, shape, args.target, seed=args.seed)
        artifact = pipeline.linear_artifact(trained, shape, args.target)
    elif family == "prm":
        trained = pipeline.train_prm(ds, shape, args.target, seed=args.seed)
        artifact = pipeline.linear_artifact(trained, shape, args.target)
    elif family == "rlr":
        trained = pipeline.train_rlr(ds, shape, args.target, seed=args.seed)
        artifact = pipeline.linear_artifact(trained, shape, args.target)
    elif family == "gpr":
        trained = pipeline.train_gpr(ds, shape, args.target, seed=args.seed)
        artifact = pipeline.gpr_artifact(trained, shape, args.target,
                                         seed=args.seed)
    elif family == "mlp":
        trained = pipeline.train_mlp(
            ds, shape, args.target, seed=args.seed, epochs=args.epochs,
            hidden_layers=args.hidden_layers,
            hidden_width=args.hidden_width,
            learning_rate=args.lr if args.lr is not None else 0.01,
        )
        artifact = pipeline.mlp_artifact(trained, shape, args.target)
    else:  # ova
        trained = pipeline.train_ova(
            ds, shape, seed=args.seed, all_features=args.all_features,
            lr=args.lr if args.lr is not None else 0.5, iters=args.iters,
        )
        artifact = pipeline.ova_artifact(trained, shape)

    data = art.save_model(artifact)
    Path(args.out).write_bytes(data)
    target = artifact.target
    print(f"wrote {args.out} (family={family}, shape={shape.value}, "
          f"target={target}, seed={args.seed})")
    return 0


def _eval_rows(ds, shape, target, names, raw):
    rows = []
    for name in names:
        predictor = _load_predictor(name)
        if predictor is not None:
            fn = predictor.predict_raw if raw else predictor.predict
        elif name in FAMILY_NAMES:
            fn = pipeline.closed_form_predictor(
                EstimatorFamily(name), shape, target, raw=raw)
        else:
            raise ColmpError(f"unknown model {name!r}")
        result = pipeline.evaluate_predictions(ds, shape, target, fn)
        m = result.metrics
        rows.append((name, shape.value, target, m.n, m.r2, m.mse, m.std_err))
    return rows


def _cmd_eval(args) -> int:
    ds = _read_dataset(args.data)
    shape = SectionShape(args.shape)
    names = [m.strip() for m in args.model.split(",") if m.strip()]
    rows = _eval_rows(ds, shape, args.target, names, args.raw)
    _emit(_csv_text(("model", "shape", "target", "n", "r2", "mse", "std_err"),
                    rows), args.out)
    return 0


def _cmd_bins(args) -> int:
    ds = _read_dataset(args.data)
    shape = SectionShape(args.shape)
    shaped = Dataset(ds.by_shape(shape))
    reports = bin_analysis(shaped, default_bins(), args.target, k=args.k)
    rows = [(r.name, r.n, ";".join(r.top_features), r.r2_full, r.mse_full,
             r.r2_bin, r.mse_bin) for r in reports]
    _emit(_csv_text(("bin", "n", "top_features", "r2_full", "mse_full",
                     "r2_bin", "mse_bin"), rows), args.out)
    return 0


def _cmd_cdf(args) -> int:
    ds = _read_dataset(args.data)
    shape = SectionShape(args.shape)
    predictor = _load_predictor(args.model)
    if predictor is not None:
        fn = predictor.predict
    elif args.model in FAMILY_NAMES:
        fn = pipeline.closed_form_predictor(
            EstimatorFamily(args.model), shape, args.target)
    else:
        raise ColmpError(f"unknown model {args.model!r}")
    result = pipeline.evaluate_predictions(ds, shape, args.target, fn)
    points = error_cdf(result.errors)
    _emit(_csv_text(("error", "cum_fraction"), points), args.out)
    return 0


def _resolve_estimator(name: str, shape: SectionShape, target: str):
    predictor = _load_predictor(name)
    if predictor is not None:
        return predictor.predict
    if name in FAMILY_NAMES:
        return pipeline.closed_form_predictor(
            EstimatorFamily(name), shape, target)
    raise ColmpError(f"unknown model {name!r}")


def _cmd_box(args) -> int:
    ds = _read_dataset(args.data)
    shape = SectionShape(args.shape)
    names = [m.strip() for m in args.model.split(",") if m.strip()]
    rows = []
    for name in names:
        fn = _resolve_estimator(name, shape, args.target)
        records = pipeline.rows_for_target(ds, shape, args.target)
        estimates = [fn(r.features) for r in records]
        b = box_stats(estimates)
        rows.append((name, b.minimum, b.q1, b.median, b.q3, b.maximum,
                     len(b.outliers)))
    # the experimental values themselves, for side-by-side range comparison
    records = pipeline.rows_for_target(ds, shape, args.target)
    b = box_stats([getattr(r, f"mp_{args.target}") for r in records])
    rows.append(("experimental", b.minimum, b.q1, b.median, b.q3, b.maximum,
                 len(b.outliers)))
    _emit(_csv_text(("model", "min", "q1", "median", "q3", "max",
                     "n_outliers"), rows), args.out)
    return 0


def _cmd_misclass(args) -> int:
    ds = _read_dataset(args.data)
    shape = SectionShape(args.shape)
    fn = _resolve_estimator(args.model, shape, args.target)
    ova = None
    if args.artifact:
        ova = pipeline.Predictor(
            art.load_model(Path(args.artifact).read_bytes())).ova_model()
    records = [r for r in pipeline.rows_for_target(ds, shape, args.target)
               if r.mode is not None]
    sub = Dataset(records)
    predicted, _ = pipeline.classify_dataset(sub, shape, ova)
    key = f"mp_{args.target}"
    errors = [getattr(r, key) - fn(r.features) for r in records]
    cells = misclass_error_table(records, predicted, errors)
    rows = [(c.observed.value, c.predicted.value, c.n,
             "" if c.min_error is None else c.min_error,
             "" if c.max_error is None else c.max_error,
             "" if c.mean_error is None else c.mean_error,
             "" if c.median_error is None else c.median_error,
             int(c.unconservative)) for c in cells]
    _emit(_csv_text(("observed", "predicted", "n", "min", "max", "mean",
                     "median", "unconservative"), rows), args.out)
    return 0


def _cmd_confusion(args) -> int:
    ds = _read_dataset(args.data)
    shape = SectionShape(args.shape)
    model = None
    if args.artifact:
        predictor = pipeline.Predictor(
            art.load_model(Path(args.artifact).read_bytes()))
        model = predictor.ova_model()
    predicted, observed = pipeline.classify_dataset(ds, shape, model)
    cm = confusion_matrix(predicted, observed)
    rows = [(p.value, t.value, cm.count(p, t))
            for p in MODE_ORDER for t in MODE_ORDER]
    text = _csv_text(("predicted", "true", "count"), rows)
    text += (f"accuracy,{cm.accuracy}\n"
             f"unconservative_fraction,{cm.unconservative_fraction}\n"
             f"conservative_fraction,{cm.conservative_fraction}\n")
    _emit(text, args.out)
    return 0


def _cmd_fixtures(args) -> int:
    ds = generate_fixture(args.seed, args.n_rect, args.n_circ)
    _emit(dataset_to_csv(ds), args.out)
    return 0


def _cmd_serve(args) -> int:  # pragma: no cover - exercised manually
    from .service import run_server

    run_server(host=args.host, port=args.port, models_dir=args.models_dir,
               dataset_path=args.dataset, ui_dir=args.ui)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="colmp",
        description="Modeling parameters a/b and failure modes of "
                    "reinforced concrete columns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", parents=[], help="estimate a and b")
    _add_feature_args(p)
    p.add_argument("--model", default="gm",
                   help="comma-separated families and/or artifact paths")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("classify", help="predict the failure mode")
    _add_feature_args(p)
    p.add_argument("--artifact", default=None,
                   help="trained classifier artifact (default: fixed "
                        "published coefficients)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("train", help="calibrate a model on a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--family", required=True,
                   choices=["mlr", "prm", "rlr", "gpr", "mlp", "ova"])
    p.add_argument("--shape", required=True, choices=["R", "C"])
    p.add_argument("--target", choices=["a", "b"])
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=10000)
    p.add_argument("--hidden-layers", type=int, default=4)
    p.add_argument("--hidden-width", type=int, default=200)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--all-features", action="store_true",
                   help="ova: use all six ratios instead of the default three")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("eval", help="goodness-of-fit metrics on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--shape", required=True, choices=["R", "C"])
    p.add_argument("--target", required=True, choices=["a", "b"])
    p.add_argument("--model", default="gm,mlr,prm,rlr")
    p.add_argument("--raw", action="store_true",
                   help="score unclamped estimates")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("bins", help="per-subset significance and fit report")
    p.add_argument("--data", required=True)
    p.add_argument("--shape", required=True, choices=["R", "C"])
    p.add_argument("--target", required=True, choices=["a", "b"])
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_bins)

    p = sub.add_parser("cdf", help="empirical error CDF for one model")
    p.add_argument("--data", required=True)
    p.add_argument("--shape", required=True, choices=["R", "C"])
    p.add_argument("--target", required=True, choices=["a", "b"])
    p.add_argument("--model", default="gm")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_cdf)

    p = sub.add_parser("confusion", help="failure-mode confusion matrix")
    p.add_argument("--data", required=True)
    p.add_argument("--shape", required=True, choices=["R", "C"])
    p.add_argument("--artifact", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_confusion)

    p = sub.add_parser("box", help="range of estimates per model vs "
                                   "experimental values")
    p.add_argument("--data", required=True)
    p.add_argument("--shape", required=True, choices=["R", "C"])
    p.add_argument("--target", required=True, choices=["a", "b"])
    p.add_argument("--model", default="gm,mlr,prm,rlr")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_box)

    p = sub.add_parser("misclass", help="error summary per (observed, "
                                        "predicted) failure-mode pair")
    p.add_argument("--data", required=True)
    p.add_argument("--shape", required=True, choices=["R", "C"])
    p.add_argument("--target", required=True, choices=["a", "b"])
    p.add_argument("--model", default="gm",
                   help="estimator whose errors are summarized")
    p.add_argument("--artifact", default=None,
                   help="trained classifier artifact (default: fixed "
                        "coefficients)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_misclass)

    p = sub.add_parser("fixtures", help="generate a synthetic dataset CSV")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--n-rect", required=True, type=int)
    p.add_argument("--n-circ", required=True, type=int)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_fixtures)

    p = sub.add_parser("serve", help="run the HTTP prediction service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--models-dir", default=None,
                   help="artifact directory (default: $COLMP_MODELS_DIR)")
    p.add_argument("--dataset", default=None,
                   help="dataset CSV used for mean-separation statistics")
    p.add_argument("--ui", default=None,
                   help="directory of static browser-UI files to mount "
                        "at /ui")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ColmpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
