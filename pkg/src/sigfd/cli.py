"""Command-line front end.

Subcommands: enroll, identify, verify, evaluate, synth.  Results go to
stdout; diagnostics and progress go to stderr.  Exit codes: 0 success,
1 usage errors, 2 data or processing errors.
"""

import argparse
import dataclasses
import sys
from pathlib import Path

from .descriptor import DescriptorMeta, PipelineConfig
from .errors import MetaMismatch, SigfdError
from .imaging import PreprocessConfig, load_image, preprocess, save_image
from .metrics import DEFAULT_MINKOWSKI_P, MEASURE_NAMES, DistanceMeasure
from .recognition import (MANIFEST_NAME, SynthSpec, enroll, evaluate,
                          generate_synthetic, identify, load_dataset,
                          load_gallery, new_gallery, report_to_csv,
                          save_dataset, save_gallery, verify)
from .wavelet import WaveletFamily, dwt2_multi, subband_images


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this front end reserves 2 for data."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _odd_int(text: str) -> int:
    value = int(text)
    if value < 1 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"{value} is not an odd integer >= 1")
    return value


def _pow2_int(text: str) -> int:
    value = int(text)
    if value < 1 or value & (value - 1):
        raise argparse.ArgumentTypeError(f"{value} is not a power of two")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not >= 1")
    return value


def _byte_int(text: str) -> int:
    value = int(text)
    if not 0 <= value <= 255:
        raise argparse.ArgumentTypeError(f"{value} is not in [0, 255]")
    return value


def _measure_name(text: str) -> str:
    name = text.strip().lower()
    if name not in MEASURE_NAMES:
        raise argparse.ArgumentTypeError(
            f"unknown measure {text!r}, expected one of: {', '.join(MEASURE_NAMES)}")
    return name


def _measure_list(text: str) -> list[str]:
    names = [_measure_name(part) for part in text.split(",") if part.strip()]
    if not names:
        raise argparse.ArgumentTypeError("empty measure list")
    return names


def _family_list(text: str) -> list[WaveletFamily]:
    items = [part for part in text.split(",") if part.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty family list")
    return [WaveletFamily.parse(part) for part in items]


def _add_preprocess_flags(sp) -> None:
    sp.add_argument("--median-window", type=_odd_int, default=3, metavar="N",
                    help="median filter window, odd (default 3)")
    sp.add_argument("--target-size", type=_pow2_int, nargs=2, default=[256, 256],
                    metavar=("W", "H"), help="output geometry, powers of two (default 256 256)")
    sp.add_argument("--no-slant", action="store_true",
                    help="skip slant normalization")
    sp.add_argument("--binarize-threshold", type=_byte_int, default=None, metavar="T",
                    help="fixed ink threshold instead of Otsu's")


def _add_measure_flags(sp) -> None:
    sp.add_argument("--measure", type=_measure_name, default="manhattan",
                    help=f"one of: {', '.join(MEASURE_NAMES)} (default manhattan)")
    sp.add_argument("--minkowski-p", type=float, default=DEFAULT_MINKOWSKI_P, metavar="P",
                    help="Minkowski order (default 3)")


@dataclasses.dataclass(frozen=True)
class CliConfig:
    """One invocation's resolved options; defaults fill flags a subcommand lacks.

    Defaults: sym8 family, 3 levels, 64 retained magnitudes, Manhattan
    distance, 3-pixel median window, 256x256 frame.
    """

    family: WaveletFamily = WaveletFamily.SYM8
    levels: int = 3
    k: int = 64
    measure: DistanceMeasure = DistanceMeasure("manhattan")
    median_window: int = 3
    target_size: tuple[int, int] = (256, 256)
    slant_enabled: bool = True
    binarize_threshold: int | None = None
    gallery_path: str | None = None
    seed: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        base = cls()
        name = getattr(args, "measure", None)
        measure = base.measure if name is None else DistanceMeasure(
            name, getattr(args, "minkowski_p", DEFAULT_MINKOWSKI_P))
        size = getattr(args, "target_size", None)
        return cls(family=getattr(args, "family", None) or base.family,
                   levels=getattr(args, "levels", None) or base.levels,
                   k=getattr(args, "k", None) or base.k,
                   measure=measure,
                   median_window=getattr(args, "median_window", base.median_window),
                   target_size=base.target_size if size is None else (size[0], size[1]),
                   slant_enabled=not getattr(args, "no_slant", False),
                   binarize_threshold=getattr(args, "binarize_threshold", None),
                   gallery_path=getattr(args, "gallery", None),
                   seed=getattr(args, "seed", base.seed))

    def with_meta(self, meta: DescriptorMeta) -> "CliConfig":
        """Adopt the extraction parameters a stored gallery was built with."""
        return dataclasses.replace(self, family=meta.family, levels=meta.levels, k=meta.k)

    def preprocess_config(self) -> PreprocessConfig:
        return PreprocessConfig(median_window=self.median_window,
                                target_size=self.target_size,
                                slant_enabled=self.slant_enabled,
                                binarize_threshold=self.binarize_threshold)

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(self.family, self.levels, self.k, self.preprocess_config())


def _cmd_enroll(args) -> int:
    cfg = CliConfig.from_args(args)
    root = Path(cfg.gallery_path)
    gallery = None
    if (root / MANIFEST_NAME).exists():
        gallery = load_gallery(root)
        meta = gallery.meta
        requested = (args.family or meta.family, args.levels or meta.levels, args.k or meta.k)
        if requested != (meta.family, meta.levels, meta.k):
            raise MetaMismatch(
                f"flags request {requested} but gallery holds "
                f"({meta.family.value}, {meta.levels}, {meta.k})")
        cfg = cfg.with_meta(meta)
    config = cfg.pipeline()
    if gallery is None:
        gallery = new_gallery(config)
    for path in args.images:
        gallery = enroll(gallery, args.identity, Path(path).stem, load_image(path), config)
    save_gallery(gallery, root)
    print(f"enrolled {len(args.images)} sample(s) for {args.identity}")
    return 0


def _dump_subbands(img, config: PipelineConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    dec = dwt2_multi(preprocess(img, config.preprocess), config.family, config.levels)
    for name, plane in subband_images(dec):
        save_image(plane, out_dir / f"{name}.pgm")
    print(f"wrote {1 + 3 * config.levels} subband planes to {out_dir}", file=sys.stderr)


def _cmd_identify(args) -> int:
    cfg = CliConfig.from_args(args)
    gallery = load_gallery(cfg.gallery_path)
    cfg = cfg.with_meta(gallery.meta)
    config = cfg.pipeline()
    img = load_image(args.image)
    result = identify(gallery, img, cfg.measure, config)
    if args.dump_subbands:
        _dump_subbands(img, config, Path(args.dump_subbands))
    print(f"{result.identity} {result.distance:.6f}")
    return 0


def _cmd_verify(args) -> int:
    cfg = CliConfig.from_args(args)
    gallery = load_gallery(cfg.gallery_path)
    cfg = cfg.with_meta(gallery.meta)
    img = load_image(args.image)
    result = verify(gallery, args.identity, img, cfg.measure, args.threshold, cfg.pipeline())
    print(f"{'genuine' if result.genuine else 'forgery'} {result.distance:.6f}")
    return 0


def _cmd_evaluate(args) -> int:
    dataset = load_dataset(args.dataset)
    cfg = CliConfig.from_args(args)
    measures = [DistanceMeasure(name, args.minkowski_p)
                for name in (args.measures or MEASURE_NAMES)]
    families = args.families or list(WaveletFamily)
    report = evaluate(dataset, measures, families, args.train_k, cfg.seed, cfg.pipeline())
    proto = report.protocol
    test_k = "ragged" if proto.test_k is None else proto.test_k
    print(f"split: train_k={proto.train_k} test_k={test_k} seed={proto.seed}", file=sys.stderr)
    if report.degenerate_protocol:
        print("warning: single-identity dataset, rates are trivially 100", file=sys.stderr)
    csv = report_to_csv(report)
    if args.out:
        Path(args.out).write_text(csv, encoding="ascii")
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(csv)
    return 0


def _cmd_synth(args) -> int:
    spec = SynthSpec(n_identities=args.identities,
                     samples_per_identity=args.samples,
                     rotation_deg=args.rotation,
                     scale_range=(args.scale[0], args.scale[1]),
                     translation_px=args.translation,
                     noise_fraction=args.noise,
                     seed=args.seed)
    count = save_dataset(generate_synthetic(spec), args.out)
    print(f"wrote {count} images to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sigfd",
                     description="Offline signature recognition with "
                                 "wavelet-domain Fourier descriptors.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("enroll", help="extract and store templates for one identity")
    sp.add_argument("gallery", metavar="GALLERY")
    sp.add_argument("identity", metavar="IDENTITY")
    sp.add_argument("--family", type=WaveletFamily.parse, default=None,
                    help="wavelet family for a new gallery (default sym8)")
    sp.add_argument("--levels", type=_positive_int, default=None,
                    help="decomposition depth for a new gallery (default 3)")
    sp.add_argument("--k", type=_positive_int, default=None,
                    help="retained magnitudes for a new gallery (default 64)")
    _add_preprocess_flags(sp)
    sp.add_argument("images", nargs="+", metavar="IMAGE",
                    help="PGM files; file stems become sample ids")
    sp.set_defaults(handler=_cmd_enroll)

    sp = sub.add_parser("identify", help="match a probe against every identity")
    sp.add_argument("gallery", metavar="GALLERY")
    _add_measure_flags(sp)
    _add_preprocess_flags(sp)
    sp.add_argument("--dump-subbands", metavar="DIR", default=None,
                    help="also write the probe's subband planes as PGMs")
    sp.add_argument("image", metavar="IMAGE")
    sp.set_defaults(handler=_cmd_identify)

    sp = sub.add_parser("verify", help="accept or reject a claimed identity")
    sp.add_argument("gallery", metavar="GALLERY")
    sp.add_argument("identity", metavar="IDENTITY")
    sp.add_argument("--threshold", type=float, required=True,
                    help="accept when the closest-template distance is <= this")
    _add_measure_flags(sp)
    _add_preprocess_flags(sp)
    sp.add_argument("image", metavar="IMAGE")
    sp.set_defaults(handler=_cmd_verify)

    sp = sub.add_parser("evaluate", help="recognition-rate grid over a labeled dataset")
    sp.add_argument("dataset", metavar="DATASET_ROOT",
                    help="directory tree <identity>/<sample>.pgm")
    sp.add_argument("--measures", type=_measure_list, default=None,
                    help="comma-separated measure names (default: all)")
    sp.add_argument("--families", type=_family_list, default=None,
                    help="comma-separated family names (default: all)")
    sp.add_argument("--train-k", type=_positive_int, default=12,
                    help="templates per identity (default 12)")
    sp.add_argument("--seed", type=int, default=0, help="split seed (default 0)")
    sp.add_argument("--minkowski-p", type=float, default=DEFAULT_MINKOWSKI_P, metavar="P")
    sp.add_argument("--levels", type=_positive_int, default=3)
    sp.add_argument("--k", type=_positive_int, default=64)
    _add_preprocess_flags(sp)
    sp.add_argument("--out", metavar="FILE", default=None,
                    help="write the CSV here instead of stdout")
    sp.set_defaults(handler=_cmd_evaluate)

    sp = sub.add_parser("synth", help="generate a labeled synthetic dataset")
    sp.add_argument("out", metavar="OUT_ROOT")
    sp.add_argument("--identities", type=_positive_int, default=18)
    sp.add_argument("--samples", type=_positive_int, default=24)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rotation", type=float, default=10.0,
                    help="max |rotation| in degrees (default 10)")
    sp.add_argument("--scale", type=float, nargs=2, default=[0.9, 1.1],
                    metavar=("LO", "HI"))
    sp.add_argument("--translation", type=float, default=10.0,
                    help="max |shift| per axis in pixels (default 10)")
    sp.add_argument("--noise", type=float, default=0.02,
                    help="salt-and-pepper fraction (default 0.02)")
    sp.set_defaults(handler=_cmd_synth)

    return parser


def run(argv=None) -> int:
    """Parse and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"sigfd: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"sigfd: error: {exc}", file=sys.stderr)
        return 2
    except SigfdError as exc:
        print(f"sigfd: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())
