"""Command-line surface.

Five subcommands: scatter, descatter, identify, reconstruct,
filtershapes.  Every invocation writes its outputs atomically
(temp file + rename) plus a plain-text run report.  Exit codes:
0 success (including per-record skips), 1 I/O trouble, 2 invalid
input or configuration.

A config file is plain key=value lines (levels, order, topk, size,
color_mode, workers); explicit flags override it.
"""

from __future__ import annotations

import hashlib
import os
import re
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import crossorient, tensorio
from .descattering import CoefficientMask, descatter
from .errors import (
    ConsistencyError,
    DimensionError,
    FormatError,
    ParameterError,
    ScaleError,
    UnsupportedOrderError,
    ValidationError,
)
from .scattering import (
    COLOR_MODES,
    PhaseStore,
    ScatterConfig,
    ScatterOutput,
    channel_descriptors,
    scatter,
)
from .vizpipeline import (
    DirectoryCorpus,
    RunReport,
    TopKTable,
    identify,
    reconstruct_topk,
    render_grid,
)

_USAGE_ERRORS = (
    ValidationError,
    ParameterError,
    DimensionError,
    ScaleError,
    UnsupportedOrderError,
    ConsistencyError,
    FormatError,
)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(fn):
    """Map exception families onto the exit-code convention."""

    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _USAGE_ERRORS as exc:
            _fail(2, str(exc))
        except OSError as exc:
            _fail(1, str(exc))

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


def _read_config_file(path) -> dict:
    values = {}
    if path is None:
        return values
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def _resolve(flag, file_values: dict, key: str, default, cast):
    if flag is not None:
        return flag
    if key in file_values:
        try:
            return cast(file_values[key])
        except ValueError as exc:
            raise ValidationError(f"config key {key}: {exc}") from exc
    return default


def _default_workers() -> int:
    env = os.environ.get("SCATTERKIT_THREADS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        raise ValidationError(f"SCATTERKIT_THREADS={env!r} is not an integer")


def _config_digest(**items) -> str:
    blob = repr(sorted(items.items())).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _atomic_bytes(path: Path, writer) -> None:
    tmp = path.with_name(path.name + ".tmp")
    writer(tmp)
    os.replace(tmp, path)


def _save_png(array: np.ndarray, path: Path) -> None:
    from PIL import Image

    _atomic_bytes(path, lambda tmp: Image.fromarray(array).save(tmp, format="PNG"))


def _write_report(outdir: Path, report: RunReport, digest: str) -> None:
    body = f"config: {digest}\n" + report.text()
    _atomic_bytes(outdir / "report.txt", lambda tmp: tmp.write_text(body))


def _load_image(path: Path, size: int | None) -> np.ndarray:
    """PNG/PPM/BMP via Pillow, or a raw .skt tensor; floats in [0, 1]."""
    if path.suffix.lower() == ".skt":
        return np.asarray(tensorio.read_tensor(path), dtype=np.float64)
    from PIL import Image

    with Image.open(path) as im:
        im = im.convert("RGB")
        if size is not None:
            w, h = im.size
            scale = max(size / h, size / w)
            resample = getattr(Image, "Resampling", Image).BILINEAR
            im = im.resize((max(size, round(w * scale)), max(size, round(h * scale))), resample)
            w, h = im.size
            left, top = (w - size) // 2, (h - size) // 2
            im = im.crop((left, top, left + size, top + size))
        return np.asarray(im, dtype=np.float64) / 255.0


# ---------------------------------------------------------------------------
# scatter-directory layout

_O1_PATTERN = re.compile(r"phase_o1(?:_p(\d+))?_j(\d+)\.skt$")
_O2_PATTERN = re.compile(r"phase_o2(?:_p(\d+))?_j(\d+)_t(\d+)_j(\d+)\.skt$")


def _stack_thetas(by_theta: dict) -> np.ndarray:
    return np.stack([by_theta[t] for t in range(6)], axis=-1)


def _write_scatter_dir(outdir: Path, out: ScatterOutput, phases: PhaseStore,
                       config: ScatterConfig, planes: int, source_hw) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    _atomic_bytes(outdir / "scatter.skt",
                  lambda tmp: tensorio.write_tensor(out.tensor.astype(np.float32), tmp))
    for key, by_theta in phases.order1.items():
        if isinstance(key, tuple):
            p, j = key
            name = f"phase_o1_p{p}_j{j}.skt"
        else:
            name = f"phase_o1_j{key}.skt"
        stack = _stack_thetas(by_theta).astype(np.complex64)
        _atomic_bytes(outdir / name, lambda tmp, s=stack: tensorio.write_tensor(s, tmp))
    for key, sub in phases.order2.items():
        if len(key) == 3:
            p, j1, t1 = key
            prefix = f"phase_o2_p{p}_j{j1}_t{t1}"
        else:
            j1, t1 = key
            prefix = f"phase_o2_j{j1}_t{t1}"
        for j2, by_theta in sub.items():
            stack = _stack_thetas(by_theta).astype(np.complex64)
            _atomic_bytes(outdir / f"{prefix}_j{j2}.skt",
                          lambda tmp, s=stack: tensorio.write_tensor(s, tmp))
    meta = (
        f"levels={config.levels}\n"
        f"order={config.max_order}\n"
        f"color_mode={config.color_mode}\n"
        f"planes={planes}\n"
        f"height={source_hw[0]}\n"
        f"width={source_hw[1]}\n"
        f"crop={','.join(str(v) for v in out.crop)}\n"
    )
    _atomic_bytes(outdir / "meta.txt", lambda tmp: tmp.write_text(meta))


def _read_scatter_dir(indir: Path) -> tuple[ScatterOutput, PhaseStore, ScatterConfig, int]:
    meta_path = indir / "meta.txt"
    if not meta_path.exists():
        raise ValidationError(f"{indir} has no meta.txt; not a scatter directory")
    meta = _read_config_file(meta_path)
    try:
        config = ScatterConfig(
            levels=int(meta["levels"]),
            max_order=int(meta["order"]),
            color_mode=meta["color_mode"],
        )
        planes = int(meta["planes"])
        crop = tuple(int(v) for v in meta["crop"].split(","))
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"{meta_path}: incomplete or malformed: {exc}") from exc
    tensor = np.asarray(tensorio.read_tensor(indir / "scatter.skt"), dtype=np.float64)
    out = ScatterOutput(
        tensor=tensor,
        channel_map=channel_descriptors(config, planes),
        crop=crop,
    )
    phases = PhaseStore()
    for path in sorted(indir.iterdir()):
        m = _O1_PATTERN.match(path.name)
        if m:
            stack = np.asarray(tensorio.read_tensor(path), dtype=np.complex128)
            by_theta = {t: stack[:, :, t] for t in range(6)}
            p, j = m.groups()
            key = (int(p), int(j)) if p is not None else int(j)
            phases.order1[key] = by_theta
            continue
        m = _O2_PATTERN.match(path.name)
        if m:
            stack = np.asarray(tensorio.read_tensor(path), dtype=np.complex128)
            p, j1, t1, j2 = m.groups()
            key = (int(p), int(j1), int(t1)) if p is not None else (int(j1), int(t1))
            phases.order2.setdefault(key, {})[int(j2)] = {
                t: stack[:, :, t] for t in range(6)
            }
    return out, phases, config, planes


# ---------------------------------------------------------------------------
# commands

@click.group()
def main():
    """Scattering-transform pipeline tools."""


_levels_opt = click.option("--levels", "-J", type=int, default=None,
                           help="Filter-bank depth (default 4).")
_order_opt = click.option("--order", "-m", type=int, default=None,
                          help="Maximum cascade order, 1 or 2 (default 2).")
_size_opt = click.option("--size", type=int, default=None,
                         help="Resize+crop input to this square size.")
_color_opt = click.option("--color-mode", type=click.Choice(COLOR_MODES),
                          default=None, help="Color cascade policy.")
_config_opt = click.option("--config", "config_path",
                           type=click.Path(exists=True, dir_okay=False),
                           default=None, help="key=value config file.")


def _scatter_config(levels, order, color_mode, file_values) -> ScatterConfig:
    return ScatterConfig(
        levels=_resolve(levels, file_values, "levels", 4, int),
        max_order=_resolve(order, file_values, "order", 2, int),
        color_mode=_resolve(color_mode, file_values, "color_mode",
                            "split-luminance", str),
    )


@main.command("scatter")
@click.argument("image_path", type=click.Path(dir_okay=False))
@_levels_opt
@_order_opt
@_size_opt
@_color_opt
@_config_opt
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default="scatter_out", help="Output directory.")
@_guard
def cmd_scatter(image_path, levels, order, size, color_mode, config_path, out_dir):
    """Scatter one image to a directory of tensor files."""
    file_values = _read_config_file(config_path)
    config = _scatter_config(levels, order, color_mode, file_values)
    size = _resolve(size, file_values, "size", None, int)
    report = RunReport()
    t0 = time.perf_counter()
    image = _load_image(Path(image_path), size)
    out, phases = scatter(image, config)
    planes = 1 if image.ndim == 2 or image.shape[2] == 1 else 3
    outdir = Path(out_dir)
    _write_scatter_dir(outdir, out, phases, config, planes, image.shape[:2])
    report.processed = 1
    if any(out.crop):
        report.notes.append(f"input padded; crop record {out.crop}")
    report.timings["scatter"] = time.perf_counter() - t0
    digest = _config_digest(cmd="scatter", levels=config.levels,
                            order=config.max_order, color=config.color_mode,
                            size=size)
    _write_report(outdir, report, digest)
    click.echo(f"wrote {outdir}/scatter.skt {out.tensor.shape}")


@main.command("descatter")
@click.argument("scatter_dir", type=click.Path(file_okay=False, exists=True))
@click.option("--channel", type=int, default=None,
              help="Keep only this channel (default: all).")
@click.option("--site", nargs=2, type=int, default=None,
              help="Row and column on the output grid; requires --channel.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              default=None, help="Output tensor path (default recon.skt inside the scatter dir).")
@_guard
def cmd_descatter(scatter_dir, channel, site, out_path):
    """Invert a scatter directory back to pixels."""
    indir = Path(scatter_dir)
    out, phases, config, planes = _read_scatter_dir(indir)
    if site is not None and channel is None:
        raise ValidationError("--site requires --channel")
    if channel is not None and site is not None:
        mask = CoefficientMask(mode="single-value", channel=channel,
                               spatial_site=tuple(site))
    elif channel is not None:
        mask = CoefficientMask(mode="full-channel", channel=channel)
    else:
        mask = CoefficientMask()
    report = RunReport()
    t0 = time.perf_counter()
    recon = descatter(out, phases, mask, config)
    report.processed = 1
    report.timings["descatter"] = time.perf_counter() - t0
    target = Path(out_path) if out_path else indir / "recon.skt"
    _atomic_bytes(target, lambda tmp: tensorio.write_tensor(
        recon.astype(np.float32), tmp))
    png = target.with_suffix(".png")
    _save_png(render_grid([recon]), png)
    digest = _config_digest(cmd="descatter", mask=mask.mode, channel=channel,
                            site=tuple(site) if site else None)
    _write_report(indir, report, digest)
    click.echo(f"wrote {target} and {png}")


@main.command("identify")
@click.argument("corpus_dir", type=click.Path(file_okay=False, exists=True))
@_levels_opt
@_order_opt
@_size_opt
@_color_opt
@_config_opt
@click.option("--topk", "-k", type=int, default=None, help="Winners per channel (default 9).")
@click.option("--workers", type=int, default=None,
              help="Parallel image workers (default $SCATTERKIT_THREADS or 1).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default="identify_out", help="Output directory.")
@_guard
def cmd_identify(corpus_dir, levels, order, size, color_mode, config_path,
                 topk, workers, out_dir):
    """Stream a corpus; record each channel's top activations."""
    file_values = _read_config_file(config_path)
    config = _scatter_config(levels, order, color_mode, file_values)
    size = _resolve(size, file_values, "size", 64, int)
    k = _resolve(topk, file_values, "topk", 9, int)
    workers = _resolve(workers, file_values, "workers", _default_workers(), int)
    corpus = DirectoryCorpus(corpus_dir, size)
    if len(corpus) == 0:
        raise ValidationError(f"no images under {corpus_dir}")
    report = RunReport()
    table = identify(corpus, config, k=k, workers=workers, report=report)
    outdir = Path(out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    _atomic_bytes(outdir / "table.tsv", lambda tmp: table.write_text(tmp))
    report.notes.append(f"preprocessing: shorter-side resize, center crop to {size}")
    digest = _config_digest(cmd="identify", levels=config.levels,
                            order=config.max_order, color=config.color_mode,
                            size=size, k=k)
    _write_report(outdir, report, digest)
    click.echo(f"wrote {outdir}/table.tsv "
               f"({len(table.entries)} channels, {report.processed} images)")


@main.command("reconstruct")
@click.argument("table_file", type=click.Path(dir_okay=False, exists=True))
@click.argument("corpus_dir", type=click.Path(file_okay=False, exists=True))
@_levels_opt
@_order_opt
@_size_opt
@_color_opt
@_config_opt
@click.option("--topk", "-k", type=int, default=None, help="Table capacity (default 9).")
@click.option("--channels", "channel_spec", type=str, default="all",
              help='Comma-separated channel indices, or "all".')
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default="reconstruct_out", help="Output directory.")
@_guard
def cmd_reconstruct(table_file, corpus_dir, levels, order, size, color_mode,
                    config_path, topk, channel_spec, out_dir):
    """Back-project table winners into per-channel grid images."""
    file_values = _read_config_file(config_path)
    config = _scatter_config(levels, order, color_mode, file_values)
    size = _resolve(size, file_values, "size", 64, int)
    k = _resolve(topk, file_values, "topk", 9, int)
    table = TopKTable.read_text(table_file, capacity=k)
    corpus = DirectoryCorpus(corpus_dir, size)
    if channel_spec == "all":
        channels = table.channels()
    else:
        try:
            channels = [int(c) for c in channel_spec.split(",") if c.strip()]
        except ValueError:
            raise ValidationError(f"bad --channels value {channel_spec!r}")
    report = RunReport()
    grids = reconstruct_topk(table, corpus, channels, config, report=report)
    outdir = Path(out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for ch, (recon_grid, input_grid) in grids.items():
        _save_png(recon_grid, outdir / f"channel_{ch:03d}_recon.png")
        _save_png(input_grid, outdir / f"channel_{ch:03d}_input.png")
    digest = _config_digest(cmd="reconstruct", levels=config.levels,
                            order=config.max_order, size=size, k=k,
                            channels=tuple(channels))
    _write_report(outdir, report, digest)
    click.echo(f"wrote {2 * len(grids)} grids to {outdir} "
               f"({len(report.skipped)} skips)")


@main.command("filtershapes")
@click.option("--gallery", "gallery_dir", type=click.Path(file_okay=False, exists=True),
              default=None,
              help="Directory of .skt kernels on the 12-orientation axis "
                   "(default: the built-in gallery).")
@click.option("--set", "which_set", type=click.Choice(["gallery", "one-hot"]),
              default="gallery", help="Built-in filter set when no --gallery given.")
@click.option("--scale", type=int, default=2, help="Pyramid scale to synthesize at.")
@_size_opt
@_config_opt
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default="filtershapes_out", help="Output directory.")
@_guard
def cmd_filtershapes(gallery_dir, which_set, scale, size, config_path, out_dir):
    """Render each filter's real/imaginary pixel shapes and their overlap."""
    file_values = _read_config_file(config_path)
    size = _resolve(size, file_values, "size", 128, int)
    if gallery_dir is not None:
        paths = sorted(Path(gallery_dir).glob("*.skt"))
        if not paths:
            raise ValidationError(f"no .skt kernels under {gallery_dir}")
        filters = [
            crossorient.CrossOrientFilter(
                kernel=np.asarray(tensorio.read_tensor(p), dtype=np.complex128),
                name=p.stem,
            )
            for p in paths
        ]
    elif which_set == "one-hot":
        filters = []
        for slot in range(6):
            kernel = np.zeros((1, 1, 12), dtype=complex)
            kernel[0, 0, slot] = 1.0
            filters.append(crossorient.CrossOrientFilter(kernel=kernel,
                                                         name=f"onehot-{slot}"))
    else:
        filters = list(crossorient.filter_gallery().values())
    report = RunReport()
    outdir = Path(out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    lines = []
    for f in filters:
        xr = crossorient.reconstruct_filter_shape(f, "real", scale, image_size=size)
        xi = crossorient.reconstruct_filter_shape(f, "imaginary", scale, image_size=size)
        _save_png(render_grid([xr]), outdir / f"{f.name}_real.png")
        _save_png(render_grid([xi]), outdir / f"{f.name}_imag.png")
        denom = np.linalg.norm(xr) * np.linalg.norm(xi)
        ndp = float("nan") if denom == 0 else abs(float((xr * xi).sum()) / denom)
        lines.append(f"{f.name}\t{ndp:.6f}")
        report.processed += 1
    _atomic_bytes(outdir / "shape_pairs.txt",
                  lambda tmp: tmp.write_text("\n".join(lines) + "\n"))
    report.timings["filtershapes"] = time.perf_counter() - t0
    digest = _config_digest(cmd="filtershapes", scale=scale, size=size,
                            n=len(filters))
    _write_report(outdir, report, digest)
    click.echo(f"wrote {report.processed} shape pairs to {outdir}")


if __name__ == "__main__":
    main()
