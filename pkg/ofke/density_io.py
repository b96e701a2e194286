"""
Reader and writer for the line-oriented ``ofke-density v1`` text format.

    # ofke-density v1
    # measure=<line1d|radial3d> n=<particle number> points=<count>
    <coordinate> <density>
    ...

A radial3d sample at r = 0 carries no weight and is dropped on load.
"""
from pathlib import Path
from typing import List, Tuple, Union
import logging
import re

import numpy as np

from ofke.errors import DensityFileError, DomainError
from ofke.grid import Grid, Measure, make_grid_from_nodes, make_radial_grid, make_uniform_grid
from ofke.systems import NORMALIZATION_RTOL, DensityField, density_from_values

logger = logging.getLogger(__name__)

MAGIC = "# ofke-density v1"
NORMALIZATION_LIMIT = 1e-2

_HEADER = re.compile(
    r"^#\s*measure=(?P<measure>line1d|radial3d)\s+n=(?P<n>\S+)\s+points=(?P<points>\d+)\s*$"
)


def _parse_header(lines: List[str], path: Path) -> Tuple[Measure, float, int]:
    if len(lines) < 2 or lines[0].strip() != MAGIC:
        raise DensityFileError(f"{path}: missing '{MAGIC}' header")
    match = _HEADER.match(lines[1].strip())
    if match is None:
        raise DensityFileError(f"{path}: malformed header line '{lines[1].strip()}'")
    try:
        n_particles = float(match.group("n"))
    except ValueError:
        raise DensityFileError(f"{path}: particle number '{match.group('n')}' is not a number")
    if not np.isfinite(n_particles) or n_particles < 0:
        raise DensityFileError(f"{path}: particle number must be finite and >= 0")
    return Measure(match.group("measure")), n_particles, int(match.group("points"))


def _parse_samples(lines: List[str], path: Path) -> Tuple[np.ndarray, np.ndarray]:
    coords, values = [], []
    for lineno, line in enumerate(lines, start=3):
        text = line.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise DensityFileError(f"{path}:{lineno}: expected '<coordinate> <density>'")
        try:
            coords.append(float(parts[0]))
            values.append(float(parts[1]))
        except ValueError:
            raise DensityFileError(f"{path}:{lineno}: non-numeric sample '{text}'")
    return np.array(coords), np.array(values)


def _grid_for(coords: np.ndarray, measure: Measure) -> Grid:
    steps = np.diff(coords)
    h = float(np.mean(steps))
    uniform = bool(np.allclose(steps, h, rtol=1e-8, atol=0.0))

    if uniform and measure == Measure.RADIAL_3D and abs(coords[0] - h / 2.0) <= 1e-8 * h:
        return make_radial_grid(float(coords[-1] + h / 2.0), coords.size)
    if uniform and measure == Measure.LINE_1D:
        return make_uniform_grid(float(coords[0]), float(coords[-1]), coords.size)
    return make_grid_from_nodes(coords, measure)


def load_density_file(path: Union[str, Path]) -> DensityField:
    """
    Read a density file into a DensityField.

    Args:
        path: File in the ofke-density v1 format

    Returns:
        DensityField with N taken from the header

    Raises:
        DensityFileError: On IO or parse errors, negative samples, or a
            normalization mismatch beyond 1%
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise DensityFileError(f"Cannot read density file {path}: {e}")

    measure, n_particles, points = _parse_header(lines, path)
    coords, values = _parse_samples(lines[2:], path)

    if coords.size != points:
        raise DensityFileError(f"{path}: header declares {points} points, found {coords.size}")
    if points < 3:
        raise DensityFileError(f"{path}: at least 3 samples are required")
    if not np.all(np.diff(coords) > 0):
        raise DensityFileError(f"{path}: coordinates must be strictly increasing")
    if np.any(values < 0):
        raise DensityFileError(f"{path}: density has negative samples")
    if measure == Measure.RADIAL_3D and coords[0] == 0.0:
        # the origin carries no radial weight
        logger.info(f"{path}: dropping the r=0 sample (density {values[0]:.6g})")
        coords, values = coords[1:], values[1:]

    try:
        grid = _grid_for(coords, measure)
    except DomainError as e:
        raise DensityFileError(f"{path}: {e}")

    total = float(np.sum(grid.weights * values))
    scale = n_particles or 1.0
    mismatch = abs(total - n_particles) / scale
    if mismatch > NORMALIZATION_LIMIT:
        raise DensityFileError(
            f"{path}: samples integrate to {total:.6g} but header declares N={n_particles:g}"
        )
    rtol = NORMALIZATION_RTOL
    if mismatch > NORMALIZATION_RTOL:
        logger.warning(
            f"{path}: normalization off by {mismatch:.3g} (integral {total:.8g}, N={n_particles:g})"
        )
        rtol = NORMALIZATION_LIMIT

    logger.info(f"Loaded {coords.size} {measure.value} samples from {path} (N={n_particles:g})")
    return density_from_values(values, grid, n_particles=n_particles, rtol=rtol)


def save_density_file(density: DensityField, path: Union[str, Path]) -> Path:
    """Write ``density`` in the ofke-density v1 format and return the path."""
    measure = density.grid.measure
    if measure == Measure.SQUARE_2D:
        raise DomainError("Only line1d and radial3d densities can be written")

    path = Path(path)
    lines = [
        MAGIC,
        f"# measure={measure.value} n={density.n_particles:.17g} points={density.grid.n_axis}",
    ]
    lines.extend(
        f"{x:.17g} {v:.17g}" for x, v in zip(density.grid.nodes, density.values)
    )
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"Wrote {density.grid.n_axis} samples to {path}")
    return path
