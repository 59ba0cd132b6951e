"""
Complex-valued samples on a uniform square grid (cell centers)
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np
import pandas as pd
import rasterio
from rasterio.transform import Affine, from_origin

from utils.logger_config import logger
from .errors import ConfigError, NumericalError, PreconditionError
from .geometry import Square

CSV_HEADER = "n,side,center_re,center_im"
FLOAT_FORMAT = "%.17g"


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridFunction:
    """
    n x n complex samples at cell centers of box

    values[i, j] sits at x_i + 1j * y_j, i indexing x and j indexing y.
    """
    box: Square
    values: np.ndarray
    compact: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise PreconditionError(f"Grid values must be square, got shape {values.shape}")
        if not is_power_of_two(values.shape[0]):
            raise PreconditionError(f"Grid size must be a power of 2, got {values.shape[0]}")
        if not np.all(np.isfinite(values)):
            raise NumericalError("Grid function contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        if self.compact and not self.vanishes_on_outer_ring():
            raise PreconditionError("Compactly supported grid function must vanish on the outermost cell ring")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return self.box.side / self.n

    def axes(self):
        """Cell-center coordinates along x and y"""
        offsets = (np.arange(self.n) + 0.5) * self.h
        return self.box.xmin + offsets, self.box.ymin + offsets

    def centers(self) -> np.ndarray:
        xs, ys = self.axes()
        x, y = np.meshgrid(xs, ys, indexing='ij')
        return x + 1j * y

    def vanishes_on_outer_ring(self, tol: float = 0.0) -> bool:
        v = np.abs(self.values)
        ring = np.concatenate([v[0], v[-1], v[:, 0], v[:, -1]])
        return bool(np.all(ring <= tol))

    def with_values(self, values: np.ndarray, compact: bool = False) -> 'GridFunction':
        return GridFunction(self.box, values, compact)

    def cell_index(self, z: complex):
        """Index of the cell containing z (clamped to the grid)"""
        i = int(np.clip(np.floor((z.real - self.box.xmin) / self.h), 0, self.n - 1))
        j = int(np.clip(np.floor((z.imag - self.box.ymin) / self.h), 0, self.n - 1))
        return i, j

    @property
    def transform(self) -> Affine:
        """North-up affine transform of the raster view (rows run along -y)"""
        return from_origin(self.box.xmin, self.box.ymax, self.h, self.h)

    def raster_bands(self) -> np.ndarray:
        """Real and imaginary parts as a (2, n, n) north-up raster stack"""
        north_up = np.flipud(self.values.T)
        return np.stack([north_up.real, north_up.imag])


def sample_function(fn: Callable[[np.ndarray], np.ndarray], box: Square, n: int,
                    compact: bool = False) -> GridFunction:
    """
    Sample fn at the cell centers of an n x n grid on box

    Args:
        fn: Vectorized callable of complex z
        box: Grid box
        n: Cells per side (power of 2)
        compact: Tag the result as compactly supported

    Returns:
        GridFunction
    """
    if not is_power_of_two(n):
        raise PreconditionError(f"Grid size must be a power of 2, got {n}")
    blank = GridFunction(box, np.zeros((n, n), dtype=complex))
    values = np.broadcast_to(np.asarray(fn(blank.centers()), dtype=complex), (n, n))
    return GridFunction(box, values.copy(), compact)


def save_grid_csv(f: GridFunction, output_file: Union[str, Path]) -> Path:
    """
    Write a grid function as CSV

    Header line "n,side,center_re,center_im" with its values, then n^2 rows
    "i,j,re,im" in row-major order.
    """
    output_file = Path(output_file)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    i, j = np.meshgrid(np.arange(f.n), np.arange(f.n), indexing='ij')
    rows = pd.DataFrame({
        'i': i.ravel(),
        'j': j.ravel(),
        're': f.values.real.ravel(),
        'im': f.values.imag.ravel(),
    })
    box = f.box

    with open(output_file, 'w', encoding='utf-8', newline='') as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write(f"{f.n},{float(box.side)!r},{float(box.center.real)!r},{float(box.center.imag)!r}\n")
        rows.to_csv(fh, header=False, index=False, float_format=FLOAT_FORMAT)

    logger.info(f"Grid function saved to: {output_file}")
    return output_file


def load_grid_csv(input_file: Union[str, Path]) -> GridFunction:
    """Read a grid function written by save_grid_csv"""
    input_file = Path(input_file)
    try:
        with open(input_file, 'r', encoding='utf-8') as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise ConfigError(f"Unexpected grid header '{header}' in {input_file}")
            n_text, side, cre, cim = fh.readline().strip().split(',')
            n = int(n_text)
            data = pd.read_csv(fh, header=None, names=['i', 'j', 're', 'im'],
                               dtype={'i': int, 'j': int, 're': float, 'im': float},
                               float_precision='round_trip')
    except (OSError, ValueError) as e:
        raise ConfigError(f"Cannot read grid function {input_file}: {e}") from e

    if len(data) != n * n:
        raise ConfigError(f"Grid file {input_file} has {len(data)} rows, expected {n * n}")
    values = np.zeros((n, n), dtype=complex)
    values[data['i'].to_numpy(), data['j'].to_numpy()] = data['re'].to_numpy() + 1j * data['im'].to_numpy()
    box = Square(complex(float(cre), float(cim)), float(side))
    logger.debug(f"Loaded {n}x{n} grid function from {input_file}")
    return GridFunction(box, values)


def save_grid_geotiff(f: GridFunction, output_file: Union[str, Path]) -> Path:
    """Write real and imaginary parts as a two-band float64 GeoTIFF"""
    output_file = Path(output_file)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    bands = f.raster_bands()
    with rasterio.open(
        output_file, 'w', driver='GTiff', height=f.n, width=f.n, count=2,
        dtype='float64', transform=f.transform
    ) as dst:
        dst.write(bands)
        dst.set_band_description(1, 'real')
        dst.set_band_description(2, 'imag')
    logger.info(f"GeoTIFF saved to: {output_file}")
    return output_file
