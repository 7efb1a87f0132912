"""Atomic artifact writing and run manifests."""

import datetime
import hashlib
import json
import os
import platform
import tempfile

import numpy as np

from ..util import atomic_write_text


__all__ = ['write_json', 'write_csv', 'sha256_file', 'package_versions',
           'write_netcdf', 'write_manifest']


def _to_builtin(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError('{} is not JSON serializable'.format(type(o).__name__))


def write_json(path, obj):
    """Write ``obj`` as indented JSON; NaN is written as ``NaN``."""
    text = json.dumps(obj, indent=2, sort_keys=True, default=_to_builtin)
    return atomic_write_text(path, text + '\n')


def write_csv(path, df, float_format='%.17g'):
    """Write a DataFrame without index; the default float format round-trips
    float64 values exactly."""
    return atomic_write_text(path, df.to_csv(index=False,
                                             float_format=float_format))


def write_netcdf(path, ds):
    """Write an :class:`xarray.Dataset` to netCDF through a temporary file in
    the same directory, so readers never see a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(suffix='.nc', dir=directory)
    os.close(fd)
    try:
        ds.to_netcdf(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


def sha256_file(path, blocksize=1 << 16):
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(blocksize), b''):
            h.update(block)
    return h.hexdigest()


def package_versions():
    """Versions of the Python interpreter and the numerical stack."""
    import jsonschema
    import pandas
    import scipy
    import sklearn
    import xarray
    from .. import __version__
    return dict(
        daelab=__version__,
        python=platform.python_version(),
        numpy=np.__version__,
        scipy=scipy.__version__,
        pandas=pandas.__version__,
        xarray=xarray.__version__,
        scikit_learn=sklearn.__version__,
        jsonschema=jsonschema.__version__,
    )


def write_manifest(out_dir, config, seeds, artifacts, wall_clock_seconds,
                   summary):
    """Write ``manifest.json`` listing every artifact with its content hash.

    Parameters
    ----------
    out_dir : str
    config : dict
        configuration echo
    seeds : dict
        named seeds used by the run
    artifacts : list of str
        file names relative to ``out_dir``
    wall_clock_seconds : float
    summary : dict
        at least ``status`` (``'pass'`` or ``'fail'``)

    Returns
    -------
    path : str
    """
    entries = []
    for name in sorted(artifacts):
        path = os.path.join(out_dir, name)
        entries.append(dict(name=name, sha256=sha256_file(path),
                            bytes=os.path.getsize(path)))
    manifest = dict(
        config=config,
        seeds=seeds,
        artifacts=entries,
        versions=package_versions(),
        wall_clock_seconds=wall_clock_seconds,
        created=datetime.datetime.now().isoformat(timespec='seconds'),
        summary=summary,
    )
    return write_json(os.path.join(out_dir, 'manifest.json'), manifest)
