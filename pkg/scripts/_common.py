"""Shared plumbing for the experiment scripts: dataclass config <-> argparse, output paths."""

import argparse
import dataclasses
import os
from pathlib import Path

from qcmix.io import write_json


def _floats(text):
    return tuple(float(x) for x in text.split(","))


def parse(config_cls, description):
    """Build a parser whose flags mirror the dataclass fields, return (config, out_dir)."""
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default=os.environ.get("QCMIX_OUT_DIR", "results"),
                   help="output directory (default $QCMIX_OUT_DIR or ./results)")
    for f in dataclasses.fields(config_cls):
        flag = "--" + f.name.replace("_", "-")
        if isinstance(f.default, tuple):
            p.add_argument(flag, type=_floats, default=f.default, help="comma-separated list")
        else:
            p.add_argument(flag, type=type(f.default), default=f.default)
    ns = vars(p.parse_args())
    out = Path(ns.pop("out"))
    out.mkdir(parents=True, exist_ok=True)
    return config_cls(**ns), out


def save_config(cfg, path):
    write_json(path, dataclasses.asdict(cfg))
