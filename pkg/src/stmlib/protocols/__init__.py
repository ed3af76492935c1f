"""Concurrency-control backends."""

from .bto import BtoBackend
from .mvto import MvtoBackend
from .sgt import SgtBackend

PROTOCOLS = {
    "bto": BtoBackend,
    "sgt": SgtBackend,
    "mvto": MvtoBackend,
}


def make_backend(name: str):
    try:
        cls = PROTOCOLS[name]
    except KeyError:
        raise ValueError(
            f"unknown protocol {name!r}, expected one of {sorted(PROTOCOLS)}"
        ) from None
    return cls()


__all__ = ["PROTOCOLS", "make_backend", "BtoBackend", "SgtBackend", "MvtoBackend"]
