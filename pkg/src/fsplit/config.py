"""Tunable limits, gathered as dataclasses with module-level defaults."""
from __future__ import annotations

import contextlib
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class GroebnerConfig:
    max_pairs: int = 100_000
    max_degree: int = 200
    # re-verify every S-pair after Buchberger finishes
    self_check: bool = False


@dataclass(frozen=True)
class FrobeniusConfig:
    max_e_small_p: int = 4  # p in {2, 3}
    max_e_large_p: int = 2  # p >= 5

    def max_e(self, p: int) -> int:
        return self.max_e_small_p if p <= 3 else self.max_e_large_p


@dataclass(frozen=True)
class ExtensionConfig:
    sweep_degree: int = 6
    module_check_degree: int = 4


@dataclass(frozen=True)
class Config:
    groebner: GroebnerConfig = GroebnerConfig()
    frobenius: FrobeniusConfig = FrobeniusConfig()
    extensions: ExtensionConfig = ExtensionConfig()


_current = Config()


def current() -> Config:
    return _current


@contextlib.contextmanager
def using(**overrides):
    """Temporarily override sections, e.g. ``using(groebner=GroebnerConfig(self_check=True))``."""
    global _current
    saved = _current
    _current = replace(_current, **overrides)
    try:
        yield _current
    finally:
        _current = saved
