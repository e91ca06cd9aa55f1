"""Tensor-network solver for locally constrained binary optimization."""

from ._pitnet import (
    Engine,
    EngineKind,
    MemoryLimitError,
    MineInstance,
    SolverConfig,
    Solution,
    SolveResult,
    ZeroNormError,
    brute_force_oracle,
    delta_tensor,
    evaluate_solution,
    generate_instance,
    indicator_tensor,
    measure_site,
)
from ._pitnet import solve as _solve

__all__ = [
    "Engine",
    "EngineKind",
    "MemoryLimitError",
    "MineInstance",
    "SolverConfig",
    "Solution",
    "SolveResult",
    "ZeroNormError",
    "brute_force_oracle",
    "delta_tensor",
    "evaluate_solution",
    "generate_instance",
    "indicator_tensor",
    "measure_site",
    "solve",
]


def solve(instance, config=None, *, tau=None, engine=None, chi=None, a=None, b=None):
    """Solve an instance; keyword arguments override fields of `config`."""
    cfg = SolverConfig()
    if config is not None:
        cfg.tau, cfg.engine, cfg.a, cfg.b = config.tau, config.engine, config.a, config.b
    if tau is not None:
        cfg.tau = tau
    if engine is not None:
        kind = EngineKind.__members__[engine] if isinstance(engine, str) else engine
        e = Engine()
        e.kind, e.chi = kind, cfg.engine.chi
        cfg.engine = e
    if chi is not None:
        e = Engine()
        e.kind, e.chi = cfg.engine.kind, chi
        cfg.engine = e
    if a is not None:
        cfg.a = a
        if b is None and a > 1.0:
            cfg.b = SolverConfig.default_b(a)
    if b is not None:
        cfg.b = b
    cfg.validate()
    return _solve(instance, cfg)
