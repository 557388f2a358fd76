"""Named sweep configurations for the experiments shipped with the package."""

from __future__ import annotations

from typing import Optional, Union

from .experiment import COARSE21, FINE7, SBRD, SPGD, SweepConfig

_GRIDS = {"coarse21": COARSE21, "fine7": FINE7}

PRESETS: dict[str, dict] = {
    "fig1": dict(n=2, m=50, grid="coarse21", samples=10000,
                 algorithms=(SBRD,),
                 note="two-player two-cycle probability and steps"),
    "fig2": dict(n=3, m=50, grid="coarse21", samples=1000,
                 algorithms=(SBRD,),
                 note="three-player NE probability and steps"),
    "fig3": dict(n=3, m=50, grid="fine7", samples=1000,
                 algorithms=(SBRD, SPGD),
                 note="best response vs gradient ascent, high correlation"),
    "fig4": dict(n=2, m=500, grid="coarse21", samples=1000,
                 algorithms=(SBRD,),
                 note="two players, large action spaces"),
    "fig5": dict(n=3, m=100, grid="coarse21", samples=1000,
                 algorithms=(SBRD,),
                 note="three players, larger action spaces"),
    "fig6": dict(n=4, m=50, grid="coarse21", samples=1000,
                 algorithms=(SBRD,),
                 note="four players"),
}


def grid_by_name(name: str) -> tuple[float, ...]:
    try:
        return _GRIDS[name]
    except KeyError:
        raise ValueError(f"unknown grid {name!r}; have {sorted(_GRIDS)}") \
            from None


def preset_config(name: str, master_seed: int = 0,
                  samples: Optional[int] = None,
                  threads: Union[int, str] = 1,
                  **overrides) -> SweepConfig:
    """SweepConfig for a named preset, with optional field overrides."""
    try:
        p = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; have "
                         f"{sorted(PRESETS)}") from None
    fields = dict(n=p["n"], m=p["m"], lambda_grid=grid_by_name(p["grid"]),
                  samples_per_point=samples or p["samples"],
                  algorithms=p["algorithms"], master_seed=master_seed,
                  threads=threads)
    fields.update(overrides)
    return SweepConfig(**fields)
