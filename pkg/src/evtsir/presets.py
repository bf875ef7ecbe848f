"""Named scenarios for the reproduction commands.

All powers have unit mean.  Names follow ``<artifact>-<variant>``.
"""

from __future__ import annotations

from .fading import FadingParams, Scenario

__all__ = ["PRESETS", "get_preset", "TABLE1_COLUMNS"]


def _fp(kappa, mu, m) -> FadingParams:
    return FadingParams(float(kappa), float(mu), float(m))


RAYLEIGH = _fp(0, 1, 1)


def _sc(source, *interferers) -> Scenario:
    return Scenario(source, tuple(interferers))


PRESETS: dict[str, Scenario] = {
    # Rayleigh source against N i.i.d. Rayleigh interferers
    "table1-rayleigh-n1": _sc(RAYLEIGH, RAYLEIGH),
    "table1-rayleigh-n2": _sc(RAYLEIGH, RAYLEIGH, RAYLEIGH),
    "table1-rayleigh-n3": _sc(RAYLEIGH, RAYLEIGH, RAYLEIGH, RAYLEIGH),
    # shadowed families indexed by beta = sum of interferer mu
    "table1-kms-beta2": _sc(_fp(2, 1, 2), _fp(2, 1, 2), _fp(2, 1, 1)),
    "table1-kms-beta3": _sc(_fp(2, 2, 3), _fp(2, 2, 3), _fp(2, 1, 2)),
    "table1-kms-beta4": _sc(_fp(2, 3, 2), _fp(2, 2, 3), _fp(2, 2, 3)),
    # i.n.i.d. shadowed interferers, L = 64
    "fig1-case1": _sc(_fp(2, 2, 3), _fp(2, 2, 3), _fp(2, 1, 2)),
    "fig1-case2": _sc(_fp(2, 1, 2), _fp(2, 1, 2), _fp(2, 1, 1)),
    # source parameter sweeps against one (2, 3, 1) interferer, L = 200
    "fig3-mu1": _sc(_fp(2, 1, 2), _fp(2, 3, 1)),
    "fig3-mu2": _sc(_fp(2, 2, 2), _fp(2, 3, 1)),
    "fig3-mu3": _sc(_fp(2, 3, 2), _fp(2, 3, 1)),
    "fig4-m1": _sc(_fp(2, 2, 1), _fp(2, 3, 1)),
    "fig4-m2": _sc(_fp(2, 2, 2), _fp(2, 3, 1)),
    "fig4-m3": _sc(_fp(2, 2, 3), _fp(2, 3, 1)),
    # kappa sweeps with m > mu and with mu > m
    "fig5-kappa1": _sc(_fp(1, 1, 3), _fp(2, 3, 1)),
    "fig5-kappa2": _sc(_fp(2, 1, 3), _fp(2, 3, 1)),
    "fig5-kappa3": _sc(_fp(3, 1, 3), _fp(2, 3, 1)),
    "fig6-kappa1": _sc(_fp(1, 3, 1), _fp(2, 3, 1)),
    "fig6-kappa2": _sc(_fp(2, 3, 1), _fp(2, 3, 1)),
    "fig6-kappa3": _sc(_fp(3, 3, 1), _fp(2, 3, 1)),
    # (2, 3, 2) source against N i.i.d. (2, 2, 3) interferers
    "fig7-n1": _sc(_fp(2, 3, 2), _fp(2, 2, 3)),
    "fig7-n2": _sc(_fp(2, 3, 2), _fp(2, 2, 3), _fp(2, 2, 3)),
    "fig7-n3": _sc(_fp(2, 3, 2), _fp(2, 2, 3), _fp(2, 2, 3), _fp(2, 2, 3)),
    # interferer sweep, (2, 1, 1) source
    "fig9-i111": _sc(_fp(2, 1, 1), _fp(2, 1, 1)),
    "fig9-i121": _sc(_fp(2, 1, 1), _fp(2, 2, 1)),
    "fig9-i123": _sc(_fp(2, 1, 1), _fp(2, 2, 3)),
    # source sweep, (2, 2, 3) interferer
    "fig10-s111": _sc(_fp(2, 1, 1), _fp(2, 2, 3)),
    "fig10-s131": _sc(_fp(2, 3, 1), _fp(2, 2, 3)),
    "fig10-s133": _sc(_fp(2, 3, 3), _fp(2, 2, 3)),
    # antenna selection
    "fig11-rayleigh": _sc(RAYLEIGH, RAYLEIGH),
    "fig12-fas": _sc(_fp(2, 3, 1), _fp(2, 1, 1)),
    "fig13-fas": _sc(_fp(2, 3, 1), _fp(2, 1, 1), _fp(2, 2, 1)),
}
PRESETS["fig2-rayleigh-n1"] = PRESETS["table1-rayleigh-n1"]
PRESETS["fig2-rayleigh-n2"] = PRESETS["table1-rayleigh-n2"]
PRESETS["fig2-rayleigh-n3"] = PRESETS["table1-rayleigh-n3"]
PRESETS["fig8-n1"] = PRESETS["fig7-n1"]
PRESETS["fig8-n2"] = PRESETS["fig7-n2"]
PRESETS["fig8-n3"] = PRESETS["fig7-n3"]

TABLE1_COLUMNS = (
    "table1-rayleigh-n1",
    "table1-rayleigh-n2",
    "table1-rayleigh-n3",
    "table1-kms-beta2",
    "table1-kms-beta3",
    "table1-kms-beta4",
)


def get_preset(name: str) -> Scenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None
