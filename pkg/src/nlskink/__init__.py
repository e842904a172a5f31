"""Inverse scattering and large-time ray asymptotics for the defocusing NLS
equation with a kink (+-1) background.

The package has five layers:

* :mod:`nlskink.numerics`    -- shared kernels (matrix RK4, Cauchy-type
  quadrature with endpoint regularisation, complex log-Gamma, power-law fits).
* :mod:`nlskink.phase`       -- the ray phase function, its stationary points
  and signature tables.
* :mod:`nlskink.scattering`  -- Zakharov-Shabat direct scattering on the kink
  background: Jost solutions, reflection coefficient, discrete spectrum,
  trace formula.
* :mod:`nlskink.asymptotics` -- the explicit solitonless-region ray
  asymptotics: background phase, parabolic-cylinder first moments and the
  t^(-1/2) correction term.
* :mod:`nlskink.evolve`      -- a direct finite-difference reference solver
  used to validate the asymptotic profile along rays x = 2*xi*t.

The command line front end lives in :mod:`nlskink.cli`.
"""

__version__ = "0.1.0"

from . import asymptotics, errors, evolve, numerics, phase, scattering

__all__ = [
    "__version__",
    "asymptotics",
    "errors",
    "evolve",
    "numerics",
    "phase",
    "scattering",
]
