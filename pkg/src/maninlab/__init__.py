"""maninlab: heights, local Fourier transforms and point counts for
blow-ups of P^n along the codimension-2 ideal (x0, f).

The library works with an integer homogeneous form f in n >= 3 variables
of degree d >= 2 and provides

* exact local and global heights for rational points of the affine chart,
* exhaustive and Hensel-based point counts over F_p and Z/p^alpha,
* stratified p-adic volumes and the local Fourier transforms of the
  height function, each computed along two independent routes,
* the Tamagawa-type leading constant and a direct counting experiment
  that fits the B*log(B) growth against it.
"""

__version__ = "0.1.0"

from .polynomial import HomogeneousPolynomial, parse_polynomial
from .heights import RationalPoint

__all__ = [
    "HomogeneousPolynomial",
    "parse_polynomial",
    "RationalPoint",
    "__version__",
]
