"""(k, n)-threshold secret image sharing with a randomized selection kernel."""

from .baseline import (
    FlatShare,
    shamir_combine,
    shamir_split,
    thienlin_combine,
    thienlin_split,
    wu_combine,
    wu_split,
)
from .codec import decode_bundle, encode_bundle, read_pbm, read_pgm, write_pbm, write_pgm
from .field import GF251, GF257, Polynomial, PrimeField, lagrange_interpolate, poly_eval
from .kernel import (
    CoiResult,
    Kernel,
    TraversalPlan,
    coefficient_of_incidence,
    generate_kernel,
    select_coefficients,
    traversal_order,
    validate_kernel,
)
from .scheme import ShareBundle, combine, reconstruct_kernel, share_kernel, split

__version__ = "0.1.0"
