"""Euclidean ideals in quadratic fields: exact arithmetic, bounded Motzkin search, sieve statistics."""
from .errors import (ClassMismatch, FieldError, NonCyclicClassGroup, NotPrincipal,
                     PreconditionError, QFError, SignatureError, VerificationError)
from .field import QuadNumber, QuadraticField, make_field
from .ideals import (ClassGroup, Ideal, PrimeIdeal, canonical_generator, class_group,
                     factor_prime, is_principal, valuation)
from .euclid import (EIdeal, GeneratorTable, LevelAssignment, cosets, generates_module,
                     is_b1_member, motzkin_search, mult_xp_iso_check, pick_x, similar_density,
                     verify_assignment)
from .units import f_monoid, f_p, gupta_murty_scan, multiplicatively_independent
from .sieve import (SievePanel, build_panel, large_sieve_panel, omega_p, sieve_heart_check,
                    z_alpha, z_beta, z_beta_bruteforce)

__version__ = "0.1.0"
