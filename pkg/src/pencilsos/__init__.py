"""Exact polarization pencils, long resolvents and SOS certificates for rational functions."""
from .polycore import (GaussianRational, Poly, PolySyntaxError, RationalFunction, evaluate,
                       format_poly, parse_poly, partial_derivative, poly_arith, wronskian)
from .monobasis import (BasisTooLargeError, DegreeBounds, MonomialBasis, basis_derivative,
                        basis_for_pair, basis_index, build_basis, dehomogenize_basis,
                        homogenize_basis, quad_form)
from .polarize import (MatrixPencil, chain_pencil, monomial_transfer_pencil, product_pencil,
                       verify_polarization)
from .resolvent import (CertificateMismatchError, ResolventRep, SingularBlockError,
                        eval_resolvent, inverse_resolvent_form, inverse_resolvent_value,
                        long_resolvent)
from .ambiguity import (AmbiguityBasisElement, AmbiguityLiftError, AmbiguityPreconditionError,
                        PairSet, ambiguity_space_basis, elementary_transform_tree,
                        liftable_ambiguity, lift_ambiguity, pairs_for_beta, psd_repair)
from .soscheck import (BasisInsufficientError, GramCertificate, PSDResult, SOSResult,
                       exact_psd_check, extract_sos, gram_basis, main_theorem_pipeline,
                       nevanlinna_sample_check, psd_sampling_test, repairable_gram,
                       sos_feasibility, sos_oracle, verify_certificate)
from .artin import (FactoredPoly, minimal_denominator_strip, sign_classification_sample,
                    upper_halfplane_zero)

__version__ = "0.1.0"
