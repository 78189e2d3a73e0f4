"""Pointlike sets for semigroups whose subgroups lie in a fixed group variety.

The main entry points are :func:`saturate` (the pointlike sets of a finite
semigroup), :func:`verify_all` (an independent certificate built from the
blowup automaton and its flow) and :func:`decide_separation` (separability of
two regular languages).
"""

from .errors import (CapExceeded, InputError, PointlikeError, StateExplosion,
                     VerificationError)
from .flow import (build_automaton_and_flow, build_blowup, big_b,
                   materialize_downclosure, rho, tau_step, verify_all)
from .groups import (FiniteGroup, GroupWord, KernelFunctor, is_in_variety, kernel,
                     kernel_minimality_oracle, parse_word)
from .languages import (Dfa, decide_separation, load_dfa, regex_to_dfa,
                        transition_semigroup_of_dfa)
from .saturation import (SaturationFamily, is_pointlike, pointlike_pairs, power_product,
                         saturate)
from .semigroup import (FiniteSemigroup, from_table, from_transformations, green,
                        load_semigroup, maximal_subgroup)

__version__ = "0.1.0"
