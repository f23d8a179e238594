"""Resolvent calculus, martingale approximation and CLT checks for finite
continuous-time Markov chains."""

__version__ = "0.1.0"

from .chain import MarkovChain, build_chain, center, inner, make_example, norm
from .calculus import (
    decompose,
    pi_adjoint,
    resolvent,
    semigroup_apply,
    sqrt_psd,
    u_zero,
    v_of_t,
)
from .martingale import sigma_squared

__all__ = [
    "MarkovChain",
    "build_chain",
    "center",
    "decompose",
    "inner",
    "make_example",
    "norm",
    "pi_adjoint",
    "resolvent",
    "semigroup_apply",
    "sigma_squared",
    "sqrt_psd",
    "u_zero",
    "v_of_t",
]
