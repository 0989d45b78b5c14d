"""Spherical ANOVA decomposition and Sobol indices on S^d."""

__version__ = "0.1.0"

from .basis import BasisCatalog, BasisFunction, build_catalog, enumerate_terms, evaluate_basis
from .fit import AnovaModel, assemble, fit_joint, fit_staged, predict
from .indexing import IndexSet, ParityVector, TermIndex
from .lsqr import LsqrOptions, lsqr
from .sensitivity import SobolReport, index_support, sobol_indices, term_variance
from .sphere import SampleSet, sample_uniform, surface_area

__all__ = [
    "AnovaModel",
    "BasisCatalog",
    "BasisFunction",
    "IndexSet",
    "LsqrOptions",
    "ParityVector",
    "SampleSet",
    "SobolReport",
    "TermIndex",
    "assemble",
    "build_catalog",
    "enumerate_terms",
    "evaluate_basis",
    "fit_joint",
    "fit_staged",
    "index_support",
    "lsqr",
    "predict",
    "sample_uniform",
    "sobol_indices",
    "surface_area",
    "term_variance",
]
