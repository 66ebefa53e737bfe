"""Incremental spectral clustering by matching Laplacian eigenvalue spectra across batches."""

from .clustering import Clustering, kmeans, spectral_cluster, spectral_embed
from .corpus import Document, SimilarityMatrix, TermVector, TokenizerConfig, build_term_vectors, cosine_similarity_matrix, tokenize
from .evalx import ConfusionMatrix, SyntheticSpec, error_rate, generate_synthetic_corpus, macro_f1, run_stability_experiment
from .incremental import ClusterModel, MergedClustering, assign_cluster, incremental_cluster, split_batches
from .laplacian import Laplacian, Spectrum, combinatorial_laplacian, normalized_laplacian, spectrum
from .spectra import MatchMethod, SpectralFunction, build_spectral_function, evaluate_at, spectral_distance

__version__ = "0.1.0"
