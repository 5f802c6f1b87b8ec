"""Gabor wavelet texture descriptors with volumetric fractal signatures.

Modules
-------
imaging      gray images, quantization, window sampling, datasets
gabor        filter dictionary and magnitude convolution
descriptors  first-order, GLCM, covariance and LBP baselines
vfd          Bouligand-Minkowski signatures via exact distance transform
cda          canonical discriminant analysis
classifier   Gaussian naive Bayes
pipeline     descriptor assembly and fitted models
bench        cross-validated sweeps and reports
"""

__version__ = "0.1.0"

from .imaging import GrayImage, LabeledDataset, load_image, load_dataset, quantize, extract_windows
from .gabor import BankConfig, derive_params, build_bank, convolve_magnitude, gabor_stack
from .vfd import radius_set, edt3_squared, volumes, fractal_signature, fractal_dimension
from .cda import scatter_matrices, fit_cda, project
from .classifier import fit_nb, predict, evaluate
from .pipeline import KINDS, extract, fit_pipeline, PipelineModel
