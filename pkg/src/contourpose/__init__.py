"""Contourlet-based head pose estimation toolkit.

Pipeline: netpbm input -> grayscale -> crop -> resize -> pyramidal
directional filter bank -> PCA/LDA feature reduction -> k-NN or
minimum-distance classification with confusion-matrix evaluation.
"""

from .classify import (
    ClassifierModel,
    ConfusionMatrix,
    evaluate,
    knn_fit,
    knn_predict,
    mindist_fit,
    mindist_predict,
)
from .contourlet import (
    Decomposition,
    DirectionalGroup,
    PdfbConfig,
    WaveletTriple,
    dfb_decompose,
    dfb_reconstruct,
    lp_decompose,
    lp_reconstruct,
    pdfb_decompose,
    pdfb_reconstruct,
    wavelet_inverse,
    wavelet_level,
)
from .features import (
    ProjectionModel,
    SingularScatterError,
    fit_projection,
    lda_fit,
    ncsev,
    pca_fit,
    project,
    vectorize,
)
from .filters import FanFilterPair, Kernel1D, cdf97, ladder_prototype, pkva_ladder
from .image_io import CropRect, NetpbmError, crop, parse_netpbm, resize, to_grayscale, write_netpbm
from .model_io import ModelBundle, ModelFormatError, load_model, save_model
from .pipeline import (
    POSE_ALPHABET,
    ManifestEntry,
    RunConfig,
    SplitSpec,
    gen_synthetic,
    image_features,
    load_manifest,
    run_predict,
    run_train,
    split,
)

__version__ = "0.1.0"
