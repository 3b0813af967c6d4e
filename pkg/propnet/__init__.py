from propnet.net.loss import LossReport, masked_loss
from propnet.net.model import (
    ArchSpec,
    ModelWeights,
    init_weights,
    load_weights,
    save_weights,
    plnet_forward,
    plnet_backward,
)
from propnet.net.optim import AdamHyper, OptimizerState, adam_step, init_optimizer
from propnet.raysim.roads import road_mask
from propnet.empirical.spm import (
    SpmParams,
    Measurement,
    spm_matrix,
    spm_predict,
    calibrate_spm,
    load_measurements,
)
from propnet.raysim.matrix import PathLossMatrix, load_matrix, save_matrix
from propnet.antenna.angles import wrap_angle
from propnet.antenna.config import MobileConfig, AntennaConfig
from propnet.empirical.hata import HataInput, hata_urban, hata_matrix, hata_correction
from propnet.geodata.raster import RasterGrid, load_raster, save_raster
from propnet.raysim.clutter import ClutterLossTable, load_clutter_table, save_clutter_table, default_clutter_table
from propnet.tensor.augment import AugmentTransform, augment, dihedral_transforms
from propnet.tensor.builder import LosAngles, compute_los_angles, build_input_tensor
from propnet.antenna.pattern import (
    RadiationPattern,
    load_pattern,
    save_pattern,
    pattern_gain,
    sector_pattern,
    omnidirectional_pattern,
)
from propnet.geodata.gis_map import GisMap, GisPatch, load_gis_map, save_gis_map, extract_patch, normalize_terrain
from propnet.net.gradcheck import grad_check
from propnet.raysim.simulator import simulate
from propnet.harness.dataset import Dataset, PathLossSample, load_dataset, save_dataset, calibration_split
from propnet.harness.filters import FilterImage, save_filter_images, export_first_layer_filters
from propnet.geodata.synthetic import synth_gis_map
from propnet.harness.training import EpochRecord, TrainConfig, train, finetune, write_history
from propnet.raysim.diffraction import (
    Profile,
    knife_edge_v,
    extract_profile,
    free_space_loss,
    knife_edge_loss,
    diffraction_loss,
)
from propnet.harness.synthesis import SynthRanges, synth_dataset, known_patterns
from propnet.harness.evaluation import pooled_rmse, evaluate_rmse
from propnet.tensor.input_tensor import InputTensor, load_tensor, save_tensor

__version__ = "0.1.0"
__all__ = [
    "__version__",
    # geodata
    "RasterGrid",
    "load_raster",
    "save_raster",
    "GisMap",
    "GisPatch",
    "extract_patch",
    "normalize_terrain",
    "load_gis_map",
    "save_gis_map",
    "synth_gis_map",
    # antenna
    "wrap_angle",
    "RadiationPattern",
    "pattern_gain",
    "load_pattern",
    "save_pattern",
    "omnidirectional_pattern",
    "sector_pattern",
    "AntennaConfig",
    "MobileConfig",
    # tensor
    "InputTensor",
    "load_tensor",
    "save_tensor",
    "LosAngles",
    "compute_los_angles",
    "build_input_tensor",
    "AugmentTransform",
    "augment",
    "dihedral_transforms",
    # empirical
    "HataInput",
    "hata_correction",
    "hata_urban",
    "hata_matrix",
    "Measurement",
    "SpmParams",
    "spm_predict",
    "spm_matrix",
    "calibrate_spm",
    "load_measurements",
    # raysim
    "PathLossMatrix",
    "load_matrix",
    "save_matrix",
    "ClutterLossTable",
    "default_clutter_table",
    "load_clutter_table",
    "save_clutter_table",
    "free_space_loss",
    "Profile",
    "extract_profile",
    "knife_edge_v",
    "knife_edge_loss",
    "diffraction_loss",
    "simulate",
    "road_mask",
    # net
    "ArchSpec",
    "ModelWeights",
    "init_weights",
    "plnet_forward",
    "plnet_backward",
    "save_weights",
    "load_weights",
    "LossReport",
    "masked_loss",
    "AdamHyper",
    "OptimizerState",
    "init_optimizer",
    "adam_step",
    "grad_check",
    # harness
    "PathLossSample",
    "Dataset",
    "save_dataset",
    "load_dataset",
    "calibration_split",
    "SynthRanges",
    "known_patterns",
    "synth_dataset",
    "TrainConfig",
    "EpochRecord",
    "train",
    "finetune",
    "write_history",
    "pooled_rmse",
    "evaluate_rmse",
    "FilterImage",
    "export_first_layer_filters",
    "save_filter_images",
]
