"""Radio-region assisted detection post-processing toolkit."""

from .config import RadioParams, RunConfig
from .errors import BehindCameraError, InvalidGeometryError, InvalidInputError, SchemaError
from .fusion import (
    Detection,
    Proposal,
    decay_one_stage,
    decay_two_stage,
    generate_proposals,
    proposals_to_detections,
    revise_detections,
    revise_score,
)
from .geometry import intersect_area, iou, rect_area, square
from .imaging import CameraModel, RadioRegion, batch_project, project
from .metrics import (
    CocoMapResult,
    MatchResult,
    MetricsReport,
    average_precision,
    coco_map,
    match,
    mr_fppi,
    truncate_to_gt_count,
    visual_metrics,
)
from .nms import NmsConfig, associate_regions, constrained_nms, standard_nms
from .radio import (
    AoaTofSpectrum,
    ArrayGeometry,
    CsiFrame,
    RadioEstimate,
    compute_spectrum,
    default_aoa_grid,
    default_tof_grid,
    fuse_axes,
    pick_peaks,
    synthesize_csi,
)
from .sim_regions import (
    Annotation,
    NoiseParams,
    all_filter,
    build_simulative_set,
    draw_region_noise,
    gt_to_region,
    reasonable_filter,
)
from .synth import SynthParams, generate, make_world

__version__ = "0.1.0"
