"""Labeled point-cloud synthesis, downsampling, augmentation, pairing."""

from .synth import (
    LABEL_GRIPPER,
    LABEL_SCENE,
    LabeledPointCloud,
    downsample,
    gripper_cloud,
    scene_cloud,
    synthesize_scene,
)
from .templates import (
    FINGER_TEMPLATE_POINTS,
    OBJECT_TEMPLATE_POINTS,
    finger_template,
    shape_template,
    transform_template,
)
from .augment import AugmentConfig, augment, proprio_noise
from .paired import DEFAULT_PAIR_COUNT, PairedCloudSet, collect_paired_set

__all__ = [
    "LABEL_GRIPPER",
    "LABEL_SCENE",
    "LabeledPointCloud",
    "downsample",
    "gripper_cloud",
    "scene_cloud",
    "synthesize_scene",
    "FINGER_TEMPLATE_POINTS",
    "OBJECT_TEMPLATE_POINTS",
    "finger_template",
    "shape_template",
    "transform_template",
    "AugmentConfig",
    "augment",
    "proprio_noise",
    "DEFAULT_PAIR_COUNT",
    "PairedCloudSet",
    "collect_paired_set",
]
