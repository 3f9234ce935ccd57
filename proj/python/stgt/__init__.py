# Copyright 2026 The stgt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Grounding, 4D layout encoding and evaluation toolkit."""

from stgt._core import (  # noqa: F401
    AlignmentTransform,
    Box,
    ClassTree,
    FeatureMap,
    FusionConfig,
    GroundingInstance,
    Mask,
    ScoredMask,
    SplitProblem,
    SplitSolution,
    StgtError,
    TaxonomyGraph,
    Tracklet,
    TrackletFrame,
    align_scene_to_human,
    apply_alignment,
    body_height,
    bps_encode,
    check_feasible,
    cluster_classes,
    combine_trees,
    construct_tree,
    depth_mode,
    evaluate,
    generate_base_points,
    generate_boxes,
    generate_fixture,
    giou,
    grid_search,
    instance_ap,
    interaction_classes,
    iou,
    mask_intersection_area,
    mask_to_box,
    match_gt_masks,
    pool_human_query,
    pool_object_feature,
    run_pipeline,
    score_masks,
    select_masks,
    solve_exact,
    solve_heuristic,
    split_objective,
    tracklet_iou,
    weighted_bce,
    weighted_miou,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
