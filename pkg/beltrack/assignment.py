# Software License Agreement (BSD License)
#
# Copyright (c) 2026, beltrack contributors
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without
# modification, are permitted provided that the following conditions
# are met:
#
#  * Redistributions of source code must retain the above copyright
#    notice, this list of conditions and the following disclaimer.
#  * Redistributions in binary form must reproduce the above
#    copyright notice, this list of conditions and the following
#    disclaimer in the documentation and/or other materials provided
#    with the distribution.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
# "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT
# LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS
# FOR A PARTICULAR PURPOSE ARE DISCLAIMED.

"""
IoU cost matrices and gated optimal linear assignment.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import BoundingBox, iou


@dataclass
class AssignmentResult:
    matches: List[Tuple[int, int]] = field(default_factory=list)
    unmatched_tracks: List[int] = field(default_factory=list)
    unmatched_detections: List[int] = field(default_factory=list)

    def total_cost(self, costs) -> float:
        return float(sum(costs[i, j] for i, j in self.matches))


def build_cost_matrix(track_boxes: Sequence[BoundingBox],
                      det_boxes: Sequence[BoundingBox]) -> np.ndarray:
    """
    Entry (i, j) is ``1 - iou(track_boxes[i], det_boxes[j])``.

    >>> build_cost_matrix([], []).shape
    (0, 0)
    """
    costs = np.ones((len(track_boxes), len(det_boxes)), dtype=float)
    for i, t in enumerate(track_boxes):
        for j, d in enumerate(det_boxes):
            costs[i, j] = 1.0 - iou(t, d)
    return costs


def _smallest_optimum(padded, n_rows, n_cols):
    """
    Row to column map of the lexicographically smallest minimum-cost
    assignment of the square matrix ``padded``, for its first ``n_rows``
    rows. Columns from ``n_cols`` on are padding and all equivalent.
    """
    size = len(padded)
    rows, cols = linear_sum_assignment(padded)
    current = dict(zip(rows.tolist(), cols.tolist()))
    optimum = padded[rows, cols].sum()
    tol = 1e-9 * max(1.0, np.abs(padded).max() * size)

    fixed = {}
    fixed_cost = 0.0
    for i in range(n_rows):
        used = set(fixed.values())
        free_rows = [r for r in range(size) if r != i and r not in fixed]
        for j in range(min(current[i], n_cols)):
            if j in used:
                continue
            free_cols = [c for c in range(size) if c != j and c not in used]
            sub = padded[np.ix_(free_rows, free_cols)]
            sub_rows, sub_cols = linear_sum_assignment(sub)
            if fixed_cost + padded[i, j] + sub[sub_rows, sub_cols].sum() <= optimum + tol:
                current = dict(fixed)
                current[i] = j
                current.update((free_rows[a], free_cols[b]) for a, b in zip(sub_rows, sub_cols))
                break
        fixed[i] = current[i]
        fixed_cost += padded[i, current[i]]
    return fixed


def solve_assignment(costs, max_cost: float) -> AssignmentResult:
    """
    Minimum total cost one-to-one matching, then gating.

    The matrix is padded to square with a cost above every real entry and
    solved with the Hungarian method; pairs landing on padding, and pairs
    whose cost exceeds ``max_cost``, are reported unmatched. Among
    equal-cost optima the lexicographically smallest wins: lowest row
    index first, each row on its lowest feasible column, and leaving a row
    unmatched ranks after every column.

    :param costs: 2-D array, rows are tracks and columns detections
    :param max_cost: largest cost a kept match may have, ``>= 0``
    :returns: :class:`AssignmentResult` with matches sorted by track index
    :raises: :exc:`ValueError` for a negative ``max_cost`` or a non 2-D
      matrix
    """
    costs = np.asarray(costs, dtype=float)
    if costs.ndim != 2:
        raise ValueError("cost matrix must be 2-D, got shape %s" % (costs.shape,))
    if not max_cost >= 0:
        raise ValueError("max_cost must be >= 0, got %r" % max_cost)

    n_rows, n_cols = costs.shape
    if n_rows == 0 or n_cols == 0:
        return AssignmentResult([], list(range(n_rows)), list(range(n_cols)))

    size = max(n_rows, n_cols)
    padded = np.full((size, size), costs.max() + 1.0)
    padded[:n_rows, :n_cols] = costs
    chosen = _smallest_optimum(padded, n_rows, n_cols)

    result = AssignmentResult()
    matched_rows = set()
    matched_cols = set()
    for i, j in sorted(chosen.items()):
        if j >= n_cols:
            continue
        if costs[i, j] > max_cost:
            continue
        result.matches.append((int(i), int(j)))
        matched_rows.add(i)
        matched_cols.add(j)
    result.matches.sort()
    result.unmatched_tracks = [i for i in range(n_rows) if i not in matched_rows]
    result.unmatched_detections = [j for j in range(n_cols) if j not in matched_cols]
    return result
