"""Independent brute-force oracles the implementation is checked against."""

from __future__ import annotations

from odl.dsdl import LabelValue


def union_and_remaps(class_lists):
    """Ordered union of class lists plus per-list positional remap tables."""
    unified = []
    for classes in class_lists:
        for cls in classes:
            if cls not in unified:
                unified.append(cls)
    remaps = [
        {i: unified.index(cls) for i, cls in enumerate(classes)} for classes in class_lists
    ]
    return unified, remaps


def locate_brute_force(part_lengths, global_index):
    """(part, local_index) by walking the parts one by one."""
    for part, length in enumerate(part_lengths):
        if global_index < length:
            return part, global_index
        global_index -= length
    raise IndexError(global_index)


def remap_labels(value, table):
    """Recursively re-index every LabelValue through `table`."""
    if isinstance(value, LabelValue):
        return LabelValue(value.name, table[value.index])
    if isinstance(value, tuple):
        return tuple(remap_labels(v, table) for v in value)
    if isinstance(value, list):
        return [remap_labels(v, table) for v in value]
    if isinstance(value, dict):
        return {k: remap_labels(v, table) for k, v in value.items()}
    return value


def voc_bbox(xmin, ymin, xmax, ymax):
    return [xmin, ymin, xmax - xmin, ymax - ymin]


def voc_bbox_inverse(bbox):
    x, y, w, h = bbox
    return [x, y, x + w, y + h]
