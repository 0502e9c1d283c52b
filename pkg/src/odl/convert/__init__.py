"""Legacy annotation format converters."""

from .coco import CocoSource, import_coco
from .voc import VocSource, detection_defs, import_voc

__all__ = ["CocoSource", "VocSource", "detection_defs", "import_coco", "import_voc"]
