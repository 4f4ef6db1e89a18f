"""Planning toolkit for rural middle-mile wireless meshes.

Pipeline: tower heights (:mod:`middlemile.steiner_tc`), link capacity
(:mod:`middlemile.cnd`), hyperlink replacement (:mod:`middlemile.hybrid`).
"""

__version__ = "0.1.0"
