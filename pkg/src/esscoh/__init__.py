"""Exact mod-2 cohomology of small 2-groups.

Computes minimal free resolutions over the group algebra, cup products,
restriction/transfer maps, and the essential ideal, and checks degree by
degree that the essential ideal is free over a polynomial subalgebra
whose restrictions to the maximal central elementary abelian subgroup
form a homogeneous system of parameters.
"""

ENGINE_VERSION = "1"

from ._kernels import BACKEND as KERNEL_BACKEND  # noqa: E402

__all__ = ["ENGINE_VERSION", "KERNEL_BACKEND"]
