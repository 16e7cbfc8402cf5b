"""Named groups used as the test corpus, and direct products."""

import logging
import math
from typing import List, Optional, Tuple

from kernel_atomicity.config import AtomicityConfig, load_config
from kernel_atomicity.groups import FiniteGroup, from_cayley_table, from_permutation_generators
from kernel_atomicity.utils.errors import OrderCapExceeded, UnknownCatalogEntry

# Set up logger
logger = logging.getLogger(__name__)

CATALOG_NAMES = ("cyclic", "symmetric", "dihedral", "klein4", "quaternion8")

# Quaternion units 1, i, j, k as 0..3; _UNIT_PRODUCT[a][b] = (negated, unit)
_UNIT_PRODUCT = (
    ((False, 0), (False, 1), (False, 2), (False, 3)),
    ((False, 1), (True, 0), (False, 3), (True, 2)),
    ((False, 2), (True, 3), (True, 0), (False, 1)),
    ((False, 3), (False, 2), (True, 1), (True, 0)),
)


def _quaternion_product(x: int, y: int) -> int:
    # element 2*u + s is (-1)^s times unit u
    (ux, sx), (uy, sy) = divmod(x, 2), divmod(y, 2)
    negated, unit = _UNIT_PRODUCT[ux][uy]
    return 2 * unit + ((sx + sy + int(negated)) % 2)


def _left_multiplication(g: int) -> Tuple[int, ...]:
    return tuple(_quaternion_product(g, x) for x in range(8))


def _require_parameter(name: str, parameter: Optional[int], minimum: int) -> int:
    if not isinstance(parameter, int) or isinstance(parameter, bool) or parameter < minimum:
        raise UnknownCatalogEntry(
            f"catalog entry {name} needs an integer parameter >= {minimum}, got {parameter!r}",
            {"name": name, "parameter": parameter},
        )
    return parameter


def _require_order(name: str, order: int, config: AtomicityConfig) -> None:
    if order > config.max_order:
        raise OrderCapExceeded(f"{name} has order {order}, above cap {config.max_order}", order, config.max_order)


def cyclic(n: int, config: Optional[AtomicityConfig] = None) -> FiniteGroup:
    """Z_n generated by the n-cycle i -> i+1; element k is the k-th power."""
    config = config or load_config()
    n = _require_parameter("cyclic", n, 1)
    _require_order("cyclic", n, config)
    return from_permutation_generators(n, [[(i + 1) % n for i in range(n)]], name=f"C{n}", config=config)


def symmetric(n: int, config: Optional[AtomicityConfig] = None) -> FiniteGroup:
    """S_n generated by the adjacent transpositions (0 1), (1 2), ... in that order."""
    config = config or load_config()
    n = _require_parameter("symmetric", n, 1)
    _require_order("symmetric", math.factorial(n), config)
    generators: List[List[int]] = []
    for i in range(n - 1):
        swap = list(range(n))
        swap[i], swap[i + 1] = i + 1, i
        generators.append(swap)
    return from_permutation_generators(n, generators, name=f"S{n}", config=config)


def dihedral(n: int, config: Optional[AtomicityConfig] = None) -> FiniteGroup:
    """Symmetries of the n-gon on its vertices: rotation i -> i+1, then reflection i -> -i."""
    config = config or load_config()
    n = _require_parameter("dihedral", n, 3)
    _require_order("dihedral", 2 * n, config)
    rotation = [(i + 1) % n for i in range(n)]
    reflection = [(-i) % n for i in range(n)]
    return from_permutation_generators(n, [rotation, reflection], name=f"D{n}", config=config)


def klein4(config: Optional[AtomicityConfig] = None) -> FiniteGroup:
    return from_permutation_generators(4, [[1, 0, 3, 2], [2, 3, 0, 1]], name="V4", config=config)


def quaternion8(config: Optional[AtomicityConfig] = None) -> FiniteGroup:
    """Q8 acting on itself by left multiplication, generated by i and j."""
    i, j = 2, 4
    return from_permutation_generators(
        8, [_left_multiplication(i), _left_multiplication(j)], name="Q8", config=config
    )


def catalog(name: str, parameter: Optional[int] = None, config: Optional[AtomicityConfig] = None) -> FiniteGroup:
    """Look up a named group.

    Args:
        name: one of ``cyclic``, ``symmetric``, ``dihedral``, ``klein4``, ``quaternion8``
        parameter: n for the parametrised families, ignored otherwise
        config: order cap

    Returns:
        FiniteGroup: the named group with its documented element ordering

    Raises:
        UnknownCatalogEntry: If the name is unknown or the parameter invalid
        OrderCapExceeded: If the group would be larger than ``max_order``
    """
    config = config or load_config()
    logger.debug(f"Catalog lookup: {name}({parameter})")
    if name == "cyclic":
        return cyclic(parameter, config)
    if name == "symmetric":
        return symmetric(parameter, config)
    if name == "dihedral":
        return dihedral(parameter, config)
    if name == "klein4":
        return klein4(config)
    if name == "quaternion8":
        return quaternion8(config)
    raise UnknownCatalogEntry(
        f"unknown catalog entry {name!r}; expected one of {', '.join(CATALOG_NAMES)}",
        {"name": name, "known": list(CATALOG_NAMES)},
    )


def direct_product(G: FiniteGroup, H: FiniteGroup, config: Optional[AtomicityConfig] = None) -> FiniteGroup:
    """G x H with componentwise multiplication; pair (g, h) has index g*|H| + h.

    Raises:
        OrderCapExceeded: If |G|*|H| exceeds ``max_order``
    """
    config = config or load_config()
    order = G.order * H.order
    _require_order(f"{G.name or 'G'} x {H.name or 'H'}", order, config)
    n = H.order
    table = (G.table[:, None, :, None] * n + H.table[None, :, None, :]).reshape(order, order)
    labels = [f"({G.label(g)},{H.label(h)})" for g in G.elements for h in H.elements]
    name = f"{G.name}x{H.name}" if G.name and H.name else ""
    return from_cayley_table(table, name=name, labels=labels, config=config)
