"""Resource caps and sampling budgets for desk-scale runs."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Caps:
    """Budgets that keep every operation laptop-sized.

    stream: largest group we enumerate element-by-element (3^9).
    table: largest group we materialize as an N x N multiplication table.
    lattice_exponent: exhaustive subgroup enumeration only for |G| <= p^k.
    pair_exhaustive: exhaustive (x, y) pair sweeps up to this group order.
    pair_samples: sampled pairs above that, drawn from a seeded RNG.
    subgroup_samples: sampled subgroups for surveys on larger groups.
    hall_max_order: exhaustive power-collection congruence sweeps cap.
    collect_budget: rewriting steps allowed for a single collection call.
    """

    stream: int = 3 ** 9
    table: int = 6561
    lattice_exponent: int = 4
    pair_exhaustive: int = 729
    pair_samples: int = 100_000
    subgroup_samples: int = 500
    hall_max_order: int = 81
    collect_budget: int = 10_000_000


DEFAULT_CAPS = Caps()
