"""Network construction: plus-pentomino pixel tiling and the three-layer graph.

Each unit cell covers five pixels (center plus the four cardinal neighbors).
Cell centers sit on the lattice {(x, y) : (2x + y) % 5 == offset}, which tiles
the plane without overlap; only cells fully inside the field are kept.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .core import (
    ConfigError,
    DIRECTION_ORDER,
    Direction,
    LifParams,
    Role,
    ROLE_ORDER,
    Sign,
    Synapse,
    fmt_float,
    role_of,
)

ROLE_OFFSETS: dict[Role, tuple[int, int]] = {
    Role.CENTER: (0, 0),
    Role.UP: (0, 1),
    Role.DOWN: (0, -1),
    Role.LEFT: (-1, 0),
    Role.RIGHT: (1, 0),
}


class Layer(Enum):
    INPUT = "input"
    HIDDEN = "hidden"
    OUTPUT = "output"


class HiddenKind(Enum):
    CENTER_RELAY = "center_relay"
    EXC_RELAY = "exc_relay"
    INH_RELAY = "inh_relay"


# Per-cell hidden slots in id order: the center relay, then an excitatory and
# an inhibitory relay per direction.
HIDDEN_SLOTS: tuple[tuple[HiddenKind, Direction | None], ...] = (
    (HiddenKind.CENTER_RELAY, None),
) + tuple(
    (kind, d)
    for d in DIRECTION_ORDER
    for kind in (HiddenKind.EXC_RELAY, HiddenKind.INH_RELAY)
)

HIDDEN_PER_CELL = len(HIDDEN_SLOTS)  # 9
INPUTS_PER_CELL = len(ROLE_ORDER)  # 5


def _hidden_slot(kind: HiddenKind, direction: Direction | None) -> int:
    return HIDDEN_SLOTS.index((kind, direction))


# Input role feeding each hidden slot (every relay listens to exactly one pixel).
SLOT_SOURCE_ROLE: tuple[Role, ...] = tuple(
    Role.CENTER if d is None else role_of(d) for _, d in HIDDEN_SLOTS
)

# Hidden slots feeding each output direction. An output fires on two
# excitatory spikes arriving close together: the relay of the opposite edge
# pixel followed by the center relay. Its own edge relay vetoes it.
OUTPUT_SOURCES: dict[Direction, tuple[tuple[int, Sign], ...]] = {
    d: (
        (_hidden_slot(HiddenKind.EXC_RELAY, d.opposite), Sign.EXCITATORY),
        (_hidden_slot(HiddenKind.CENTER_RELAY, None), Sign.EXCITATORY),
        (_hidden_slot(HiddenKind.INH_RELAY, d), Sign.INHIBITORY),
    )
    for d in DIRECTION_ORDER
}


@dataclass(frozen=True)
class CellLayout:
    """Placement of unit cells on the field plus the pixel ownership map."""

    field_width: int
    field_height: int
    offset: int
    centers: tuple[tuple[int, int], ...]
    owner: dict[tuple[int, int], tuple[int, Role]] = field(repr=False)

    @property
    def n_cells(self) -> int:
        return len(self.centers)

    def pixel_owner(self, x: int, y: int) -> tuple[int, Role] | None:
        return self.owner.get((x, y))


def _build_owner(
    centers: tuple[tuple[int, int], ...]
) -> dict[tuple[int, int], tuple[int, Role]]:
    owner: dict[tuple[int, int], tuple[int, Role]] = {}
    for idx, (cx, cy) in enumerate(centers):
        for role in ROLE_ORDER:
            dx, dy = ROLE_OFFSETS[role]
            pixel = (cx + dx, cy + dy)
            if pixel in owner:  # impossible on the mod-5 lattice
                raise ConfigError(f"cells overlap at pixel {pixel}")
            owner[pixel] = (idx, role)
    return owner


def layout_from_centers(
    field_width: int, field_height: int, centers: list[tuple[int, int]], offset: int = -1
) -> CellLayout:
    """Build a layout from explicit cell centers (cells must fit the field)."""
    ordered = tuple(sorted(centers, key=lambda c: (c[1], c[0])))
    for cx, cy in ordered:
        if not (1 <= cx <= field_width - 2 and 1 <= cy <= field_height - 2):
            raise ConfigError(f"cell center ({cx}, {cy}) touches the field boundary")
    return CellLayout(field_width, field_height, offset, ordered, _build_owner(ordered))


def tessellate(field_width: int, field_height: int) -> CellLayout:
    """Place the maximal set of non-overlapping plus cells on the field.

    All five lattice offsets are tried; the smallest offset with the highest
    fully-in-field cell count wins. Fields too small for any cell yield an
    empty layout.
    """
    if field_width < 1 or field_height < 1:
        raise ConfigError("field dimensions must be positive")
    best_offset = 0
    best: tuple[tuple[int, int], ...] = ()
    for c in range(5):
        centers = tuple(
            (x, y)
            for y in range(1, field_height - 1)
            for x in range(1, field_width - 1)
            if (2 * x + y) % 5 == c
        )
        if len(centers) > len(best):
            best_offset, best = c, centers
    return CellLayout(field_width, field_height, best_offset, best, _build_owner(best))


@dataclass(frozen=True)
class UnitCell:
    """One cell's pixels and its intra-cell wiring template."""

    center: tuple[int, int]
    pixels: dict[Role, tuple[int, int]]
    # (input role, hidden slot) pairs: one synapse per hidden relay.
    input_wiring: tuple[tuple[Role, int], ...]


def build_unit_cell(center: tuple[int, int], field_width: int, field_height: int) -> UnitCell:
    cx, cy = center
    if not (1 <= cx <= field_width - 2 and 1 <= cy <= field_height - 2):
        raise ConfigError(f"cell center ({cx}, {cy}) needs all four neighbors in-field")
    pixels = {
        role: (cx + dx, cy + dy) for role, (dx, dy) in ROLE_OFFSETS.items()
    }
    wiring = tuple((SLOT_SOURCE_ROLE[slot], slot) for slot in range(HIDDEN_PER_CELL))
    return UnitCell(center, pixels, wiring)


@dataclass(frozen=True)
class NetworkParams:
    """Construction-time constants; potentials are dimensionless."""

    hidden_v_th: float = 0.5
    tau_center_s: float = 2e-3
    tau_directional_s: float = 20e-3
    output_v_th: float = 1.5
    w_input_hidden: float = 1.0
    w_hidden_output: float = 1.0
    # Inhibitory relays hit outputs slightly harder than excitatory ones do;
    # an exact 1:1 cancellation leaves anti-preferred sequences right at
    # threshold, where they fire on rounding luck.
    w_hidden_output_inh: float = 1.1
    w_lateral: float = 1.0
    input_tau_s: float = 20e-3
    t_pw_s: float = 1e-4
    t_ref_s: float = 2e-4
    d_out_s: float = 1e-4
    v_reset: float = 0.0
    # v_floor = -v_floor_factor * v_th, deep enough that inhibition saturates
    # instead of accumulating without bound.
    v_floor_factor: float = 2.0

    def lif(self, tau_m: float, v_th: float) -> LifParams:
        return LifParams(
            tau_m=tau_m,
            v_th=v_th,
            v_reset=self.v_reset,
            v_floor=-self.v_floor_factor * v_th,
            t_pw=self.t_pw_s,
            t_ref=self.t_ref_s,
            d_out=self.d_out_s,
        )


@dataclass(frozen=True)
class NeuronInfo:
    id: int
    layer: Layer
    params: LifParams
    cell: int | None = None
    role: Role | None = None  # input pixels
    kind: HiddenKind | None = None  # hidden relays
    direction: Direction | None = None  # hidden relays and outputs
    rank: int | None = None  # output position within its direction group
    pixel: tuple[int, int] | None = None


@dataclass(frozen=True)
class NetworkGraph:
    """Complete feed-forward graph plus lateral inhibition between outputs."""

    layout: CellLayout
    n_per_dir: int
    output_taus_s: tuple[float, ...]
    neurons: tuple[NeuronInfo, ...]
    synapses: tuple[Synapse, ...]
    input_id_by_pixel: dict[tuple[int, int], int] = field(repr=False)
    output_ids: dict[Direction, tuple[int, ...]] = field(repr=False)
    feed_forward_count: int = 0
    lateral_count: int = 0

    @property
    def n_inputs(self) -> int:
        return INPUTS_PER_CELL * self.layout.n_cells

    @property
    def n_hidden(self) -> int:
        return HIDDEN_PER_CELL * self.layout.n_cells

    @property
    def n_outputs(self) -> int:
        return 4 * self.n_per_dir

    def layer_of(self, neuron_id: int) -> Layer:
        return self.neurons[neuron_id].layer

    def counts(self) -> dict[str, int]:
        return {
            "cells": self.layout.n_cells,
            "input_neurons": self.n_inputs,
            "hidden_neurons": self.n_hidden,
            "output_neurons": self.n_outputs,
            "feed_forward_synapses": self.feed_forward_count,
            "lateral_synapses": self.lateral_count,
            "total_synapses": len(self.synapses),
        }

    def to_json_dict(self) -> dict:
        neurons = []
        for n in self.neurons:
            entry: dict = {
                "id": n.id,
                "layer": n.layer.value,
                "cell": n.cell,
                "tau_m_s": n.params.tau_m,
                "v_th": n.params.v_th,
            }
            if n.pixel is not None:
                entry["pixel"] = list(n.pixel)
            if n.role is not None:
                entry["role"] = n.role.value
            if n.kind is not None:
                entry["kind"] = n.kind.value
            if n.direction is not None:
                entry["direction"] = n.direction.value
            if n.rank is not None:
                entry["rank"] = n.rank
            neurons.append(entry)
        synapses = [
            {
                "pre": s.pre,
                "post": s.post,
                "weight": s.weight,
                "sign": s.sign.value,
            }
            for s in self.synapses
        ]
        return {
            "schema_version": 1,
            "field": {
                "width": self.layout.field_width,
                "height": self.layout.field_height,
            },
            "lattice_offset": self.layout.offset,
            "cell_centers": [list(c) for c in self.layout.centers],
            "counts": self.counts(),
            "neurons": neurons,
            "synapses": synapses,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def assemble_network(
    layout: CellLayout,
    n_per_dir: int = 1,
    output_taus_s: tuple[float, ...] = (0.5,),
    params: NetworkParams | None = None,
    lateral_inhibition: bool = True,
) -> NetworkGraph:
    """Wire the input, hidden and output layers over the given cell layout.

    Neuron ids are stable: inputs cell by cell in role order, then hidden
    cell by cell in slot order, then outputs grouped by direction and rank.
    """
    params = params or NetworkParams()
    if n_per_dir < 1:
        raise ConfigError("n_per_dir must be >= 1")
    if len(output_taus_s) != n_per_dir:
        raise ConfigError("output_taus_s must have one entry per output rank")
    for tau in output_taus_s:
        if not (tau > 0.0 and math.isfinite(tau)):
            raise ConfigError("output time constants must be positive")

    cells = [
        build_unit_cell(center, layout.field_width, layout.field_height)
        for center in layout.centers
    ]
    neurons: list[NeuronInfo] = []
    input_id_by_pixel: dict[tuple[int, int], int] = {}

    input_params = params.lif(params.input_tau_s, params.hidden_v_th)
    for ci, cell in enumerate(cells):
        for role in ROLE_ORDER:
            nid = len(neurons)
            pixel = cell.pixels[role]
            input_id_by_pixel[pixel] = nid
            neurons.append(
                NeuronInfo(
                    id=nid,
                    layer=Layer.INPUT,
                    params=input_params,
                    cell=ci,
                    role=role,
                    pixel=pixel,
                )
            )

    hidden_base = len(neurons)
    for ci, cell in enumerate(cells):
        for kind, direction in HIDDEN_SLOTS:
            tau = params.tau_center_s if kind is HiddenKind.CENTER_RELAY else params.tau_directional_s
            neurons.append(
                NeuronInfo(
                    id=len(neurons),
                    layer=Layer.HIDDEN,
                    params=params.lif(tau, params.hidden_v_th),
                    cell=ci,
                    kind=kind,
                    direction=direction,
                )
            )

    output_base = len(neurons)
    output_ids: dict[Direction, tuple[int, ...]] = {}
    for d in DIRECTION_ORDER:
        ids = []
        for k in range(n_per_dir):
            nid = len(neurons)
            ids.append(nid)
            neurons.append(
                NeuronInfo(
                    id=nid,
                    layer=Layer.OUTPUT,
                    params=params.lif(output_taus_s[k], params.output_v_th),
                    direction=d,
                    rank=k,
                )
            )
        output_ids[d] = tuple(ids)

    synapses: list[Synapse] = []
    for ci, cell in enumerate(cells):
        for role, slot in cell.input_wiring:
            pre = input_id_by_pixel[cell.pixels[role]]
            post = hidden_base + HIDDEN_PER_CELL * ci + slot
            synapses.append(Synapse(pre, post, params.w_input_hidden, Sign.EXCITATORY))
    for ci in range(len(cells)):
        for d in DIRECTION_ORDER:
            for slot, sign in OUTPUT_SOURCES[d]:
                pre = hidden_base + HIDDEN_PER_CELL * ci + slot
                w = (
                    params.w_hidden_output
                    if sign is Sign.EXCITATORY
                    else params.w_hidden_output_inh
                )
                for post in output_ids[d]:
                    synapses.append(Synapse(pre, post, w, sign))
    feed_forward = len(synapses)

    if lateral_inhibition:
        # Opposite channels of equal rank veto each other.
        for a, b in ((Direction.UP, Direction.DOWN), (Direction.LEFT, Direction.RIGHT)):
            for k in range(n_per_dir):
                ia, ib = output_ids[a][k], output_ids[b][k]
                synapses.append(Synapse(ia, ib, params.w_lateral, Sign.INHIBITORY))
                synapses.append(Synapse(ib, ia, params.w_lateral, Sign.INHIBITORY))
    lateral = len(synapses) - feed_forward

    return NetworkGraph(
        layout=layout,
        n_per_dir=n_per_dir,
        output_taus_s=tuple(float(t) for t in output_taus_s),
        neurons=tuple(neurons),
        synapses=tuple(synapses),
        input_id_by_pixel=input_id_by_pixel,
        output_ids=output_ids,
        feed_forward_count=feed_forward,
        lateral_count=lateral,
    )
