"""Alternating-operator circuits over lattice models.

A circuit is p cycles of M layer templates U_1 ... U_M.  Within a cycle
the layers act rightmost-first (U_M touches the state first); cycles run
in order n = 1..p.  Time angles x are stored cycle-major:
(x_1^(1), ..., x_M^(1), x_1^(2), ..., x_M^(p)).  Resource parameters y
bind into generator weights identically in every cycle.

Layer generators are signed: a ferromagnetic coupling J > 0 enters as
weight -J, so exp(-i * angle * G) realizes the intended exp(+i angle J ZZ).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .lattices import CROSS_CLASS_ORDER, LatticeGeometry, cross_coupling_classes
from .paulis import PauliString, _letters_from
from .states import LayerGenerator, StateVector, apply_layer, prepare_initial

ISING_SCHEMES = ("conventional_ising", "prh_ising")
HEISENBERG_SCHEMES = ("conventional_heisenberg", "prh_heisenberg")


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class LayerTemplate:
    """A layer with per-element base weights and optional y-slot bindings;
    the effective weight of element k is base[k] * y[y_slots[k]] (or just
    base[k] when unbound)."""

    kind: str
    supports: tuple
    base: tuple
    y_slots: tuple
    label: str = ""

    def weights(self, y):
        return np.array([b if s is None else b * y[s]
                         for b, s in zip(self.base, self.y_slots)])

    def generator(self, y):
        return LayerGenerator(self.kind, self.supports,
                              tuple(self.weights(y)))

    def terms_for(self, n, y):
        """Single-Pauli decomposition of the layer generator (weighted)."""
        w = self.weights(y)
        out = []
        for k, sup in enumerate(self.supports):
            if self.kind == "x_field":
                out.append(PauliString(n, _letters_from(n, [(sup, "X")]), w[k]))
            elif self.kind in ("zz_diagonal", "z_pair"):
                i, j = sup
                out.append(PauliString(n, _letters_from(n, [(i, "Z"), (j, "Z")]), w[k]))
            else:
                i, j = sup
                out.append(PauliString(n, _letters_from(n, [(i, "X"), (j, "X")]), w[k]))
                out.append(PauliString(n, _letters_from(n, [(i, "Y"), (j, "Y")]), w[k]))
        return out


@dataclass(frozen=True)
class ResourceBinding:
    """What a y slot is physically attached to ('site', 'edge' or
    'edge_class'), for symmetry analysis and provenance output."""

    name: str
    kind: str
    attachment: tuple


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    depth: int
    templates: tuple          # M layer templates, cycle order U_1..U_M
    resource_layout: tuple    # L ResourceBinding entries
    initial_state_kind: str

    def __post_init__(self):
        if self.depth < 1:
            raise CircuitError("depth must be >= 1")
        if len(self.templates) < 2:
            raise CircuitError("need at least two layers per cycle")

    @property
    def layers_per_cycle(self):
        return len(self.templates)

    @property
    def n_x(self):
        return self.layers_per_cycle * self.depth

    @property
    def n_y(self):
        return len(self.resource_layout)

    def parameter_layout(self):
        return self.n_x, self.n_y


@dataclass
class ParameterVector:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)

    def copy(self):
        return ParameterVector(self.x.copy(), self.y.copy())

    def flat(self):
        return np.concatenate([self.x, self.y])

    @classmethod
    def from_flat(cls, v, n_x):
        v = np.asarray(v, dtype=np.float64)
        return cls(v[:n_x], v[n_x:])

    def to_json(self):
        return json.dumps({"x": self.x.tolist(), "y": self.y.tolist()})


def check_layout(circuit: CircuitSpec, params: ParameterVector):
    if params.x.shape != (circuit.n_x,) or params.y.shape != (circuit.n_y,):
        raise CircuitError(
            f"parameter layout mismatch: expected x[{circuit.n_x}], "
            f"y[{circuit.n_y}], got x[{params.x.size}], y[{params.y.size}]")


def _chain_bonds(geometry: LatticeGeometry):
    """Chain bonds ordered by bond index b: (b, b+1), wrap bond last."""
    n = geometry.n_sites
    bonds = {}
    for (i, j) in geometry.edges:
        lo, hi = min(i, j), max(i, j)
        if hi == lo + 1:
            bonds[lo] = (lo, hi)
        elif lo == 0 and hi == n - 1:
            bonds[n - 1] = (hi, lo)
        else:
            raise CircuitError("geometry is not a chain")
    return [bonds[b] for b in sorted(bonds)]


def build_ansatz(geometry: LatticeGeometry, scheme, p, target_weights=None):
    """Assemble the circuit for a model family.

    conventional_ising:      M=2 [X field, ZZ coupling], unit weights or
                             target-inherited ones, no y parameters.
    prh_ising:               M=2, y = (h_1..h_N, J over edges).
    conventional_heisenberg: M=4 [even Z, even XY, odd Z, odd XY], +1
                             weights, no y.
    prh_heisenberg:          M=4, y = (g per bond, Delta per bond).

    target_weights, when given, is a (fields, couplings) pair for the
    conventional Ising scheme (circuits inheriting a random target's
    couplings and field strengths).
    """
    n = geometry.n_sites
    if p < 1:
        raise CircuitError("depth must be >= 1")

    if scheme in ISING_SCHEMES:
        sites = tuple(range(n))
        edges = tuple(geometry.edges)
        if scheme == "conventional_ising":
            if target_weights is not None:
                fields, couplings = target_weights
                if len(fields) != n or len(couplings) != len(edges):
                    raise CircuitError("target_weights shape mismatch")
            else:
                fields, couplings = np.ones(n), np.ones(len(edges))
            x_layer = LayerTemplate("x_field", sites,
                                    tuple(-float(h) for h in fields),
                                    (None,) * n, "x_field")
            zz_layer = LayerTemplate("zz_diagonal", edges,
                                     tuple(-float(j) for j in couplings),
                                     (None,) * len(edges), "zz_coupling")
            layout = ()
        else:
            x_layer = LayerTemplate("x_field", sites, (-1.0,) * n,
                                    tuple(range(n)), "x_field")
            zz_layer = LayerTemplate("zz_diagonal", edges, (-1.0,) * len(edges),
                                     tuple(n + k for k in range(len(edges))),
                                     "zz_coupling")
            layout = tuple(
                [ResourceBinding(f"h{s}", "site", (s,)) for s in sites]
                + [ResourceBinding(f"J{i}_{j}", "edge", (i, j))
                   for (i, j) in edges])
        return CircuitSpec(n, p, (x_layer, zz_layer), layout, "plus_product")

    if scheme in HEISENBERG_SCHEMES:
        if n % 2:
            raise CircuitError("Heisenberg schemes need an even site count")
        bonds = _chain_bonds(geometry)
        even = tuple(b for k, b in enumerate(bonds) if k % 2 == 0)
        odd = tuple(b for k, b in enumerate(bonds) if k % 2 == 1)
        nb = len(bonds)
        if scheme == "conventional_heisenberg":
            mk = lambda kind, sup, label: LayerTemplate(
                kind, sup, (1.0,) * len(sup), (None,) * len(sup), label)
            templates = (mk("z_pair", even, "even_z"),
                         mk("xy_pair", even, "even_xy"),
                         mk("z_pair", odd, "odd_z"),
                         mk("xy_pair", odd, "odd_xy"))
            layout = ()
        else:
            # y = (g per bond, Delta per bond), bond-index order
            bond_slot = {b: k for k, b in enumerate(bonds)}
            mk = lambda kind, sup, off, label: LayerTemplate(
                kind, sup, (1.0,) * len(sup),
                tuple(off + bond_slot[b] for b in sup), label)
            templates = (mk("z_pair", even, nb, "even_z"),
                         mk("xy_pair", even, 0, "even_xy"),
                         mk("z_pair", odd, nb, "odd_z"),
                         mk("xy_pair", odd, 0, "odd_xy"))
            layout = tuple(
                [ResourceBinding(f"g{i}_{j}", "edge", (i, j)) for (i, j) in bonds]
                + [ResourceBinding(f"delta{i}_{j}", "edge", (i, j))
                   for (i, j) in bonds])
        return CircuitSpec(n, p, templates, layout, "singlet_product")

    raise CircuitError(f"unknown ansatz scheme {scheme!r}")


def cross_ghz_circuit(m):
    """The cross-array GHZ circuit: N = 5 + 4m qubits, depth p = m + 1.

    The ZZ layer runs over three coupling classes (inter-arm ring,
    center-arm spokes, outer arm segments) bound to y = (J_ring, J_spoke,
    J_arm).  The X layer drives every site except the central one, whose
    field is fixed to zero.
    """
    if m < 1:
        raise CircuitError("cross GHZ circuit needs m >= 1")
    n = 5 + 4 * m
    classes = cross_coupling_classes(m)
    edges = []
    slots = []
    for ci, name in enumerate(CROSS_CLASS_ORDER):
        for e in classes[name]:
            edges.append(e)
            slots.append(ci)
    sites = tuple(range(1, n))   # type-1 atoms; site 0 is the center
    x_layer = LayerTemplate("x_field", sites, (-1.0,) * len(sites),
                            (None,) * len(sites), "x_field")
    zz_layer = LayerTemplate("zz_diagonal", tuple(edges),
                             (-1.0,) * len(edges), tuple(slots), "zz_coupling")
    layout = tuple(ResourceBinding(f"J_{name}", "edge_class",
                                   tuple(classes[name]))
                   for name in CROSS_CLASS_ORDER)
    return CircuitSpec(n, m + 1, (x_layer, zz_layer), layout, "plus_product")


def fixed_ghz_cross_params(m):
    """Fixed parameters generating a perfect-fidelity GHZ state on the
    cross array (m = 1, 2, 3 -> N = 9, 13, 17 at depth p = m + 1).

    Every ZZ angle is 3pi/4; the X angles are pi/4 in cycles 1..p-1 and
    3pi/4 in the final cycle.  y = (4/3, 1, 1/3) on (ring, spoke, arm);
    note 4/3 * 3pi/4 = pi, so the ring layer reduces to the identity up
    to a sign, which is exactly what makes the unavoidable inter-arm
    couplings harmless.  The assignment is verified by simulation (the
    published angle lists are index-ambiguous; this is the reading that
    attains fidelity 1).
    """
    if m not in (1, 2, 3):
        raise CircuitError("fixed parameters available for m in {1, 2, 3}")
    p = m + 1
    q, t = np.pi / 4.0, 3.0 * np.pi / 4.0
    x = []
    for cycle in range(p):
        x1 = q if cycle < p - 1 else t
        x.extend([x1, t])
    return ParameterVector(np.array(x), np.array([4.0 / 3.0, 1.0, 1.0 / 3.0]))


def run_circuit(circuit: CircuitSpec, params: ParameterVector, n=None):
    """Apply the circuit to its initial state; returns a fresh StateVector."""
    if n is not None and n != circuit.n_qubits:
        raise CircuitError("qubit count mismatch")
    check_layout(circuit, params)
    n = circuit.n_qubits
    state = prepare_initial(circuit.initial_state_kind, n)
    m = circuit.layers_per_cycle

    applied = []
    for tpl in circuit.templates:
        w = tpl.weights(params.y)
        if tpl.kind in ("zz_diagonal", "z_pair"):
            diag = kernels.zz_parity_sum(
                n, np.asarray(tpl.supports, dtype=np.int64).reshape(-1, 2),
                np.ascontiguousarray(w))
            applied.append(("diag", diag))
        elif tpl.kind == "x_field":
            applied.append(("x", np.asarray(tpl.supports, dtype=np.int64),
                            np.ascontiguousarray(w)))
        else:
            applied.append(("xy", np.asarray(tpl.supports, dtype=np.int64).reshape(-1, 2),
                            np.ascontiguousarray(w)))

    amps = state.amplitudes
    for cycle in range(circuit.depth):
        for j in reversed(range(m)):
            angle = float(params.x[cycle * m + j])
            if angle == 0.0:
                continue
            op = applied[j]
            if op[0] == "diag":
                kernels.phase_apply(amps, op[1], angle)
            elif op[0] == "x":
                kernels.x_field(amps, n, op[1], op[2], angle)
            else:
                kernels.xy_pair(amps, n, op[1], op[2], angle)
    return state


def run_circuit_shifted(circuit, params, cycle, layer, term, shift_angle):
    """run_circuit with one extra single-Pauli rotation exp(-i*shift*P)
    inserted next to layer (cycle, layer); exact-gradient helper."""
    from .states import apply_pauli_rotation

    check_layout(circuit, params)
    n = circuit.n_qubits
    state = prepare_initial(circuit.initial_state_kind, n)
    m = circuit.layers_per_cycle
    gens = [tpl.generator(params.y) for tpl in circuit.templates]
    for c in range(circuit.depth):
        for j in reversed(range(m)):
            apply_layer(state, gens[j], float(params.x[c * m + j]))
            if c == cycle and j == layer:
                apply_pauli_rotation(state, term, shift_angle)
    return state


# --- digital-gate export (Ising-type circuits only) ---------------------

@dataclass(frozen=True)
class Gate:
    gate: str
    qubits: tuple
    angle: float | None = None

    def as_dict(self):
        doc = {"gate": self.gate, "qubits": list(self.qubits)}
        if self.angle is not None:
            doc["angle"] = self.angle
        return doc


def export_digital_circuit(circuit: CircuitSpec, params: ParameterVector):
    """Expand ZZ layers into CNOT - RZ(2*phi) - CNOT per edge (identity
    placeholder for zero couplings) and X layers into RX gates, in
    application order.  Re-simulating the list reproduces run_circuit's
    output exactly, global phase included."""
    check_layout(circuit, params)
    for tpl in circuit.templates:
        if tpl.kind not in ("zz_diagonal", "x_field"):
            raise CircuitError(
                f"digital export supports zz_diagonal/x_field only, "
                f"got {tpl.kind}")
    m = circuit.layers_per_cycle
    gates = []
    for cycle in range(circuit.depth):
        for j in reversed(range(m)):
            tpl = circuit.templates[j]
            angle = float(params.x[cycle * m + j])
            w = tpl.weights(params.y)
            if tpl.kind == "zz_diagonal":
                for (i, k), wk in zip(tpl.supports, w):
                    phi = angle * wk
                    if phi == 0.0:
                        gates.append(Gate("I", (i, k)))
                        continue
                    gates.append(Gate("CNOT", (i, k)))
                    gates.append(Gate("RZ", (k,), 2.0 * phi))
                    gates.append(Gate("CNOT", (i, k)))
            else:
                for s, wk in zip(tpl.supports, w):
                    gates.append(Gate("RX", (s,), 2.0 * angle * wk))
    return gates


def gates_to_json(gates):
    return json.dumps([g.as_dict() for g in gates])


def simulate_gate_list(gates, n, initial: StateVector):
    """Tiny digital-gate simulator used to cross-check the export."""
    amps = initial.amplitudes.copy()
    idx = np.arange(1 << n, dtype=np.int64)
    for g in gates:
        if g.gate == "I":
            continue
        if g.gate == "CNOT":
            c, t = g.qubits
            cbit = 1 << (n - 1 - c)
            tbit = 1 << (n - 1 - t)
            sel = (idx & cbit) != 0
            flipped = idx[sel] ^ tbit
            new = amps.copy()
            new[idx[sel]] = amps[flipped]
            amps = new
        elif g.gate == "RZ":
            (s,) = g.qubits
            bit = (idx >> (n - 1 - s)) & 1
            amps = amps * np.exp(-1j * (g.angle / 2.0) * (1.0 - 2.0 * bit))
        elif g.gate == "RX":
            (s,) = g.qubits
            state = StateVector(n, amps)
            apply_layer(state, LayerGenerator("x_field", (s,), (1.0,)),
                        g.angle / 2.0)
            amps = state.amplitudes
        else:
            raise CircuitError(f"unknown gate {g.gate!r}")
    return StateVector(n, amps)
