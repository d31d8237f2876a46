"""Weighted Pauli-string Hamiltonians and their commuting-part splittings.

Every model Hamiltonian is a real-weighted sum of Pauli strings (hbar = 1,
lattice spacing = 1).  Minus signs of ferromagnetic couplings and fields
are carried in the coefficients, so circuit layers can uniformly apply
exp(-i * angle * generator) with the signed generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .lattices import LatticeGeometry

_LETTERS = frozenset("IXYZ")


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class PauliString:
    n_qubits: int
    letters: str
    coefficient: float

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ModelError("n_qubits must be positive")
        if len(self.letters) != self.n_qubits:
            raise ModelError("letters length must equal n_qubits")
        if not set(self.letters) <= _LETTERS:
            raise ModelError(f"bad Pauli letters {self.letters!r}")
        if not np.isfinite(self.coefficient):
            raise ModelError("coefficient must be finite")

    @property
    def support(self):
        return tuple(s for s, c in enumerate(self.letters) if c != "I")

    def masks(self):
        """(xmask, zmask, n_y): bit masks over basis indices, qubit s on
        bit n-1-s.  xmask marks X/Y letters, zmask marks Z/Y letters."""
        n = self.n_qubits
        xm = zm = 0
        ny = 0
        for s, c in enumerate(self.letters):
            bit = 1 << (n - 1 - s)
            if c in "XY":
                xm |= bit
            if c in "ZY":
                zm |= bit
            if c == "Y":
                ny += 1
        return xm, zm, ny

    def commutes_with(self, other):
        if self.n_qubits != other.n_qubits:
            raise ModelError("qubit count mismatch")
        clashes = sum(1 for a, b in zip(self.letters, other.letters)
                      if a != "I" and b != "I" and a != b)
        return clashes % 2 == 0

    def permuted(self, perm):
        """Relabel sites: letter at site s moves to site perm[s]."""
        out = ["I"] * self.n_qubits
        for s, c in enumerate(self.letters):
            out[perm[s]] = c
        return PauliString(self.n_qubits, "".join(out), self.coefficient)


def _letters_from(n, placed):
    out = ["I"] * n
    for site, letter in placed:
        out[site] = letter
    return "".join(out)


def single(n, site, letter, coeff):
    return PauliString(n, _letters_from(n, [(site, letter)]), coeff)


def two_site(n, i, j, letter_i, letter_j, coeff):
    return PauliString(n, _letters_from(n, [(i, letter_i), (j, letter_j)]), coeff)


class WeightedPauliSum:
    """Hermitian operator as a merged list of real-weighted Pauli strings."""

    def __init__(self, n_qubits, terms):
        merged = {}
        order = []
        for t in terms:
            if t.n_qubits != n_qubits:
                raise ModelError("term qubit count mismatch")
            if t.letters not in merged:
                order.append(t.letters)
                merged[t.letters] = 0.0
            merged[t.letters] += t.coefficient
        self.n_qubits = n_qubits
        self.terms = tuple(PauliString(n_qubits, k, merged[k])
                           for k in order if merged[k] != 0.0)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return (isinstance(other, WeightedPauliSum)
                and self.n_qubits == other.n_qubits
                and self.term_dict() == other.term_dict())

    def term_dict(self):
        return {t.letters: t.coefficient for t in self.terms}

    def permuted(self, perm):
        return WeightedPauliSum(self.n_qubits, [t.permuted(perm) for t in self.terms])

    def is_diagonal(self):
        return all(set(t.letters) <= {"I", "Z"} for t in self.terms)

    def diagonal(self):
        """Diagonal of the operator over the computational basis (valid for
        any sum; off-diagonal terms contribute nothing)."""
        n = self.n_qubits
        idx = np.arange(1 << n, dtype=np.int64)
        d = np.zeros(1 << n)
        for t in self.terms:
            xm, zm, _ = t.masks()
            if xm:
                continue
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & zm) & 1)
            d += t.coefficient * signs
        return d

    def apply(self, vec):
        """Matrix-vector product without materializing the matrix."""
        n = self.n_qubits
        idx = np.arange(1 << n, dtype=np.int64)
        out = np.zeros_like(vec, dtype=complex)
        for t in self.terms:
            xm, zm, ny = t.masks()
            src = idx ^ xm
            phase = ((1j) ** ny) * (1.0 - 2.0 * (np.bitwise_count(src & zm) & 1))
            out += t.coefficient * phase * vec[src]
        return out

    def dense(self):
        """Dense matrix; real symmetric when every term has an even number
        of Y letters, complex Hermitian otherwise."""
        n = self.n_qubits
        dim = 1 << n
        idx = np.arange(dim, dtype=np.int64)
        all_real = all(t.masks()[2] % 2 == 0 for t in self.terms)
        H = np.zeros((dim, dim), dtype=np.float64 if all_real else np.complex128)
        for t in self.terms:
            xm, zm, ny = t.masks()
            src = idx ^ xm
            phase = ((1j) ** ny) * (1.0 - 2.0 * (np.bitwise_count(src & zm) & 1))
            if all_real:
                phase = phase.real
            np.add.at(H, (idx, src), t.coefficient * phase)
        return H

    def to_json(self):
        return json.dumps({
            "n_qubits": self.n_qubits,
            "terms": [[t.letters, t.coefficient] for t in self.terms],
        })

    @classmethod
    def from_json(cls, doc):
        data = json.loads(doc)
        n = data["n_qubits"]
        return cls(n, [PauliString(n, ls, c) for ls, c in data["terms"]])


@dataclass(frozen=True)
class HamiltonianSplit:
    parts: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.parts) != len(self.labels):
            raise ModelError("parts/labels length mismatch")
        if len(self.parts) < 2:
            raise ModelError("a split needs at least two parts")

    def recombined(self):
        terms = [t for part in self.parts for t in part.terms]
        return WeightedPauliSum(self.parts[0].n_qubits, terms)


def all_commute(h):
    terms = h.terms
    return all(terms[a].commutes_with(terms[b])
               for a in range(len(terms)) for b in range(a + 1, len(terms)))


def parts_commute(p1, p2):
    return all(a.commutes_with(b) for a in p1.terms for b in p2.terms)


def build_hamiltonian(model, geometry: LatticeGeometry, *, lam=None,
                      disorder=None, seed=None):
    """Model Hamiltonians over a lattice geometry.

    tfim:         -sum_e Z_i Z_j - lam * sum_s X_s          (lam > 0)
    ferro_ising:  -sum_e Z_i Z_j
    random_ising: -sum_e J_e Z_i Z_j - sum_s h_s X_s, J and h i.i.d.
                  uniform on [(2-D)/2, (2+D)/2]; needs disorder = D in
                  [0, 2] and a seed (draw order: couplings in edge order,
                  then fields in site order).
    heisenberg:   +sum_e (XX + YY + ZZ)
    """
    n = geometry.n_sites
    if model == "tfim":
        if lam is None or lam <= 0:
            raise ModelError("tfim needs lam > 0")
        terms = [two_site(n, i, j, "Z", "Z", -1.0) for (i, j) in geometry.edges]
        terms += [single(n, s, "X", -float(lam)) for s in range(n)]
        return WeightedPauliSum(n, terms)
    if model == "ferro_ising":
        terms = [two_site(n, i, j, "Z", "Z", -1.0) for (i, j) in geometry.edges]
        return WeightedPauliSum(n, terms)
    if model == "random_ising":
        if disorder is None or not (0.0 <= disorder <= 2.0):
            raise ModelError("random_ising needs disorder D in [0, 2]")
        if seed is None:
            raise ModelError("random_ising needs a seed")
        lo, hi = (2.0 - disorder) / 2.0, (2.0 + disorder) / 2.0
        rng = np.random.default_rng(seed)
        couplings = rng.uniform(lo, hi, len(geometry.edges))
        fields = rng.uniform(lo, hi, n)
        terms = [two_site(n, i, j, "Z", "Z", -float(w))
                 for (i, j), w in zip(geometry.edges, couplings)]
        terms += [single(n, s, "X", -float(h)) for s, h in enumerate(fields)]
        return WeightedPauliSum(n, terms)
    if model == "heisenberg":
        terms = []
        for (i, j) in geometry.edges:
            for letter in "XYZ":
                terms.append(two_site(n, i, j, letter, letter, 1.0))
        return WeightedPauliSum(n, terms)
    raise ModelError(f"unknown model {model!r}")


def random_ising_weights(geometry, disorder, seed):
    """The (couplings, fields) arrays drawn by build_hamiltonian for
    random_ising, for circuits that inherit the target's weights."""
    lo, hi = (2.0 - disorder) / 2.0, (2.0 + disorder) / 2.0
    rng = np.random.default_rng(seed)
    couplings = rng.uniform(lo, hi, len(geometry.edges))
    fields = rng.uniform(lo, hi, geometry.n_sites)
    return couplings, fields


def _chain_bond_index(term, n):
    """Bond index b for a two-site chain term on sites (b, b+1) or the
    wrap bond (n-1, 0) -> index n-1.  None if not a chain bond."""
    sup = term.support
    if len(sup) != 2:
        return None
    i, j = sup
    if j == i + 1:
        return i
    if i == 0 and j == n - 1:
        return n - 1
    return None


def split_hamiltonian(h: WeightedPauliSum, scheme):
    """Split into ordered commuting parts defining one circuit cycle.

    ising_m2:      [transverse-field part (X terms), coupling part (ZZ)]
    heisenberg_m4: [even XY, even Z, odd XY, odd Z] by chain-bond parity,
                   pairs (0,1), (2,3), ... are even.  Needs even N and
                   chain-shaped terms.
    """
    n = h.n_qubits
    if scheme == "ising_m2":
        xs = [t for t in h.terms if set(t.letters) <= {"I", "X"}]
        zzs = [t for t in h.terms if set(t.letters) <= {"I", "Z"}]
        if len(xs) + len(zzs) != len(h.terms):
            raise ModelError("ising_m2 expects only X and ZZ terms")
        parts = (WeightedPauliSum(n, xs), WeightedPauliSum(n, zzs))
        return HamiltonianSplit(parts, ("x_field", "zz_coupling"))
    if scheme == "heisenberg_m4":
        if n % 2:
            raise ModelError("heisenberg_m4 needs even N")
        buckets = {"even_xy": [], "even_z": [], "odd_xy": [], "odd_z": []}
        for t in h.terms:
            b = _chain_bond_index(t, n)
            kinds = {t.letters[s] for s in t.support}
            if b is None or len(kinds) != 1:
                raise ModelError("heisenberg_m4 expects nearest-neighbor "
                                 "chain terms XX/YY/ZZ")
            parity = "even" if b % 2 == 0 else "odd"
            buckets[f"{parity}_{'z' if kinds == {'Z'} else 'xy'}"].append(t)
        labels = ("even_xy", "even_z", "odd_xy", "odd_z")
        parts = tuple(WeightedPauliSum(n, buckets[k]) for k in labels)
        return HamiltonianSplit(parts, labels)
    raise ModelError(f"unknown split scheme {scheme!r}")
