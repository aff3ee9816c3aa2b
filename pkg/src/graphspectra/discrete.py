"""Weighted discrete Laplacian associated to a coupled metric graph.

For the orthogonal global basis {b_w} of the coupled subspace, the
coupling operator L = (+) L_v and the direct sum M0 of the per-edge
boundary response matrices at the regularization point, this module
assembles

    b(v, w) = <(M0 - L) b_v, b_w>          (v != w, zero diagonal),
    c(v)    = <(L - M0) b_v, b_v> - sum_w b(v, w),
    m(v)    = || R b_v ||^2,               R = (+) r_e I,

the weighted degree Deg(v) = sum_w b(v, w) / m(v), and the matrix

    Lmin[v, w] = <(L - M0) b_v, b_w> / (||R b_v|| ||R b_w||),

which is unitarily equivalent to the discrete operator
(D_L f)_v = ( sum_w b(v,w)(f_v - f_w) + c(v) f_v ) / m(v) via
x |-> (||R b_v|| x_v).

All pairings are computed support-locally: a basis vector touches only
the coordinates of its own vertex, and M0 couples the two endpoints of
each edge, so off-diagonal terms exist only between vertices joined by
an edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
import scipy.sparse

from . import edges as em
from .coupling import GlobalBasis, VertexCoupling, global_basis
from .graphs import MetricGraph, edge_model_for, boundary_coordinates
from .regularize import Regularization

__all__ = [
    "DiscreteLaplacian",
    "build_discrete",
    "weighted_degree",
    "lmin_matrix",
    "unitary_equivalence_residual",
    "apply_discrete",
    "quadratic_form",
    "discrete_to_json_dict",
]

_DENSE_LIMIT = 64
_REAL_TOL = 1e-12
_HERM_TOL = 1e-10


@dataclass(frozen=True)
class DiscreteLaplacian:
    labels: tuple                 # index set, one label per basis element
    owners: tuple                 # owning vertex per index
    m: np.ndarray                 # positive measure
    c: np.ndarray                 # real potential
    b: Mapping                    # {(i, j): weight}, i < j, symmetric closure implied
    criteria_applicable: bool     # all weights real and >= 0
    model_tag: str                # "laplacian" | "dirac"
    dirac_c: Optional[float]
    truncation: Optional[object]  # TruncationInfo of the underlying graph
    flavor: str = "custom"        # coupling flavor the data came from
    lambda0: float = 0.0

    @property
    def size(self) -> int:
        return len(self.labels)

    def weight(self, i: int, j: int):
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        return self.b.get(key, 0.0)

    def neighbors(self, i: int):
        for (a, bnd), val in self.b.items():
            if a == i:
                yield bnd, val
            elif bnd == i:
                yield a, val

    def row_sum(self, i: int):
        return sum(val for _, val in self.neighbors(i))


def _edge_coordinate_positions(g: MetricGraph):
    coords = boundary_coordinates(g)
    pos = {coord: i for i, coord in enumerate(coords)}
    by_edge = {}
    for e in g.edges:
        by_edge[e.id] = [pos[(e.id, t)] for t, _ in e.endpoints()]
    return coords, pos, by_edge


def _pair_vectors(g: MetricGraph, coupling: VertexCoupling, reg: Regularization,
                  gb: GlobalBasis):
    """For every basis element: the sparse vector (M0 - L) b and helper data."""
    _, _, by_edge = _edge_coordinate_positions(g)
    n = gb.size
    vertex_ops = {v: coupling.block(v).operator() for v in g.vertices}
    t_vectors = []
    for el in gb.elements:
        dense = el.embed(n)
        out = np.zeros(n, dtype=complex)
        for eid, positions in by_edge.items():
            local = dense[positions]
            if not np.any(local):
                continue
            out[positions] += reg.m_at_lambda0[eid] @ local
        lv = vertex_ops[el.vertex] @ dense[list(el.positions)]
        out[list(el.positions)] -= lv
        t_vectors.append(out)
    return t_vectors


def build_discrete(g: MetricGraph, coupling: VertexCoupling,
                   reg: Regularization) -> DiscreteLaplacian:
    """Assemble weights, potential and measure; verifies Hermiticity to 1e-10.

    Couplings whose off-diagonal pairings come out complex or negative are
    still assembled but tagged ``criteria_applicable=False`` (real parts are
    stored; the summability/positivity criteria then refuse to run).
    """
    gb = global_basis(g, coupling)
    n = len(gb.elements)
    t_vectors = _pair_vectors(g, coupling, reg, gb)
    dense_b = [el.embed(gb.size) for el in gb.elements]
    pair = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            pair[i, j] = np.vdot(dense_b[j], t_vectors[i])  # <t_i, b_j>
    herm_err = np.linalg.norm(pair - pair.conj().T)
    if herm_err > _HERM_TOL * max(1.0, np.linalg.norm(pair)):
        raise AssertionError(f"pairing matrix not Hermitian: error {herm_err:.2e}")

    applicable = True
    b = {}
    scale = max(1.0, float(np.max(np.abs(pair))) if pair.size else 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            val = pair[i, j]
            if abs(val) < 1e-14 * scale:
                continue
            if abs(val.imag) > _REAL_TOL * max(1.0, abs(val)):
                applicable = False
            if val.real < 0:
                applicable = False
            b[(i, j)] = val.real
    row_sums = np.zeros(n)
    for (i, j), val in b.items():
        row_sums[i] += val
        row_sums[j] += val
    c = np.array([-pair[i, i].real - row_sums[i] for i in range(n)])
    m = np.zeros(n)
    for i, el in enumerate(gb.elements):
        coords = [gb.coords[p] for p in el.positions]
        m[i] = sum(reg.norm_prime[eid] * abs(val) ** 2
                   for (eid, _), val in zip(coords, el.values))
    model_tag = "dirac" if isinstance(g.model, em.Dirac) else "laplacian"
    return DiscreteLaplacian(
        labels=tuple(el.label for el in gb.elements),
        owners=tuple(el.vertex for el in gb.elements),
        m=m,
        c=c,
        b=b,
        criteria_applicable=applicable,
        model_tag=model_tag,
        dirac_c=(g.model.c if isinstance(g.model, em.Dirac) else None),
        truncation=g.truncation,
        flavor=coupling.flavor,
        lambda0=reg.lambda0,
    )


def weighted_degree(dl: DiscreteLaplacian) -> np.ndarray:
    """Deg(v) = sum_w b(v, w) / m(v), per index."""
    out = np.zeros(dl.size)
    for (i, j), val in dl.b.items():
        out[i] += val
        out[j] += val
    return out / dl.m


def lmin_matrix(g: MetricGraph, coupling: VertexCoupling, reg: Regularization,
                subset=None):
    """Hermitian matrix <(L - M0) b_v, b_w> / (||R b_v|| ||R b_w||) over the
    global basis; optionally restricted to the index ``subset``.

    Dense ndarray below 64 indices, sparse CSR beyond.
    """
    gb = global_basis(g, coupling)
    n = len(gb.elements)
    idx = list(range(n)) if subset is None else list(subset)
    t_vectors = _pair_vectors(g, coupling, reg, gb)
    dense_b = [el.embed(gb.size) for el in gb.elements]
    rnorm = np.zeros(n)
    for i, el in enumerate(gb.elements):
        coords = [gb.coords[p] for p in el.positions]
        rnorm[i] = np.sqrt(sum(reg.norm_prime[eid] * abs(val) ** 2
                               for (eid, _), val in zip(coords, el.values)))
    k = len(idx)
    rows, cols, vals = [], [], []
    for a, i in enumerate(idx):
        for bb, j in enumerate(idx):
            num = -np.vdot(dense_b[j], t_vectors[i])  # <(L - M0) b_i, b_j>
            if num != 0:
                rows.append(bb)
                cols.append(a)
                vals.append(num / (rnorm[i] * rnorm[j]))
    if k < _DENSE_LIMIT:
        out = np.zeros((k, k), dtype=complex)
        out[rows, cols] = vals
        return out
    return scipy.sparse.csr_matrix(
        (vals, (rows, cols)), shape=(k, k), dtype=complex
    )


def apply_discrete(dl: DiscreteLaplacian, f: np.ndarray) -> np.ndarray:
    """(D_L f)_v = ( sum_w b(v,w)(f_v - f_w) + c(v) f_v ) / m(v)."""
    f = np.asarray(f, dtype=complex)
    out = dl.c * f
    for (i, j), val in dl.b.items():
        out[i] += val * (f[i] - f[j])
        out[j] += val * (f[j] - f[i])
    return out / dl.m


def quadratic_form(dl: DiscreteLaplacian, f: np.ndarray) -> float:
    """(D_L f, f)_m via the energy form
    1/2 sum b(v,w) |f_v - f_w|^2 + sum c(v) |f_v|^2."""
    f = np.asarray(f, dtype=complex)
    acc = sum(val * abs(f[i] - f[j]) ** 2 for (i, j), val in dl.b.items())
    return float(acc + np.sum(dl.c * np.abs(f) ** 2))


def unitary_equivalence_residual(dl: DiscreteLaplacian, lmin, trials=100,
                                 seed: int = 0, vectors=None) -> float:
    """max over trial vectors of ||U D_L x - Lmin U x|| / ||x||, U = diag(sqrt m)."""
    lmin = np.asarray(lmin.todense() if scipy.sparse.issparse(lmin) else lmin,
                      dtype=complex)
    n = dl.size
    u = np.sqrt(dl.m)
    if vectors is None:
        rng = np.random.default_rng(seed)
        vectors = []
        for _ in range(trials):
            x = np.zeros(n, dtype=complex)
            support = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
            x[support] = rng.normal(size=len(support)) + 1j * rng.normal(size=len(support))
            vectors.append(x)
    worst = 0.0
    for x in vectors:
        lhs = u * apply_discrete(dl, x)
        rhs = lmin @ (u * x)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / np.linalg.norm(x)))
    return worst


def discrete_to_json_dict(dl: DiscreteLaplacian) -> dict:
    """JSON-ready export: indices, measure, weights (as [v, w, value] triples
    in deterministic order) and potential."""
    triples = sorted(
        ([dl.labels[i], dl.labels[j], float(val)] for (i, j), val in dl.b.items()),
        key=lambda t: (t[0], t[1]),
    )
    return {
        "indices": list(dl.labels),
        "m": {lab: float(val) for lab, val in zip(dl.labels, dl.m)},
        "b": triples,
        "c": {lab: float(val) for lab, val in zip(dl.labels, dl.c)},
        "criteria_applicable": dl.criteria_applicable,
    }
