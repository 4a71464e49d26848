"""Mass-halving decomposition of [N], admissible covers, block sums and the
bounded/tail assembly of the maximal-function majorant."""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .grid import SampledFunction, lp_norm
from .orlicz import SplitPair, k_star, split_gamma_k
from .systems import SampledSystem, _coeff_array
from .variation import PrefixTable, prefix_table, v_r_field

EMPTY = None


@dataclass(eq=False)
class AdmissibleNode:
    """Interval I_{k,s} (1-based inclusive, or EMPTY) and its separator.

    The separator of I_{k,s} is the admissible point i_{k+1,s}: the single
    index between the two children I_{k+1,2s-1} and I_{k+1,2s}.
    """

    k: int
    s: int
    lo: int | None
    hi: int | None
    mass: float
    separator: int | None = None
    left: "AdmissibleNode | None" = None
    right: "AdmissibleNode | None" = None

    @property
    def empty(self) -> bool:
        return self.lo is None

    @property
    def interval(self):
        return EMPTY if self.empty else (self.lo, self.hi)

    def __len__(self):
        return 0 if self.empty else self.hi - self.lo + 1

    def contains(self, lo: int, hi: int) -> bool:
        return not self.empty and self.lo <= lo and hi <= self.hi


@dataclass(eq=False)
class AdmissibleTree:
    """All nodes of the decomposition keyed by (k, s), plus exact prefix masses."""

    root: AdmissibleNode
    mass: np.ndarray
    scale: float
    nodes: dict = field(default_factory=dict)
    by_separator: dict = field(default_factory=dict)
    _exact: list = field(default_factory=list, repr=False)

    @property
    def size(self) -> int:
        return self.mass.size

    def exact_mass(self, lo: int, hi: int) -> Fraction:
        """M([lo, hi]) in exact arithmetic on the unnormalised masses."""
        if hi < lo:
            return Fraction(0)
        return self._exact[hi] - self._exact[lo - 1]

    def interval_mass(self, lo: int, hi: int) -> float:
        """Normalised mass (total 1)."""
        return float(self.exact_mass(lo, hi) / self._exact[-1])

    def total_exact(self) -> Fraction:
        return self._exact[-1]

    def depth(self) -> int:
        return max(k for k, _ in self.nodes)

    def subtree(self, node: AdmissibleNode):
        stack = [node]
        while stack:
            nd = stack.pop()
            yield nd
            for child in (nd.right, nd.left):
                if child is not None:
                    stack.append(child)

    def find(self, lo: int, hi: int) -> AdmissibleNode | None:
        """The node whose interval is exactly [lo, hi], if admissible."""
        node = self.root
        while node is not None and not node.empty:
            if (node.lo, node.hi) == (lo, hi):
                return node
            if node.separator is None:
                return None
            if hi < node.separator:
                node = node.left
            elif lo > node.separator:
                node = node.right
            else:
                return None
        return None

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(tree_records(self), indent=indent)


def tree_records(tree: AdmissibleTree) -> dict:
    """JSON-ready dump: {"N", "scale", "nodes": [{k, s, lo, hi, mass, separator}]}.

    Nodes are sorted by (k, s); EMPTY intervals have lo = hi = separator = null.
    """
    rows = []
    for (k, s), nd in sorted(tree.nodes.items()):
        rows.append({"k": k, "s": s, "lo": nd.lo, "hi": nd.hi, "mass": nd.mass, "separator": nd.separator})
    return {"N": tree.size, "scale": tree.scale, "nodes": rows}


def build_tree(mass) -> AdmissibleTree:
    """Recursive mass halving of [N].

    The left child is the longest prefix with mass strictly below half the
    parent's, the right child the longest suffix with mass at most half;
    exactly one index is left between them.  Comparisons are exact
    (rational arithmetic on the input floats).
    """
    mass = np.asarray(mass, dtype=np.float64)
    if mass.ndim != 1 or mass.size == 0:
        raise ValueError("mass must be a non-empty 1-d sequence")
    if np.any(mass < 0) or not np.all(np.isfinite(mass)):
        raise ValueError("masses must be finite and non-negative")
    total = float(mass.sum())
    if total <= 0:
        raise ValueError("all-zero mass cannot be decomposed")
    n = mass.size
    exact = [Fraction(0)]
    for v in mass:
        exact.append(exact[-1] + Fraction(float(v)))
    grand = exact[-1]

    def make(k, s, lo, hi):
        if lo > hi:
            return AdmissibleNode(k, s, None, None, 0.0)
        return AdmissibleNode(k, s, lo, hi, float((exact[hi] - exact[lo - 1]) / grand))

    root = make(0, 1, 1, n)
    tree = AdmissibleTree(root=root, mass=mass / total, scale=total, _exact=exact)
    stack = [root]
    while stack:
        nd = stack.pop()
        tree.nodes[(nd.k, nd.s)] = nd
        if nd.empty:
            continue
        base = exact[nd.lo - 1]
        half = (exact[nd.hi] - base) / 2
        # largest a in [lo-1, hi-1] with M([lo, a]) < half; prefix masses are nondecreasing
        a = bisect.bisect_left(exact, base + half, lo=nd.lo - 1, hi=nd.hi) - 1
        a = max(a, nd.lo - 1)
        sep = a + 1
        nd.separator = sep
        tree.by_separator[sep] = nd
        nd.left = make(nd.k + 1, 2 * nd.s - 1, nd.lo, a)
        nd.right = make(nd.k + 1, 2 * nd.s, sep + 1, nd.hi)
        stack.append(nd.right)
        stack.append(nd.left)
    return tree


@dataclass(frozen=True)
class Cover:
    """J~ = left + {point} + right, an interval containing J."""

    left: AdmissibleNode | None
    point: int
    right: AdmissibleNode | None

    @property
    def lo(self) -> int:
        return self.left.lo if self.left is not None else self.point

    @property
    def hi(self) -> int:
        return self.right.hi if self.right is not None else self.point


def admissible_cover(J, tree: AdmissibleTree) -> Cover:
    """Admissible J~_l, point i_J, admissible J~_r with J inside J~ and M(J~) <= 2 M(J).

    Descend to the deepest node whose separator lies in J; take the
    smallest right-spine descendant of its left child covering the left part
    of J, and the smallest left-spine descendant of its right child covering
    the right part.
    """
    lo, hi = J
    if hi < lo:
        raise ValueError("cover needs a non-empty interval")
    if lo < 1 or hi > tree.size:
        raise ValueError(f"interval {J} is not inside [1, {tree.size}]")
    node = tree.root
    while not lo <= node.separator <= hi:
        node = node.left if hi < node.separator else node.right
    i = node.separator

    left = None
    if lo < i:
        cand = node.left
        while cand.right is not None and not cand.right.empty and cand.right.lo <= lo:
            cand = cand.right
        left = cand
    right = None
    if hi > i:
        cand = node.right
        while cand.left is not None and not cand.left.empty and cand.left.hi >= hi:
            cand = cand.left
        right = cand
    return Cover(left, i, right)


def block_sum(J, coeffs, system: SampledSystem) -> SampledFunction:
    """S_J = sum_{n in J} a_n phi_n; an EMPTY or reversed J gives zero."""
    a = _coeff_array(coeffs, system.size)
    if J is EMPTY or J[1] < J[0]:
        return SampledFunction(np.zeros(len(system.grid)), system.grid)
    lo, hi = J
    return SampledFunction(a[lo - 1:hi] @ system.values[lo - 1:hi], system.grid)


def tilde_s(J, prefix: PrefixTable) -> SampledFunction:
    """max over subintervals I of J of |S_I|, i.e. range of the partial sums over J."""
    lo, hi = J
    if hi < lo:
        raise ValueError("tilde_s needs a non-empty interval")
    window = prefix.P[lo - 1:hi + 1]
    return SampledFunction(window.max(axis=0) - window.min(axis=0), prefix.system.grid)


@dataclass(eq=False)
class BlockSplits:
    """SplitPairs for admissible intervals, keyed (k, s), and for admissible
    points, keyed (k, s) of the point i_{k,s} (separator of node (k-1, s))."""

    intervals: dict
    points: dict
    grid: object


def _zero_pair(grid):
    z = SampledFunction(np.zeros(len(grid)), grid)
    return SplitPair(z, z, 0.0, 1.0)


def blockwise_split(tree: AdmissibleTree, coeffs, system: SampledSystem,
                    prefix: PrefixTable | None = None) -> BlockSplits:
    """Split every non-empty interval and every point of the tree.

    Intervals use K = k_star(N, nonzeros in the block); points use k_star(N, 1).
    Zero-mass blocks get the zero pair.
    """
    a = _coeff_array(coeffs, system.size)
    if tree.size != system.size:
        raise ValueError("tree and system sizes differ")
    if prefix is None:
        prefix = prefix_table(a, system)
    N = system.size
    nnz = np.concatenate(([0], np.cumsum(a != 0)))
    zero = _zero_pair(system.grid)
    k_point = k_star(N, 1)
    intervals, points = {}, {}
    for (k, s), nd in tree.nodes.items():
        if nd.empty:
            continue
        m = int(nnz[nd.hi] - nnz[nd.lo - 1])
        if m == 0:
            intervals[(k, s)] = zero
        else:
            intervals[(k, s)] = split_gamma_k(SampledFunction(prefix.block(nd.lo, nd.hi), system.grid), k_star(N, m))
        i = nd.separator
        if a[i - 1] == 0:
            points[(k + 1, s)] = zero
        else:
            points[(k + 1, s)] = split_gamma_k(SampledFunction(prefix.block(i, i), system.grid), k_point)
    return BlockSplits(intervals, points, system.grid)


def assemble_tilde(splits: BlockSplits, tree: AdmissibleTree, J=None, r: float = 3.0,
                   include_root: bool = True):
    """Level-wise l^r assembly of the bounded and tail parts over the subtree of J.

    G~_J = sum_k (sum_s |G_{k,s}|^r)^(1/r) + sum_k (sum_s |G_{i_{k,s}}|^r)^(1/r), k >= level(J);
    E~_J likewise.  J must be admissible (default: [N]).  With
    ``include_root=False`` the block J itself is left out; the majorant
    bound still holds because J splits into its children and separator.
    """
    if not r > 2:
        raise ValueError(f"assembly exponent must exceed 2, got {r}")
    node = tree.root if J is None else tree.find(*J)
    if node is None:
        raise ValueError(f"{J} is not an admissible interval")
    X = len(splits.grid)
    g_levels, e_levels = {}, {}
    gp_levels, ep_levels = {}, {}

    def acc(store, level, values):
        if level in store:
            store[level] += np.abs(values) ** r
        else:
            store[level] = np.abs(values) ** r

    for nd in tree.subtree(node):
        if nd.empty:
            continue
        pair = splits.intervals[(nd.k, nd.s)]
        if pair.gamma > 0 and (include_root or nd is not node):
            acc(g_levels, nd.k, pair.g_part.values)
            acc(e_levels, nd.k, pair.e_part.values)
        pt = splits.points[(nd.k + 1, nd.s)]
        if pt.gamma > 0:
            acc(gp_levels, nd.k + 1, pt.g_part.values)
            acc(ep_levels, nd.k + 1, pt.e_part.values)

    def total(store):
        out = np.zeros(X)
        for level in sorted(store):
            out += store[level] ** (1.0 / r)
        return SampledFunction(out, splits.grid)

    g_tilde = SampledFunction(total(g_levels).values + total(gp_levels).values, splits.grid)
    e_tilde = SampledFunction(total(e_levels).values + total(ep_levels).values, splits.grid)
    return g_tilde, e_tilde


def majorant_audit(J, prefix: PrefixTable, g_tilde: SampledFunction, e_tilde: SampledFunction) -> float:
    """sup_x S~_J(x) / (G~_J(x) + E~_J(x)), with 0/0 read as 0."""
    s = tilde_s(J, prefix).values
    denom = g_tilde.values + e_tilde.values
    ratio = np.zeros_like(s)
    pos = denom > 0
    ratio[pos] = s[pos] / denom[pos]
    ratio[(~pos) & (s > 0)] = np.inf
    return float(ratio.max())


@dataclass(frozen=True)
class V2Audit:
    lhs: float
    rhs_terms: tuple
    ratio: float


def v2_audit(coeffs, system: SampledSystem, c_thresh: float = 10.0, include_loglog: bool = True,
             threads: int | None = None) -> V2Audit:
    """Compare |V^2 f|^2 with the bad-set, point and ln ln N terms pointwise.

    f is normalised to ||a||_2 = 1.  ``lhs`` is the integral of |V^2 f|^2;
    ``rhs_terms`` are the integrals of the three right-hand terms; ``ratio``
    is the pointwise sup of lhs over the summed right-hand side.
    """
    a = np.array(_coeff_array(coeffs, system.size), dtype=np.float64)
    N = system.size
    if N < 16:
        raise ValueError(f"v2_audit needs N >= 16, got {N}")
    norm = np.linalg.norm(a)
    if norm == 0:
        raise ValueError("zero coefficient vector")
    a = a / norm
    loglog = math.log(math.log(N))
    prefix = prefix_table(a, system)
    tree = build_tree(a * a)
    w = system.grid.weights
    lhs = v_r_field(a, system, 2.0, threads=threads, prefix=prefix).pointwise.values ** 2
    bad = np.zeros(len(system.grid))
    pts = np.zeros(len(system.grid))
    for nd in tree.nodes.values():
        if nd.empty:
            continue
        if nd.mass > 0:
            st = tilde_s((nd.lo, nd.hi), prefix).values
            bad += np.where(st * st >= c_thresh * loglog * nd.mass, st * st, 0.0)
        pts += prefix.block(nd.separator, nd.separator) ** 2
    rhs = bad + pts + (loglog if include_loglog else 0.0)
    ratio = np.zeros_like(lhs)
    pos = rhs > 0
    ratio[pos] = lhs[pos] / rhs[pos]
    ratio[(~pos) & (lhs > 0)] = np.inf
    return V2Audit(
        lhs=float(w @ lhs),
        rhs_terms=(float(w @ bad), float(w @ pts), loglog if include_loglog else 0.0),
        ratio=float(ratio.max()),
    )


def e_tilde_ratio(e_tilde: SampledFunction, f_norm: float) -> float:
    return lp_norm(e_tilde, 2) / f_norm if f_norm > 0 else 0.0
