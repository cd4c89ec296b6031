"""Young tableaux and the row/column symmetrizers S and A.

A tableau here is a partition shape plus a box-numbering convention:
"horizontal" numbers the boxes row by row, "vertical" column by column.
The same shape with the two numberings gives genuinely different operators
on N-linear forms, so the numbering is part of the value and is never
reinterpreted silently.

S symmetrizes the variables sitting in each row (an un-normalized sum over
all products of row permutations), A antisymmetrizes each column with signs.
Both are represented as elements of the group algebra of S_N (a dict from
permutation tuples to integers), which keeps identities such as
ASAS = lambda * AS decidable exactly and independently of the dimension of
the underlying space.

All values are immutable and every operation is a pure function, safe for
concurrent use.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from projdyn.exactlin import FormatError, SparseEchelon, Tensor, perm_sign


class NumberingError(ValueError):
    """A tableau with the wrong numbering was passed to a numbering-specific
    operation (e.g. an Im AS query on a horizontally numbered tableau)."""


def conjugate_partition(lengths):
    lengths = list(lengths)
    if not lengths:
        return ()
    out = []
    for c in range(lengths[0]):
        out.append(sum(1 for ln in lengths if ln > c))
    return tuple(out)


class YoungTableau:
    """Partition shape with a box numbering ("horizontal" or "vertical")."""

    __slots__ = ("rows", "numbering")

    def __init__(self, rows, numbering="horizontal"):
        rows = tuple(int(r) for r in rows)
        if not rows or any(r < 1 for r in rows):
            raise ValueError("row lengths must be positive")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ValueError("row lengths must be weakly decreasing")
        if numbering not in ("horizontal", "vertical"):
            raise ValueError("numbering must be 'horizontal' or 'vertical'")
        self.rows = rows
        self.numbering = numbering

    @classmethod
    def from_columns(cls, columns, numbering="vertical"):
        """Build from column lengths (the bracket notation [j1,...,jc])."""
        return cls(conjugate_partition(columns), numbering)

    @property
    def columns(self):
        return conjugate_partition(self.rows)

    @property
    def size(self) -> int:
        return sum(self.rows)

    def box_position(self, row, col) -> int:
        """0-based variable slot of the box at (row, col)."""
        if self.numbering == "horizontal":
            return sum(self.rows[:row]) + col
        cols = self.columns
        return sum(cols[:col]) + row

    def row_slots(self):
        """Variable slots per row."""
        return [
            [self.box_position(r, c) for c in range(self.rows[r])]
            for r in range(len(self.rows))
        ]

    def column_slots(self):
        """Variable slots per column."""
        cols = self.columns
        return [
            [self.box_position(r, c) for r in range(cols[c])]
            for c in range(len(cols))
        ]

    def __eq__(self, other):
        if not isinstance(other, YoungTableau):
            return NotImplemented
        return self.rows == other.rows and self.numbering == other.numbering

    def __hash__(self):
        return hash((self.rows, self.numbering))

    def __repr__(self):
        if self.numbering == "horizontal":
            return f"YoungTableau({list(self.rows)})"
        return f"YoungTableau[{list(self.columns)}]"

    def to_json(self):
        return {"rows": list(self.rows), "numbering": self.numbering}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["rows"], obj["numbering"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad tableau: {exc}") from exc


# ---------------------------------------------------------------------------
# group algebra machinery

def _group_from_blocks(blocks, n, signed):
    """All products of per-block permutations of the slots, as (perm, sign).

    perm is a tuple with perm[k] = source slot of variable k, so that the
    associated operator is phi -> phi(x_{perm(0)}, ..., x_{perm(n-1)}).
    """
    out = [(tuple(range(n)), 1)]
    for block in blocks:
        if len(block) < 2:
            continue
        grown = []
        for base, bsign in out:
            for perm in itertools.permutations(block):
                sigma = list(base)
                for target, source in zip(block, perm):
                    sigma[target] = base[source]
                if signed:
                    s = perm_sign(tuple(block.index(p) for p in perm))
                else:
                    s = 1
                grown.append((tuple(sigma), bsign * s))
        out = grown
    return out


def symmetrizer_element(tableau: YoungTableau) -> dict:
    """S as a group-algebra element {perm: coefficient}."""
    n = tableau.size
    elem = {}
    for perm, _ in _group_from_blocks(tableau.row_slots(), n, signed=False):
        elem[perm] = elem.get(perm, 0) + 1
    return elem


def antisymmetrizer_element(tableau: YoungTableau) -> dict:
    """A as a group-algebra element {perm: signed coefficient}."""
    n = tableau.size
    elem = {}
    for perm, sign in _group_from_blocks(tableau.column_slots(), n, signed=True):
        elem[perm] = elem.get(perm, 0) + sign
    return elem


def compose_elements(g: dict, h: dict) -> dict:
    """Convolution with L_g . L_h = L_{g*h}: (g*h) applies h first."""
    out = {}
    get_out = out.get
    for sigma, cg in g.items():
        getter = sigma.__getitem__
        for tau, ch in h.items():
            comp = tuple(map(getter, tau))
            s = get_out(comp, 0) + cg * ch
            if s:
                out[comp] = s
            else:
                del out[comp]
    return out


def scale_element(g: dict, c) -> dict:
    return {perm: coef * c for perm, coef in g.items()} if c else {}


def apply_element(g: dict, t: Tensor) -> Tensor:
    """Act on a tensor: (L_sigma phi)[idx] = phi[idx o sigma]."""
    # entry jdx of phi lands at idx = jdx o sigma^-1; precompute the inverses
    inverses = []
    for sigma, coef in g.items():
        inv = [0] * len(sigma)
        for k, pos in enumerate(sigma):
            inv[pos] = k
        inverses.append((tuple(inv), coef))
    out = {}
    get_out = out.get
    zero = Fraction(0)
    for jdx, val in t.entries.items():
        getter = jdx.__getitem__
        for inv, coef in inverses:
            key = tuple(map(getter, inv))
            s = get_out(key, zero) + val * coef
            if s:
                out[key] = s
            else:
                del out[key]
    return Tensor._raw(t.dim, t.order, out)


def _check_order(tableau, t):
    if t.order != tableau.size:
        raise ValueError(f"tensor order {t.order} != tableau size {tableau.size}")


def symmetrize_S(tableau: YoungTableau, t: Tensor) -> Tensor:
    """Un-normalized sum over all products of row-wise permutations."""
    _check_order(tableau, t)
    return apply_element(symmetrizer_element(tableau), t)


def antisymmetrize_A(tableau: YoungTableau, t: Tensor) -> Tensor:
    """Signed sum over all products of column-wise permutations."""
    _check_order(tableau, t)
    return apply_element(antisymmetrizer_element(tableau), t)


def young_scalar(tableau: YoungTableau) -> int:
    """The positive integer lambda with ASAS = lambda AS and SASA = lambda SA.

    Computed by exact ratio in the group algebra of S_N; equality there gives
    equality of the induced operators on every basis tensor of every
    dimension.  An inconsistent ratio signals an implementation bug.
    """
    S = symmetrizer_element(tableau)
    A = antisymmetrizer_element(tableau)
    AS = compose_elements(A, S)
    if not AS:
        raise ValueError("AS is the zero element; cannot extract the scalar")
    ASAS = compose_elements(AS, AS)
    probe = next(iter(AS))
    if probe not in ASAS:
        raise ArithmeticError("ASAS not proportional to AS")
    lam = Fraction(ASAS[probe], AS[probe])
    if scale_element(AS, lam) != ASAS:
        raise ArithmeticError("inconsistent ratio: ASAS != lambda AS")
    SA = compose_elements(S, A)
    if scale_element(SA, lam) != compose_elements(SA, SA):
        raise ArithmeticError("SASA != lambda SA with the same lambda")
    if lam.denominator != 1 or lam <= 0:
        raise ArithmeticError(f"scalar {lam} is not a positive integer")
    return int(lam)


# ---------------------------------------------------------------------------
# membership characterizations

def check_imSA(tableau: YoungTableau, t: Tensor) -> bool:
    """Exact membership test for Im SA (horizontally numbered tableau).

    Checks (i) symmetry under every transposition inside each row and
    (ii) one identity per consecutive row pair:
    phi + sum over boxes p of row k of T(p, first box of row k+1) phi = 0.
    """
    if tableau.numbering != "horizontal":
        raise NumberingError("Im SA membership is a horizontal-numbering query")
    _check_order(tableau, t)
    rows = tableau.row_slots()
    for slots in rows:
        for m, n in itertools.combinations(slots, 2):
            if t.transpose_slots(m, n) != t:
                return False
    for k in range(len(rows) - 1):
        head_next = rows[k + 1][0]
        total = t
        for p in rows[k]:
            total = total + t.transpose_slots(p, head_next)
        if not total.is_zero():
            return False
    return True


def check_imAS(tableau: YoungTableau, t: Tensor) -> bool:
    """Exact membership test for Im AS (vertically numbered tableau).

    Checks (i) antisymmetry under every transposition inside each column and
    (ii) per consecutive column pair:
    phi - sum over boxes p of column k of T(p, top of column k+1) phi = 0.
    """
    if tableau.numbering != "vertical":
        raise NumberingError("Im AS membership is a vertical-numbering query")
    _check_order(tableau, t)
    cols = tableau.column_slots()
    for slots in cols:
        for m, n in itertools.combinations(slots, 2):
            if t.transpose_slots(m, n) != t.scale(-1):
                return False
    for k in range(len(cols) - 1):
        top_next = cols[k + 1][0]
        total = t
        for p in cols[k]:
            total = total - t.transpose_slots(p, top_next)
        if not total.is_zero():
            return False
    return True


def bianchi_sum_AS(tableau: YoungTableau, t: Tensor, k: int, j: int) -> Tensor:
    """phi - sum_p T(p, top of column j) phi over boxes p of column k (k < j).

    Vanishes on Im AS for every non-adjacent column pair as well (the
    transitivity of the column identities).
    """
    if tableau.numbering != "vertical":
        raise NumberingError("column identities need a vertical numbering")
    cols = tableau.column_slots()
    top_j = cols[j][0]
    total = t
    for p in cols[k]:
        total = total - t.transpose_slots(p, top_j)
    return total


def contract_top_of_last_columns(tableau: YoungTableau, t: Tensor, p_vec, l: int):
    """Plug the vector p into the top boxes of the last l columns.

    Returns (reduced tableau, reduced tensor); the reduced tableau has those
    column lengths decreased by one (columns shrinking to zero disappear,
    and the reduced tensor is returned with a None tableau in that case).
    """
    if tableau.numbering != "vertical":
        raise NumberingError("column contraction needs a vertical numbering")
    _check_order(tableau, t)
    cols = list(tableau.columns)
    c = len(cols)
    if not 1 <= l <= c:
        raise ValueError("l out of range")
    col_slots = tableau.column_slots()
    slots = [col_slots[c - l + i][0] for i in range(l)]
    reduced = t.contract_slots({s: p_vec for s in slots})
    new_cols = [j - 1 if i >= c - l else j for i, j in enumerate(cols)]
    new_cols = [j for j in new_cols if j > 0]
    if not new_cols:
        return None, reduced
    new_cols.sort(reverse=True)
    return YoungTableau.from_columns(new_cols), reduced


class SymmetrizedTensor:
    """A tensor tagged with the symmetry class it is claimed to inhabit.

    Membership is checked on construction: "im_SA" demands the row
    symmetries plus the row identities (horizontal numbering), "im_AS" the
    column antisymmetries plus the column identities (vertical numbering);
    "unconstrained" attaches no claim.
    """

    __slots__ = ("tableau", "tensor", "symmetry_class")

    def __init__(self, tableau: YoungTableau, tensor: Tensor, symmetry_class="unconstrained"):
        if symmetry_class not in ("im_SA", "im_AS", "unconstrained"):
            raise ValueError("symmetry_class must be 'im_SA', 'im_AS' or 'unconstrained'")
        if tensor.order != tableau.size:
            raise ValueError("tensor order does not match the tableau")
        if symmetry_class == "im_SA" and not check_imSA(tableau, tensor):
            raise ValueError("tensor is not in the image of SA for this tableau")
        if symmetry_class == "im_AS" and not check_imAS(tableau, tensor):
            raise ValueError("tensor is not in the image of AS for this tableau")
        self.tableau = tableau
        self.tensor = tensor
        self.symmetry_class = symmetry_class

    def __repr__(self):
        return f"SymmetrizedTensor({self.tableau!r}, class={self.symmetry_class!r})"


# ---------------------------------------------------------------------------
# bases of the symmetry classes

def _row_canonical_indices(tableau: YoungTableau, dim: int):
    """One index tuple per orbit of the row group (sorted inside each row).

    AS(e_idx) is invariant under permuting idx inside rows, so these orbits
    are enough to span Im AS.
    """
    rows = tableau.row_slots()
    n = tableau.size
    per_row = [
        list(itertools.combinations_with_replacement(range(dim), len(slots)))
        for slots in rows
    ]
    for combo in itertools.product(*per_row):
        idx = [0] * n
        for slots, values in zip(rows, combo):
            for s, v in zip(slots, values):
                idx[s] = v
        yield tuple(idx)


def imAS_basis(tableau: YoungTableau, dim: int):
    """Exact basis of Im AS over a dim-dimensional space.

    Applies AS to one representative basis tensor per row-group orbit and
    extracts a column-space basis by sparse echelon reduction.
    """
    A = antisymmetrizer_element(tableau)
    S = symmetrizer_element(tableau)
    AS = compose_elements(A, S)
    echelon = SparseEchelon()
    basis = []
    for idx in _row_canonical_indices(tableau, dim):
        t = apply_element(AS, Tensor(dim, tableau.size, {idx: Fraction(1)}))
        if t.is_zero():
            continue
        if echelon.insert(t.entries):
            basis.append(t)
    return basis


def imSA_basis(tableau: YoungTableau, dim: int):
    """Exact basis of Im SA (column-canonical representatives, SA applied)."""
    A = antisymmetrizer_element(tableau)
    S = symmetrizer_element(tableau)
    SA = compose_elements(S, A)
    echelon = SparseEchelon()
    basis = []
    cols = tableau.column_slots()
    n = tableau.size
    per_col = [list(itertools.combinations(range(dim), len(slots))) for slots in cols]
    for combo in itertools.product(*per_col):
        idx = [0] * n
        for slots, values in zip(cols, combo):
            for s, v in zip(slots, values):
                idx[s] = v
        t = apply_element(SA, Tensor(dim, n, {tuple(idx): Fraction(1)}))
        if t.is_zero():
            continue
        if echelon.insert(t.entries):
            basis.append(t)
    return basis


def vanishing_diagonal_test(tableau: YoungTableau, t: Tensor) -> bool:
    """True iff the diagonal evaluation phi(x1..xj1; x1..xj2; ...) is the zero
    polynomial, decided exactly on coefficients.

    For t in Im AS a True answer forces t = 0, so this doubles as a zero test
    through the diagonal.
    """
    if not check_imAS(tableau, t):
        raise ValueError("input must lie in Im AS for the vertical tableau")
    cols = tableau.column_slots()
    depth_of_slot = {}
    for slots in cols:
        for depth, s in enumerate(slots):
            depth_of_slot[s] = depth
    coeffs = {}
    for idx, val in t.entries.items():
        mono = {}
        for slot, i in enumerate(idx):
            pair = (depth_of_slot[slot], i)
            mono[pair] = mono.get(pair, 0) + 1
        key = tuple(sorted(mono.items()))
        s = coeffs.get(key, Fraction(0)) + val
        if s:
            coeffs[key] = s
        else:
            del coeffs[key]
    return not coeffs


def example_pair_exchange_decompose(phi: Tensor):
    """Split an order-4 form with phi(x,y,z,t) = phi(z,t,x,y) and antisymmetry
    in (1,2) and (3,4) into (phi_Y, psi) with phi = phi_Y + psi/3.

    psi(x,y,z,t) = phi(x,y,z,t) + phi(y,z,x,t) + phi(z,x,y,t) is fully
    antisymmetric and phi_Y lies in Im AS of the vertical 2x2 tableau; when
    phi(x,y,x,y) vanishes identically, phi_Y = 0 and phi is itself fully
    antisymmetric (up to the factor 3).
    """
    if phi.order != 4:
        raise ValueError("order-4 form required")
    if phi.permute((2, 3, 0, 1)) != phi:
        raise ValueError("pair-exchange symmetry phi(x,y,z,t)=phi(z,t,x,y) fails")
    if phi.transpose_slots(0, 1) != -phi or phi.transpose_slots(2, 3) != -phi:
        raise ValueError("pair antisymmetry fails")
    psi = phi + phi.permute((1, 2, 0, 3)) + phi.permute((2, 0, 1, 3))
    phi_y = phi - psi.scale(Fraction(1, 3))
    # defensive: the split must land where the decomposition says
    for m, n in itertools.combinations(range(4), 2):
        if psi.transpose_slots(m, n) != -psi:
            raise ArithmeticError("cyclic sum failed to be fully antisymmetric")
    if not check_imAS(YoungTableau.from_columns([2, 2]), phi_y):
        raise ArithmeticError("projected part is not in Im AS")
    return phi_y, psi
