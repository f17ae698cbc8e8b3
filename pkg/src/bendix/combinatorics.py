"""Exact integer counts that must agree for integer side lengths.

Four independent computations of the multiplicity of the determinant power
``det^Lambda`` in ``Sym^{r_1} (x) ... (x) Sym^{r_n}`` of U(m+1):

* integer points of the pattern polytope, enumerated bottom-up;
* the Kostka number K_{Lambda^{m+1}, r}, by filling tableaux box by box;
* iterated Pieri rule, tracking a multiset of highest weights;
* U(n) Gel'fand-Tsetlin patterns of the right weight, enumerated top-down.

Everything here is integer arithmetic.
"""

from collections import Counter
from dataclasses import asdict, dataclass, field

from .errors import InvalidInput, SizeLimit

DEFAULT_NODE_CAP = 10**7


def _integer_lengths(r):
    out = []
    for x in r:
        if int(x) != x or x <= 0:
            raise InvalidInput("side lengths must be positive integers", r=[str(v) for v in r])
        out.append(int(x))
    return out


def _level(r, m):
    """Lambda as an int, or None if it is not integral."""
    rho = sum(r)
    return rho // (m + 1) if rho % (m + 1) == 0 else None


@dataclass
class LatticeCount:
    count: int
    integral: bool
    patterns: list = field(default_factory=list)


def count_lattice_points(m, r, keep=False, node_cap=DEFAULT_NODE_CAP) -> LatticeCount:
    """Integer patterns with side lengths r, rows built from the bottom.

    Each row has length m+1.  Row 0 is (r_1, 0, ..., 0); row i interlaces
    the row below it, its entries are at most Lambda and it sums to
    r_1 + ... + r_{i+1}.  Non-integral Lambda gives 0 with ``integral``
    False.
    """
    r = _integer_lengths(r)
    n = len(r)
    Lam = _level(r, m)
    if Lam is None:
        return LatticeCount(0, False)
    prefix = [sum(r[: i + 1]) for i in range(n)]
    found = []
    nodes = 0

    def rows_above(prev, total):
        """Integer rows interlacing ``prev`` from above with the given sum."""
        d = len(prev)
        # ceilings: nu_1 <= Lambda, nu_j <= prev[j-1]
        hi = [Lam] + list(prev[:-1])
        lo = list(prev)
        suffix_hi = [0] * (d + 1)
        suffix_lo = [0] * (d + 1)
        for j in range(d - 1, -1, -1):
            suffix_hi[j] = suffix_hi[j + 1] + hi[j]
            suffix_lo[j] = suffix_lo[j + 1] + lo[j]
        row = []

        def fill(j, remaining):
            if j == d:
                if remaining == 0:
                    yield tuple(row)
                return
            a = max(lo[j], remaining - suffix_hi[j + 1])
            b = min(hi[j], remaining - suffix_lo[j + 1])
            for v in range(b, a - 1, -1):
                row.append(v)
                yield from fill(j + 1, remaining - v)
                row.pop()

        if hi[0] < lo[0]:
            return
        yield from fill(0, total)

    count = 0
    base = tuple([r[0]] + [0] * m)
    if r[0] > Lam:
        return LatticeCount(0, True)

    def walk(i, rows):
        nonlocal count, nodes
        nodes += 1
        if nodes > node_cap:
            raise SizeLimit(f"lattice enumeration exceeded {node_cap} nodes")
        if i == n:
            count += 1
            if keep:
                found.append([list(x) for x in rows])
            return
        for row in rows_above(rows[-1], prefix[i]):
            rows.append(row)
            walk(i + 1, rows)
            rows.pop()

    walk(1, [base])
    return LatticeCount(count, True, found)


def kostka(shape, weight) -> int:
    """Number of semistandard tableaux of the given shape and content."""
    shape = [int(x) for x in shape if x]
    weight = [int(x) for x in weight]
    if any(x < 0 for x in weight) or any(shape[i] < shape[i + 1] for i in range(len(shape) - 1)):
        raise InvalidInput("shape must be a partition and weights non-negative")
    if sum(shape) != sum(weight):
        return 0
    boxes = [(a, b) for a, length in enumerate(shape) for b in range(length)]
    grid = [[0] * length for length in shape]
    left = list(weight)
    letters = len(weight)
    rows = len(shape)

    def fits(k):
        """Necessary condition for completing the tableau from box k on.

        Every empty box gets a lower bound on its letter from the filled box
        above it (columns strictly increase) and from its left neighbour
        (rows weakly increase).  The unused letters <= u must fit into the
        empty boxes whose bound is <= u, for every u.
        """
        a, b = boxes[k] if k < len(boxes) else (rows, 0)
        room = [0] * (letters + 2)
        for x in range(a, rows):
            prev = grid[a][b - 1] if (x == a and b > 0) else 1
            for y in range(b if x == a else 0, shape[x]):
                top = x - 1
                while top >= 0 and grid[top][y] == 0:
                    top -= 1
                above = grid[top][y] + (x - top) if top >= 0 else x + 1
                prev = max(prev, above)
                if prev > letters:
                    return False
                room[prev] += 1
        pending = 0
        space = 0
        for u in range(1, letters + 1):
            pending += left[u - 1]
            space += room[u]
            if pending > space:
                return False
        return True

    def place(k):
        if k == len(boxes):
            return 1
        a, b = boxes[k]
        low = 1
        if b > 0:
            low = max(low, grid[a][b - 1])
        if a > 0:
            low = max(low, grid[a - 1][b] + 1)
        total = 0
        for v in range(low, letters + 1):
            if left[v - 1] == 0:
                continue
            left[v - 1] -= 1
            grid[a][b] = v
            if fits(k + 1):
                total += place(k + 1)
            left[v - 1] += 1
        grid[a][b] = 0
        return total

    return place(0)


def pieri_tensor(hw, k):
    """Highest weights in V(hw) (x) Sym^k, for U(len(hw)).

    These are the nu with nu_1 >= hw_1 >= nu_2 >= ... >= nu_d >= hw_d and
    |nu| = |hw| + k; each occurs once.
    """
    hw = tuple(int(x) for x in hw)
    if any(hw[i] < hw[i + 1] for i in range(len(hw) - 1)) or (hw and hw[-1] < 0):
        raise InvalidInput("highest weight must be non-increasing and non-negative", hw=list(hw))
    if k < 0:
        raise InvalidInput("k must be non-negative")
    d = len(hw)
    out = []
    nu = []

    def fill(j, remaining):
        if j == d:
            if remaining == 0:
                out.append(tuple(nu))
            return
        lo = hw[j]
        hi = hw[j] + remaining if j == 0 else min(hw[j - 1], hw[j] + remaining)
        for v in range(hi, lo - 1, -1):
            nu.append(v)
            fill(j + 1, remaining - (v - lo))
            nu.pop()

    fill(0, k)
    return out


def multiplicity_det_power(m, r) -> int:
    """Multiplicity of (Lambda, ..., Lambda) in Sym^{r_1} (x) ... (x) Sym^{r_n}, via Pieri."""
    r = _integer_lengths(r)
    Lam = _level(r, m)
    if Lam is None:
        return 0
    weights = Counter({(0,) * (m + 1): 1})
    for k in r:
        nxt = Counter()
        for hw, mult in weights.items():
            for nu in pieri_tensor(hw, k):
                if nu[0] <= Lam:
                    nxt[nu] += mult
        weights = nxt
    return weights[(Lam,) * (m + 1)]


def gt_weight_multiplicity(m, r) -> int:
    """Dimension of the weight-r space of the U(n) irreducible with highest weight (Lambda^{m+1}, 0^{n-m-1}).

    Counts full Gel'fand-Tsetlin patterns from the top row down; row k has
    k entries and sums to r_1 + ... + r_k.
    """
    r = _integer_lengths(r)
    n = len(r)
    Lam = _level(r, m)
    if Lam is None or n < m + 1:
        return 0
    top = tuple([Lam] * (m + 1) + [0] * (n - m - 1))
    prefix = [0]
    for x in r:
        prefix.append(prefix[-1] + x)

    def below(row, total):
        # rows of length len(row)-1 with row[j] >= x_j >= row[j+1]
        d = len(row) - 1
        x = []

        def fill(j, remaining):
            if j == d:
                if remaining == 0:
                    yield tuple(x)
                return
            floor = sum(row[j + 2 : d + 1])
            ceil = sum(row[j + 1 : d])
            for v in range(row[j + 1], row[j] + 1):
                rest = remaining - v
                if floor <= rest <= ceil:
                    x.append(v)
                    yield from fill(j + 1, rest)
                    x.pop()

        yield from fill(0, total)

    def walk(row):
        k = len(row)
        if k == 1:
            return 1
        return sum(walk(nxt) for nxt in below(row, prefix[k - 1]))

    if sum(top) != prefix[n]:
        return 0
    return walk(top)


@dataclass
class MultiplicityReport:
    m: int
    r: list
    integral: bool
    lattice_count: int
    kostka: int
    pieri_multiplicity: int
    gt_weight_multiplicity: int

    @property
    def all_equal(self):
        return (
            self.lattice_count == self.kostka == self.pieri_multiplicity == self.gt_weight_multiplicity
        )

    def to_json(self):
        out = asdict(self)
        out["all_equal"] = self.all_equal
        return out


def multiplicity_report(m, r) -> MultiplicityReport:
    r = _integer_lengths(r)
    lattice = count_lattice_points(m, r)
    Lam = _level(r, m)
    k = kostka([Lam] * (m + 1), r) if Lam is not None else 0
    return MultiplicityReport(
        m=m,
        r=r,
        integral=lattice.integral,
        lattice_count=lattice.count,
        kostka=k,
        pieri_multiplicity=multiplicity_det_power(m, r),
        gt_weight_multiplicity=gt_weight_multiplicity(m, r),
    )
