"""Test-only code constructions."""

from mpqc.codes import CssCode
from mpqc.gf2 import BitMatrix


def shor25() -> CssCode:
    """Distance-5 Shor code on a 5x5 grid, qubit (i, j) at index 5i + j."""
    def q(i, j):
        return 1 << (5 * i + j)

    row = [sum(q(i, j) for j in range(5)) for i in range(5)]
    hx = [row[i] | row[i + 1] for i in range(4)]
    hz = [q(i, j) | q(i, j + 1) for i in range(5) for j in range(4)]
    lx = [row[0]]
    lz = [sum(q(i, 0) for i in range(5))]
    code = CssCode(25, 1, BitMatrix(tuple(hx), 25), BitMatrix(tuple(hz), 25),
                   BitMatrix(tuple(lx), 25), BitMatrix(tuple(lz), 25), None, 5)
    code.check_invariants()
    return code


def single_node_adversaries(node: int) -> list[str]:
    """Every shipped strategy at every phase point, corrupting one 1-based node."""
    specs = [f"pauli-inject:nodes={node};phase={ph};pauli={p};block={blk}"
             for ph in ("sharing", "ancilla", "computation", "reconstruction")
             for p, blk in (("X", 1), ("Z", 2), ("Y", 3))]
    specs += [f"pauli-inject:nodes={node};phase={ph};pauli={p};level=1"
              for ph in ("sharing", "ancilla") for p in "XZ"]
    specs += [f"liar:nodes={node};rounds=all", f"liar:nodes={node};rounds=alternate",
              f"liar:nodes={node};rounds=all;invocation=all",
              f"forge-measure:nodes={node}", f"forge-measure:nodes={node};blocks=2",
              f"chosen-input:nodes={node};state=-i",
              f"chosen-input:nodes={node};state=+i+liar:nodes={node};rounds=all"]
    return specs


def random_inputs(n: int, rng) -> list[str]:
    labels = ["0", "1", "+", "-", "+i", "-i"]
    return [labels[int(i)] for i in rng.integers(0, 6, size=n)]
