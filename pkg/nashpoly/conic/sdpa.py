"""
SDPA sparse (".dat-s") export and import of moment relaxations.

Encoding:
  - SDPA variables are the moments y_alpha with alpha != 0 (mDIM = m - 1);
    the normalization y_0 = 1 is folded into the constant matrix, so every
    PSD block B(y) = B_0 + sum_a y_a B_a becomes F_a = B_a and F_0 = -B_0.
  - The objective constant c_0 is dropped and recorded in a comment line.
  - The remaining equalities e^T y = r become a final diagonal block
    (negative size) holding the pair +-(sum_a e_a y_a - (r - e_0)) >= 0.
  - Entries are listed for i <= j, sorted by (matrix, block, i, j), with
    17 significant digits.
"""

from dataclasses import dataclass

import numpy as np

from .models import MalformedProblemError


def _format(value):
    return format(float(value), '.17g')


def export_sdpa(problem):
    """
    Render an SdpProblem in SDPA sparse format.

    Returns:
        The file contents as text; identical across runs for the same problem
    """
    m = problem.dimension
    equalities = problem.equalities.tocsr()
    eq_rows = []
    for r in range(equalities.shape[0]):
        row = equalities.getrow(r)
        entries = dict(zip(row.indices.tolist(), row.data.tolist()))
        if r == 0 and entries == {0: 1.0} and problem.rhs[0] == 1.0:
            continue
        eq_rows.append((entries, float(problem.rhs[r])))

    records = []
    for blkno, block in enumerate(problem.blocks, start=1):
        coo = block.matrix.tocoo()
        for flat, col, value in zip(coo.row, coo.col, coo.data):
            i, j = divmod(int(flat), block.size)
            if i > j or value == 0.0:
                continue
            matno = int(col)
            records.append((matno, blkno, i + 1, j + 1, -value if matno == 0 else value))

    if eq_rows:
        blkno = len(problem.blocks) + 1
        for e, (entries, rhs) in enumerate(eq_rows):
            constant = rhs - entries.get(0, 0.0)
            for sign, slot in ((1.0, 2 * e + 1), (-1.0, 2 * e + 2)):
                if constant != 0.0:
                    records.append((0, blkno, slot, slot, sign * constant))
                for col, value in entries.items():
                    if col != 0 and value != 0.0:
                        records.append((col, blkno, slot, slot, sign * value))

    records.sort(key=lambda rec: rec[:4])
    sizes = [str(block.size) for block in problem.blocks]
    if eq_rows:
        sizes.append(str(-2 * len(eq_rows)))

    lines = [
        f'"nashpoly moment relaxation: nvars={problem.nvars} order={problem.order} moments={m}',
        f'"objective constant c0 = {_format(problem.objective[0])}',
        str(m - 1),
        str(len(sizes)),
        ' '.join(sizes),
        ' '.join(_format(v) for v in problem.objective[1:]) if m > 1 else '',
    ]
    lines += [f'{matno} {blkno} {i} {j} {_format(value)}' for matno, blkno, i, j, value in records]
    return '\n'.join(lines) + '\n'


@dataclass
class SdpaImport:
    """
    Block functionals recovered from an SDPA file.

    blocks[b] has shape (size * size, mdim + 1); column 0 is the coefficient
    of y_0 (= -F_0) and column a the coefficient of y_a.
    """
    mdim: int
    block_sizes: list
    objective: np.ndarray
    blocks: list
    diagonal: np.ndarray = None


def read_sdpa(text):
    """
    Parse an SDPA sparse file written by export_sdpa.

    Raises:
        MalformedProblemError: On truncated or inconsistent input
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and line[0] not in '"*']
    try:
        mdim = int(lines[0].split()[0])
        nblocks = int(lines[1].split()[0])
        sizes = [int(float(tok)) for tok in lines[2].replace(',', ' ').replace('{', ' ').replace('}', ' ').split()]
        body = lines[3:]
        if mdim > 0:
            costs = [float(tok) for tok in body[0].replace(',', ' ').split()]
            body = body[1:]
        else:
            costs = []
    except (IndexError, ValueError) as exc:
        raise MalformedProblemError(f"Malformed SDPA header: {exc}") from exc
    if len(sizes) != nblocks or len(costs) != mdim:
        raise MalformedProblemError("SDPA header sizes do not match")

    psd_sizes = [s for s in sizes if s > 0]
    blocks = [np.zeros((s * s, mdim + 1)) for s in psd_sizes]
    diag_size = sum(-s for s in sizes if s < 0)
    diagonal = np.zeros((diag_size, mdim + 1)) if diag_size else None
    block_map = {}
    psd_count = 0
    for b, s in enumerate(sizes, start=1):
        if s > 0:
            block_map[b] = psd_count
            psd_count += 1

    for line in body:
        tokens = line.split()
        if len(tokens) != 5:
            raise MalformedProblemError(f"Malformed SDPA entry: '{line}'")
        matno, blkno, i, j = (int(tok) for tok in tokens[:4])
        value = float(tokens[4])
        coef = -value if matno == 0 else value
        if blkno in block_map:
            size = psd_sizes[block_map[blkno]]
            target = blocks[block_map[blkno]]
            target[(i - 1) * size + (j - 1), matno] = coef
            target[(j - 1) * size + (i - 1), matno] = coef
        elif diagonal is not None:
            diagonal[i - 1, matno] = coef
        else:
            raise MalformedProblemError(f"SDPA entry refers to unknown block {blkno}")

    return SdpaImport(
        mdim=mdim,
        block_sizes=sizes,
        objective=np.concatenate(([0.0], costs)),
        blocks=blocks,
        diagonal=diagonal,
    )
