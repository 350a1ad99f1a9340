"""
Report rendering: text, JSON, CSV and PDF.
"""

import csv
import json
from io import StringIO

from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import getSampleStyleSheet
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle
from reportlab.lib import colors

from nashpoly.polycore import BlockLayout


def _num(value):
    return f"{float(value):.6g}"


def _vector(values):
    return '(' + ', '.join(_num(v) for v in values) + ')'


def _blocks(point, layout):
    return BlockLayout(layout).split(point)


def format_text(report, timing=False):
    """Human-readable report with 6 significant digits."""
    lines = [
        f"Game: {report.game or '(unnamed)'}",
        f"Blocks: {', '.join(str(w) for w in report.layout)}",
        f"Seed: {report.seed}",
        f"Status: {report.status.value}",
        f"Equilibria: {len(report.equilibria)}",
    ]
    for e_index, eq in enumerate(report.equilibria, start=1):
        lines.append('')
        lines.append(f"Equilibrium {e_index} (loop {eq.loop})")
        for i, block in enumerate(_blocks(eq.point, report.layout), start=1):
            lines.append(f"  x_{i} = {_vector(block)}")
        lines.append(f"  omega_i = {', '.join(_num(w) for w in eq.omegas)}")
        lines.append(f"  omega* = {_num(eq.omega_star)}")
        lines.append(f"  theta = {_num(eq.theta)}")
        for i, lam in enumerate(eq.multipliers, start=1):
            if len(lam):
                lines.append(f"  lambda_{i} = {_vector(lam)}")
    if report.trace:
        lines.append('')
        lines.append('Trace:')
        for record in report.trace:
            parts = [f"  loop {record.loop}", record.phase, f"cuts={list(record.cut_sizes)}"]
            if record.orders:
                parts.append(f"k={','.join(str(k) for k in record.orders)}")
            if record.statuses:
                parts.append(f"sdp={','.join(record.statuses)}")
            if record.omegas:
                parts.append(f"omega={_vector(record.omegas)}")
            if record.note:
                parts.append(record.note)
            lines.append(' '.join(parts))
    if timing and report.elapsed is not None:
        lines.append('')
        lines.append(f"Wall time: {report.elapsed:.3f} s")
    return '\n'.join(lines) + '\n'


def format_json(report, timing=False):
    """Full-precision JSON report."""
    data = report.to_dict()
    if not timing:
        data.pop('elapsed', None)
    return json.dumps(data, indent=2) + '\n'


def format_check(check, layout, point):
    """Per-player check results at a user point."""
    lines = [f"Point: {_vector(point)}"]
    for c in check.checks:
        lines.append(f"Player {c.player + 1}: omega = {_num(c.omega)} ({c.status.label})")
        for v in c.minimizers:
            lines.append(f"  improving response {_vector(v)}")
    lines.append(f"omega* = {_num(check.omega_star)}")
    return '\n'.join(lines) + '\n'


def report_rows(report):
    """One row per equilibrium: index, theta, omega*, omega_i..., coordinates."""
    nplayers = len(report.layout)
    header = ['equilibrium', 'loop', 'theta', 'omega_star']
    header += [f'omega_{i + 1}' for i in range(nplayers)]
    header += [f'x{i + 1}_{j + 1}' for i, w in enumerate(report.layout) for j in range(w)]
    rows = [header]
    for e_index, eq in enumerate(report.equilibria, start=1):
        rows.append(
            [e_index, eq.loop, repr(float(eq.theta)), repr(float(eq.omega_star))]
            + [repr(float(w)) for w in eq.omegas]
            + [repr(float(v)) for v in eq.point]
        )
    return rows


def format_csv(report):
    output = StringIO()
    writer = csv.writer(output)
    writer.writerows(report_rows(report))
    return output.getvalue()


def write_csv(report, path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        f.write(format_csv(report))
    return path


def write_pdf(report, path):
    """
    Render the report as a PDF summary.

    Args:
        report: NeReport
        path: Output file path

    Returns:
        The path written
    """
    doc = SimpleDocTemplate(str(path), pagesize=letter)
    styles = getSampleStyleSheet()
    story = []

    story.append(Paragraph(f"<b>Nash equilibria: {report.game or 'unnamed game'}</b>", styles['Title']))
    story.append(Spacer(1, 12))
    info_text = f"""
    <b>Blocks:</b> {', '.join(str(w) for w in report.layout)}<br/>
    <b>Status:</b> {report.status.label}<br/>
    <b>Seed:</b> {report.seed}<br/>
    <b>Equilibria:</b> {len(report.equilibria)}<br/>
    """
    story.append(Paragraph(info_text, styles['Normal']))
    story.append(Spacer(1, 12))

    if report.equilibria:
        story.append(Paragraph("<b>Equilibria</b>", styles['Heading2']))
        story.append(Spacer(1, 6))
        data = [['#', 'Strategies', 'omega*', 'theta']]
        for e_index, eq in enumerate(report.equilibria, start=1):
            strategies = '; '.join(_vector(b) for b in _blocks(eq.point, report.layout))
            data.append([str(e_index), strategies, _num(eq.omega_star), _num(eq.theta)])
        table = Table(data, repeatRows=1)
        table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), colors.lightgrey),
            ('GRID', (0, 0), (-1, -1), 0.5, colors.grey),
            ('FONTSIZE', (0, 0), (-1, -1), 8),
        ]))
        story.append(table)
        story.append(Spacer(1, 12))

    if report.trace:
        story.append(Paragraph("<b>Search trace</b>", styles['Heading2']))
        for record in report.trace:
            text = f"Loop {record.loop}: {record.phase}, cuts {list(record.cut_sizes)}"
            if record.note:
                text += f", {record.note}"
            story.append(Paragraph(text, styles['Normal']))

    doc.build(story)
    return path
