"""
Exporters
CSV and JSON writers for figure data and run reports
"""

import csv
import io
import json
import os


def csv_text(headers, rows):
    """Render rows as CSV text with a header line ('\\n' line endings)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(headers)
    writer.writerows(rows)
    return buffer.getvalue()


def report_json(payload):
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + '\n'


def write_text(path, text):
    """Write text to path, creating parent directories."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    return path


def write_csv(path, headers, rows):
    """Write a CSV file; returns the path."""
    return write_text(path, csv_text(headers, rows))


def write_json(path, payload):
    """Write a canonical JSON file; returns the path."""
    return write_text(path, report_json(payload))


def format_table(headers, rows):
    """Plain-text table for terminal output."""
    cells = [[str(h) for h in headers]] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = [" | ".join(f"{c:<{w}}" for c, w in zip(cells[0], widths)),
             "-+-".join("-" * w for w in widths)]
    lines += [" | ".join(f"{c:<{w}}" for c, w in zip(row, widths)) for row in cells[1:]]
    return "\n".join(lines)


def _cell(value):
    return f"{value:.6g}" if isinstance(value, float) else str(value)
