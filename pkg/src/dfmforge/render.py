"""DOT export of DFM schemata for non-UI visualization.

Visual notation: the fact is a box listing its measures, attributes are
circles, descriptive attributes have no circle, optional attributes are
dashed, and role-tagged arcs carry their role as an edge label.
"""

from __future__ import annotations

from .model import DfmSchema


def _quote(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'


def to_dot(schema: DfmSchema) -> str:
    lines = ["digraph dfm {", "  rankdir=LR;"]
    label_rows = [schema.fact] + [m.rendered_name for m in schema.measures]
    fact_label = "\\n".join(row.replace('"', '\\"') for row in label_rows)
    lines.append(f'  {_quote(schema.fact)} [shape=box, label="{fact_label}"];')
    for attr in sorted(schema.attributes):
        style = []
        if attr in schema.descriptive:
            shape = "plaintext"
        else:
            shape = "ellipse"
        if attr in schema.optional:
            style.append("dashed")
        attrs = [f"shape={shape}"]
        if style:
            attrs.append(f'style="{",".join(style)}"')
        lines.append(f"  {_quote(attr)} [{', '.join(attrs)}];")
    rendered = set(schema.rendered_measure_names)
    for d in sorted(schema.dependencies, key=lambda d: (d.source, d.target, d.role or "")):
        if d.source == schema.fact and d.target in rendered:
            continue  # measures live inside the fact box
        extra = f' [label={_quote(d.role)}]' if d.role else ""
        lines.append(f"  {_quote(d.source)} -> {_quote(d.target)}{extra};")
    lines.append("}")
    return "\n".join(lines) + "\n"
