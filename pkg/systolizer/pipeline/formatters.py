# Output formatters for complexes and verification reports

import json
from typing import Optional

from systolizer.pipeline.config import DEFAULT_COLOR, ORIGIN_STYLES, TYPE_COLORS


class ComplexFormatter:
    """Canonical JSON and DOT renderings of a TypedComplex"""

    @staticmethod
    def to_json(complex_) -> str:
        """Canonical JSON: sorted keys, two-space indent, trailing newline"""
        return json.dumps(complex_.to_dict(), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def vertex_color(complex_, v: str) -> str:
        type_name = complex_.type_of(v)
        # Rank 3 colours follow the role, not the letter
        role_of = {t: role for role, t in complex_.metadata.get("roles", {}).items()}
        if type_name in role_of:
            return TYPE_COLORS[role_of[type_name]]
        return TYPE_COLORS.get(type_name, DEFAULT_COLOR)

    @staticmethod
    def edge_style(origin: str) -> str:
        return ORIGIN_STYLES.get(origin, "solid")

    @staticmethod
    def to_dot(complex_, name: str = "complex") -> str:
        """Undirected DOT graph, vertices coloured by type and edges styled by origin"""
        lines = [f"graph {json.dumps(name)} {{"]
        for v in sorted(complex_.vertices):
            color = ComplexFormatter.vertex_color(complex_, v)
            lines.append(f"  {json.dumps(v)} [color={color}, style=filled, fillcolor={color}];")
        for edge in sorted(sorted(e) for e in complex_.edges):
            u, w = edge
            origin = complex_.edge_origin(u, w)
            attrs = f"style={ComplexFormatter.edge_style(origin)}"
            if origin == "friend":
                attrs += ", color=green"
            lines.append(f"  {json.dumps(u)} -- {json.dumps(w)} [{attrs}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


class ReportFormatter:
    """Verification report and error renderings"""

    @staticmethod
    def to_json(reports, timing: bool = False) -> str:
        """A single report serializes as an object, several as a list"""
        if isinstance(reports, (list, tuple)):
            payload = [r.to_dict(timing) for r in reports]
        else:
            payload = reports.to_dict(timing)
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def format_error(error: Exception, context: Optional[str] = None) -> dict:
        """Format an error for the CLI"""
        return {
            "error": str(error),
            "error_type": type(error).__name__,
            "context": context,
        }
