"""Line-oriented text formats for instances, distributions and target graphs.

Instance format ('#' starts a comment, blank lines ignored):

    csp <n> <d> <k>
    t <id> <num_restrictions>      template block; followed by exactly
    r <v1> ... <vk>                num_restrictions restriction lines
    c <var1> ... <vark> <template-id>
    u <var> [allowed values...]    optional; omitted variables keep 1..d

Distribution files use a `dist <d> <k>` header, the same template blocks and
one probability line per template:

    p <template-id> <numerator> <denominator>

Target hypergraphs:

    hg <nvertices> <k>
    e <v1> ... <vk>

Parsers reject out-of-range ids and values with line-numbered errors, and
parse(emit(x)) reproduces x exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .homomorphism import TargetHypergraph
from .model import ConstraintDistribution, ConstraintTemplate, CspInstance


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _tokens(text: str) -> Iterator[tuple[int, list[str]]]:
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line.split()


def _ints(line_no: int, parts: list[str], what: str) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(line_no, f"expected integers for {what}, got {parts!r}") from None


class _TemplateReader:
    """Shared reader for `t`/`r` blocks, keyed by declared template id."""

    def __init__(self, d: int, k: int) -> None:
        self.d = d
        self.k = k
        self.by_id: dict[int, ConstraintTemplate] = {}
        self._open_id: int | None = None
        self._pending = 0
        self._rows: set[tuple[int, ...]] = set()

    def start(self, line_no: int, parts: list[str]) -> None:
        self._close(line_no)
        vals = _ints(line_no, parts, "template header")
        if len(vals) != 2:
            raise ParseError(line_no, "template header needs `t <id> <num_restrictions>`")
        tid, count = vals
        if tid < 0:
            raise ParseError(line_no, f"template id {tid} is negative")
        if tid in self.by_id:
            raise ParseError(line_no, f"duplicate template id {tid}")
        if not 0 <= count <= self.d**self.k:
            raise ParseError(line_no, f"restriction count {count} outside 0..{self.d ** self.k}")
        self._open_id = tid
        self._pending = count
        self._rows = set()
        if count == 0:
            self._close(line_no)

    def restriction(self, line_no: int, parts: list[str]) -> None:
        if self._open_id is None or self._pending == 0:
            raise ParseError(line_no, "restriction line outside a template block")
        vals = _ints(line_no, parts, "restriction")
        if len(vals) != self.k:
            raise ParseError(line_no, f"restriction needs {self.k} values, got {len(vals)}")
        for v in vals:
            if not 1 <= v <= self.d:
                raise ParseError(line_no, f"value {v} outside 1..{self.d}")
        row = tuple(vals)
        if row in self._rows:
            raise ParseError(line_no, f"duplicate restriction {row}")
        self._rows.add(row)
        self._pending -= 1
        if self._pending == 0:
            self._close(line_no)

    def _close(self, line_no: int) -> None:
        if self._open_id is not None and self._pending > 0:
            raise ParseError(line_no, f"template {self._open_id} is missing "
                                      f"{self._pending} restriction line(s)")
        if self._open_id is not None:
            self.by_id[self._open_id] = ConstraintTemplate(self.d, self.k,
                                                           frozenset(self._rows))
            self._open_id = None
            self._rows = set()

    def finish(self, last_line: int) -> tuple[list[int], dict[int, int]]:
        """Templates sorted by declared id; returns (ids, id -> position)."""
        self._close(last_line)
        ids = sorted(self.by_id)
        return ids, {tid: pos for pos, tid in enumerate(ids)}


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------

def parse_instance(text: str) -> CspInstance:
    header: tuple[int, int, int] | None = None
    reader: _TemplateReader | None = None
    raw_constraints: list[tuple[int, tuple[int, ...], int]] = []
    raw_domains: dict[int, frozenset[int]] = {}
    last_line = 0
    for line_no, parts in _tokens(text):
        last_line = line_no
        tag, rest = parts[0], parts[1:]
        if tag == "csp":
            if header is not None:
                raise ParseError(line_no, "duplicate `csp` header")
            vals = _ints(line_no, rest, "header")
            if len(vals) != 3:
                raise ParseError(line_no, "header needs `csp <n> <d> <k>`")
            n, d, k = vals
            if n < 0 or d < 1 or k < 1:
                raise ParseError(line_no, f"bad header values n={n} d={d} k={k}")
            header = (n, d, k)
            reader = _TemplateReader(d, k)
            continue
        if header is None or reader is None:
            raise ParseError(line_no, "`csp <n> <d> <k>` header must come first")
        n, d, k = header
        if tag == "t":
            reader.start(line_no, rest)
        elif tag == "r":
            reader.restriction(line_no, rest)
        elif tag == "c":
            vals = _ints(line_no, rest, "constraint")
            if len(vals) != k + 1:
                raise ParseError(line_no, f"constraint needs {k} variables and a template id")
            *vs, tid = vals
            for v in vs:
                if not 1 <= v <= n:
                    raise ParseError(line_no, f"variable {v} outside 1..{n}")
            raw_constraints.append((line_no, tuple(vs), tid))
        elif tag == "u":
            vals = _ints(line_no, rest, "domain")
            if not vals:
                raise ParseError(line_no, "domain line needs a variable")
            v, allowed = vals[0], vals[1:]
            if not 1 <= v <= n:
                raise ParseError(line_no, f"variable {v} outside 1..{n}")
            if v in raw_domains:
                raise ParseError(line_no, f"duplicate domain line for variable {v}")
            for x in allowed:
                if not 1 <= x <= d:
                    raise ParseError(line_no, f"value {x} outside 1..{d}")
            raw_domains[v] = frozenset(allowed)
        else:
            raise ParseError(line_no, f"unknown record type {tag!r}")
    if header is None or reader is None:
        raise ParseError(last_line or 1, "missing `csp <n> <d> <k>` header")
    n, d, k = header
    ids, position = reader.finish(last_line)
    templates = tuple(reader.by_id[tid] for tid in ids)
    constraints = []
    for line_no, vs, tid in raw_constraints:
        if tid not in position:
            raise ParseError(line_no, f"constraint references unknown template {tid}")
        constraints.append((vs, position[tid]))
    domains = tuple(raw_domains.get(v, frozenset(range(1, d + 1)))
                    for v in range(1, n + 1))
    return CspInstance(n, d, k, templates, tuple(constraints), domains)


def emit_instance(instance: CspInstance) -> str:
    lines = [f"csp {instance.n} {instance.domain_size} {instance.arity}"]
    for tid, tpl in enumerate(instance.templates):
        lines.append(f"t {tid} {tpl.num_restrictions}")
        for row in sorted(tpl.restrictions):
            lines.append("r " + " ".join(str(v) for v in row))
    for vs, tid in instance.constraints:
        lines.append("c " + " ".join(str(v) for v in vs) + f" {tid}")
    full = frozenset(range(1, instance.domain_size + 1))
    for v in range(1, instance.n + 1):
        dom = instance.domains[v - 1]
        if dom != full:
            lines.append(("u " + str(v) + " " + " ".join(str(x) for x in sorted(dom))).rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

def parse_distribution(text: str) -> ConstraintDistribution:
    header: tuple[int, int] | None = None
    reader: _TemplateReader | None = None
    probs: dict[int, Fraction] = {}
    last_line = 0
    for line_no, parts in _tokens(text):
        last_line = line_no
        tag, rest = parts[0], parts[1:]
        if tag == "dist":
            if header is not None:
                raise ParseError(line_no, "duplicate `dist` header")
            vals = _ints(line_no, rest, "header")
            if len(vals) != 2:
                raise ParseError(line_no, "header needs `dist <d> <k>`")
            d, k = vals
            if d < 1 or k < 1:
                raise ParseError(line_no, f"bad header values d={d} k={k}")
            header = (d, k)
            reader = _TemplateReader(d, k)
            continue
        if header is None or reader is None:
            raise ParseError(line_no, "`dist <d> <k>` header must come first")
        if tag == "t":
            reader.start(line_no, rest)
        elif tag == "r":
            reader.restriction(line_no, rest)
        elif tag == "p":
            vals = _ints(line_no, rest, "probability")
            if len(vals) != 3:
                raise ParseError(line_no, "probability needs `p <tid> <num> <den>`")
            tid, num, den = vals
            if den <= 0:
                raise ParseError(line_no, f"denominator {den} must be positive")
            if tid in probs:
                raise ParseError(line_no, f"duplicate probability for template {tid}")
            probs[tid] = Fraction(num, den)
        else:
            raise ParseError(line_no, f"unknown record type {tag!r}")
    if header is None or reader is None:
        raise ParseError(last_line or 1, "missing `dist <d> <k>` header")
    ids, _ = reader.finish(last_line)
    for tid in ids:
        if tid not in probs:
            raise ParseError(last_line, f"template {tid} has no probability line")
    for tid in probs:
        if tid not in reader.by_id:
            raise ParseError(last_line, f"probability for unknown template {tid}")
    templates = tuple(reader.by_id[tid] for tid in ids)
    return ConstraintDistribution(templates, tuple(probs[tid] for tid in ids))


def emit_distribution(dist: ConstraintDistribution) -> str:
    lines = [f"dist {dist.domain_size} {dist.arity}"]
    for tid, tpl in enumerate(dist.templates):
        lines.append(f"t {tid} {tpl.num_restrictions}")
        for row in sorted(tpl.restrictions):
            lines.append("r " + " ".join(str(v) for v in row))
    for tid, p in enumerate(dist.probabilities):
        lines.append(f"p {tid} {p.numerator} {p.denominator}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# target hypergraphs
# ---------------------------------------------------------------------------

def parse_target(text: str) -> TargetHypergraph:
    header: tuple[int, int] | None = None
    edges: list[tuple[int, ...]] = []
    last_line = 0
    for line_no, parts in _tokens(text):
        last_line = line_no
        tag, rest = parts[0], parts[1:]
        if tag == "hg":
            if header is not None:
                raise ParseError(line_no, "duplicate `hg` header")
            vals = _ints(line_no, rest, "header")
            if len(vals) != 2:
                raise ParseError(line_no, "header needs `hg <nvertices> <k>`")
            nv, k = vals
            if nv < 1 or k < 1:
                raise ParseError(line_no, f"bad header values n={nv} k={k}")
            header = (nv, k)
            continue
        if header is None:
            raise ParseError(line_no, "`hg <nvertices> <k>` header must come first")
        nv, k = header
        if tag == "e":
            vals = _ints(line_no, rest, "hyperedge")
            if len(vals) != k:
                raise ParseError(line_no, f"hyperedge needs {k} vertices, got {len(vals)}")
            for v in vals:
                if not 1 <= v <= nv:
                    raise ParseError(line_no, f"vertex {v} outside 1..{nv}")
            edges.append(tuple(vals))
        else:
            raise ParseError(line_no, f"unknown record type {tag!r}")
    if header is None:
        raise ParseError(last_line or 1, "missing `hg <nvertices> <k>` header")
    return TargetHypergraph(header[0], header[1], tuple(edges))


def emit_target(h: TargetHypergraph) -> str:
    lines = [f"hg {h.n} {h.arity}"]
    for e in h.edges:
        lines.append("e " + " ".join(str(v) for v in e))
    return "\n".join(lines) + "\n"
