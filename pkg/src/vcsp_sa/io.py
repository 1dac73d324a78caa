"""Line-oriented text formats: instances, operations, certificates, LPs.

All formats are UTF-8, '#' starts a comment, blank lines are ignored, and
every number is an exact integer, a fraction `p/q`, or `inf`.  Parsers raise
ParseError with the offending line number; printers emit canonical text on
which print(parse(text)) == text.
"""

from io import StringIO

from .algebra import Operation
from .core import Constraint, Instance, WeightedRelation
from .errors import ParseError
from .lp import linear_program
from .rationals import ExtRat, Q
from .sherali_adams import SaSolution

__all__ = [
    "parse_instance",
    "print_instance",
    "load_instance",
    "save_instance",
    "parse_operations",
    "print_operations",
    "load_operations",
    "parse_sa_solution",
    "print_sa_solution",
    "write_sa_solution",
    "load_sa_solution",
    "save_sa_solution",
    "parse_lp",
    "print_lp",
]


def _logical_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_int(token, lineno, what="integer"):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected {what}, got {token!r}", lineno) from None


def _parse_extrat(token, lineno):
    try:
        return ExtRat(token)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ParseError(f"bad value {token!r}", lineno) from None


def _parse_rat(token, lineno):
    v = _parse_extrat(token, lineno)
    if not v.is_finite:
        raise ParseError("value must be finite here", lineno)
    return v.q


def _parse_labels(tokens, arity, domain_size, lineno):
    if len(tokens) != arity:
        raise ParseError(f"expected {arity} labels, got {len(tokens)}", lineno)
    labels = []
    for t in tokens:
        v = _parse_int(t, lineno, "label")
        if not 0 <= v < domain_size:
            raise ParseError(f"label {v} outside domain 0..{domain_size - 1}", lineno)
        labels.append(v)
    return tuple(labels)


# ---------------------------------------------------------------- instances


def parse_instance(text):
    """Parse the `vcsp` instance format into an Instance."""
    lines = _logical_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise ParseError("empty instance file", 1) from None
    if tokens[0] != "vcsp" or len(tokens) != 3:
        raise ParseError("expected header 'vcsp <domain_size> <num_vars>'", lineno)
    domain_size = _parse_int(tokens[1], lineno, "domain size")
    num_vars = _parse_int(tokens[2], lineno, "variable count")
    if domain_size < 2:
        raise ParseError("domain size must be >= 2", lineno)
    if num_vars < 0:
        raise ParseError("variable count must be >= 0", lineno)

    relations = []
    names = []
    constraints = []

    def read_relation(name, arity, at):
        size = domain_size**arity
        table = [None] * size
        default = None
        for lineno, tokens in lines:
            if tokens[0] == "end":
                if len(tokens) != 1:
                    raise ParseError("'end' takes no arguments", lineno)
                missing = sum(1 for v in table if v is None)
                if missing and default is None:
                    raise ParseError(
                        f"relation {name!r}: {missing} tuples unlisted and no default",
                        lineno,
                    )
                filled = tuple(default if v is None else v for v in table)
                return WeightedRelation(arity, domain_size, filled)
            if tokens[0] == "default":
                if len(tokens) != 2:
                    raise ParseError("expected 'default <value>'", lineno)
                if default is not None:
                    raise ParseError("duplicate default line", lineno)
                default = _parse_extrat(tokens[1], lineno)
                continue
            labels = _parse_labels(tokens[:-1], arity, domain_size, lineno)
            idx = 0
            for t in labels:
                idx = idx * domain_size + t
            if table[idx] is not None:
                raise ParseError(f"tuple {labels} listed twice", lineno)
            table[idx] = _parse_extrat(tokens[-1], lineno)
        raise ParseError(f"relation {name!r} missing 'end'", at)

    for lineno, tokens in lines:
        if tokens[0] == "relation":
            if len(tokens) != 3:
                raise ParseError("expected 'relation <name> <arity>'", lineno)
            name = tokens[1]
            if name in names:
                raise ParseError(f"duplicate relation name {name!r}", lineno)
            arity = _parse_int(tokens[2], lineno, "arity")
            if arity < 1:
                raise ParseError("arity must be >= 1", lineno)
            relations.append(read_relation(name, arity, lineno))
            names.append(name)
        elif tokens[0] == "constraint":
            if len(tokens) < 2:
                raise ParseError("expected 'constraint <name> <vars...>'", lineno)
            name = tokens[1]
            if name not in names:
                raise ParseError(f"unknown relation {name!r}", lineno)
            rid = names.index(name)
            arity = relations[rid].arity
            if len(tokens) - 2 != arity:
                raise ParseError(
                    f"constraint needs {arity} variables, got {len(tokens) - 2}", lineno
                )
            scope = []
            for t in tokens[2:]:
                v = _parse_int(t, lineno, "variable index")
                if not 0 <= v < num_vars:
                    raise ParseError(f"variable {v} outside 0..{num_vars - 1}", lineno)
                scope.append(v)
            scope = tuple(scope)
            if constraints and constraints[-1].relation == rid and constraints[-1].scope == scope:
                last = constraints.pop()
                constraints.append(
                    Constraint(rid, scope, multiplicity=last.multiplicity + 1)
                )
            else:
                constraints.append(Constraint(rid, scope))
        else:
            raise ParseError(f"unexpected directive {tokens[0]!r}", lineno)

    return Instance(
        num_vars=num_vars,
        domain_size=domain_size,
        relations=tuple(relations),
        relation_names=tuple(names),
        constraints=tuple(constraints),
    )


def print_instance(inst):
    """Canonical text for an Instance (finite tuples listed, `default inf`)."""
    out = [f"vcsp {inst.domain_size} {inst.num_vars}"]
    for name, rel in zip(inst.relation_names, inst.relations):
        out.append(f"relation {name} {rel.arity}")
        any_inf = False
        for tup, v in zip(rel.tuples(), rel.values):
            if v.is_finite:
                out.append(" ".join(map(str, tup)) + f" {v}")
            else:
                any_inf = True
        if any_inf:
            out.append("default inf")
        out.append("end")
    for cons in inst.constraints:
        line = f"constraint {inst.relation_names[cons.relation]} " + " ".join(
            map(str, cons.scope)
        )
        out.extend([line] * cons.multiplicity)
    return "\n".join(out) + "\n"


def load_instance(path):
    with open(path, encoding="utf-8") as f:
        return parse_instance(f.read())


def save_instance(path, inst):
    with open(path, "w", encoding="utf-8") as f:
        f.write(print_instance(inst))


# ---------------------------------------------------------------- operations


def parse_operations(text):
    """Parse `op` blocks into an ordered {name: Operation} dict."""
    ops = {}
    lines = _logical_lines(text)
    for lineno, tokens in lines:
        if tokens[0] != "op" or len(tokens) != 4:
            raise ParseError("expected 'op <name> <arity> <domain_size>'", lineno)
        name = tokens[1]
        if name in ops:
            raise ParseError(f"duplicate operation name {name!r}", lineno)
        arity = _parse_int(tokens[2], lineno, "arity")
        domain_size = _parse_int(tokens[3], lineno, "domain size")
        if arity < 1 or domain_size < 1:
            raise ParseError("arity and domain size must be >= 1", lineno)
        size = domain_size**arity
        table = [None] * size
        closed = False
        for lineno2, tokens2 in lines:
            if tokens2[0] == "end":
                if len(tokens2) != 1:
                    raise ParseError("'end' takes no arguments", lineno2)
                missing = sum(1 for v in table if v is None)
                if missing:
                    raise ParseError(
                        f"operation {name!r}: {missing} tuples unlisted", lineno2
                    )
                closed = True
                break
            labels = _parse_labels(tokens2[:-1], arity, domain_size, lineno2)
            value = _parse_int(tokens2[-1], lineno2, "label")
            if not 0 <= value < domain_size:
                raise ParseError(f"label {value} outside domain", lineno2)
            idx = 0
            for t in labels:
                idx = idx * domain_size + t
            if table[idx] is not None:
                raise ParseError(f"tuple {labels} listed twice", lineno2)
            table[idx] = value
        if not closed:
            raise ParseError(f"operation {name!r} missing 'end'", lineno)
        ops[name] = Operation(arity, domain_size, tuple(table))
    return ops


def print_operations(ops):
    out = []
    for name, op in ops.items():
        out.append(f"op {name} {op.arity} {op.domain_size}")
        for tup, v in zip(op.tuples(), op.values):
            out.append(" ".join(map(str, tup)) + f" {v}")
        out.append("end")
    return "\n".join(out) + "\n"


def load_operations(path):
    with open(path, encoding="utf-8") as f:
        return parse_operations(f.read())


# ------------------------------------------------------------- certificates


def parse_sa_solution(text):
    """Parse `lambda ... | ... = p/q` lines into an SaSolution."""
    dists = {}
    for lineno, tokens in _logical_lines(text):
        if tokens[0] != "lambda":
            raise ParseError("expected 'lambda <vars> | <labels> = <p/q>'", lineno)
        try:
            bar = tokens.index("|")
            eq = tokens.index("=")
        except ValueError:
            raise ParseError("lambda line needs '|' and '='", lineno) from None
        if not 1 < bar < eq or eq != len(tokens) - 2:
            raise ParseError("malformed lambda line", lineno)
        svars = tuple(_parse_int(t, lineno, "variable index") for t in tokens[1:bar])
        labels = tuple(_parse_int(t, lineno, "label") for t in tokens[bar + 1 : eq])
        if len(labels) != len(svars):
            raise ParseError("assignment length differs from scope length", lineno)
        if tuple(sorted(svars)) != svars or len(set(svars)) != len(svars):
            raise ParseError("scope variables must be strictly increasing", lineno)
        p = _parse_rat(tokens[-1], lineno)
        dist = dists.setdefault(svars, {})
        if labels in dist:
            raise ParseError(f"duplicate entry for {svars} {labels}", lineno)
        if p != 0:
            dist[labels] = p
    return SaSolution(dists={k: v for k, v in dists.items()})


def write_sa_solution(f, sol):
    """Stream a certificate as canonical sorted lambda lines."""
    for svars in sorted(sol.dists, key=lambda s: (len(s), s)):
        dist = sol.dists[svars]
        head = "lambda " + " ".join(map(str, svars)) + " |"
        for labels in sorted(dist):
            f.write(f"{head} " + " ".join(map(str, labels)) + f" = {dist[labels]}\n")


def print_sa_solution(sol):
    buf = StringIO()
    write_sa_solution(buf, sol)
    return buf.getvalue()


def load_sa_solution(path):
    with open(path, encoding="utf-8") as f:
        return parse_sa_solution(f.read())


def save_sa_solution(path, sol):
    with open(path, "w", encoding="utf-8") as f:
        write_sa_solution(f, sol)


# ----------------------------------------------------------------------- LPs


def parse_lp(text):
    """Parse the `lp` format into a LinearProgram."""
    lines = _logical_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise ParseError("empty LP file", 1) from None
    if tokens[0] != "lp" or len(tokens) != 2:
        raise ParseError("expected header 'lp <num_vars>'", lineno)
    num_vars = _parse_int(tokens[1], lineno, "variable count")
    if num_vars < 1:
        raise ParseError("LP needs at least one variable", lineno)
    objective = None
    rows = []
    lower = None
    upper = None
    for lineno, tokens in lines:
        kind = tokens[0]
        if kind == "min":
            if objective is not None:
                raise ParseError("duplicate objective line", lineno)
            if len(tokens) != num_vars + 1:
                raise ParseError(f"objective needs {num_vars} coefficients", lineno)
            objective = [_parse_rat(t, lineno) for t in tokens[1:]]
        elif kind == "row":
            if len(tokens) != num_vars + 3:
                raise ParseError(
                    f"row needs {num_vars} coefficients, a sense and a rhs", lineno
                )
            sense = tokens[num_vars + 1]
            if sense not in ("<=", "=", ">="):
                raise ParseError(f"bad sense {sense!r}", lineno)
            coeffs = [_parse_rat(t, lineno) for t in tokens[1 : num_vars + 1]]
            rows.append((coeffs, sense, _parse_rat(tokens[-1], lineno)))
        elif kind == "lower":
            if len(tokens) != num_vars + 1:
                raise ParseError(f"lower needs {num_vars} bounds", lineno)
            lower = [_parse_rat(t, lineno) for t in tokens[1:]]
        elif kind == "upper":
            if len(tokens) != num_vars + 1:
                raise ParseError(f"upper needs {num_vars} bounds", lineno)
            upper = []
            for t in tokens[1:]:
                v = _parse_extrat(t, lineno)
                upper.append(None if not v.is_finite else v.q)
        else:
            raise ParseError(f"unexpected directive {kind!r}", lineno)
    if objective is None:
        raise ParseError("LP file has no 'min' objective line", 1)
    return linear_program(num_vars, objective, rows, lower=lower, upper=upper)


def print_lp(lp):
    out = [f"lp {lp.num_vars}"]
    out.append("min " + " ".join(str(c) for c in lp.objective))
    for coeffs, sense, rhs in lp.rows:
        dense = [str(coeffs.get(j, Q(0))) for j in range(lp.num_vars)]
        out.append("row " + " ".join(dense) + f" {sense} {rhs}")
    if any(v != 0 for v in lp.lower):
        out.append("lower " + " ".join(str(v) for v in lp.lower))
    if any(v is not None for v in lp.upper):
        out.append(
            "upper " + " ".join("inf" if v is None else str(v) for v in lp.upper)
        )
    return "\n".join(out) + "\n"
