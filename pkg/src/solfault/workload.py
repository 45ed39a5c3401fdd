"""Workload generation: typed input pools and curated call sequences.

Automated value generation follows three sources — type-based boundary
values, literals lifted from the function body (plus their off-by-one
neighbours), and seeded random values. Curated sequences are the primary
workload; generated values can optionally be appended to a sequence tail.

Sequence file format (one call per line, ``#`` comments):

    caller | function | arg,arg,... | note

Argument literals use the contract-language literal syntax; address
arguments are actor names or ``address(0)``. A leading ``value=N`` argument
attaches native currency to the call (wallet/escrow deposits).
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass, field

from .lang import nodes as N
from .lang import types as T
from .lang.errors import ParseError
from .lang.lexer import Token, tokenize
from .lang.typecheck import CheckedContract
from .lang.values import ZERO_ADDRESS, Value, addrval, boolval, strval
from .vm import TxCall


class FormatError(Exception):
    def __init__(self, message: str, path: str = "", line: int = 0):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}" if path else message)


class InterfaceMismatch(Exception):
    def __init__(self, message: str, function: str = "", line: int = 0):
        self.function = function
        self.line = line
        super().__init__(message)


class Ungeneratable(Exception):
    pass


@dataclass(frozen=True)
class Actor:
    name: str
    initial_balance: int = 1_000_000

    @property
    def address(self) -> str:
        return self.name


DEFAULT_ACTORS = (
    Actor("owner"),
    Actor("alice"),
    Actor("bob"),
    Actor("carol"),
    Actor("attacker"),
)


@dataclass
class TestSequence:
    family: str
    calls: list[TxCall] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.calls)


@dataclass
class ValuePool:
    """Per-parameter candidate values, partitioned by their source."""

    seed: int
    params: dict[str, dict[str, list[Value]]] = field(default_factory=dict)

    def combined(self, param: str) -> list[Value]:
        pools = self.params[param]
        out: list[Value] = []
        for part in ("type_based", "literal_based", "random"):
            for v in pools[part]:
                if v not in out:
                    out.append(v)
        return out


# ── generators ───────────────────────────────────────────────────────────

_STRING_SAMPLES = ("", "a", "ab")
_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def type_based(t: T.Type, actors: tuple[Actor, ...] = DEFAULT_ACTORS) -> list[Value]:
    """Boundary values per type: both booleans; min/max/zero integers;
    lengths 0..2 for strings and arrays; every actor plus the zero address."""
    if isinstance(t, T.MappingType):
        raise Ungeneratable("cannot generate mapping values")
    if isinstance(t, T.BoolType):
        return [boolval(True), boolval(False)]
    if isinstance(t, T.IntType):
        out = [Value(t, t.min_value), Value(t, t.max_value), Value(t, 0)]
        seen: list[Value] = []
        for v in out:
            if v not in seen:
                seen.append(v)
        return seen
    if isinstance(t, T.StringType):
        return [strval(s) for s in _STRING_SAMPLES]
    if isinstance(t, T.AddressType):
        return [addrval(a.address) for a in actors] + [addrval(ZERO_ADDRESS)]
    if isinstance(t, T.ArrayType):
        elems = type_based(t.elem, actors)
        out = [Value(t, ())]
        if elems:
            out.append(Value(t, (elems[0],)))
            out.append(Value(t, (elems[0], elems[min(1, len(elems) - 1)])))
        return out
    raise Ungeneratable(f"cannot generate values of type {t.render()}")


def literal_based(fn: N.FunctionDef, checked: CheckedContract) -> list[Value]:
    """Literals in the function body; numeric ones bring l-1 and l+1 along
    (clamped to the literal's type range)."""
    out: list[Value] = []
    for node in N.walk(fn.body):
        if not isinstance(node, N.Literal):
            continue
        ty = checked.expr_types.get(node.node_id)
        if ty is None:
            continue
        if node.kind == "int" and isinstance(ty, T.IntType):
            lit = int(node.value)  # type: ignore[arg-type]
            for v in (lit - 1, lit, lit + 1):
                if ty.contains(v):
                    cand = Value(ty, v)
                    if cand not in out:
                        out.append(cand)
        elif node.kind == "bool":
            cand = boolval(bool(node.value))
            if cand not in out:
                out.append(cand)
        elif node.kind == "string":
            cand = strval(str(node.value))
            if cand not in out:
                out.append(cand)
    return out


def random_values(t: T.Type, n: int, seed: int,
                  actors: tuple[Actor, ...] = DEFAULT_ACTORS) -> list[Value]:
    """n seeded random values of type t; reproducible from (t, n, seed)."""
    if isinstance(t, T.MappingType):
        raise Ungeneratable("cannot generate mapping values")
    rng = random.Random(f"{seed}:{t.render()}")
    return [_random_one(t, rng, actors) for _ in range(n)]


def _random_one(t: T.Type, rng: random.Random, actors: tuple[Actor, ...]) -> Value:
    if isinstance(t, T.IntType):
        return Value(t, rng.randint(t.min_value, t.max_value))
    if isinstance(t, T.BoolType):
        return boolval(rng.random() < 0.5)
    if isinstance(t, T.StringType):
        length = rng.randint(0, 4)
        return strval("".join(rng.choice(_ALPHABET) for _ in range(length)))
    if isinstance(t, T.AddressType):
        names = [a.address for a in actors] + [ZERO_ADDRESS]
        return addrval(rng.choice(names))
    if isinstance(t, T.ArrayType):
        length = rng.randint(0, 4)
        items = [_random_one(t.elem, rng, actors) for _ in range(length)]
        rng.shuffle(items)
        return Value(t, tuple(items))
    raise Ungeneratable(f"cannot generate values of type {t.render()}")


def build_pool(fn: N.FunctionDef, checked: CheckedContract, seed: int,
               n_random: int = 3,
               actors: tuple[Actor, ...] = DEFAULT_ACTORS) -> ValuePool:
    pool = ValuePool(seed=seed)
    literals = literal_based(fn, checked)
    for p in fn.params:
        matching = [v for v in literals if v.type == p.type]
        param_seed = seed ^ zlib.crc32(p.name.encode())
        pool.params[p.name] = {
            "type_based": type_based(p.type, actors),
            "literal_based": matching,
            "random": random_values(p.type, n_random, param_seed, actors),
        }
    return pool


# ── sequence files ───────────────────────────────────────────────────────


def _parse_value(toks: list[Token], i: int, expected: T.Type,
                 actors: dict[str, Actor], where: str) -> tuple[Value, int]:
    tok = toks[i]
    if isinstance(expected, T.IntType):
        negative = False
        if tok.kind == "sym" and tok.text == "-":
            negative = True
            i += 1
            tok = toks[i]
        if tok.kind != "int":
            raise FormatError(f"{where}: expected an integer literal")
        v = -tok.value if negative else tok.value  # type: ignore[operator]
        if not expected.contains(v):  # type: ignore[arg-type]
            raise FormatError(f"{where}: {v} out of range for {expected.render()}")
        return Value(expected, v), i + 1
    if isinstance(expected, T.BoolType):
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            return boolval(tok.text == "true"), i + 1
        raise FormatError(f"{where}: expected true or false")
    if isinstance(expected, T.StringType):
        if tok.kind != "string":
            raise FormatError(f"{where}: expected a string literal")
        return strval(str(tok.value)), i + 1
    if isinstance(expected, T.AddressType):
        if tok.kind == "keyword" and tok.text == "address":
            if toks[i + 1].text == "(" and toks[i + 2].kind == "int" \
                    and toks[i + 2].value == 0 and toks[i + 3].text == ")":
                return addrval(ZERO_ADDRESS), i + 4
            raise FormatError(f"{where}: malformed address literal")
        if tok.kind == "ident":
            if tok.text not in actors:
                raise FormatError(f"{where}: unknown actor {tok.text!r}")
            return addrval(actors[tok.text].address), i + 1
        raise FormatError(f"{where}: expected an actor name or address(0)")
    if isinstance(expected, T.ArrayType):
        if not (tok.kind == "sym" and tok.text == "["):
            raise FormatError(f"{where}: expected an array literal")
        i += 1
        items: list[Value] = []
        if not (toks[i].kind == "sym" and toks[i].text == "]"):
            while True:
                item, i = _parse_value(toks, i, expected.elem, actors, where)
                items.append(item)
                if toks[i].kind == "sym" and toks[i].text == ",":
                    i += 1
                    continue
                break
        if not (toks[i].kind == "sym" and toks[i].text == "]"):
            raise FormatError(f"{where}: unterminated array literal")
        return Value(expected, tuple(items)), i + 1
    raise FormatError(f"{where}: cannot parse a {expected.render()} argument")


def _split_args(text: str) -> list[str]:
    """Split the argument field on commas outside brackets and strings."""
    parts: list[str] = []
    depth = 0
    in_str = False
    cur: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if in_str:
            cur.append(ch)
            if ch == "\\" and i + 1 < len(text):
                cur.append(text[i + 1])
                i += 2
                continue
            if ch == '"':
                in_str = False
            i += 1
            continue
        if ch == '"':
            in_str = True
            cur.append(ch)
        elif ch == "[":
            depth += 1
            cur.append(ch)
        elif ch == "]":
            depth -= 1
            cur.append(ch)
        elif ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
        i += 1
    last = "".join(cur).strip()
    if last or parts:
        parts.append(last)
    return [p for p in parts if p != ""]


def parse_call_line(line: str, lineno: int, path: str, family: str,
                    checked: CheckedContract,
                    actors: tuple[Actor, ...]) -> TxCall:
    fields_ = [f.strip() for f in line.split("|")]
    if len(fields_) < 2 or len(fields_) > 4:
        raise FormatError("expected `caller | function | args | note`", path, lineno)
    caller, function = fields_[0], fields_[1]
    arg_text = fields_[2] if len(fields_) > 2 else ""
    note = fields_[3] if len(fields_) > 3 else ""
    actor_map = {a.name: a for a in actors}
    if caller not in actor_map:
        raise FormatError(f"unknown actor {caller!r}", path, lineno)

    fn = checked.functions.get(function)
    if fn is None or fn.visibility != "public" or fn.is_constructor:
        raise InterfaceMismatch(
            f"{path}:{lineno}: {function!r} is not a public function of {family}",
            function=function, line=lineno)

    raw_args = _split_args(arg_text)
    value = 0
    if raw_args and raw_args[0].startswith("value="):
        if fn.mutability == "query":
            raise InterfaceMismatch(
                f"{path}:{lineno}: query {function!r} cannot receive value",
                function=function, line=lineno)
        try:
            value = int(raw_args[0][len("value="):])
        except ValueError:
            raise FormatError("malformed value= argument", path, lineno) from None
        if value < 0:
            raise FormatError("value= must be non-negative", path, lineno)
        raw_args = raw_args[1:]

    if len(raw_args) != len(fn.params):
        raise InterfaceMismatch(
            f"{path}:{lineno}: {function!r} takes {len(fn.params)} arguments, "
            f"got {len(raw_args)}", function=function, line=lineno)
    args: list[Value] = []
    for text, param in zip(raw_args, fn.params):
        try:
            toks = tokenize(text)
        except ParseError as exc:
            raise FormatError(f"bad literal {text!r}: {exc}", path, lineno) from None
        where = f"{path}:{lineno} argument {param.name!r}"
        try:
            val, end = _parse_value(toks, 0, param.type, actor_map, where)
        except IndexError:
            raise FormatError(f"{where}: truncated literal", path, lineno) from None
        if toks[end].kind != "eof":
            raise FormatError(f"{where}: trailing junk after literal", path, lineno)
        args.append(val)
    return TxCall(caller=caller, function=function, args=tuple(args),
                  value=value, note=note)


def load_sequence(path: str, family: str, checked: CheckedContract,
                  actors: tuple[Actor, ...] = DEFAULT_ACTORS) -> TestSequence:
    """Load and validate a curated call sequence against the family interface."""
    seq = TestSequence(family)
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            seq.calls.append(
                parse_call_line(line, lineno, path, family, checked, actors))
    return seq


def render_call(call: TxCall) -> str:
    parts = [call.caller, call.function]
    args = [a.render() for a in call.args]
    if call.value:
        args.insert(0, f"value={call.value}")
    parts.append(", ".join(args))
    parts.append(call.note)
    return " | ".join(parts).rstrip(" |") if not call.note else " | ".join(parts)


def augment_sequence(seq: TestSequence, checked: CheckedContract, seed: int,
                     per_function_cap: int = 4,
                     actors: tuple[Actor, ...] = DEFAULT_ACTORS) -> TestSequence:
    """Append one generated call per pool value to the sequence tail.

    Each appended call exercises a single parameter value; the other
    parameters take the first type-based candidate. Callers rotate through
    the actor universe deterministically.
    """
    out = TestSequence(seq.family, list(seq.calls))
    rotation = 0
    for fn in sorted(checked.public_functions(), key=lambda f: f.name):
        if fn.mutability == "query" or not fn.params:
            continue
        pool = build_pool(fn, checked, seed, actors=actors)
        added = 0
        for p in fn.params:
            for candidate in pool.combined(p.name):
                if added >= per_function_cap:
                    break
                args = []
                for q in fn.params:
                    if q.name == p.name:
                        args.append(candidate)
                    else:
                        args.append(type_based(q.type, actors)[0])
                caller = actors[rotation % len(actors)]
                rotation += 1
                out.calls.append(TxCall(
                    caller=caller.name, function=fn.name, args=tuple(args),
                    note="generated"))
                added += 1
    return out
