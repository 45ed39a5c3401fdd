"""Runtime values carried through the VM, workloads and traces.

A value is its static type plus a payload:
  int types   -> int
  bool        -> bool
  string      -> str
  address     -> str (actor name; the zero address is ZERO_ADDRESS)
  arrays      -> tuple of Values

``render`` emits the contract-language literal syntax, which is also the
encoding used in ledger dumps and sequence files.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import types as T

ZERO_ADDRESS = "0x0"


@dataclass(frozen=True)
class Value:
    type: T.Type
    v: object

    def render(self) -> str:
        return render_value(self)


def intval(v: int, ty: T.IntType) -> Value:
    return Value(ty, v)


def boolval(v: bool) -> Value:
    return Value(T.BOOL, bool(v))


def strval(s: str) -> Value:
    return Value(T.STRING, s)


def addrval(name: str) -> Value:
    return Value(T.ADDRESS, name)


def arrval(elem_type: T.Type, items: tuple[Value, ...]) -> Value:
    return Value(T.ArrayType(elem_type), items)


def zero_value(ty: T.Type) -> Value:
    if isinstance(ty, T.IntType):
        return Value(ty, 0)
    if isinstance(ty, T.BoolType):
        return Value(ty, False)
    if isinstance(ty, T.StringType):
        return Value(ty, "")
    if isinstance(ty, T.AddressType):
        return Value(ty, ZERO_ADDRESS)
    if isinstance(ty, T.ArrayType):
        return Value(ty, ())
    raise ValueError(f"no zero value for {ty.render()}")


def render_value(val: Value) -> str:
    ty, v = val.type, val.v
    if isinstance(ty, T.IntType):
        return str(v)
    if isinstance(ty, T.BoolType):
        return "true" if v else "false"
    if isinstance(ty, T.StringType):
        s = str(v).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{s}"'
    if isinstance(ty, T.AddressType):
        return "address(0)" if v == ZERO_ADDRESS else str(v)
    if isinstance(ty, T.ArrayType):
        return "[" + ", ".join(render_value(x) for x in v) + "]"  # type: ignore[union-attr]
    raise ValueError(f"unrenderable value of type {ty.render()}")


def _json_payload(val: Value) -> object:
    if isinstance(val.type, T.ArrayType):
        return [_json_payload(x) for x in val.v]  # type: ignore[union-attr]
    return val.v


def value_to_json(val: Value) -> dict:
    return {"t": val.type.render(), "v": _json_payload(val)}


def _type_from_text(text: str) -> T.Type:
    if text.endswith("[]"):
        return T.ArrayType(_type_from_text(text[:-2]))
    if text == "bool":
        return T.BOOL
    if text == "address":
        return T.ADDRESS
    if text == "string":
        return T.STRING
    if text.startswith("uint"):
        return T.IntType(int(text[4:]), signed=False)
    if text.startswith("int"):
        return T.IntType(int(text[3:]), signed=True)
    raise ValueError(f"bad type text {text!r}")


def value_from_json(obj: dict) -> Value:
    ty = _type_from_text(obj["t"])

    def build(t: T.Type, payload: object) -> Value:
        if isinstance(t, T.ArrayType):
            return Value(t, tuple(build(t.elem, x) for x in payload))  # type: ignore[union-attr]
        return Value(t, payload)

    return build(ty, obj["v"])
