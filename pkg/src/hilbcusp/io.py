"""Job specs, level recipes, JSON encoding and SVG fan plots."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction

from .errors import InvalidArgumentError
from .field import FieldElement, NumberField, make_field, parse_element
from .ideals import Ideal, factor_rational_prime
from .units import GM, RESGM

SCHEMA_VERSION = "1.0"


# level recipes: "5", "p@11", "pbar@11", "p2@11", "inert@13", joined with "*"

def parse_prime_factor(K: NumberField, token: str) -> Ideal:
    token = token.strip()
    if not token:
        raise InvalidArgumentError("empty level factor")
    if "@" not in token:
        try:
            q = int(token)
        except ValueError:
            raise InvalidArgumentError(f"cannot parse level factor {token!r}") from None
        if q < 1:
            raise InvalidArgumentError("the level generator must be positive")
        return Ideal.generated_by(K, [q])
    head, _, tail = token.partition("@")
    try:
        q = int(tail)
    except ValueError:
        raise InvalidArgumentError(f"cannot parse rational prime in {token!r}") from None
    split = factor_rational_prime(K, q)
    head = head.strip().lower()
    if head == "inert":
        if split.kind not in ("inert", "rational"):
            raise InvalidArgumentError(f"{q} is not inert in {K}")
        return split.primes[0]
    conj = head.startswith("pbar")
    exp_text = head[4:] if conj else head[1:]
    if not head.startswith("p"):
        raise InvalidArgumentError(f"cannot parse level factor {token!r}")
    try:
        k = int(exp_text) if exp_text else 1
    except ValueError:
        raise InvalidArgumentError(f"cannot parse exponent in {token!r}") from None
    if k < 1:
        raise InvalidArgumentError("exponents must be positive")
    if conj and len(split.primes) < 2:
        raise InvalidArgumentError(f"{q} has a single prime above it")
    return split.primes[1 if conj else 0] ** k


def parse_level(K: NumberField, text: str) -> Ideal:
    out = Ideal.unit(K)
    for token in str(text).split("*"):
        out = out * parse_prime_factor(K, token)
    return out


def parse_elements(K: NumberField, text: str) -> list[FieldElement]:
    return [parse_element(K, t) for t in str(text).split(",") if t.strip()]


def parse_ideal(K: NumberField, text: str) -> Ideal:
    """'O' for the ring of integers, otherwise comma separated generators."""
    if str(text).strip().upper() in ("O", "1"):
        return Ideal.unit(K)
    gens = parse_elements(K, text)
    if not gens or not any(gens):
        raise InvalidArgumentError("an ideal needs a nonzero generator")
    return Ideal.generated_by(K, gens)


def parse_weight(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in str(text).split(","))
    except ValueError:
        raise InvalidArgumentError(f"cannot parse weight {text!r}") from None


@dataclass
class JobSpec:
    command: str
    field: str = "rational"
    c: str = "1"
    n: str = ""
    D_flag: str = GM
    params: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "JobSpec":
        known = {"command", "field", "c", "n", "D_flag", "params"}
        extra = set(d) - known
        if extra:
            raise InvalidArgumentError(f"unknown job keys: {sorted(extra)}")
        if "command" not in d:
            raise InvalidArgumentError("a job needs a command")
        spec = cls(**d)
        if spec.D_flag not in (GM, RESGM):
            raise InvalidArgumentError(f"D_flag must be {GM} or {RESGM}")
        if not isinstance(spec.params, dict):
            raise InvalidArgumentError("params must be an object")
        return spec

    @classmethod
    def from_text(cls, text: str) -> "JobSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"job is not valid JSON: {exc}") from None
        if not isinstance(d, dict):
            raise InvalidArgumentError("job must be a JSON object")
        return cls.from_dict(d)

    def number_field(self) -> NumberField:
        return make_field(self.field)


# JSON encoding

def encode_element(e: FieldElement) -> str:
    return str(e.a) if e.b == 0 else f"{e.a}:{e.b}"


def encode_ideal(I: Ideal) -> dict:
    return {"hnf": [[str(x) for x in row] for row in I.basis], "norm": str(I.norm())}


def to_jsonable(obj):
    if isinstance(obj, FieldElement):
        return encode_element(obj)
    if isinstance(obj, Ideal):
        return encode_ideal(obj)
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return int(obj)
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalar
        return to_jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(x) for x in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, NumberField):
        return repr(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2)


def document(command: str, inputs: dict, results, provenance, budget) -> dict:
    return {"command": command, "inputs": inputs, "results": results,
            "provenance": provenance, "budget": budget, "schema_version": SCHEMA_VERSION}


def error_document(kind: str, message: str, command: str | None = None) -> dict:
    return {"error": {"kind": kind, "message": message}, "command": command,
            "schema_version": SCHEMA_VERSION}


# SVG

def fan_svg(fan, size: int = 480) -> str:
    """Rays and cone sectors of the representatives in the (sigma1, sigma2) plane."""
    K = fan.field
    pad = 24
    scale = size - 2 * pad

    def point(v):
        x, y = fan.element(v).embeddings() if K.degree == 2 else (fan.element(v).embeddings()[0], 0.0)
        r = math.hypot(x, y) or 1.0
        return pad + scale * x / r, size - pad - scale * y / r

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad}" y2="{size - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{pad}" y2="{pad}" stroke="black"/>',
        f'<text x="{size - pad}" y="{size - 6}" font-size="12" text-anchor="end">sigma1</text>',
        f'<text x="4" y="{pad - 8}" font-size="12">sigma2</text>',
    ]
    ox, oy = pad, size - pad
    shades = ["#dbe9f6", "#f6e3db"]
    if K.degree == 2:
        for i, cone in enumerate(fan.cones):
            (x1, y1), (x2, y2) = point(cone.rays[0]), point(cone.rays[1])
            parts.append(f'<polygon points="{ox},{oy} {x1:.2f},{y1:.2f} {x2:.2f},{y2:.2f}" '
                         f'fill="{shades[i % 2]}" stroke="none"/>')
    for v in fan.rays:
        x, y = point(v)
        parts.append(f'<line x1="{ox}" y1="{oy}" x2="{x:.2f}" y2="{y:.2f}" stroke="#1f4e79" stroke-width="1.5"/>')
        parts.append(f'<text x="{x:.2f}" y="{y - 4:.2f}" font-size="10">{tuple(v)}</text>')
    if fan.rays and K.degree == 2:
        x, y = point(fan.act(fan.rays[0]))
        parts.append(f'<line x1="{ox}" y1="{oy}" x2="{x:.2f}" y2="{y:.2f}" stroke="#a33" '
                     f'stroke-width="1.5" stroke-dasharray="6,4"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
