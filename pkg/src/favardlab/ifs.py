"""Planar homothety systems and their nested generations.

A system is a finite family of maps ``f_i(z) = r_i z + beta_i`` with
contraction ratios ``0 < r_i < 1`` acting on an axis-aligned base rectangle
(generation 0); generation n+1 is the union of the images of generation n.
Rotations and reflections are deliberately unsupported so that every
projection of the system is again an affine system on the line.

Config file grammar (one statement per line, ``#`` starts a comment)::

    name = four-corner
    base = [0, 0, 1, 1]
    symmetry = dihedral          # optional; omit for none
    map { ratio = "1/4", translate = ["0", "0"] }
    map { ratio = "1/4", translate = ["0", "3/4"] }
    ...

Numbers parse as exact rationals from ``p/q`` or finite-decimal strings,
quoted or bare.  A ``rotation`` field inside ``map { ... }`` is reserved and
rejected unless it equals 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import ConfigError
from .intervals import rational_str, to_fraction

DEFAULT_CYLINDER_DISPLAY_BOUND = 8

# Slopes sampled by the nesting check: four per chart, covering both axis
# directions (exact for rectangles) plus interior slopes.
NESTING_SAMPLE_SLOPES = (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1))


@dataclass(frozen=True)
class Similitude2D:
    """A homothety z -> ratio*z + (dx, dy) with 0 < ratio < 1."""

    ratio: Fraction
    translation: tuple[Fraction, Fraction]

    def __post_init__(self):
        if not (0 < self.ratio < 1):
            raise ValueError(f"contraction ratio must lie in (0, 1), got {self.ratio}")

    @staticmethod
    def of(ratio, dx, dy) -> "Similitude2D":
        return Similitude2D(to_fraction(ratio), (to_fraction(dx), to_fraction(dy)))


@dataclass(frozen=True)
class IFS2D:
    """A planar homothety system together with its generation-0 rectangle.

    ``base`` is (x0, y0, x1, y1) with x0 < x1 and y0 < y1.  The
    ``dihedral_symmetry`` flag marks systems invariant under the symmetries
    of the square (swap/reflect axes), which lets direction sweeps restrict
    to one eighth of the circle.
    """

    name: str
    maps: tuple[Similitude2D, ...]
    base: tuple[Fraction, Fraction, Fraction, Fraction]
    dihedral_symmetry: bool = False

    def __post_init__(self):
        if len(self.maps) < 2:
            raise ValueError("a system needs at least 2 maps")
        x0, y0, x1, y1 = self.base
        if not (x0 < x1 and y0 < y1):
            raise ValueError("base rectangle must have positive width and height")

    @property
    def ratio_sum(self) -> Fraction:
        return sum((m.ratio for m in self.maps), Fraction(0))

    @property
    def convexity_applies(self) -> bool:
        """Whether the ratio sum is exactly 1 (nested projection convexity)."""
        return self.ratio_sum == 1

    @property
    def branching(self) -> int:
        return len(self.maps)


@dataclass(frozen=True)
class ValidationReport:
    ratio_sum: Fraction
    ratio_sum_is_one: bool
    convexity_applies: bool
    nesting_checks: tuple[tuple[str, str, bool], ...]  # (chart, slope, ok)
    nesting: bool
    branching: int
    cylinder_counts: tuple[int, ...]

    def as_dict(self) -> dict:
        return {
            "ratio_sum": rational_str(self.ratio_sum),
            "ratio_sum_is_one": self.ratio_sum_is_one,
            "convexity_applies": self.convexity_applies,
            "nesting": "pass" if self.nesting else "fail",
            "nesting_checks": [
                {"chart": c, "slope": s, "ok": ok} for c, s, ok in self.nesting_checks
            ],
            "branching": self.branching,
            "cylinder_counts": list(self.cylinder_counts),
        }


def _projected_nesting_ok(ifs: IFS2D, chart: str, slope: Fraction) -> bool:
    # Images of the base must land inside the base's own projection.
    from .projection import Direction, project_ifs  # local import, no cycle at call time

    proj = project_ifs(ifs, Direction(chart, slope))
    lo, hi = proj.base
    for ratio, offset in proj.maps:
        a = ratio * lo + offset
        b = ratio * hi + offset
        if a < lo or b > hi:
            return False
    return True


def validate(ifs: IFS2D, display_bound: int = DEFAULT_CYLINDER_DISPLAY_BOUND) -> ValidationReport:
    """Report-only hypothesis check: ratio sum, projected nesting, sizes.

    Nesting is sampled over 8 directions (4 slopes per chart); the axis
    directions make the check exact for rectangle bases.  Failure is
    reported, never raised, so exploratory systems stay usable.
    """
    checks = []
    for chart in ("x", "y"):
        for slope in NESTING_SAMPLE_SLOPES:
            ok = _projected_nesting_ok(ifs, chart, slope)
            checks.append((chart, rational_str(slope), ok))
    nesting = all(ok for _, _, ok in checks)
    n = ifs.branching
    counts = tuple(n ** k for k in range(display_bound + 1))
    return ValidationReport(
        ratio_sum=ifs.ratio_sum,
        ratio_sum_is_one=ifs.ratio_sum == 1,
        convexity_applies=ifs.convexity_applies,
        nesting_checks=tuple(checks),
        nesting=nesting,
        branching=n,
        cylinder_counts=counts,
    )


# -- presets ----------------------------------------------------------------

_UNIT_BASE = (Fraction(0), Fraction(0), Fraction(1), Fraction(1))


def four_corner() -> IFS2D:
    """Four ratio-1/4 maps at the corners of the unit square."""
    q = Fraction(1, 4)
    t = Fraction(3, 4)
    maps = tuple(
        Similitude2D(q, (dx, dy))
        for dx, dy in ((Fraction(0), Fraction(0)), (Fraction(0), t), (t, Fraction(0)), (t, t))
    )
    return IFS2D("four-corner", maps, _UNIT_BASE, dihedral_symmetry=True)


def sparse_corner(k: int) -> IFS2D:
    """Corner system with ratio 1/k, k > 4; similarity dimension log 4 / log k."""
    if k <= 4:
        raise ValueError(f"sparse-corner requires k > 4, got {k}")
    r = Fraction(1, k)
    t = 1 - r
    maps = tuple(
        Similitude2D(r, (dx, dy))
        for dx, dy in ((Fraction(0), Fraction(0)), (Fraction(0), t), (t, Fraction(0)), (t, t))
    )
    return IFS2D(f"sparse-corner({k})", maps, _UNIT_BASE, dihedral_symmetry=True)


def sierpinski_gasket() -> IFS2D:
    """Three ratio-1/2 maps; ratio sum 3/2, so the convexity hypothesis fails."""
    h = Fraction(1, 2)
    maps = (
        Similitude2D(h, (Fraction(0), Fraction(0))),
        Similitude2D(h, (h, Fraction(0))),
        Similitude2D(h, (Fraction(1, 4), h)),
    )
    return IFS2D("sierpinski-gasket", maps, _UNIT_BASE, dihedral_symmetry=False)


_SPARSE_RE = re.compile(r"^sparse-corner\((\d+)\)$")


def preset(name: str) -> IFS2D:
    """Look up a named system: four-corner, sparse-corner(k), sierpinski-gasket."""
    name = name.strip()
    if name == "four-corner":
        return four_corner()
    if name == "sierpinski-gasket":
        return sierpinski_gasket()
    m = _SPARSE_RE.match(name)
    if m:
        return sparse_corner(int(m.group(1)))
    raise ValueError(f"unknown preset {name!r}")


PRESET_NAMES = ("four-corner", "sparse-corner(k)", "sierpinski-gasket")


# -- config file format ------------------------------------------------------

def _parse_value(token: str) -> Fraction:
    token = token.strip().strip('"').strip("'")
    try:
        return to_fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse rational value {token!r}") from exc


def _parse_list(text: str) -> list[Fraction]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ConfigError(f"expected a [ ... ] list, got {text!r}")
    return [_parse_value(tok) for tok in text[1:-1].split(",") if tok.strip()]


_MAP_FIELD_RE = re.compile(r"(\w+)\s*=\s*(\[[^\]]*\]|\"[^\"]*\"|'[^']*'|[^,]+)")


def _parse_map_block(body: str) -> Similitude2D:
    fields = {}
    for key, raw in _MAP_FIELD_RE.findall(body):
        fields[key] = raw.strip()
    if "ratio" not in fields or "translate" not in fields:
        raise ConfigError(f"map block needs ratio and translate: {body!r}")
    if "rotation" in fields and _parse_value(fields["rotation"]) != 0:
        raise ConfigError("rotation is reserved and unsupported; only 0 is accepted")
    ratio = _parse_value(fields["ratio"])
    translate = _parse_list(fields["translate"])
    if len(translate) != 2:
        raise ConfigError(f"translate needs exactly two entries: {body!r}")
    if not (0 < ratio < 1):
        raise ConfigError(f"ratio must lie in (0, 1), got {ratio}")
    return Similitude2D(ratio, (translate[0], translate[1]))


def loads_config(text: str) -> IFS2D:
    """Parse the config grammar into a system."""
    name: Optional[str] = None
    base: Optional[list[Fraction]] = None
    symmetry = False
    maps: list[Similitude2D] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("map"):
                body = line[3:].strip()
                if not (body.startswith("{") and body.endswith("}")):
                    raise ConfigError("map block must be map { ... } on one line")
                maps.append(_parse_map_block(body[1:-1]))
            elif "=" in line:
                key, value = (s.strip() for s in line.split("=", 1))
                if key == "name":
                    name = value.strip().strip('"')
                elif key == "base":
                    base = _parse_list(value)
                    if len(base) != 4:
                        raise ConfigError("base needs [x0, y0, x1, y1]")
                elif key == "symmetry":
                    symmetry = value.strip().strip('"') == "dihedral"
                else:
                    raise ConfigError(f"unknown key {key!r}")
            else:
                raise ConfigError(f"cannot parse line {line!r}")
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    if name is None or base is None or not maps:
        raise ConfigError("config needs name, base, and at least one map block")
    return IFS2D(name, tuple(maps), (base[0], base[1], base[2], base[3]),
                 dihedral_symmetry=symmetry)


def dumps_config(ifs: IFS2D) -> str:
    """Serialize a system in the config grammar (exact round trip)."""
    lines = [f"name = {ifs.name}"]
    lines.append("base = [" + ", ".join(rational_str(v) for v in ifs.base) + "]")
    if ifs.dihedral_symmetry:
        lines.append("symmetry = dihedral")
    for m in ifs.maps:
        dx, dy = m.translation
        lines.append(
            f'map {{ ratio = "{rational_str(m.ratio)}", '
            f'translate = ["{rational_str(dx)}", "{rational_str(dy)}"] }}'
        )
    return "\n".join(lines) + "\n"


def load_config(path) -> IFS2D:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_config(fh.read())


def dump_config(ifs: IFS2D, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(ifs))
