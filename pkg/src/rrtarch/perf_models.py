"""Analytical speed-up and power models for the three write-arbitration fabrics.

Both pure architectures are described by fitted polynomials in the module count
N: a speed-up curve and a power curve per architecture. A hybrid layout places
M modules on the combinatorial block and N - M on the hierarchical tree, then
funnels both through one final combinatorial merge block, so its totals are

    s_total(M) = s_hier(N - M) + s_combi(M)
    p_total(M) = p_hier(N - M) + p_combi(M + 1)

where a block whose module count is zero contributes nothing at all (its
constant term is an idle-silicon cost that is simply not instantiated). The
scalar cost used by the optimizer is j = s_total + 1 / p_total: seconds of
execution plus a reciprocal-power term, lower is better.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple


@dataclass(frozen=True)
class PolynomialModel:
    """One fitted curve, coefficients stored lowest degree first."""

    coeffs: Tuple[float, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self) -> "PolynomialModel":
        if len(self.coeffs) == 1:
            return PolynomialModel((0.0,), name=self.name + "'")
        d = tuple(k * c for k, c in enumerate(self.coeffs) if k > 0)
        return PolynomialModel(d, name=self.name + "'")


def eval_model(model: PolynomialModel, n: float) -> float:
    """Evaluate a model at n using Horner's rule."""
    acc = 0.0
    for c in reversed(model.coeffs):
        acc = acc * n + c
    return acc


def block_contribution(model: PolynomialModel, count: int) -> float:
    """Contribution of one block holding `count` modules.

    A block that holds zero modules is not built, so it contributes exactly
    0 rather than the polynomial's constant term.
    """
    if count < 0:
        raise ValueError(f"module count must be >= 0, got {count}")
    if count == 0:
        return 0.0
    return eval_model(model, count)


# Default coefficients, lowest degree first.
_S_HIER = PolynomialModel((2.8, 0.41, 0.0019), name="hierarchical.speedup")
_P_HIER = PolynomialModel((1.8, 0.17), name="hierarchical.power")
_S_COMBI = PolynomialModel((3.3, 5.7, 0.0, 0.021), name="combinatorial.speedup")
_P_COMBI = PolynomialModel((1.0, 0.79, -0.0048, 1.6e-5), name="combinatorial.power")


@dataclass(frozen=True)
class ArchModelSet:
    """The four curves the optimizer and benchmark reporting run on."""

    s_hier: PolynomialModel = _S_HIER
    p_hier: PolynomialModel = _P_HIER
    s_combi: PolynomialModel = _S_COMBI
    p_combi: PolynomialModel = _P_COMBI

    def as_dict(self) -> Dict[str, PolynomialModel]:
        return {
            "hierarchical.speedup": self.s_hier,
            "hierarchical.power": self.p_hier,
            "combinatorial.speedup": self.s_combi,
            "combinatorial.power": self.p_combi,
        }


DEFAULT_MODELS = ArchModelSet()


@dataclass(frozen=True)
class HybridEvaluation:
    """Totals for one (n, m) split."""

    n: int
    m: int
    s_total: float
    p_total: float
    j: float


class DegenerateModel(ValueError):
    """Raised when user-supplied coefficients make 1/p_total meaningless."""


def evaluate_hybrid(
    models: ArchModelSet,
    n: int,
    m: int,
    merge_at_zero: bool = True,
) -> HybridEvaluation:
    """Evaluate the hybrid totals and cost j for a given split.

    `merge_at_zero` controls the m = 0 corner: with the flag set (default) the
    final merge block is kept even though no module sits on the combinatorial
    side, so the power term reads p_combi(1); cleared, m = 0 collapses to the
    pure hierarchical fabric and the combinatorial side contributes nothing.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if m < 0 or m > n:
        raise ValueError(f"m must be in [0, {n}], got {m}")
    s_total = block_contribution(models.s_hier, n - m) + block_contribution(
        models.s_combi, m
    )
    p_hier = block_contribution(models.p_hier, n - m)
    if m == 0 and not merge_at_zero:
        p_combi = 0.0
    else:
        p_combi = block_contribution(models.p_combi, m + 1)
    p_total = p_hier + p_combi
    if p_total <= 0.0:
        raise DegenerateModel(
            f"p_total(m={m}) = {p_total}; cannot form 1/p_total"
        )
    j = s_total + 1.0 / p_total
    return HybridEvaluation(n=n, m=m, s_total=s_total, p_total=p_total, j=j)


def efficiency(speedup: float, power_w: float) -> float:
    """Speed-up per watt."""
    if power_w <= 0.0:
        raise ValueError(f"power must be positive, got {power_w}")
    return speedup / power_w


# ----------------------------------------------------------------------------
# Coefficient config files
# ----------------------------------------------------------------------------

_CONFIG_KEYS = {
    "hierarchical.speedup": "s_hier",
    "hierarchical.power": "p_hier",
    "combinatorial.speedup": "s_combi",
    "combinatorial.power": "p_combi",
}


class ModelConfigError(ValueError):
    """Malformed coefficient config file."""


def parse_model_config(text: str) -> ArchModelSet:
    """Parse `architecture.metric = c0, c1, ...` lines into a model set.

    Coefficients are listed lowest degree first. Blank lines and `#` comments
    are ignored. Keys not present keep their default curves.
    """
    overrides: Dict[str, PolynomialModel] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelConfigError(f"line {lineno}: expected 'key = values'")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key not in _CONFIG_KEYS:
            raise ModelConfigError(
                f"line {lineno}: unknown key {key!r}; expected one of "
                + ", ".join(sorted(_CONFIG_KEYS))
            )
        parts = [p for p in value.replace(",", " ").split() if p]
        if not parts:
            raise ModelConfigError(f"line {lineno}: no coefficients given")
        try:
            coeffs = tuple(float(p) for p in parts)
        except ValueError as exc:
            raise ModelConfigError(f"line {lineno}: {exc}") from None
        overrides[key] = PolynomialModel(coeffs, name=key)
    kwargs = {attr: overrides[key] for key, attr in _CONFIG_KEYS.items() if key in overrides}
    return ArchModelSet(**kwargs) if kwargs else DEFAULT_MODELS


def load_model_config(path: str) -> ArchModelSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_config(fh.read())
