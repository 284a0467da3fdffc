"""
x⁰..x³ 上的多项式。

用于用户自定义 4-势、多项式度规分量以及规范函数 f。
每一项为 (系数, (e0, e1, e2, e3)) 单项式。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

Monomial = tuple[float, tuple[int, int, int, int]]


def _parse_term(raw) -> Monomial:
    if isinstance(raw, dict):
        coef, exponents = raw.get("coef"), raw.get("exp")
    else:
        try:
            coef, exponents = raw
        except (TypeError, ValueError):
            raise ValueError(f"单项式应为 [系数, [e0,e1,e2,e3]]，收到 {raw!r}") from None
    try:
        coef = float(coef)
        exponents = tuple(int(e) for e in exponents)
    except (TypeError, ValueError):
        raise ValueError(f"无法解析单项式 {raw!r}") from None
    if len(exponents) != 4 or any(e < 0 for e in exponents):
        raise ValueError(f"指数必须是 4 个非负整数，收到 {exponents}")
    if not np.isfinite(coef):
        raise ValueError(f"系数非有限: {coef}")
    return coef, exponents


@dataclass(frozen=True)
class Polynomial:
    """多项式 Σ c · Π (x^i)^{e_i}，带解析梯度与 Hessian。"""

    terms: tuple[Monomial, ...] = ()

    @classmethod
    def from_spec(cls, raw: Iterable) -> "Polynomial":
        """从场景文件格式构造: [[c, [e0,e1,e2,e3]], ...]。"""
        if raw is None:
            return cls(())
        return cls(tuple(_parse_term(term) for term in raw))

    @classmethod
    def monomial(cls, coef: float, exponents: tuple[int, int, int, int]) -> "Polynomial":
        return cls(((float(coef), tuple(exponents)),))

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(sum(c * np.prod(x ** np.array(e)) for c, e in self.terms))

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        grad = np.zeros(4)
        for c, e in self.terms:
            for j in range(4):
                if e[j] == 0:
                    continue
                powers = np.array(e)
                powers[j] -= 1
                grad[j] += c * e[j] * np.prod(x ** powers)
        return grad

    def hessian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        hess = np.zeros((4, 4))
        for c, e in self.terms:
            for j in range(4):
                for k in range(4):
                    powers = np.array(e)
                    factor = powers[j]
                    powers[j] -= 1
                    factor *= powers[k]
                    powers[k] -= 1
                    if factor == 0:
                        continue
                    hess[j, k] += c * factor * np.prod(x ** powers)
        return hess

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for _, e in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = ("x0", "x1", "x2", "x3")
        parts = []
        for c, e in self.terms:
            factors = [n if p == 1 else f"{n}^{p}" for n, p in zip(names, e) if p]
            parts.append("*".join([f"{c:g}"] + factors))
        return " + ".join(parts)
