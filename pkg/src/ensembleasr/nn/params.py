"""Named parameter grids with matching gradient buffers."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


class ParamStore:
    """Flat mapping of hierarchical names to parameter arrays plus gradients.

    Names are stable across save/load (e.g. ``enc/0/attn/Wq``); every
    parameter owns exactly one gradient buffer of identical shape.
    """

    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    def add(self, name: str, value: np.ndarray) -> None:
        if name in self.params:
            raise ShapeMismatch(f"duplicate parameter name {name!r}")
        self.params[name] = value
        self.grads[name] = np.zeros_like(value)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.params[name]

    def __contains__(self, name: str) -> bool:
        return name in self.params

    def names(self) -> list[str]:
        return list(self.params.keys())

    def zero_grads(self) -> None:
        for g in self.grads.values():
            g[...] = 0

    def accumulate(self, name: str, grad: np.ndarray) -> None:
        buf = self.grads[name]
        if buf.shape != np.shape(grad):
            raise ShapeMismatch(
                f"gradient for {name!r} has shape {np.shape(grad)}, expected {buf.shape}"
            )
        buf += grad

    def global_grad_norm(self) -> float:
        total = 0.0
        for g in self.grads.values():
            total += float(np.sum(np.square(g, dtype=np.float64)))
        return float(np.sqrt(total))

    def astype(self, dtype) -> "ParamStore":
        out = ParamStore()
        for name, value in self.params.items():
            out.add(name, value.astype(dtype))
        return out

    def copy(self) -> "ParamStore":
        out = ParamStore()
        for name, value in self.params.items():
            out.add(name, value.copy())
        return out
