"""Run configuration and its line-oriented ``key=value`` text form.

Grammar (one entry per line, ``#`` lines may carry entries too so a CSV
metadata header can be fed back as a config)::

    n_sites=10
    couplings=1,1,1,1,1,1,1,1,1      # explicit J_l
    uniform=10                        # or: uniform chain, J=1
    engineered=10                     # or: J_l = sqrt(l(N-l))
    rescale=true                      # engineered only: sum(J) = N-1
    hopping.1=0,-1,0                  # or: general hopping matrix, one row per key
    bath.3=0.5,0.5                    # couplings of the bath at site 3
    bath_eff=4.0                      # homogeneous effective coupling (alias: g)
    g=0,1,4                           # list of G for sweeps
    from=1
    to=10
    tmax=40
    dt=0.01
    formula=exact
    seed=7

Blank lines, lines without ``=`` and the informational keys written by the
tool (``version``, ``chain_hash``, ...) are ignored on input.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .model import BathSpec, ChainSpec, SpecError
from .spectra import engineered_couplings

INFO_KEYS = {"version", "chain_hash", "command_line", "dimension", "min_abs_eps", "regime",
             "best_couplings", "value", "value_bare", "improved", "evaluations", "best_restart",
             "g_used"}


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, complex):
        return repr(x).strip("()")
    return repr(x) if isinstance(x, float) else str(x)


def _parse_bool(s: str) -> bool:
    s = s.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise SpecError(f"not a boolean: {s!r}")


def _parse_number(tok: str):
    tok = tok.strip()
    if "j" in tok:
        return complex(tok)
    return float(tok)


def _parse_list(s: str, conv=float) -> tuple:
    s = s.strip()
    if not s:
        return ()
    try:
        return tuple(conv(tok.strip()) for tok in s.split(","))
    except ValueError as exc:
        raise SpecError(f"bad list {s!r}: {exc}") from None


@dataclass
class RunConfig:
    command: str = "transfer"
    chain: Optional[str] = None  # uniform | engineered | couplings | hopping
    n_sites: Optional[int] = None
    couplings: Optional[tuple] = None
    rescale: bool = False
    hopping: Optional[tuple] = None
    bath: tuple = ()  # ((site, (g, ...)), ...), sites ascending
    g: tuple = ()
    source: int = 1
    target: Optional[int] = None
    t_max: Optional[float] = None
    dt: Optional[float] = None
    formula: str = "exact"
    approximate: bool = False
    seed: int = 0
    budget: int = 5000
    restarts: int = 10
    objective: str = "global_peak"
    bounds: tuple = (0.05, 2.0)
    out: Optional[str] = field(default=None, compare=False)

    # serialization -------------------------------------------------------

    def items(self) -> list:
        out = [("command", self.command)]
        if self.chain is not None:
            out.append(("chain", self.chain))
        if self.n_sites is not None:
            out.append(("n_sites", self.n_sites))
        if self.couplings is not None:
            out.append(("couplings", ",".join(_fmt(j) for j in self.couplings)))
        if self.rescale:
            out.append(("rescale", _fmt(True)))
        if self.hopping is not None:
            for i, row in enumerate(self.hopping, start=1):
                out.append((f"hopping.{i}", ",".join(_fmt(v) for v in row)))
        for site, gs in self.bath:
            out.append((f"bath.{site}", ",".join(_fmt(v) for v in gs)))
        if self.g:
            out.append(("g", ",".join(_fmt(v) for v in self.g)))
        out.append(("from", self.source))
        if self.target is not None:
            out.append(("to", self.target))
        if self.t_max is not None:
            out.append(("tmax", _fmt(self.t_max)))
        if self.dt is not None:
            out.append(("dt", _fmt(self.dt)))
        out.append(("formula", self.formula))
        if self.approximate:
            out.append(("approximate", _fmt(True)))
        out.append(("seed", self.seed))
        if self.command == "optimize":
            out += [("budget", self.budget), ("restarts", self.restarts),
                    ("objective", self.objective), ("bounds", ",".join(_fmt(b) for b in self.bounds))]
        return out

    def to_text(self, prefix: str = "") -> str:
        return "".join(f"{prefix}{k}={v}\n" for k, v in self.items())

    @classmethod
    def from_text(cls, text: str, base: Optional["RunConfig"] = None) -> "RunConfig":
        cfg = dataclasses.replace(base) if base is not None else cls()
        hopping_rows = {}
        bath = dict(cfg.bath)
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith("#"):
                line = line.lstrip("#").strip()
            if "=" not in line:
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.split("#", 1)[0].strip()
            if key in INFO_KEYS:
                continue
            cfg._apply(key, value, hopping_rows, bath)
        if hopping_rows:
            n = len(hopping_rows)
            if sorted(hopping_rows) != list(range(1, n + 1)):
                raise SpecError("hopping rows must be numbered 1..N without gaps")
            cfg.hopping = tuple(hopping_rows[i] for i in range(1, n + 1))
            cfg.chain, cfg.n_sites = "hopping", n
        cfg.bath = tuple(sorted(bath.items()))
        return cfg

    def _apply(self, key, value, hopping_rows, bath):
        try:
            if key == "command":
                self.command = value
            elif key == "chain":
                self.chain = value
            elif key == "n_sites":
                self.n_sites = int(value)
            elif key in ("uniform", "engineered"):
                self.chain, self.n_sites = key, int(value)
            elif key == "couplings":
                self.couplings = _parse_list(value)
                self.chain = "couplings"
            elif key == "rescale":
                self.rescale = _parse_bool(value)
            elif key.startswith("hopping."):
                hopping_rows[int(key.split(".", 1)[1])] = _parse_list(value, _parse_number)
            elif key.startswith("bath."):
                site = int(key.split(".", 1)[1])
                if site < 1:
                    raise SpecError(f"bath site must be >= 1, got {site}")
                bath[site] = _parse_list(value)
            elif key in ("g", "bath_eff"):
                self.g = _parse_list(value)
            elif key == "from":
                self.source = int(value)
            elif key == "to":
                self.target = int(value)
            elif key == "tmax":
                self.t_max = float(value)
            elif key == "dt":
                self.dt = float(value)
            elif key == "formula":
                self.formula = value
            elif key == "approximate":
                self.approximate = _parse_bool(value)
            elif key == "seed":
                self.seed = int(value)
            elif key == "budget":
                self.budget = int(value)
            elif key == "restarts":
                self.restarts = int(value)
            elif key == "objective":
                self.objective = value
            elif key == "bounds":
                lo, hi = _parse_list(value)
                self.bounds = (lo, hi)
            else:
                raise SpecError(f"unknown config key {key!r}")
        except ValueError as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"bad value for {key}: {value!r}") from None

    # resolution ----------------------------------------------------------

    def chain_spec(self) -> ChainSpec:
        kind = self.chain
        if kind is None:
            raise SpecError("no chain given (use --uniform, --engineered, --couplings or a config file)")
        if kind == "uniform":
            return ChainSpec.uniform(self._n())
        if kind == "engineered":
            n = self._n()
            return ChainSpec(n, couplings=tuple(engineered_couplings(n, float(n - 1) if self.rescale else None)))
        if kind == "couplings":
            js = self.couplings or ()
            n = len(js) + 1
            if self.n_sites is not None and self.n_sites != n:
                raise SpecError(f"n_sites={self.n_sites} but {len(js)} couplings given")
            return ChainSpec(n, couplings=js)
        if kind == "hopping":
            return ChainSpec.from_hopping(self.hopping)
        raise SpecError(f"unknown chain kind {kind!r}")

    def _n(self) -> int:
        if self.n_sites is None:
            raise SpecError("n_sites missing")
        return self.n_sites

    def bath_spec(self, n_sites: int) -> Optional[BathSpec]:
        if not self.bath:
            return None
        per_site = dict(self.bath)
        if max(per_site) > n_sites:
            raise SpecError(f"bath site {max(per_site)} beyond chain length {n_sites}")
        return BathSpec(tuple(per_site.get(i, ()) for i in range(1, n_sites + 1)))
