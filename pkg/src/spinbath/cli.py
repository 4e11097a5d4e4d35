"""Command-line front end.

Subcommands write self-describing CSV (or a text report for ``check``): a
block of ``# key=value`` lines that can be fed back through ``--config``,
a column header, then rows in 17-significant-digit scientific notation.

Exit codes: 0 ok, 1 invalid input, 2 a check failed, 3 resource cap.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, _parse_list
from .dynamics import (
    FORMULAS,
    bare_amplitudes,
    bath_amplitudes,
    chain_amplitudes,
    chain_hash,
    default_dt,
    evaluate,
    exact_amplitudes,
    time_grid,
)
from .model import BathSpec, ChainSpec, HeterogeneityError, SpecError, homogenize, hopping_matrix, relative_spread
from .optimize import OBJECTIVES, BudgetExhausted, SearchProblem, search
from .oracle import DimensionCapExceeded, Propagator, build_full, inhomogeneity_deviation, random_bath
from .spectra import dress, effective_hamiltonian, eigendecompose

EXIT_OK, EXIT_INVALID, EXIT_CHECK, EXIT_CAP = 0, 1, 2, 3
DEFAULT_TMAX = 20.0
DEFAULT_OPT_TMAX = 30.0


def num(x: float) -> str:
    return f"{x:.16e}"


# --- argument handling -----------------------------------------------------

def _common(p: argparse.ArgumentParser):
    chain = p.add_argument_group("chain")
    chain.add_argument("--uniform", type=int, metavar="N", help="uniform chain of N sites, J=1")
    chain.add_argument("--engineered", type=int, metavar="N", help="engineered chain J_l = sqrt(l(N-l))")
    chain.add_argument("--rescale", action="store_true", default=None,
                       help="with --engineered: scale couplings so they sum to N-1")
    chain.add_argument("--couplings", metavar="J1,J2,...", help="explicit nearest-neighbour couplings")
    p.add_argument("--config", metavar="PATH", help="key=value config file; flags override it")
    p.add_argument("--g", metavar="G[,G...]", help="homogeneous effective bath coupling(s)")
    p.add_argument("--bath-spec", metavar="PATH", help="file with bath.<site>=g,... or bath_eff=G lines")
    p.add_argument("--from", dest="source", type=int, help="source site (default 1)")
    p.add_argument("--to", dest="target", type=int, help="target site (default N)")
    p.add_argument("--tmax", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinbath", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transfer", help="transfer amplitude f_{to,from}(t) as CSV")
    _common(p)
    p.add_argument("--formula", choices=FORMULAS)
    p.add_argument("--approximate", action="store_true", default=None,
                   help="accept a heterogeneous bath by using the mean G")

    p = sub.add_parser("sweep", help="exact transfer for several G plus the strong-coupling residual")
    _common(p)

    p = sub.add_parser("check", help="oracle equivalence and invariant report")
    _common(p)

    p = sub.add_parser("spectrum", help="bare and dressed spectrum")
    _common(p)

    p = sub.add_parser("optimize", help="search couplings maximizing the transfer peak")
    _common(p)
    p.add_argument("--n", dest="n_sites", type=int, help="number of sites")
    p.add_argument("--budget", type=int, help="objective evaluations per restart (default 5000)")
    p.add_argument("--restarts", type=int, help="number of seeded restarts (default 10)")
    p.add_argument("--objective", choices=OBJECTIVES)
    p.add_argument("--bounds", metavar="LO,HI")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if args.config:
        cfg = RunConfig.from_text(Path(args.config).read_text(), base=cfg)
        cfg.command = args.command
    if args.bath_spec:
        b = RunConfig.from_text(Path(args.bath_spec).read_text())
        if b.bath:
            cfg.bath = b.bath
        if b.g:
            cfg.g = b.g
    chains = [k for k in ("uniform", "engineered", "couplings") if getattr(args, k) is not None]
    if len(chains) > 1:
        raise SpecError("give only one of --uniform, --engineered, --couplings")
    if args.uniform is not None:
        cfg.chain, cfg.n_sites, cfg.couplings, cfg.hopping = "uniform", args.uniform, None, None
    elif args.engineered is not None:
        cfg.chain, cfg.n_sites, cfg.couplings, cfg.hopping = "engineered", args.engineered, None, None
    elif args.couplings is not None:
        cfg.couplings = _parse_list(args.couplings)
        cfg.chain, cfg.n_sites, cfg.hopping = "couplings", len(cfg.couplings) + 1, None
    if args.rescale is not None:
        cfg.rescale = True
    if args.g is not None:
        cfg.g = _parse_list(args.g)
    for name in ("source", "target", "seed", "dt"):
        if getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if args.tmax is not None:
        cfg.t_max = args.tmax
    for name in ("formula", "approximate", "n_sites", "budget", "restarts", "objective"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "bounds", None) is not None:
        lo, hi = _parse_list(args.bounds)
        cfg.bounds = (lo, hi)
    return cfg


# --- shared resolution -----------------------------------------------------

def _single_g(cfg: RunConfig) -> float:
    if len(cfg.g) > 1:
        raise SpecError(f"{cfg.command} takes a single G, got {len(cfg.g)} values")
    g = cfg.g[0] if cfg.g else 0.0
    if g < 0:
        raise SpecError("G must be >= 0")
    return g


def _resolve_bath(cfg: RunConfig, n: int):
    """Returns (bath or None, G, regime)."""
    bath = cfg.bath_spec(n)
    if bath is None:
        return None, _single_g(cfg), "homogeneous"
    try:
        g = homogenize(bath).g_eff
        return bath, g, "homogeneous"
    except HeterogeneityError:
        if not cfg.approximate and cfg.command == "transfer" and cfg.formula != "oracle":
            raise
        return bath, homogenize(bath, approximate=True).g_eff, "approximate"


def _grid(cfg: RunConfig, norm: float, g: float, default_tmax: float = DEFAULT_TMAX) -> np.ndarray:
    t_max = cfg.t_max if cfg.t_max is not None else default_tmax
    dt = cfg.dt if cfg.dt is not None else default_dt(norm, g)
    return time_grid(t_max, dt)


def _header(cfg: RunConfig, extra=()) -> str:
    lines = [f"# version={__version__}"]
    lines += [f"# {k}={v}" for k, v in cfg.items()]
    lines += [f"# {k}={v}" for k, v in extra]
    return "\n".join(lines) + "\n"


def _csv(columns, rows) -> str:
    out = [",".join(columns)]
    for row in rows:
        out.append(",".join(num(v) if not isinstance(v, (int, np.integer)) else str(v) for v in row))
    return "\n".join(out) + "\n"


def _sites(cfg: RunConfig, n: int):
    target = cfg.target if cfg.target is not None else n
    for name, s in (("from", cfg.source), ("to", target)):
        if not 1 <= s <= n:
            raise SpecError(f"--{name} site {s} out of range 1..{n}")
    return cfg.source, target


# --- subcommands -------------------------------------------------------------

def cmd_transfer(cfg: RunConfig) -> tuple:
    chain = cfg.chain_spec()
    n = chain.n_sites
    src, dst = _sites(cfg, n)
    h = hopping_matrix(chain)
    spec = eigendecompose(h)
    bath, g, regime = _resolve_bath(cfg, n)
    times = _grid(cfg, spec.norm, g)
    if cfg.formula == "oracle":
        if bath is None:
            bath = random_bath(np.random.default_rng(cfg.seed), [g] * n) if g > 0 else BathSpec.empty(n)
        full = build_full(chain, bath)
        amps = Propagator(full).amplitudes(src, dst, times)
    else:
        amps = evaluate(cfg.formula, spec, src, dst, times, g).amplitudes
    extra = [("chain_hash", chain_hash(h)), ("g_used", repr(float(g))), ("regime", regime)]
    rows = zip(times, amps.real, amps.imag, np.abs(amps))
    return EXIT_OK, _header(cfg, extra) + _csv(["t", "re", "im", "abs"], rows)


def cmd_sweep(cfg: RunConfig) -> tuple:
    if not cfg.g:
        raise SpecError("sweep needs a list of G values (--g 0,1,4)")
    if cfg.bath:
        raise SpecError("sweep uses homogeneous G values; drop the per-site bath")
    if any(g < 0 for g in cfg.g):
        raise SpecError("G must be >= 0")
    chain = cfg.chain_spec()
    src, dst = _sites(cfg, chain.n_sites)
    h = hopping_matrix(chain)
    spec = eigendecompose(h)
    times = _grid(cfg, spec.norm, max(cfg.g))
    half = bare_amplitudes(spec, src, dst, 0.5 * times)
    columns, data = ["t"], [times]
    for g in cfg.g:
        tag = format(g, "g")
        amps = exact_amplitudes(dress(spec, g), src, dst, times)
        columns += [f"re_g{tag}", f"im_g{tag}", f"abs_g{tag}"]
        data += [amps.real, amps.imag, np.abs(amps)]
        if g > 0:
            columns.append(f"residual_g{tag}")
            data.append(np.abs(amps - np.cos(g * times) * half))
    extra = [("chain_hash", chain_hash(h))]
    return EXIT_OK, _header(cfg, extra) + _csv(columns, zip(*data))


def run_checks(cfg: RunConfig) -> list:
    """Each entry: (status, name, measured, tolerance) with status PASS/FAIL/INFO."""
    chain = cfg.chain_spec()
    n = chain.n_sites
    src, dst = _sites(cfg, n)
    h = hopping_matrix(chain)
    spec = eigendecompose(h)
    bath, g, regime = _resolve_bath(cfg, n)
    if bath is None:
        bath = random_bath(np.random.default_rng(cfg.seed), [g] * n) if g > 0 else BathSpec.empty(n)
    times = _grid(cfg, spec.norm, g)
    results = []

    def record(name, value, tol):
        results.append(("PASS" if value <= tol else "FAIL", name, float(value), tol))

    scale = max(1.0, spec.norm)
    a = spec.eigenvectors
    record("eigenvector_orthonormality", np.max(np.abs(a @ a.conj().T - np.eye(n))), 1e-10)
    resid = np.max(np.linalg.norm(h @ a.T - a.T * spec.eigenvalues, axis=0)) / scale
    record("eigen_residual", resid, 1e-10)

    dressed = dress(spec, g)
    heff = effective_hamiltonian(h, g)
    ref = np.linalg.eigvalsh(heff)
    record("dressed_vs_effective_spectrum",
           np.max(np.abs(np.sort(dressed.energies.ravel()) - ref)) / max(1.0, np.max(np.abs(ref))), 1e-10)

    exact = exact_amplitudes(dressed, src, dst, times)
    record("initial_condition", abs(exact[0] - (1.0 if src == dst else 0.0)), 1e-12)

    full = build_full(chain, bath)
    prop = Propagator(full)
    column = prop.column(src, times)
    record("oracle_unitarity", np.max(np.abs(np.sum(np.abs(column) ** 2, axis=1) - 1.0)), 1e-10)
    chain_prob = np.sum(np.abs(column[:, :n]) ** 2, axis=1)
    record("chain_contractivity", max(0.0, np.max(chain_prob) - 1.0), 1e-9)

    oracle = column[:, dst - 1]
    if regime == "homogeneous":
        record("exact_vs_oracle", np.max(np.abs(exact - oracle)), 1e-9)
        ca = chain_amplitudes(dressed, src, times)
        ba = bath_amplitudes(dressed, src, times)
        total = np.sum(np.abs(ca) ** 2, axis=1) + np.sum(np.abs(ba) ** 2, axis=1)
        record("effective_unitarity", np.max(np.abs(total - 1.0)), 1e-9)
    else:
        results.append(("INFO", "approximate_regime_relative_spread", relative_spread(bath), None))
        results.append(("INFO", "inhomogeneity_deviation",
                        inhomogeneity_deviation(chain, bath, times, src, dst), None))
    if np.isrealobj(h) or np.all(np.imag(h) == 0):
        back = prop.amplitudes(dst, src, times)
        record("transpose_symmetry", np.max(np.abs(back - oracle)), 1e-10)
    if not any(bath.per_site):
        bare = bare_amplitudes(spec, src, dst, times)
        record("bare_vs_oracle", np.max(np.abs(bare - oracle)), 1e-10)
    return results


def cmd_check(cfg: RunConfig) -> tuple:
    results = run_checks(cfg)
    chain = cfg.chain_spec()
    lines = [f"# version={__version__}"] + [f"# {k}={v}" for k, v in cfg.items()]
    lines.append(f"# chain_hash={chain_hash(hopping_matrix(chain))}")
    for status, name, value, tol in results:
        tol_txt = f" tol={tol:g}" if tol is not None else ""
        lines.append(f"{status} {name} value={num(value)}{tol_txt}")
    failed = any(r[0] == "FAIL" for r in results)
    measured = [r[2] for r in results if r[0] != "INFO"]
    lines.append(f"max_residual={num(max(measured))}")
    lines.append("overall: " + ("FAIL" if failed else "PASS"))
    return (EXIT_CHECK if failed else EXIT_OK), "\n".join(lines) + "\n"


def cmd_spectrum(cfg: RunConfig) -> tuple:
    chain = cfg.chain_spec()
    h = hopping_matrix(chain)
    spec = eigendecompose(h)
    _, g, regime = _resolve_bath(cfg, chain.n_sites)
    d = dress(spec, g)
    rows = []
    for k in range(spec.n_sites):
        rows.append((k + 1, spec.eigenvalues[k], d.delta[k], d.energies[k, 0], d.energies[k, 1]))
    extra = [("chain_hash", chain_hash(h)), ("g_used", repr(float(g))), ("regime", regime)]
    return EXIT_OK, _header(cfg, extra) + _csv(["k", "eps", "delta", "E0", "E1"], rows)


def cmd_optimize(cfg: RunConfig) -> tuple:
    if cfg.n_sites is None:
        raise SpecError("optimize needs --n")
    g = _single_g(cfg)
    t_max = cfg.t_max if cfg.t_max is not None else DEFAULT_OPT_TMAX
    problem = SearchProblem(cfg.n_sites, g, t_max, tuple(cfg.bounds), cfg.objective,
                            cfg.seed, cfg.budget, cfg.restarts)
    result = search(problem)
    js = result.couplings
    spec = eigendecompose(hopping_matrix(ChainSpec(len(js) + 1, couplings=tuple(js))))
    times = _grid(cfg, spec.norm, g, default_tmax=t_max)
    with_bath = exact_amplitudes(dress(spec, g), 1, cfg.n_sites, times)
    bare = bare_amplitudes(spec, 1, cfg.n_sites, times)
    extra = [
        ("best_couplings", ",".join(repr(float(j)) for j in js)),
        ("value", repr(result.value)),
        ("value_bare", repr(result.value_bare)),
        ("improved", "true" if result.improved else "false"),
        ("evaluations", result.evaluations),
        ("best_restart", result.restart),
    ]
    body = _csv(["t", "abs_bath", "abs_bare"], zip(times, np.abs(with_bath), np.abs(bare)))
    summary = (f"best J: {extra[0][1]}\nvalue with bath: {result.value!r}\n"
               f"value without bath: {result.value_bare!r}\nimproved: {extra[3][1]}\n")
    return EXIT_OK, _header(cfg, extra) + body, summary


COMMANDS = {
    "transfer": cmd_transfer,
    "sweep": cmd_sweep,
    "check": cmd_check,
    "spectrum": cmd_spectrum,
    "optimize": cmd_optimize,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.formula not in FORMULAS:
            raise SpecError(f"unknown formula {cfg.formula!r}")
        out = COMMANDS[cfg.command](cfg)
    except DimensionCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SpecError, HeterogeneityError, BudgetExhausted, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    code, text = out[0], out[1]
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if len(out) > 2:
        sys.stderr.write(out[2])
    return code


if __name__ == "__main__":
    sys.exit(main())
