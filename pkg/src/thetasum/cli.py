"""thetasum command line.

Every subcommand prints one JSON document (or writes it to ``--out``);
``figure`` emits CSV.  Numbers use the library grammar: ``p/q``,
``(a+b*sqrt(d))/c`` or ``<decimal>[@bits]``.

Exit codes: 0 ok, 2 bad input, 3 precision exhausted, 4 tolerance not met.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Optional

from . import __version__, kernels
from .errors import InputError, ThetaSumError
from .numbers import (DEFAULT_PREC, RHO, BigFloat, QuadSurd, RealInput, format_real,
                      parse_real)

FIGURES = ("fig3", "fig4", "fig0")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    command: str
    precision_bits: int = DEFAULT_PREC
    tol: float = 1e-10
    depth: Optional[int] = None
    threads: Optional[int] = None
    out: Optional[str] = None
    seed: int = 0
    params: tuple = ()

    def header(self) -> list[str]:
        """Header lines; the thread count only affects speed and is left out."""
        lines = [f"# thetasum_version={__version__}", f"# command={self.command}",
                 f"# precision_bits={self.precision_bits}", f"# tol={self.tol!r}",
                 f"# depth={self.depth}", f"# seed={self.seed}"]
        lines += [f"# {k}={v}" for k, v in self.params]
        return lines

    def as_dict(self) -> dict:
        d = {"version": __version__, "command": self.command, "precision_bits": self.precision_bits,
             "tol": self.tol, "depth": self.depth, "seed": self.seed}
        d.update(dict(self.params))
        return d


# -- serialisation -------------------------------------------------------------

def _num(v: float) -> str:
    return format(v, ".17g")


def to_jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag, "abs": abs(obj)}
    if isinstance(obj, (Fraction, QuadSurd, BigFloat)):
        return format_real(obj)
    if dataclasses.is_dataclass(obj):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for prop in ("depth", "ok"):
            if isinstance(getattr(type(obj), prop, None), property):
                out[prop] = to_jsonable(getattr(obj, prop))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return to_jsonable(obj.item())
    return str(obj)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- figures -------------------------------------------------------------------

def _grid(grid: int) -> list[Fraction]:
    if grid < 2:
        raise InputError("grid must be >= 2")
    return [Fraction(2 * i, grid - 1) for i in range(grid)]


def figure_values(name: str, grid: int, n: Optional[int] = None,
                  threads: Optional[int] = None) -> list[tuple[Fraction, complex]]:
    """Sample the named figure on [0, 2]; rows come back in grid order.

    fig4 has no value at x = 0 and reports NaN there.
    """
    if name not in FIGURES:
        raise InputError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    xs = _grid(grid)
    if name == "fig3":
        s, m = 0.7, 100
    elif name == "fig4":
        s, m = 0.7, 1000
    else:
        s, m = 2.0, 10_000 if n is None else n

    def row(x: Fraction) -> complex:
        if name == "fig4" and x == 0:
            # -1/x is undefined and the combination diverges as x -> 0+
            return complex(math.nan, math.nan)
        Y, T = kernels.fixed_phase(x)
        F = kernels.phase_sum(Y, T, 1, m, s, threads=1)[0]
        if name != "fig4":
            return F
        k = math.floor(m * x)
        Yd, Td = kernels.fixed_phase(-1 / x)
        D = kernels.phase_sum(Yd, Td, 1, k, s, threads=1)[0] if k else 0j
        return F - RHO * float(x) ** (s - 0.5) * D

    workers = threads or kernels.get_threads()
    if workers <= 1:
        vals = [row(x) for x in xs]
    else:
        with ThreadPoolExecutor(workers) as ex:
            vals = list(ex.map(row, xs))
    return list(zip(xs, vals))


def figure_csv(name: str, cfg: RunConfig, grid: int, n: Optional[int] = None) -> str:
    rows = figure_values(name, grid, n, cfg.threads)
    buf = io.StringIO()
    for line in cfg.header():
        buf.write(line + "\n")
    buf.write("x,re,im\n")
    for x, v in rows:
        buf.write(f"{_num(float(x))},{_num(v.real)},{_num(v.imag)}\n")
    return buf.getvalue()


def read_csv(path: str) -> tuple[dict, list[tuple[float, float, float]]]:
    """Parse a figure CSV back into (header dict, rows)."""
    header, rows = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                header[k] = v
            elif line and not line.startswith("x,"):
                a, b, c = line.split(",")
                rows.append((float(a), float(b), float(c)))
    return header, rows


# -- argument handling -----------------------------------------------------------

def _real(text: Optional[str], prec: int, what: str = "--x") -> RealInput:
    if text is None:
        raise InputError(f"{what} is required")
    v = parse_real(text)
    if isinstance(v, BigFloat) and "@" not in text:
        v = parse_real(f"{text}@{prec}")
    return v


def _need(value, flag: str):
    if value is None:
        raise InputError(f"{flag} is required")
    return value


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--x", help="real argument")
    p.add_argument("--t", default="0", help="shift parameter (default 0)")
    p.add_argument("--s", type=float, help="exponent s")
    p.add_argument("--n", type=int, help="truncation / length")
    p.add_argument("--depth", type=int, help="expansion or orbit depth")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--prec", type=int, default=DEFAULT_PREC, help="bits for decimal inputs")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--threads", type=int, help="worker threads (results do not depend on it)")
    p.add_argument("--mode", help="subcommand-specific variant")
    p.add_argument("--seed", type=int, default=0, help="recorded in the header")
    return p


def _quad(args):
    """--tol is the total budget; U, W and the V tail get a quarter each."""
    from .omega import QuadConfig

    return QuadConfig(tol=args.tol / 4, series_tail_tol=args.tol / 4)


def _cmd_cf(args):
    from .cf import rcf_expand

    r = rcf_expand(_real(args.x, args.prec), _need(args.depth, "--depth"))
    return r, 3 if r.precision_exhausted else 0


def _cmd_ecf(args):
    from .cf import ecf_expand

    r = ecf_expand(_real(args.x, args.prec), _need(args.depth, "--depth"))
    return r, 3 if r.precision_exhausted else 0


def _cmd_orbit(args):
    from .cf import t_orbit, u_orbit

    x = _real(args.x, args.prec)
    J = _need(args.depth, "--depth")
    if args.mode == "u":
        return {"steps": u_orbit(x, J)}, 0
    if args.mode not in (None, "t"):
        raise InputError("--mode must be t or u")
    r = t_orbit(x, J)
    return r, 3 if r.status == "precision-exhausted" else 0


def _cmd_products(args):
    from .cf import orbit_products

    r = orbit_products(_real(args.x, args.prec), _need(args.depth, "--depth"))
    return r, 3 if r.status == "precision-exhausted" else 0


def _cmd_floors(args):
    from .cf import floor_chain

    return floor_chain(_real(args.x, args.prec), _need(args.n, "--n")), 0


def _cmd_psum(args):
    from .theta import SeriesParams, partial_sum

    p = SeriesParams(_need(args.s, "--s"), _real(args.t, args.prec, "--t"), args.prec, args.threads)
    return partial_sum(p, _real(args.x, args.prec), _need(args.n, "--n")), 0


def _cmd_omega(args):
    from .expansion import omega_oracle
    from .omega import omega, omega_regularized

    s = _need(args.s, "--s")
    x = _real(args.x, args.prec)
    t = _real(args.t, args.prec, "--t")
    mode = args.mode or "plain"
    if mode == "plain":
        r = omega(s, x, t, _quad(args))
        return r, 4 if r.est_error > args.tol else 0
    if mode == "delta":
        return {"delta": omega_regularized(s, x, _quad(args))}, 0
    if mode == "oracle":
        ns = (args.n, 2 * args.n, 4 * args.n) if args.n else (1000, 2000, 4000)
        r = omega_oracle(s, x, t, ns)
        return r, 0 if r.converged else 4
    raise InputError("--mode must be plain, delta or oracle")


def _cmd_residual(args):
    from .expansion import funceq_residual

    r = funceq_residual(_need(args.s, "--s"), _real(args.x, args.prec), _real(args.t, args.prec, "--t"),
                        args.n if args.n is not None else 1000, _quad(args))
    return r, 0


def _cmd_expand(args):
    from .expansion import expand_series

    r = expand_series(_need(args.s, "--s"), _real(args.x, args.prec), _need(args.depth, "--depth"),
                      _quad(args), args.n)
    return r, 3 if r.status == "precision-exhausted" else 0


def _cmd_expand_t(args):
    from .expansion import expand_series_t

    r = expand_series_t(_need(args.s, "--s"), _real(args.x, args.prec), _real(args.t, args.prec, "--t"),
                        _need(args.depth, "--depth"), _quad(args), args.n)
    return r, 3 if r.status == "precision-exhausted" else 0


def _cmd_criteria(args):
    from . import diagnostics as dg

    x = _real(args.x, args.prec)
    N = _need(args.depth, "--depth")
    mode = args.mode or "thm4"
    if mode == "thm4":
        return dg.criteria_thm4(_need(args.s, "--s"), x, N), 0
    if mode in ("thm3", "thm3-log"):
        ba, reps = dg.criteria_thm3(x, _need(args.alpha, "--alpha"), args.beta, N, mode == "thm3-log")
        return {"regime": ba, "reports": reps}, 0
    if mode in ("thm5", "thm5-log"):
        cond = "log" if mode == "thm5-log" else "power"
        return dg.criteria_thm5(x, _need(args.alpha, "--alpha"), args.beta, N, cond), 0
    if mode == "cor4":
        return dg.criteria_cor4(_need(args.s, "--s"), x, N), 0
    raise InputError("--mode must be thm3, thm3-log, thm4, thm5, thm5-log or cor4")


def _cmd_orbit_sums(args):
    from .diagnostics import orbit_sums

    r = orbit_sums(_real(args.x, args.prec), _need(args.alpha, "--alpha"), args.beta,
                   _need(args.depth, "--depth"), args.mode or "absolute")
    return r, 3 if r.status == "precision-exhausted" else 0


def _cmd_mu_lb(args):
    from .diagnostics import irrationality_lb, irrationality_profile

    x = _real(args.x, args.prec)
    N = args.n if args.n is not None else _need(args.depth, "--depth")
    return {"mu_lower_bound": irrationality_lb(x, N), "profile": irrationality_profile(x, N)}, 0


def _cmd_density(args):
    from .diagnostics import u_density

    return {"density": u_density(_real(args.x, args.prec))}, 0


def _cmd_hl_witness(args):
    from .theta import hl_witness

    ratio, r = hl_witness(_real(args.x, args.prec), _need(args.n, "--n"))
    return {"ratio": ratio, "r_star": r}, 0


def _cmd_lemma(args):
    from .diagnostics import lemmafinal_check

    slack = 2 if args.n is None else args.n
    return lemmafinal_check(_real(args.x, args.prec), _need(args.depth, "--depth"), slack), 0


COMMANDS: dict[str, tuple[Callable, str]] = {
    "cf": (_cmd_cf, "regular continued fraction (--x --depth)"),
    "ecf": (_cmd_ecf, "even continued fraction (--x --depth)"),
    "orbit": (_cmd_orbit, "T-orbit, or U-orbit with --mode u (--x --depth)"),
    "products": (_cmd_products, "orbit products with ECF checks (--x --depth)"),
    "floors": (_cmd_floors, "floor chain K(l,n) (--x --n)"),
    "psum": (_cmd_psum, "partial sum F_{s,n}(x,t) (--s --x --t --n)"),
    "omega": (_cmd_omega, "Omega_s(x,t); --mode plain|delta|oracle"),
    "residual": (_cmd_residual, "functional-equation residual (--s --x --t --n)"),
    "expand": (_cmd_expand, "iterated expansion at t=0 (--s --x --depth [--n reference])"),
    "expand-t": (_cmd_expand_t, "iterated expansion with t (--s --x --t --depth)"),
    "criteria": (_cmd_criteria, "convergence criteria; --mode thm3|thm3-log|thm4|thm5|thm5-log|cor4"),
    "orbit-sums": (_cmd_orbit_sums, "orbit sums; --mode absolute|phase_weighted|log_absolute|log_phase"),
    "mu-lb": (_cmd_mu_lb, "irrationality exponent witness (--x --n)"),
    "density": (_cmd_density, "U-map invariant density (--x)"),
    "hl-witness": (_cmd_hl_witness, "|S_N| against min_r (N/sqrt(Q_r) + sqrt(Q_r)) (--x --n)"),
    "lemma": (_cmd_lemma, "small-iterate witnesses (--x --depth [--n slack])"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="thetasum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"thetasum {__version__}")
    parser.add_argument("--backend", choices=kernels.available_backends(), help="kernel backend")
    sub = parser.add_subparsers(dest="command", required=True)
    fig = sub.add_parser("figure", parents=[common], help="figure CSV on [0, 2]")
    fig.add_argument("name", choices=FIGURES)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def _config(args) -> RunConfig:
    keys = ("x", "t", "s", "n", "alpha", "beta", "grid", "mode")
    params = tuple((k, getattr(args, k)) for k in keys if getattr(args, k, None) is not None)
    if args.command == "figure":
        params = (("name", args.name),) + params
    return RunConfig(args.command, args.prec, args.tol, args.depth, args.threads, args.out,
                     args.seed, params)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.backend:
            kernels.set_backend(args.backend)
        if args.threads is not None:
            if args.threads < 1:
                raise InputError("--threads must be >= 1")
            kernels.set_threads(args.threads)
        cfg = _config(args)
        if args.command == "figure":
            _emit(figure_csv(args.name, cfg, args.grid, args.n), args.out)
            return 0
        fn = COMMANDS[args.command][0]
        result, code = fn(args)
        doc = {"config": cfg.as_dict(), "result": to_jsonable(result)}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return code
    except ThetaSumError as exc:
        print(f"thetasum: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"thetasum: {exc}", file=sys.stderr)
        return 1


__all__ = ["RunConfig", "main", "figure_values", "figure_csv", "read_csv", "to_jsonable"]
