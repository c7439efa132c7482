"""Command-line front end: coefficient tables, certificates, simulations,
P-equation solves and Diophantine tests.

Exit codes: 0 success or verdict true, 2 verdict false, 1 usage or domain error.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import dynamics as dyn
from .fourier import ch_coeff_ggmm, cw_coeff, oracle_coeff, ym_c_ggmm, ym_cbar
from .models import CH, as_model
from .nondegeneracy import CW_GAMMA_MAX, GAMMA_MAX, MU_MAX, certify

EXIT_OK, EXIT_ERROR, EXIT_FALSE = 0, 1, 2


class VerdictFalse(Exception):
    pass


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _emit(columns, rows, out, fmt):
    if fmt == "json":
        text = json.dumps([_jsonable(dict(zip(columns, r))) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
        text = buf.getvalue()
    if out in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _workers():
    env = os.environ.get("RESLAB_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise click.UsageError("RESLAB_THREADS must be a positive integer")
        return n
    return min(8, os.cpu_count() or 1)


def _pmap(fn, items):
    # executor.map keeps input order, so rows stay sorted by index
    items = list(items)
    n = _workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _parse_range(text):
    if text is None:
        return []
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _model(name, mu):
    key = name.upper()
    if key == "CH":
        return CH(mu)
    return as_model(key)


def _check_ranges(unchecked, gamma=None, mu=None, model=None):
    if unchecked:
        return
    top = CW_GAMMA_MAX if model is not None and model.lower() == "cw" else GAMMA_MAX
    if gamma is not None and not 0 <= gamma <= top:
        raise click.UsageError(f"gamma must lie in 0..{top} (pass --unchecked to override)")
    if mu is not None and not 0 <= mu <= MU_MAX:
        raise click.UsageError(f"mu must lie in 0..{MU_MAX} (pass --unchecked to override)")


MODEL = click.option("--model", type=click.Choice(["cw", "ch", "ym"], case_sensitive=False), required=True)
OUT = click.option("--out", "out", default=None, help="output file; stdout when omitted")
FMT = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")


@click.group()
def cli():
    """Spectral machinery for time-periodic waves on the Einstein cylinder."""


@cli.command()
@MODEL
@click.option("--family", type=click.Choice(["ggmm", "cbar"]), default="ggmm")
@click.option("--gamma", type=int, default=0)
@click.option("--mu", type=int, default=0)
@click.option("--m", "mrange", default=None, help="range a..b or list a,b,c")
@click.option("--quad", type=int, nargs=4, default=None, help="single quartic coefficient i j k m")
@click.option("--triple", type=int, nargs=3, default=None, help="single YM cbar coefficient i j m")
@click.option("--unchecked", is_flag=True)
@OUT
@FMT
def coeffs(model, family, gamma, mu, mrange, quad, triple, unchecked, out, fmt):
    """Closed formulas against the quadrature oracle."""
    _check_ranges(unchecked, gamma, mu, model)
    m = _model(model, mu)
    if quad:
        if m.id == "CW":
            closed = float(cw_coeff(*quad))
        elif quad[0] == quad[1] and quad[2] == quad[3]:
            lo, hi = sorted((quad[0], quad[2]))
            closed = ym_c_ggmm(lo, hi) if m.id == "YM" else ch_coeff_ggmm(lo, hi, m.mu1)
        else:
            raise click.UsageError("no closed formula for this quadruple")
        jobs = [(tuple(quad), closed)]
    elif triple:
        if m.id != "YM":
            raise click.UsageError("--triple applies to ym only")
        jobs = [(tuple(triple), ym_cbar(*triple))]
    else:
        ms = _parse_range(mrange)
        if family == "cbar":
            if m.id != "YM":
                raise click.UsageError("family cbar applies to ym only")
            jobs = [((gamma, gamma, k), ym_cbar(gamma, gamma, k)) for k in ms]
        else:
            jobs = []
            for k in ms:
                lo, hi = min(gamma, k), max(gamma, k)
                if m.id == "CW":
                    closed = float(cw_coeff(gamma, gamma, k, k))
                elif m.id == "CH":
                    closed = ch_coeff_ggmm(lo, hi, m.mu1)
                else:
                    closed = ym_c_ggmm(lo, hi)
                jobs.append(((gamma, gamma, k, k), closed))

    def row(job):
        idx, closed = job
        orc = oracle_coeff(m, idx)
        rel = abs(closed - orc) / abs(orc) if orc != 0 else abs(closed - orc)
        return [" ".join(str(i) for i in idx), closed, orc, rel]

    rows = _pmap(row, jobs)
    _emit(["indices", "closed_value", "oracle_value", "rel_err"], rows, out, fmt)


@cli.command("certify")
@MODEL
@click.option("--gamma", type=int, required=True)
@click.option("--mu", type=int, default=0)
@click.option("--mscan", type=int, default=200)
@click.option("--unchecked", is_flag=True)
@OUT
@FMT
def certify_cmd(model, gamma, mu, mscan, unchecked, out, fmt):
    """Non-degeneracy certificate for a 1-mode."""
    _check_ranges(unchecked, gamma, mu, model)
    m = _model(model, mu)
    rep = certify(m, gamma, mu, mscan)
    d = rep.to_dict()
    cols = ["model", "gamma", "mu", "m_scan", "diagonal_min", "determinants", "tail_bound_name", "tail_bound", "verdict"]
    dets = ";".join(f"{n}:{_fmt(v)}" for n, v in rep.determinants)
    row = [rep.model, gamma, mu if m.id == "CH" else "", mscan, rep.diagonal_min, dets, rep.tail_bound_name, rep.tail_bound, rep.verdict]
    if fmt == "json":
        d["m_scan"] = mscan
        text = json.dumps(_jsonable(d), indent=1, sort_keys=True) + "\n"
        if out in (None, "-"):
            click.echo(text, nl=False)
        else:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
    else:
        _emit(cols, [row], out, fmt)
    if not rep.verdict:
        raise VerdictFalse


@cli.command()
@MODEL
@click.option("--mode", type=int, default=0)
@click.option("--mu", type=int, default=0)
@click.option("--eps", type=float, default=0.05)
@click.option("--N", "N", type=int, default=16)
@click.option("--dt", type=float, default=None, help="time step; default 2 pi / steps")
@click.option("--steps", type=int, default=2048)
@click.option("--period-scan", is_flag=True, help="return distance at eps/2, eps, 2 eps")
@click.option("--sample-every", type=int, default=16)
@click.option("--unchecked", is_flag=True)
@OUT
@FMT
def simulate(model, mode, mu, eps, N, dt, steps, period_scan, sample_every, unchecked, out, fmt):
    """Evolve the rescaled 1-mode eps * K e_mode."""
    _check_ranges(unchecked, mode, mu, model)
    m = _model(model, mu)
    if N <= mode:
        raise click.UsageError("N must exceed the mode index")
    if period_scan:
        es = [eps / 2, eps, 2 * eps]
        rows = _pmap(lambda e: [e, dyn.return_distance(m, mode, e, N, steps=steps)], es)
        _emit(["eps", "return_distance"], rows, out, fmt)
        return
    from .resonant import one_mode

    amp = one_mode(m, mode, -1 if m.id == "YM" else 1).amplitude
    u0 = np.zeros(N)
    u0[mode] = eps * amp
    h = dt if dt is not None else 2 * math.pi / steps
    tr = dyn.integrate(m, dyn.SpectralState(u0, np.zeros(N)), h, steps, "StormerVerlet", sample_every=sample_every)
    cols = ["t"] + [f"u{j}" for j in range(N)] + [f"v{j}" for j in range(N)] + ["energy"]
    rows = [[t, *u, *v, e] for t, u, v, e in tr.samples]
    _emit(cols, rows, out, fmt)


@cli.command()
@MODEL
@click.option("--mu", type=int, default=0)
@click.option("--vmode", type=int, default=0)
@click.option("--vamp", type=float, required=True)
@click.option("--omega", type=float, required=True)
@click.option("--alpha", type=float, default=0.1)
@click.option("--N", "N", type=int, default=16)
@click.option("--L", "L", type=int, default=64)
@click.option("--tol", type=float, default=1e-12)
@click.option("--max-iter", type=int, default=200)
@click.option("--unchecked", is_flag=True)
@OUT
@FMT
def pequation(model, mu, vmode, vamp, omega, alpha, N, L, tol, max_iter, unchecked, out, fmt):
    """Solve the truncated P-equation for v = vamp cos(w_j t) e_j."""
    _check_ranges(unchecked, None, mu)
    m = _model(model, mu)
    amps = [0.0] * (vmode + 1)
    amps[vmode] = vamp
    v = dyn.kernel_field(m, amps, N, L)
    r = dyn.solve_p_equation(m, v, omega, N, L, tol=tol, max_iter=max_iter, alpha=alpha)
    cols = ["model", "vmode", "vamp", "omega", "norm_v", "norm_q", "residual", "iterations", "min_divisor"]
    _emit(cols, [[m.label, vmode, vamp, omega, v.norm(), r.q.norm(), r.residual, r.iterations, r.min_divisor]], out, fmt)


@cli.command()
@MODEL
@click.option("--mu", type=int, default=0)
@click.option("--omega", type=float, required=True)
@click.option("--alpha", type=float, default=0.1)
@click.option("--lmax", type=int, default=1000)
def diophantine(model, mu, omega, alpha, lmax):
    """Membership of omega in the Diophantine set W_alpha."""
    m = _model(model, mu)
    if not 0 < alpha < 1.0 / 3.0:
        raise click.UsageError("alpha must lie in (0, 1/3)")
    margin, l = dyn.diophantine_margin(omega, m, lmax)
    member = margin >= alpha
    click.echo(f"{'member' if member else 'non-member'} margin={_fmt(margin)} at l={l}")
    if not member:
        raise VerdictFalse


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="reslab", standalone_mode=False)
    except VerdictFalse:
        return EXIT_FALSE
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        return EXIT_ERROR
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except (ValueError, ArithmeticError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
