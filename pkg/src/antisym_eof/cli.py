"""Command-line front end: verification suites, scans and CSV/JSON reports.

Exit codes: 0 pass, 1 verification failure, 2 usage/config error. Every
option can also be set through ``ANTISYM_EOF_<COMMAND>_<OPTION>``
environment variables (e.g. ``ANTISYM_EOF_SCAN_SPECTRUM_GRID_STEP``).
"""

from __future__ import annotations

import io
import math
import sys
from dataclasses import dataclass

import click
import numpy as np

from . import antisym, bounds, eof, xi_spectrum
from .tensor_core import ResidualError, entanglement_entropy, haar_random_unitary, to_json_pairs

ENV_PREFIX = "ANTISYM_EOF"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def to_json(obj, indent: int = 0) -> str:
    """JSON with floats fixed at 17 significant digits; keys keep insertion order."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return fmt(obj)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


@dataclass(frozen=True)
class RunConfig:
    command: str
    grid_step: float
    samples: int
    seed: int
    tol: float
    out: str
    format: str

    def __post_init__(self):
        if not 0 < self.grid_step <= 0.1:
            raise click.UsageError(f"--grid-step must be in (0, 0.1], got {self.grid_step}")
        if self.samples < 1:
            raise click.UsageError("--samples must be at least 1")
        if not self.tol > 0:
            raise click.UsageError("--tol must be positive")
        if self.format not in ("csv", "json"):
            raise click.UsageError("--format must be csv or json")

    @property
    def resolution(self) -> int:
        n = round(1.0 / self.grid_step)
        if abs(n * self.grid_step - 1.0) > 1e-9:
            raise click.UsageError(f"1/--grid-step must be an integer, got {1.0 / self.grid_step}")
        return n

    def emit(self, text: str) -> None:
        if self.out == "-":
            click.echo(text, nl=False)
        else:
            with open(self.out, "w", newline="\n") as fh:
                fh.write(text)


def _config(ctx, grid_step, samples, seed, tol, out, format_) -> RunConfig:
    return RunConfig(ctx.info_name, grid_step, samples, seed, tol, out, format_)


def common(defaults: dict):
    def deco(f):
        f = click.option("--format", "format_", type=click.Choice(["csv", "json"]),
                         default=defaults.get("format", "csv"), show_default=True)(f)
        f = click.option("--out", default="-", show_default=True, help="output path, '-' for stdout")(f)
        f = click.option("--tol", type=float, default=defaults["tol"], show_default=True)(f)
        f = click.option("--seed", type=int, default=0, show_default=True)(f)
        f = click.option("--samples", type=int, default=defaults.get("samples", 1), show_default=True)(f)
        f = click.option("--grid-step", type=float, default=defaults.get("grid_step", 0.005),
                         show_default=True)(f)
        return f
    return deco


@click.group(context_settings={"auto_envvar_prefix": ENV_PREFIX})
def main():
    """Numerical verification of E_f additivity for two antisymmetric 3x3 states."""


def _metrics_output(cfg: RunConfig, report: dict) -> str:
    if cfg.format == "json":
        return to_json(report) + "\n"
    rows = [(k, v) for k, v in report.items() if not isinstance(v, (list, dict))]
    buf = io.StringIO()
    buf.write("metric,value\n")
    for k, v in rows:
        buf.write(f"{k},{fmt(v) if not isinstance(v, str) else v}\n")
    return buf.getvalue()


@main.command("verify-lemma1")
@common({"tol": 1e-10, "samples": 1000, "format": "json"})
@click.option("--cofactor-tol", type=float, default=1e-12, show_default=True)
@click.option("--inject-fault", is_flag=True, hidden=True,
              help="perturb the first basis so it is not orthonormal (negative test)")
@click.pass_context
def verify_lemma1(ctx, grid_step, samples, seed, tol, out, format_, cofactor_tol, inject_fault):
    """Cofactor-map identities and the basis-aligning unitary on random inputs."""
    cfg = _config(ctx, grid_step, samples, seed, tol, out, format_)
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(["cofactor_transpose", "cofactor_conj", "wedge_action",
                           "unitarity", "alignment", "theta_fixed_point"], 0.0)
    counterexamples = []
    for k in range(samples):
        u = haar_random_unitary(3, rng)
        th = antisym.theta_map(u)
        det = np.linalg.det(u)
        worst["cofactor_transpose"] = max(worst["cofactor_transpose"],
                                          float(np.max(np.abs(th @ u.T - det * np.eye(3)))))
        worst["cofactor_conj"] = max(worst["cofactor_conj"], float(np.max(np.abs(th - det * u.conj()))))
        worst["wedge_action"] = max(worst["wedge_action"],
                                    float(np.max(np.abs(antisym.wedge_action(u) - th))))
        basis = antisym.random_antisym_basis(rng)
        if inject_fault and k == 0:
            basis[0] = antisym.AntisymState(1.1 * basis[0].coeffs)
        try:
            u_psi = antisym.lemma1_unitary(basis, tol=tol)
        except ResidualError as err:
            counterexamples.append({"sample": k, "error": str(err), "residual": err.residual,
                                    "basis": to_json_pairs(antisym.coefficient_matrix(basis))})
            continue
        worst["unitarity"] = max(worst["unitarity"], antisym.unitarity_residual(u_psi))
        worst["alignment"] = max(worst["alignment"], antisym.basis_alignment_residual(u_psi, basis))
        theta_psi = antisym.coefficient_matrix(basis).conj().T
        worst["theta_fixed_point"] = max(worst["theta_fixed_point"],
                                         float(np.max(np.abs(antisym.theta_map(u_psi) - theta_psi))))
    limits = {"cofactor_transpose": cofactor_tol, "cofactor_conj": cofactor_tol,
              "wedge_action": cofactor_tol, "unitarity": tol, "alignment": tol,
              "theta_fixed_point": cofactor_tol}
    for name, value in worst.items():
        if value > limits[name]:
            counterexamples.append({"check": name, "residual": value, "limit": limits[name]})
    ok = not counterexamples
    report = {"command": cfg.command, "samples": samples, "seed": seed}
    report.update({f"max_{k}_residual": v for k, v in worst.items()})
    report["pass"] = ok
    report["counterexamples"] = counterexamples
    cfg.emit(_metrics_output(cfg, report))
    ctx.exit(0 if ok else 1)


@main.command("scan-spectrum")
@common({"tol": 1e-10})
@click.pass_context
def scan_spectrum(ctx, grid_step, samples, seed, tol, out, format_):
    """Analytic nine-eigenvalue spectrum vs. eigensolve of the 81-dim construction."""
    cfg = _config(ctx, grid_step, samples, seed, tol, out, format_)
    p = xi_spectrum.simplex_grid(cfg.resolution)
    analytic = xi_spectrum.analytic_spectra(p)
    _, theta = xi_spectrum.block_roots(p)
    numeric = xi_spectrum.numeric_spectra(p)
    dev = np.max(np.abs(np.sort(analytic, axis=1) - numeric), axis=1)
    entropy = bounds.psi_prime_entropy(p)
    header = ["p23", "p31", "p12", "theta"] + [f"lambda{k}" for k in range(1, 10)] + ["entropy", "max_deviation"]
    rows = [list(p[i]) + [theta[i]] + list(analytic[i]) + [entropy[i], dev[i]] for i in range(len(p))]
    worst = float(dev.max())
    ok = worst <= tol
    if cfg.format == "json":
        cfg.emit(to_json({"rows": [dict(zip(header, r)) for r in rows],
                          "summary": {"points": len(rows), "max_deviation": worst, "pass": ok}}) + "\n")
    else:
        cfg.emit(csv_text(header, rows))
    click.echo(f"points={len(rows)} max_deviation={fmt(worst)} pass={fmt(ok)}", err=True)
    ctx.exit(0 if ok else 1)


@main.command("scan-bounds")
@common({"tol": 1e-9})
@click.option("--z-step", type=float, default=1e-5, show_default=True)
@click.option("--curve-out", default=None, help="CSV path for the (z, -z log2 z, bound, slack) curve")
@click.pass_context
def scan_bounds(ctx, grid_step, samples, seed, tol, out, format_, z_step, curve_out):
    """Pointwise polynomial bounds and the entropy chain over the simplex."""
    cfg = _config(ctx, grid_step, samples, seed, tol, out, format_)
    if not z_step > 0:
        raise click.UsageError("--z-step must be positive")
    z, true, bound, slack = bounds.z_curve(z_step)
    scan = bounds.scan_simplex(cfg.resolution)
    header = ["p23", "p31", "p12", "sum_first3", "sum_last6", "total", "certificate", "min_slack"]
    rows = [list(scan.p[i]) + [scan.sum_first3[i], scan.sum_last6[i], scan.total[i],
                               scan.certificate[i], scan.slack[i]] for i in range(len(scan.p))]
    if curve_out:
        with open(curve_out, "w", newline="\n") as fh:
            fh.write(csv_text(["z", "neg_z_log2_z", "bound", "slack"], zip(z, true, bound, slack)))
    chain_gap = scan.sum_first3 - scan.certificate
    summary = {
        "points": len(rows),
        "min_curve_slack": float(slack.min()),
        "argmin_curve_z": float(z[np.argmin(slack)]),
        "min_simplex_slack": float(scan.slack.min()),
        "min_sum_first3": float(scan.sum_first3.min()),
        "min_sum_last6": float(scan.sum_last6.min()),
        "min_total": float(scan.total.min()),
        "argmin_total": list(scan.p[scan.argmin("total")]),
        "min_certificate": float(scan.certificate.min()),
        "min_chain_gap": float(chain_gap.min()),
    }
    ok = (summary["min_curve_slack"] >= -tol and summary["min_simplex_slack"] >= -tol
          and summary["min_total"] >= 2 - tol and summary["min_chain_gap"] >= -tol
          and summary["min_certificate"] >= 1 - tol)
    summary["pass"] = ok
    if cfg.format == "json":
        cfg.emit(to_json({"rows": [dict(zip(header, r)) for r in rows], "summary": summary}) + "\n")
    else:
        cfg.emit(csv_text(header, rows))
    click.echo(" ".join(f"{k}={to_json(v)}" for k, v in summary.items()), err=True)
    if not ok:
        click.echo(f"argmin row: {to_json(rows[scan.argmin('total')])}", err=True)
    ctx.exit(0 if ok else 1)


@main.command("verify-additivity")
@common({"tol": 1e-6, "samples": 5, "format": "json"})
@click.option("--states", type=int, default=200, show_default=True,
              help="random pure states drawn from each joint range")
@click.option("--evaluations", type=int, default=eof.Budget.evaluations, show_default=True)
@click.option("--starts", type=int, default=eof.Budget.starts, show_default=True)
@click.pass_context
def verify_additivity(ctx, grid_step, samples, seed, tol, out, format_, states, evaluations, starts):
    """E_f(rho1 (x) rho2) = 2 evidence for random antisymmetric pairs."""
    cfg = _config(ctx, grid_step, samples, seed, tol, out, format_)
    if states < 0 or evaluations < 0 or starts < 0:
        raise click.UsageError("--states, --evaluations and --starts must be nonnegative")
    budget = eof.Budget(evaluations=evaluations, starts=starts)
    rng = np.random.default_rng(seed)
    instances = []
    ok = True
    for k in range(samples):
        rho1 = antisym.random_antisym_density(rng)
        rho2 = antisym.random_antisym_density(rng)
        rep = eof.verify_additivity(rho1, rho2, budget, seed=int(rng.integers(2 ** 32)),
                                    samples=states, tol=tol)
        entry = {"instance": k, **rep.to_dict()}
        if not rep.passed:
            ok = False
            entry["rho1"] = to_json_pairs(rho1.entries)
            entry["rho2"] = to_json_pairs(rho2.entries)
        instances.append(entry)
    report = {"command": cfg.command, "seed": seed, "samples": samples, "pass": ok,
              "max_upper": max(i["upper"] for i in instances),
              "min_upper": min(i["upper"] for i in instances),
              "instances": instances}
    cfg.emit(_metrics_output(cfg, report))
    ctx.exit(0 if ok else 1)


@main.command("sample-states")
@common({"tol": 1e-9, "samples": 1000})
@click.pass_context
def sample_states(ctx, grid_step, samples, seed, tol, out, format_):
    """Random pure two-copy antisymmetric states: direct entropy vs. normal-form bound path."""
    cfg = _config(ctx, grid_step, samples, seed, tol, out, format_)
    rng = np.random.default_rng(seed)
    header = ["index", "entropy", "p23", "p31", "p12", "bound_total", "deviation"]
    rows = []
    for k in range(samples):
        psi = eof.random_two_copy_state(rng)
        direct = entanglement_entropy(psi, eof.TWO_COPY_CUT)
        triple = eof.reduce_to_psi_prime(psi).triple
        total = bounds.entanglement_of_psi_prime(triple).total
        rows.append([k, direct, triple.p23, triple.p31, triple.p12, total, abs(direct - total)])
    min_entropy = min(r[1] for r in rows)
    max_dev = max(r[6] for r in rows)
    ok = min_entropy >= 2 - tol and max_dev <= tol
    if cfg.format == "json":
        cfg.emit(to_json({"rows": [dict(zip(header, r)) for r in rows],
                          "summary": {"samples": samples, "min_entropy": min_entropy,
                                      "max_deviation": max_dev, "pass": ok}}) + "\n")
    else:
        cfg.emit(csv_text(header, rows))
    click.echo(f"samples={samples} min_entropy={fmt(min_entropy)} max_deviation={fmt(max_dev)}",
               err=True)
    ctx.exit(0 if ok else 1)


if __name__ == "__main__":
    sys.exit(main())
