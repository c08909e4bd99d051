"""Experiment runner: sweeps, spectrum dumps, condition reports, thermo checks.

Configuration is a declarative INI file, e.g.::

    [experiment]
    model = deutsch
    grid_points = 401
    seed = 1
    output = sweep.csv

    [params]
    omega = 1.0
    gamma0_over_omega = 0.05, 0.1
    f0 = 0
    f1 = 1

    [sweep]
    tau_scan = 10:50:9

``tau_scan`` accepts a comma list of omega*tau values or the linspace
shorthand ``lo:hi:n``.  Numeric failures are recorded per row and the run
continues; exit code 0 on success, 1 on configuration errors, 2 when every
row failed.
"""

import argparse
import configparser
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import conditions, evolution, models, spectral, thermo
from .basis import pauli_basis, vectorize
from .errors import AdlindError, ConfigError
from .lindblad import superoperator_matrix

__all__ = ["ExperimentConfig", "load_config", "run_sweep", "run_spectrum",
           "run_conditions", "run_thermo_check", "main"]

_MODELS = ("deutsch", "landau_zener", "thermo")


@dataclass
class ExperimentConfig:
    """Validated experiment description."""

    model: str
    params: dict
    tau_scan: list
    gamma0_over_omega: list
    grid_points: int = 401
    output_path: str = "adlind_out.csv"
    seed: int = 0
    source: str = "<config>"

    def header_comment(self, kind):
        gammas = ",".join(_fmt(g) for g in self.gamma0_over_omega)
        return (f"# adlind {kind} model={self.model} seed={self.seed} "
                f"grid={self.grid_points} gamma0_over_omega={gammas}\n")


def _fmt(x) -> str:
    return f"{float(x):.14e}"


def _parse_floats(text, where):
    try:
        if ":" in text:
            lo, hi, num = text.split(":")
            return list(np.linspace(float(lo), float(hi), int(num)))
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse number list {text!r}") from exc


def load_config(path) -> ExperimentConfig:
    """Parse and validate an INI experiment file."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    try:
        exp = parser["experiment"]
    except KeyError as exc:
        raise ConfigError(f"{path}: missing [experiment] section") from exc

    model = exp.get("model", "").strip()
    if model not in _MODELS:
        raise ConfigError(
            f"{path} [experiment] model: expected one of {_MODELS}, got {model!r}"
        )
    try:
        grid_points = exp.getint("grid_points", 401)
        seed = exp.getint("seed", 0)
    except ValueError as exc:
        raise ConfigError(f"{path} [experiment]: {exc}") from exc
    if grid_points < 51:
        raise ConfigError(f"{path} [experiment] grid_points: need >= 51, got {grid_points}")

    params = dict(parser["params"]) if parser.has_section("params") else {}
    tau_scan = []
    if parser.has_section("sweep") and parser["sweep"].get("tau_scan"):
        tau_scan = _parse_floats(parser["sweep"]["tau_scan"], f"{path} [sweep] tau_scan")
    if model != "thermo":
        if not tau_scan:
            raise ConfigError(f"{path} [sweep] tau_scan: must be a nonempty list")
        if any(b <= a for a, b in zip(tau_scan, tau_scan[1:])):
            raise ConfigError(f"{path} [sweep] tau_scan: values must be ascending")

    gammas = _parse_floats(params.get("gamma0_over_omega", "0.1"),
                           f"{path} [params] gamma0_over_omega")

    return ExperimentConfig(
        model=model,
        params=params,
        tau_scan=tau_scan,
        gamma0_over_omega=gammas,
        grid_points=grid_points,
        output_path=exp.get("output", "adlind_out.csv"),
        seed=seed,
        source=str(path),
    )


def _param(config, key, default, where="params"):
    try:
        return float(config.params.get(key, default))
    except ValueError as exc:
        raise ConfigError(f"{config.source} [{where}] {key}: not a number") from exc


def _model_pieces(config, gamma_over_omega):
    """Model factory, initial state, target rule, and trajectory builder."""
    if config.model == "deutsch":
        omega = _param(config, "omega", 1.0)
        f0 = int(_param(config, "f0", 0))
        f1 = int(_param(config, "f1", 1))

        def pars(t):
            return models.DeutschParams(omega=omega, gamma0=gamma_over_omega * omega,
                                        tau=t, f_values=(f0, f1))

        rho0 = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
        return (omega, pars, rho0,
                lambda t: models.deutsch_target(pars(t)),
                lambda t, grid: models.deutsch_trajectory(pars(t), grid),
                lambda t: models.deutsch_model(pars(t)))
    if config.model == "landau_zener":
        omega = _param(config, "omega", 1.0)
        theta = _param(config, "theta_final", 2 * np.pi / 5)

        def pars(t):
            return models.LandauZenerParams(omega0=omega, theta_final=theta,
                                            gamma0=gamma_over_omega * omega, tau=t)

        rho0 = np.array([[0, 0], [0, 1]], dtype=complex)
        return (omega, pars, rho0,
                lambda t: models.lz_target(pars(t)),
                lambda t, grid: models.lz_trajectory(pars(t), grid),
                lambda t: models.lz_model(pars(t)))
    raise ConfigError(f"model {config.model} has no sweep definition")


def _headline_xi(trajectory, tau):
    """Condition maxima feeding the sweep CSV: worst pair seeded by the
    initially populated decaying block (block index 1)."""
    xi1 = xi2 = 0.0
    for beta in range(trajectory.n_blocks):
        if beta == 1:
            continue
        c1, c2 = conditions.xi_coefficients(trajectory, 1, beta, tau=tau)
        xi1 = max(xi1, c1.max())
        xi2 = max(xi2, c2.max())
    return xi1, xi2, max(xi1, xi2)


def _sweep_row(args):
    config, gamma_over_omega, omega_tau = args
    omega, _, rho0, target_rule, trajectory_for, model_for = _model_pieces(
        config, gamma_over_omega
    )
    tau = omega_tau / omega
    try:
        solution = evolution.solve_master(model_for(tau), rho0, [0.0, tau])
        infid = evolution.infidelity(solution.final_state(), target_rule(tau))
        grid = np.linspace(0.0, 1.0, config.grid_points)
        xi1, xi2, xi = _headline_xi(trajectory_for(tau, grid), tau)
        return {"gamma": gamma_over_omega, "omega_tau": omega_tau,
                "infidelity": infid, "xi1": xi1, "xi2": xi2, "xi": xi,
                "error": ""}
    except (AdlindError, np.linalg.LinAlgError, ValueError) as exc:
        return {"gamma": gamma_over_omega, "omega_tau": omega_tau,
                "infidelity": np.nan, "xi1": np.nan, "xi2": np.nan,
                "xi": np.nan, "error": f"{type(exc).__name__}: {exc}"}


def run_sweep(config: ExperimentConfig, output=None, jobs: int = 1) -> int:
    """Infidelity + condition-coefficient sweep over gamma0 and omega*tau."""
    output = output or config.output_path
    tasks = [(config, g, wt) for g in config.gamma0_over_omega for wt in config.tau_scan]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]

    failures = 0
    with open(output, "w", newline="") as fh:
        fh.write(config.header_comment("sweep"))
        fh.write("model,gamma0_over_omega,omega_tau,infidelity,xi1_max,xi2_max,xi_max\n")
        for row in rows:
            if row["error"]:
                failures += 1
                print(f"row (gamma={row['gamma']}, omega_tau={row['omega_tau']}) "
                      f"failed: {row['error']}", file=sys.stderr)
            fh.write(",".join([
                config.model, _fmt(row["gamma"]), _fmt(row["omega_tau"]),
                _fmt(row["infidelity"]), _fmt(row["xi1"]), _fmt(row["xi2"]),
                _fmt(row["xi"]),
            ]) + "\n")
    return 2 if failures == len(rows) else 0


def run_spectrum(config: ExperimentConfig, output=None, jobs: int = 1) -> int:
    """Eigenvalue paths and quasi-eigenvector residuals over the grid."""
    output = output or config.output_path
    gamma = config.gamma0_over_omega[0]
    omega_tau = config.tau_scan[-1] if config.tau_scan else 10.0
    omega, _, _, _, _, model_for = _model_pieces(config, gamma)
    tau = omega_tau / omega
    model = model_for(tau)
    grid = np.linspace(0.0, 1.0, config.grid_points)
    basis = pauli_basis(1)

    n_blocks = model.dim_s**2
    failures = 0
    with open(output, "w", newline="") as fh:
        fh.write(config.header_comment("spectrum"))
        cols = ["s"]
        for a in range(n_blocks):
            cols += [f"re_lambda_{a}", f"im_lambda_{a}"]
        fh.write(",".join(cols + ["residual", "status"]) + "\n")
        for s in grid:
            sup = superoperator_matrix(model, s * tau, basis)
            try:
                dec = spectral.decompose(sup)
                lams = dec.flat_eigenvalues()
                residual = spectral.left_right_residual(dec, sup)
                status = "ok"
                gaps = [abs(x - y) for i, x in enumerate(lams)
                        for y in lams[i + 1:]]
                if min(gaps) < 1e-7 * max(1.0, float(np.max(np.abs(lams)))):
                    status = "degenerate"
                values = [_fmt(s)]
                for lam in lams:
                    values += [_fmt(lam.real), _fmt(lam.imag)]
                fh.write(",".join(values + [_fmt(residual), status]) + "\n")
            except (AdlindError, np.linalg.LinAlgError) as exc:
                failures += 1
                nan_cols = [_fmt(s)] + [_fmt(np.nan)] * (2 * n_blocks + 1)
                fh.write(",".join(nan_cols + [f"error: {type(exc).__name__}"]) + "\n")
    return 2 if failures == len(grid) else 0


def run_conditions(config: ExperimentConfig, output=None, jobs: int = 1) -> int:
    """Full condition report (per pair and chain index) at each tau."""
    output = output or config.output_path
    gamma = config.gamma0_over_omega[0]
    omega, _, rho0, _, trajectory_for, _ = _model_pieces(config, gamma)
    grid = np.linspace(0.0, 1.0, config.grid_points)

    failures, total = 0, 0
    with open(output, "w", newline="") as fh:
        fh.write(config.header_comment("conditions"))
        fh.write("omega_tau,alpha,beta,k,xi1_max,xi2_max,xi_max,g_max,relevant\n")
        for omega_tau in config.tau_scan:
            total += 1
            tau = omega_tau / omega
            try:
                traj = trajectory_for(tau, grid)
                support = _initial_support(traj, rho0)
                report = conditions.xi_max(traj, tau=tau, initial_support=support)
                for r in report.pairs:
                    fh.write(",".join([
                        _fmt(omega_tau), str(r.alpha), str(r.beta), str(r.k),
                        _fmt(r.xi1_max), _fmt(r.xi2_max), _fmt(r.xi_max),
                        _fmt(r.g_max), str(int(bool(r.relevant))),
                    ]) + "\n")
            except (AdlindError, np.linalg.LinAlgError) as exc:
                failures += 1
                print(f"omega_tau={omega_tau} failed: {exc}", file=sys.stderr)
    return 2 if failures == total else 0


def _initial_support(traj, rho0, tol=1e-10):
    weights = traj.left[0] @ vectorize(rho0, pauli_basis(1)).components
    support = set()
    for alpha in range(traj.n_blocks):
        sl = traj.block_slice(alpha)
        if np.max(np.abs(weights[sl])) > tol:
            support.add(alpha)
    return support


def run_thermo_check(config: ExperimentConfig, output=None, jobs: int = 1) -> int:
    """Heat/entropy rate table for a ramped thermal qubit."""
    output = output or config.output_path
    omega_start = _param(config, "omega_start", 1.0)
    omega_end = _param(config, "omega_end", 1.5)
    beta = _param(config, "beta", 1.0 / omega_start)
    gamma = _param(config, "gamma_thermal", 1.0)
    horizon = _param(config, "horizon", 10.0)

    def ham(t):
        w = omega_start + (omega_end - omega_start) * t / horizon
        return 0.5 * w * np.array([[1, 0], [0, -1]], dtype=complex)

    grid = np.linspace(0.0, horizon, config.grid_points)
    # Displaced probe keeps the rates nonzero; beta*dQ = dS holds regardless.
    rho_eq0 = models.gibbs_state(ham(0.0), beta)
    probe = 0.6 * rho_eq0 + 0.4 * 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
    try:
        check = thermo.equilibrium_check(ham, beta, grid, gamma=gamma, probe=probe)
    except (AdlindError, np.linalg.LinAlgError) as exc:
        print(f"thermo check failed: {exc}", file=sys.stderr)
        return 2
    with open(output, "w", newline="") as fh:
        fh.write(config.header_comment("thermo"))
        fh.write("t,dq_rate,ds_rate,residual\n")
        for sm in check.samples:
            fh.write(",".join([_fmt(sm.time), _fmt(sm.dq_rate), _fmt(sm.ds_rate),
                               _fmt(sm.residual)]) + "\n")
        fh.write(f"# max_relative_residual = {_fmt(check.relative_residual)}\n")
    return 0


_RUNNERS = {
    "sweep": run_sweep,
    "spectrum": run_spectrum,
    "conditions": run_conditions,
    "thermo": run_thermo_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="adlind",
        description="Adiabaticity experiments for Lindblad dynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, runner in _RUNNERS.items():
        p = sub.add_parser(name, help=runner.__doc__.splitlines()[0].lower())
        p.add_argument("--config", required=True, help="INI experiment file")
        p.add_argument("--output", default=None, help="override output path")
        p.add_argument("--grid", type=int, default=None, help="override grid points")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.grid is not None:
            if args.grid < 51:
                raise ConfigError(f"--grid must be >= 51, got {args.grid}")
            config.grid_points = args.grid
        return _RUNNERS[args.command](config, output=args.output, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
