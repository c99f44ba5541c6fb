"""Command-line interface: ``mpqc code ...`` and ``mpqc sim ...``.

Exit codes: 0 success, 1 negative verdict, 2 usage or parse error, 3 abort.
The wall time of a run goes to stderr so that report bodies stay byte-identical.
"""

from __future__ import annotations

import json
import sys
import time

import click

from . import __version__
from .codes import (CodeError, build_css, catalog_dir, catalog_path, check_transversal_ccz,
                    check_triorthogonal, load_matrix, min_distance)
from .protocol import (AdversaryError, Circuit, CircuitError, ConfigError, ProtocolConfig,
                       bound_violation, default_t, load_circuit, parse_adversary, run_protocol)
from .refsim import SINGLE_QUBIT_STATES

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3

FORMAT = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
                      show_default=True, help="Report format.")


def _fail(message: str, code: int = EXIT_USAGE):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _emit(body: str, out: str | None = None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(body)
    click.echo(body, nl=not body.endswith("\n"))


def _matrix(path: str):
    try:
        return load_matrix(catalog_path(path))
    except FileNotFoundError as e:
        _fail(str(e))
    except CodeError as e:
        _fail(f"{path}: {e}")


def _code(path: str, wmax: int = 6):
    M = _matrix(path)
    try:
        code = build_css(M)
    except CodeError as e:
        _fail(f"{path}: {e}")
    dist = min_distance(code, wmax)
    return code.with_distance(dist.d), dist


@click.group()
@click.version_option(version=__version__)
def main():
    """Triorthogonal CSS codes and a multi-party quantum computation simulator."""


# ------------------------------------------------------------------ code


@main.group()
def code():
    """Verify and inspect code files.

    PATH may be a file or a catalog entry name; the catalog directory is
    taken from MPQC_CATALOG when set.
    """


@code.command("verify")
@click.argument("path")
@FORMAT
def code_verify(path: str, fmt: str):
    """Check that the matrix in PATH is triorthogonal."""
    M = _matrix(path)
    res = check_triorthogonal(M)
    witness = None if res.ok else [i + 1 for i in res.witness]
    if fmt == "json":
        click.echo(json.dumps({"path": path, "triorthogonal": res.ok, "witness": witness}, sort_keys=True))
    elif res.ok:
        click.echo("triorthogonal")
    else:
        click.echo(f"not triorthogonal: witness (rows {','.join(map(str, witness))})")
    sys.exit(EXIT_OK if res.ok else EXIT_NEGATIVE)


@code.command("info")
@click.argument("path")
@click.option("--wmax", type=click.IntRange(min=1), default=6, show_default=True,
              help="Largest logical weight searched for the distance.")
@click.option("--no-ccz", is_flag=True, help="Skip the transversal CCZ analysis.")
@FORMAT
def code_info(path: str, wmax: int, no_ccz: bool, fmt: str):
    """Print [[n,k,d]] and the transversal CCZ verdict."""
    c, dist = _code(path, wmax)
    d = str(dist.d) if dist.exact else f"d > {wmax}"
    ccz = None
    if not no_ccz and c.k == 1:
        ccz = check_transversal_ccz(c).describe()
    if fmt == "json":
        click.echo(json.dumps({"path": path, "n": c.n, "k": c.k, "d": dist.d, "w_max": wmax,
                               "d_x": dist.d_x, "d_z": dist.d_z, "ccz": ccz}, sort_keys=True))
    else:
        params = f"[[{c.n},{c.k},{dist.d}]]" if dist.exact else f"[[{c.n},{c.k},?]] {d}"
        click.echo(params + (f" ccz: {ccz}" if ccz else ""))


@code.command("list")
def code_list():
    """List catalog entries."""
    for p in sorted(catalog_dir().glob("*.code")):
        click.echo(p.stem)


# ------------------------------------------------------------------- sim


def _sim_setup(code_path, circuit_path, adversary, t, inputs):
    c, _ = _code(code_path)
    if c.d is None:
        _fail("code distance not certified; cannot derive the cheater bound")
    if t is None:
        t = default_t(c)
    msg = bound_violation(t, c.d, c.n)
    if msg:
        _fail(f"rejected: {msg}")
    try:
        circuit = load_circuit(circuit_path, c.n) if circuit_path else Circuit.identity(c.n)
    except (OSError, CircuitError) as e:
        _fail(f"circuit: {e}")
    if inputs:
        labels = [s.strip() for s in inputs.split(",")]
        if len(labels) != c.n or any(s not in SINGLE_QUBIT_STATES for s in labels):
            _fail(f"--inputs needs {c.n} comma-separated states from {' '.join(SINGLE_QUBIT_STATES)}")
    else:
        labels = [circuit.inputs.get(w, "0") for w in range(c.n)]
    try:
        parse_adversary(adversary)
    except AdversaryError as e:
        _fail(f"adversary: {e}")
    return c, circuit, labels, t


def _run(c, circuit, labels, t, r, seed, adversary):
    adv = parse_adversary(adversary)
    try:
        return run_protocol(ProtocolConfig(c, t, r, seed), labels, circuit, adv), adv
    except (ConfigError, AdversaryError) as e:
        _fail(str(e))


def _report(c, code_path, circuit_path, adv_spec, t, r, seed, res) -> dict:
    tr = res.transcript
    return {
        "config": {"code": code_path, "params": f"[[{c.n},{c.k},{c.d}]]", "circuit": circuit_path,
                   "adversary": adv_spec or "honest", "t": t, "r": r, "seed": seed},
        "outcome": "abort" if res.abort else "success",
        "fidelities": [round(f, 12) for f in res.fidelities],
        "joint_fidelity": None if res.joint_fidelity is None else round(res.joint_fidelity, 12),
        "accused": [a + 1 for a in sorted(res.accused)],
        "kappa": tr.kappa,
        "qubit_peak_per_node": tr.qubit_peak_per_node,
        "transcript": tr.to_dict(),
    }


def _text_report(rep: dict) -> str:
    cfg = rep["config"]
    lines = [
        f"code {cfg['params']} from {cfg['code']}; circuit {cfg['circuit'] or 'identity'}",
        f"adversary {cfg['adversary']}; t={cfg['t']} r={cfg['r']} seed={cfg['seed']}",
        f"outcome: {rep['outcome']}",
        "fidelities: " + " ".join(f"{f:.6f}" for f in rep["fidelities"]),
    ]
    if rep["joint_fidelity"] is not None:
        lines.append(f"joint fidelity: {rep['joint_fidelity']:.6f}")
    lines += [
        "accused: " + (" ".join(map(str, rep["accused"])) or "none"),
        f"kappa: {rep['kappa']}",
        f"qubit_peak_per_node: {rep['qubit_peak_per_node']}",
    ]
    for f in rep["transcript"]["failures"]:
        lines.append(f"failure: {f}")
    return "\n".join(lines) + "\n"


SIM_OPTIONS = [
    click.option("--code", "code_path", default="rm15", show_default=True,
                 help="Code file or catalog entry name."),
    click.option("--circuit", "circuit_path", default=None, help="Circuit file (default: identity)."),
    click.option("--adversary", default=None, help="Adversary spec, e.g. 'liar:nodes=3;rounds=all'."),
    click.option("--t", "t", type=int, default=None, help="Tolerated cheaters (default: largest allowed)."),
    click.option("--inputs", default=None, help="Comma-separated input states, one per node."),
]


def _sim_options(f):
    for opt in reversed(SIM_OPTIONS):
        f = opt(f)
    return f


@main.group()
def sim():
    """Run protocol simulations."""


@sim.command("run")
@_sim_options
@click.option("--r", "r", type=click.IntRange(min=1), default=2, show_default=True,
              help="Verification rounds per invocation.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, help="Also write the report body to this file.")
@FORMAT
def sim_run(code_path, circuit_path, adversary, t, inputs, r, seed, out, fmt):
    """Execute one protocol run and print its report."""
    c, circuit, labels, t = _sim_setup(code_path, circuit_path, adversary, t, inputs)
    start = time.perf_counter()
    res, _ = _run(c, circuit, labels, t, r, seed, adversary)
    rep = _report(c, code_path, circuit_path, adversary, t, r, seed, res)
    body = json.dumps(rep, sort_keys=True, indent=2) + "\n" if fmt == "json" else _text_report(rep)
    _emit(body, out)
    click.echo(f"wall time: {time.perf_counter() - start:.3f} s", err=True)
    sys.exit(EXIT_ABORT if res.abort else EXIT_OK)


@sim.command("sweep")
@_sim_options
@click.option("--runs", type=int, required=True, help="Seeded runs per r value.")
@click.option("--r", "rs", type=click.IntRange(min=1), multiple=True, default=(1, 2, 4), show_default=True,
              help="Verification rounds; repeat for several values.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed of the first run.")
@FORMAT
def sim_sweep(code_path, circuit_path, adversary, t, inputs, runs, rs, seed, fmt):
    """Evasion and abort rates over seeded runs for each r.

    A run counts as an evasion when no corrupted node is accused.
    """
    if runs < 1:
        raise click.UsageError("--runs must be at least 1")
    c, circuit, labels, t = _sim_setup(code_path, circuit_path, adversary, t, inputs)
    start = time.perf_counter()
    rows = []
    for r in rs:
        evasions = aborts = 0
        for i in range(runs):
            res, adv = _run(c, circuit, labels, t, r, seed + i, adversary)
            evasions += bool(adv.corrupted) and not (res.accused & adv.corrupted)
            aborts += res.abort
        rows.append({"r": r, "runs": runs, "evasion_rate": evasions / runs, "abort_rate": aborts / runs})
    if fmt == "json":
        click.echo(json.dumps({"adversary": adversary or "honest", "code": code_path, "t": t,
                               "results": rows}, sort_keys=True, indent=2))
    else:
        click.echo(f"adversary {adversary or 'honest'}; code {code_path}; t={t}")
        click.echo(f"{'r':>3} {'runs':>6} {'evasion':>9} {'abort':>9}")
        for row in rows:
            click.echo(f"{row['r']:>3} {row['runs']:>6} {row['evasion_rate']:>9.4f} {row['abort_rate']:>9.4f}")
    click.echo(f"wall time: {time.perf_counter() - start:.3f} s", err=True)


if __name__ == "__main__":
    main()
