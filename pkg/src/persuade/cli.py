"""Command-line front end.

Exit codes: 0 on success, 2 on unreadable or malformed input, 3 on domain or
solver rejection.  ``--threads`` (default from ``PERSUADE_THREADS``) is a
parallelism hint handed to the solvers; they are pure and currently run
single-threaded, so the flag is recorded but does not change results.
"""

from __future__ import annotations

import functools
import sys
import time

import click

from . import serialize
from .analysis import builtin_instance, poe
from .conversion import conversion_certificate, convert_bipooling_to_partitional
from .dp import solve_partitional_dp
from .exceptions import PersuadeError, SchemaError
from .grids import default_grid
from .partition_reduction import (
    certificate_posteriors,
    decode_policy,
    reduce_partition,
    verify_certificate,
)
from .policies import BiPoolingPolicy, PartitionalPolicy, evaluate_bipooling, \
    evaluate_partitional
from .serialize import fraction_str, parse_fraction
from .unrestricted import solve_bipooling_dp


def _guarded(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except SchemaError as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(2)
        except PersuadeError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)

    return wrapper


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _parse_float_list(text: str):
    if not text:
        return ()
    try:
        return tuple(float(parse_fraction(tok)) for tok in text.split(","))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(f"cannot parse list {text!r}: {exc}") from exc


def _load_instance(path: str | None, builtin: str | None, p, c):
    if (path is None) == (builtin is None):
        raise SchemaError("provide exactly one of --instance or --builtin")
    if path is not None:
        return serialize.instance_from_dict(serialize.load_json(path))
    cvals = tuple(int(v) for v in c.split(",")) if c else None
    return builtin_instance(builtin, p=p, c=cvals)


_threads_option = click.option(
    "--threads", type=int, default=None, envvar="PERSUADE_THREADS",
    help="Parallelism hint for the solvers (informational).")


@click.group()
def main():
    """Explainable-signaling solvers for posterior-mean information design."""


@main.command()
@click.option("--instance", "instance_path", type=click.Path(), default=None,
              help="Instance JSON file.")
@click.option("--builtin", default=None,
              help="Built-in instance name instead of a file.")
@click.option("--p", type=float, default=None, help="Parameter of --builtin tight.")
@click.option("--c", default=None, help="Comma list for --builtin reduction.")
@click.option("--k", required=True, type=int, help="Signal budget.")
@click.option("--epsilon", type=float, default=0.05, show_default=True,
              help="Uniform grid resolution.")
@click.option("--mode", type=click.Choice(["partitional", "unrestricted"]),
              default="partitional", show_default=True)
@click.option("--grid-extra", default="", help="Comma list of extra cut candidates.")
@click.option("--out", type=click.Path(), default=None,
              help="Write the policy JSON here.")
@_threads_option
@_guarded
def solve(instance_path, builtin, p, c, k, epsilon, mode, grid_extra, out, threads):
    """Solve one instance and print a one-line summary."""
    instance = _load_instance(instance_path, builtin, p, c)
    grid = default_grid(instance, epsilon, extra=_parse_float_list(grid_extra))
    if mode == "partitional":
        policy, value = solve_partitional_dp(instance, k, grid)
        summary = f"value={value:.6f} cuts={','.join(_fmt(x) for x in policy.cuts)}"
    else:
        policy, value = solve_bipooling_dp(instance, k, grid)
        summary = f"value={value:.6f} signals={policy.num_signals}"
    if out:
        serialize.dump_json(out, serialize.policy_to_dict(policy))
    click.echo(summary)


@main.command()
@click.option("--instance", "instance_path", type=click.Path(), required=True)
@click.option("--policy", "policy_path", type=click.Path(), required=True,
              help="Bi-pooling policy JSON.")
@click.option("--out", type=click.Path(), default=None,
              help="Write the partitional policy JSON here.")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write the conversion certificate JSON here.")
@_threads_option
@_guarded
def convert(instance_path, policy_path, out, report_path, threads):
    """Convert a bi-pooling policy to a partitional one (half-value bound)."""
    instance = serialize.instance_from_dict(serialize.load_json(instance_path))
    policy = serialize.policy_from_dict(serialize.load_json(policy_path))
    if not isinstance(policy, BiPoolingPolicy):
        raise SchemaError("convert expects a bi-pooling policy (segments)")
    converted = convert_bipooling_to_partitional(instance, policy)
    report = conversion_certificate(instance, policy, converted)
    if out:
        serialize.dump_json(out, serialize.policy_to_dict(converted))
    if report_path:
        serialize.dump_json(report_path, {
            "value_original": report.value_original,
            "value_converted": report.value_converted,
            "ratio": report.ratio,
            "guarantee_ok": report.guarantee_ok,
            "segments": [
                {"left": s.left, "right": s.right, "two_signal": s.two_signal,
                 "kept_mean": s.kept_mean, "cut": s.cut,
                 "value_original": s.value_original,
                 "value_converted": s.value_converted}
                for s in report.segments
            ],
        })
    ratio = "n/a" if report.ratio is None else _fmt(report.ratio)
    click.echo(
        f"value_original={_fmt(report.value_original)} "
        f"value_converted={_fmt(report.value_converted)} ratio={ratio} "
        f"cuts={','.join(_fmt(x) for x in converted.cuts)}"
    )


@main.command(name="poe")
@click.option("--instance", "instance_path", type=click.Path(), default=None)
@click.option("--builtin", default=None)
@click.option("--p", type=float, default=None)
@click.option("--c", default=None)
@click.option("--k", required=True, type=int)
@click.option("--epsilon", type=float, default=0.05, show_default=True)
@click.option("--q", "resolution", type=int, default=200, show_default=True,
              help="Fraction resolution of the atomic-prior oracle.")
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Append the result row to this CSV file.")
@_threads_option
@_guarded
def poe_command(instance_path, builtin, p, c, k, epsilon, resolution, csv_path,
                threads):
    """Price of explainability: best-partitional over best-unrestricted."""
    instance = _load_instance(instance_path, builtin, p, c)
    started = time.perf_counter()
    result = poe(instance, k, epsilon=epsilon, resolution=resolution)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    ratio = "" if result.ratio is None else _fmt(result.ratio)
    row = (f"{result.label},{k},{_fmt(epsilon)},{_fmt(result.opt_partitional)},"
           f"{_fmt(result.opt_unrestricted)},{ratio},{_fmt(elapsed_ms)}")
    header = "label,K,epsilon,opt_part,opt,ratio,wall_time_ms"
    if csv_path:
        import pathlib
        path = pathlib.Path(csv_path)
        lines = [] if path.exists() else [header]
        lines.append(row)
        with path.open("a") as fh:
            fh.write("\n".join(lines) + "\n")
    click.echo(header)
    click.echo(row)


@main.command()
@click.option("--c", required=True, help="Comma list of positive integers.")
@click.option("--lipschitz", type=float, default=None,
              help="Emit the sloped-utility variant with this slope.")
@click.option("--out-instance", type=click.Path(), default=None)
@click.option("--out-artifacts", type=click.Path(), default=None)
@_guarded
def reduce(c, lipschitz, out_instance, out_artifacts):
    """Build the exact hard instance for a Partition input."""
    try:
        values = tuple(int(v) for v in c.split(","))
    except ValueError as exc:
        raise SchemaError(f"cannot parse --c {c!r}: {exc}") from exc
    artifacts = reduce_partition(values)
    if out_instance:
        serialize.dump_json(
            out_instance,
            serialize.instance_to_dict(artifacts.float_instance(lipschitz)))
    if out_artifacts:
        serialize.dump_json(out_artifacts, serialize.artifacts_to_dict(artifacts))
    click.echo(f"n={len(values)} K={artifacts.k} d={fraction_str(artifacts.d)} "
               f"T={fraction_str(artifacts.t)}")
    click.echo("X=" + ",".join(fraction_str(x) for x in artifacts.x))


@main.command()
@click.option("--artifacts", "artifacts_path", type=click.Path(), required=True)
@click.option("--cuts", required=True, help="Comma list of exact cut fractions.")
@click.option("--decode", "do_decode", is_flag=True,
              help="Also recover the sign vector on success.")
@_guarded
def verify(artifacts_path, cuts, do_decode):
    """Check a cut list against reduction artifacts, exactly."""
    artifacts = serialize.artifacts_from_dict(serialize.load_json(artifacts_path))
    try:
        cut_values = tuple(parse_fraction(tok) for tok in cuts.split(","))
    except ValueError as exc:
        raise SchemaError(f"cannot parse --cuts: {exc}") from exc
    utility, passed = verify_certificate(artifacts, cut_values)
    xset = artifacts.x_set
    click.echo("interval_midpoint,in_X")
    for mid in certificate_posteriors(artifacts, cut_values):
        click.echo(f"{fraction_str(mid)},{'yes' if mid in xset else 'no'}")
    click.echo(f"pass={'true' if passed else 'false'} "
               f"utility={fraction_str(utility)}")
    if do_decode and passed:
        signs = decode_policy(artifacts, cut_values)
        if signs is not None:
            click.echo("b=" + ",".join(f"{s:+d}" for s in signs))


@main.command(name="eval")
@click.option("--instance", "instance_path", type=click.Path(), required=True)
@click.option("--policy", "policy_path", type=click.Path(), required=True)
@_guarded
def eval_command(instance_path, policy_path):
    """Expected utility of a stored policy on a stored instance."""
    instance = serialize.instance_from_dict(serialize.load_json(instance_path))
    policy = serialize.policy_from_dict(serialize.load_json(policy_path))
    if isinstance(policy, PartitionalPolicy):
        value = evaluate_partitional(instance, policy)
    else:
        value = evaluate_bipooling(instance, policy)
    click.echo(f"value={_fmt(value)}")


if __name__ == "__main__":
    main()
