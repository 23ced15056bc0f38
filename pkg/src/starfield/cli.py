"""Command-line runner: ``eval``, ``check``, ``modes`` and ``pairing``.

Settings come from, in increasing priority: built-in defaults, a config file
(``--config`` or the ``STARFIELD_CONFIG`` environment variable) and flags.
The config file holds ``key = value`` lines; ``#`` starts a comment.

Exit status: 0 success, 1 a check failed, 2 bad input (config, parse or
evaluation error), 3 the Fock truncation is too small for the request.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields, replace
from typing import Dict, Optional, Sequence

from . import checks
from .expr import Environment, EvalError, ParseError, eval_source
from .fock import FockModel, FockOperator, GuardError
from .kleingordon import ConfigurationError, DomainError, KGConfig, ModeTable
from .symalg import AlgebraElement, ModeSpace, PairingForm, dumps, format_scalar, parse_scalar

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3
CONFIG_ENV = "STARFIELD_CONFIG"


class InputError(ValueError):
    """Bad config value or config file."""


@dataclass(frozen=True)
class RunConfig:
    mass: float = 1.0
    L: float = 2 * math.pi
    kmax: int = 1
    Ncap: int = 6
    tolerance: float = 1e-10
    trials: int = 100
    seed: int = 42
    star_form: str = "sigma"
    max_degree: int = 2

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if self.Ncap < 0 or self.max_degree < 0 or self.kmax < 0:
            raise InputError("Ncap, max_degree and kmax must be nonnegative")

    @property
    def kg(self) -> KGConfig:
        return KGConfig(mass=self.mass, L=self.L, kmax=self.kmax)

    def suite_config(self) -> checks.SuiteConfig:
        return checks.SuiteConfig(mass=self.mass, L=self.L, kmax=self.kmax, Ncap=self.Ncap,
                                  tolerance=self.tolerance, trials=self.trials, seed=self.seed,
                                  max_degree=self.max_degree)


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str}


def _coerce(key: str, value: str):
    if key not in _TYPES:
        raise InputError(f"unknown config key {key!r}")
    try:
        return _CASTS[_TYPES[key]](value)
    except ValueError:
        raise InputError(f"bad value for {key}: {value!r}") from None


def read_config_file(path: str) -> Dict[str, object]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise InputError(f"{path}:{n}: expected 'key = value'")
        out[key.strip()] = _coerce(key.strip(), value.strip())
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, object] = {}
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        values.update(read_config_file(path))
    for key in _TYPES:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values)


# -- pairing forms ---------------------------------------------------------------------

def pairing_tsv(form: PairingForm) -> str:
    labels = form.space.labels
    lines = ["label\t" + "\t".join(labels)]
    for lab, row in zip(labels, form.matrix):
        lines.append(lab + "\t" + "\t".join(format_scalar(x) for x in row))
    return "\n".join(lines) + "\n"


def read_pairing_tsv(path: str) -> PairingForm:
    """Inverse of :func:`pairing_tsv`: header row of labels, then one row per label."""
    try:
        with open(path, encoding="utf-8") as fh:
            rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    except OSError as exc:
        raise InputError(f"cannot read pairing {path}: {exc.strerror}") from None
    if not rows or rows[0][0] != "label":
        raise InputError(f"{path}: first row must be 'label' followed by mode labels")
    labels = tuple(rows[0][1:])
    if [r[0] for r in rows[1:]] != list(labels):
        raise InputError(f"{path}: row labels must repeat the header labels in order")
    try:
        mat = tuple(tuple(parse_scalar(x) for x in r[1:]) for r in rows[1:])
        return PairingForm(ModeSpace(labels), mat, "custom")
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def make_environment(cfg: RunConfig) -> Environment:
    if cfg.star_form in ("sigma", "wick"):
        model = FockModel(ModeTable.default(cfg.kg), cfg.Ncap)
        form = model.sigma if cfg.star_form == "sigma" else model.wick
        return Environment(model.table.space, form, model, {"sigma": model.sigma, "wick": model.wick})
    form = read_pairing_tsv(cfg.star_form)
    return Environment(form.space, form, None, {"custom": form})


# -- commands ----------------------------------------------------------------------------

def describe_operator(op: FockOperator) -> str:
    dim = op.space.dim
    if op.is_zero():
        return f"zero (dim {dim})"
    if (op.matrix != FockOperator.identity(op.space).matrix).nnz == 0:
        return f"identity (dim {dim})"
    return f"operator (dim {dim}, nnz {op.matrix.nnz}, formal degree {op.formal_degree})"


def cmd_eval(src: str, cfg: RunConfig, out) -> int:
    env = make_environment(cfg)
    value = eval_source(src, env)
    if isinstance(value, AlgebraElement):
        print(dumps(value), file=out)
    else:
        print(describe_operator(value), file=out)
    return EXIT_OK


def cmd_check(suite: str, cfg: RunConfig, out) -> int:
    result = checks.run(suite, cfg.suite_config())
    for line in result.lines:
        print(line, file=out)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_modes(cfg: RunConfig, out) -> int:
    out.write(ModeTable.default(cfg.kg).tsv())
    return EXIT_OK


def cmd_pairing(which: Optional[str], cfg: RunConfig, out) -> int:
    if which is not None:
        cfg = replace(cfg, star_form=which)
    out.write(pairing_tsv(make_environment(cfg).form))
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"config file (default: ${CONFIG_ENV})")
    common.add_argument("--mass", type=float)
    common.add_argument("--L", type=float, help="circle length")
    common.add_argument("--kmax", type=int)
    common.add_argument("--Ncap", "--ncap", dest="Ncap", type=int, help="Fock truncation")
    common.add_argument("--tolerance", type=float)
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--star-form", dest="star_form",
                        help="sigma, wick, or a path to a pairing TSV")
    common.add_argument("--max-degree", dest="max_degree", type=int)

    p = argparse.ArgumentParser(prog="starfield", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    e = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    e.add_argument("expression")
    c = sub.add_parser("check", parents=[common], help="run an invariant suite")
    c.add_argument("suite", choices=checks.SUITES + ("all",))
    sub.add_parser("modes", parents=[common], help="print the mode table")
    pr = sub.add_parser("pairing", parents=[common], help="print a pairing matrix as TSV")
    pr.add_argument("form", nargs="?", help="sigma, wick, or a pairing TSV path")
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "eval":
            return cmd_eval(args.expression, cfg, out)
        if args.command == "check":
            return cmd_check(args.suite, cfg, out)
        if args.command == "modes":
            return cmd_modes(cfg, out)
        return cmd_pairing(args.form, cfg, out)
    except GuardError as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EvalError, InputError, ConfigurationError, DomainError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
