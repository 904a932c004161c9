"""Command-line interface: check, validate, tasks, config.

Exit codes: 0 success (including SAT-class outcomes), 1 UNSAT/violation
outcomes, 2 usage or input errors. Warnings and diagnostics go to standard
error; data (exports, JSON reports) goes to standard output or files.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .analyzer import analyze
from .config import (ConfigFile, clone_config, default_config, delete_config,
                     parse_config_file, rename_config, serialize_config_file, validate)
from .diagnostics import InputError
from .finder import FinderProblem, FinderResult, InvalidProblem, enumerate_all, find
from .model import check_well_formed
from .parsing import parse_model, parse_state_commands
from .state import EMPTY_STATE, export_dot, export_json
from .tasks import check_consistency, check_independence, run_all_independence


class CliError(Exception):
    """Usage or input failure; maps to exit code 2."""


def _load_model(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read model file: {e}")
    try:
        model = parse_model(text, path)
    except InputError as e:
        raise CliError("\n".join(str(d) for d in e.diagnostics))
    errors = check_well_formed(model)
    if errors:
        raise CliError("\n".join(str(d) for d in errors))
    return model


def _load_config_file(path: str, model) -> ConfigFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read configuration file: {e}")
    try:
        return parse_config_file(text, model, path)
    except InputError as e:
        raise CliError("\n".join(str(d) for d in e.diagnostics))


def _pick_config(cfile: ConfigFile, name):
    if name is not None:
        if name not in cfile.configs:
            raise CliError(f"no configuration named '{name}'; available: "
                           + ", ".join(cfile.configs))
        return name, cfile.configs[name]
    if len(cfile.configs) == 1:
        only = next(iter(cfile.configs))
        return only, cfile.configs[only]
    raise CliError("--config required; available: " + ", ".join(cfile.configs))


def _check_config(config, model):
    errors = validate(config, model)
    if errors:
        raise CliError("\n".join(str(e) for e in errors))


def cmd_check(args) -> int:
    model = _load_model(args.model)
    config = default_config(model)
    if args.properties:
        cfile = _load_config_file(args.properties, model)
        _, config = _pick_config(cfile, args.config)
    for w in analyze(model, config):
        print(w.message, file=sys.stderr)
    print(f"model {model.name}: {len(model.classes)} classes, "
          f"{len(model.associations)} associations, {len(model.invariants)} invariants")
    return 0


def cmd_validate(args) -> int:
    model = _load_model(args.model)
    cfile = _load_config_file(args.properties, model)
    name, config = _pick_config(cfile, args.config)
    if args.bitwidth is not None:
        config = config.clone()
        config.bitwidth = args.bitwidth
    _check_config(config, model)
    for w in analyze(model, config):
        print(w.message, file=sys.stderr)
    base = EMPTY_STATE
    if args.state:
        try:
            base = parse_state_commands(Path(args.state).read_text(encoding="utf-8"),
                                        model, args.state)
        except OSError as e:
            raise CliError(f"cannot read state file: {e}")
        except InputError as e:
            raise CliError("\n".join(str(d) for d in e.diagnostics))
    problem = FinderProblem(model, config, base, args.timeout)
    try:
        if args.limit is not None:
            states = enumerate_all(problem, args.limit)
            results = [FinderResult("SAT", s) for s in states]
            verdict = "SAT" if states else "UNSAT"
            stats = None
        else:
            res = find(problem)
            results = [res] if res.state is not None else []
            verdict, stats = res.verdict, res.stats
    except InvalidProblem as e:
        raise CliError(str(e))
    for i, res in enumerate(results):
        _write_state(res.state, args, name, i if args.limit is not None else None)
    if stats is not None:
        print(f"{verdict} ({stats.decisions} decisions, {stats.elapsed:.2f}s)")
    else:
        print(f"{verdict} ({len(results)} states)")
    return 0 if verdict == "SAT" else 1


def _write_state(state, args, config_name, index):
    suffix = "dot" if args.out == "dot" else "json"
    text = export_dot(state) if args.out == "dot" else export_json(state)
    stem = args.output or (Path(args.model).stem + "." + config_name)
    path = Path(f"{stem}.{index}.{suffix}" if index is not None else f"{stem}.{suffix}")
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}")


def cmd_tasks(args) -> int:
    model = _load_model(args.model)
    cfile = _load_config_file(args.properties, model)
    _, config = _pick_config(cfile, args.config)
    _check_config(config, model)
    task = args.task
    if task == "consistency":
        reports = [check_consistency(model, config, deadline=args.timeout)]
    elif task == "independence":
        reports = run_all_independence(model, config, deadline=args.timeout)
    elif task.startswith("independence:"):
        inv = task.split(":", 1)[1]
        if model.get_invariant(inv) is None:
            raise CliError(f"unknown invariant '{inv}'")
        reports = [check_independence(model, config, inv, deadline=args.timeout)]
    else:
        raise CliError(f"unknown task '{task}'")
    if args.json:
        print(json.dumps([r.to_obj() for r in reports], indent=2))
    else:
        for r in reports:
            print(r.render())
            if r.witness is not None and args.out:
                stem = args.output or Path(args.model).stem
                tag = (r.invariant or r.task).replace("::", ".")
                path = Path(f"{stem}.{tag}.{args.out}")
                text = export_dot(r.witness) if args.out == "dot" else export_json(r.witness)
                path.write_text(text, encoding="utf-8")
                print(f"  witness: {path}")
    bad = any(r.outcome != "holds" for r in reports)
    return 1 if bad else 0


def cmd_config(args) -> int:
    model = _load_model(args.model)
    cfile = _load_config_file(args.properties, model)
    op = args.operation
    try:
        if op == "list":
            for n in cfile.configs:
                print(n)
            return 0
        if op == "clone":
            if not args.names:
                raise CliError("clone needs a source name")
            cfile = clone_config(cfile, args.names[0],
                                 args.names[1] if len(args.names) > 1 else None)
        elif op == "rename":
            if len(args.names) != 2:
                raise CliError("rename needs OLD and NEW names")
            cfile = rename_config(cfile, args.names[0], args.names[1])
        elif op == "delete":
            if len(args.names) != 1:
                raise CliError("delete needs exactly one name")
            cfile = delete_config(cfile, args.names[0])
        else:
            raise CliError(f"unknown operation '{op}'")
    except InputError as e:
        raise CliError("\n".join(str(d) for d in e.diagnostics))
    Path(args.properties).write_text(serialize_config_file(cfile), encoding="utf-8")
    print(f"wrote {args.properties}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modelfinder",
                                description="Bounded validator for UML/OCL class models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse a model and print static warnings")
    c.add_argument("model")
    c.add_argument("--properties", help="configuration file for the bitwidth scan")
    c.add_argument("--config", help="configuration name within the file")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("validate", help="search for a satisfying state within bounds")
    v.add_argument("model")
    v.add_argument("properties", help="configuration file")
    v.add_argument("--config", help="configuration name (default: the only one)")
    v.add_argument("--state", help="partial state command file to extend")
    v.add_argument("--bitwidth", type=int, help="override the configured bitwidth")
    v.add_argument("--out", choices=("dot", "json"), default="dot")
    v.add_argument("--output", help="output file stem")
    v.add_argument("--limit", type=int, help="enumerate up to N states")
    v.add_argument("--timeout", type=float, help="wall-clock limit in seconds")
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("tasks", help="run verification tasks")
    t.add_argument("model")
    t.add_argument("properties")
    t.add_argument("--config")
    t.add_argument("--task", required=True,
                   help="consistency | independence | independence:Class::name")
    t.add_argument("--json", action="store_true", help="machine-readable output")
    t.add_argument("--out", choices=("dot", "json"), help="also export witnesses")
    t.add_argument("--output", help="witness file stem")
    t.add_argument("--timeout", type=float)
    t.set_defaults(func=cmd_tasks)

    g = sub.add_parser("config", help="manage named configurations in a file")
    g.add_argument("operation", choices=("list", "clone", "rename", "delete"))
    g.add_argument("model")
    g.add_argument("properties")
    g.add_argument("names", nargs="*")
    g.set_defaults(func=cmd_config)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        return args.func(args)
    except CliError as e:
        print(str(e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
